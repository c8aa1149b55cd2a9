from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpus_util  # noqa: E402

# Golden vocabulary ids at resolution 512.
B, N, P, BOS, EOS, PAD = 512, 513, 514, 515, 516, 517


def vtok(k: int) -> list[int]:
    """Coordinate triple of golden-mesh vertex label k (placed at (k,k,k))."""
    return [k, k, k]


# The pinned 46-token output for the 8-face golden mesh, hand-traced from
# the traversal rules: anchor of face (2,3,1) is 2->3 with apex 1; apex 1 is
# the only interior vertex so the walk opens with B 1 2 3, N-moves to
# (1,3,4) then (4,3,5), restarts at (1,4,6) re-emitting B 6 1 4, P-chains
# through (1,6,7),(1,7,8),(1,8,2), and N-finishes at (2,8,9).
GOLDEN_IDS = (
    [BOS, B] + vtok(1) + vtok(2) + vtok(3)
    + [N] + vtok(4)
    + [N] + vtok(5)
    + [B] + vtok(6) + vtok(1) + vtok(4)
    + [P] + vtok(7)
    + [P] + vtok(8)
    + [P] + vtok(2)
    + [N] + vtok(9)
    + [EOS]
)

# 0-based golden face list (labels 1..9 shifted down by one).
GOLDEN_FACES = [(1, 2, 0), (0, 2, 3), (3, 2, 4), (0, 3, 5),
                (0, 5, 6), (0, 6, 7), (0, 7, 1), (1, 7, 8)]


@pytest.fixture(scope="session")
def golden_mesh():
    return corpus_util.golden_mesh()


@pytest.fixture(scope="session")
def full_corpus():
    return corpus_util.corpus()


@pytest.fixture(scope="session")
def small_corpus(full_corpus):
    """Sub-200-face subset for per-module property tests that loop a lot."""
    return [(n, m) for n, m in full_corpus if m.n_faces <= 200]
