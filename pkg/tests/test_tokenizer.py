from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus_util
from conftest import B, BOS, EOS, GOLDEN_IDS, N, P, PAD
from edgetok import (
    DegenerateMeshError,
    QuantizedMesh,
    Vocabulary,
    stats,
    tokenize,
    tokenize_fixed_side_baseline,
    tokenize_naive,
)

FACE_TYPE_IDS = {B, N, P}


def _coords(mesh, vid):
    return mesh.vertices[vid].tolist()


class TestGolden:
    def test_exact_sequence(self, golden_mesh):
        seq = tokenize(golden_mesh)
        assert seq.ids == GOLDEN_IDS
        assert len(seq.ids) == 46
        assert seq.subsequences == 2

    def test_fixed_side_baseline(self, golden_mesh):
        seq = tokenize_fixed_side_baseline(golden_mesh)
        # restarts at input faces 0, 3, 4, 5, 6: five sub-sequences
        assert seq.subsequences == 5
        assert len(seq.ids) == 2 + 3 * 8 + 7 * 5 == 61

    def test_naive(self, golden_mesh):
        seq = tokenize_naive(golden_mesh)
        assert len(seq.ids) == 74
        assert seq.ids[0] == BOS and seq.ids[-1] == EOS

    def test_subsequence_advantage(self, golden_mesh):
        assert tokenize(golden_mesh).subsequences == 2
        assert tokenize_fixed_side_baseline(golden_mesh).subsequences == 5


class TestHandTraces:
    def test_single_triangle(self):
        mesh = QuantizedMesh(resolution=512,
                             vertices=[[10, 11, 12], [20, 21, 22], [30, 31, 32]],
                             faces=[[0, 1, 2]])
        seq = tokenize(mesh)
        # anchor 0->1, apex 2: B v2 v0 v1
        assert seq.ids == [BOS, B, 30, 31, 32, 10, 11, 12, 20, 21, 22, EOS]
        assert len(seq.ids) == 12

    def test_two_triangle_strip(self):
        # anchor 0->1 of face (0,1,2): apex 2 is boundary, the next-twin
        # side is open (counts visited), the prev-twin side is face (0,2,3),
        # so the move is P. Length law: 2 + 4*2 + 6*1 = 16.
        mesh = QuantizedMesh(
            resolution=512,
            vertices=[[1, 1, 1], [2, 2, 2], [3, 3, 3], [4, 4, 4]],
            faces=[[0, 1, 2], [0, 2, 3]],
        )
        seq = tokenize(mesh)
        expected = [BOS, B, 3, 3, 3, 1, 1, 1, 2, 2, 2, P, 4, 4, 4, EOS]
        assert seq.ids == expected
        assert seq.subsequences == 1
        face_types = [t for t in seq.ids if t in FACE_TYPE_IDS]
        assert face_types == [B, P]

    def test_tetrahedron_trace(self):
        mesh = corpus_util.tetrahedron()
        seq = tokenize(mesh)
        c = lambda k: _coords(mesh, k)
        expected = (
            [BOS, B] + c(2) + c(0) + c(1)
            + [N] + c(3)
            + [N] + c(0)
            + [P] + c(2)
            + [EOS]
        )
        assert seq.ids == expected
        assert len(seq.ids) == 24
        assert seq.subsequences == 1

    def test_two_by_two_grid_trace(self):
        mesh = corpus_util.grid_mesh(3, 3)
        seq = tokenize(mesh)
        c = lambda k: _coords(mesh, k)
        # grid vertices are row-major v(i,j) = i*3 + j; trace pinned by hand
        v = lambda i, j: i * 3 + j
        expected = (
            [BOS, B] + c(v(1, 1)) + c(v(0, 0)) + c(v(1, 0))
            + [N] + c(v(2, 1))
            + [N] + c(v(2, 0))
            + [B] + c(v(2, 2)) + c(v(1, 1)) + c(v(2, 1))
            + [P] + c(v(1, 2))
            + [P] + c(v(0, 1))
            + [N] + c(v(0, 2))
            + [B] + c(v(0, 0)) + c(v(1, 1)) + c(v(0, 1))
            + [EOS]
        )
        assert seq.ids == expected
        assert len(seq.ids) == 2 + 4 * 8 + 6 * 3 == 52
        assert seq.subsequences == 3

    def test_closed_fan_single_subsequence(self):
        for k in (5, 9, 16):
            seq = tokenize(corpus_util.fan_mesh(k, closed=True))
            assert seq.subsequences == 1

    def test_pillow(self):
        mesh = corpus_util.pillow()
        seq = tokenize(mesh)
        assert len(seq.ids) == 2 + 4 * 2 + 6 * 1
        assert seq.subsequences == 1


class TestLaws:
    def test_length_law(self, full_corpus):
        for name, mesh in full_corpus:
            seq = tokenize(mesh)
            assert len(seq.ids) == 2 + 4 * mesh.n_faces + 6 * seq.subsequences, name

    def test_fixed_side_length_law(self, full_corpus):
        for name, mesh in full_corpus:
            seq = tokenize_fixed_side_baseline(mesh)
            assert len(seq.ids) == 2 + 3 * mesh.n_faces + 7 * seq.subsequences, name

    def test_naive_length_law(self, full_corpus):
        for name, mesh in full_corpus:
            assert len(tokenize_naive(mesh).ids) == 2 + 9 * mesh.n_faces, name

    def test_face_conservation(self, small_corpus):
        for name, mesh in small_corpus:
            seq = tokenize(mesh)
            n_face_tokens = sum(1 for t in seq.ids if t in FACE_TYPE_IDS)
            assert n_face_tokens == mesh.n_faces, name

    def test_ratio_relation_to_naive(self, small_corpus):
        for name, mesh in small_corpus:
            ours = tokenize(mesh)
            naive = tokenize_naive(mesh)
            f, s = mesh.n_faces, ours.subsequences
            assert len(ours.ids) / len(naive.ids) == (4 * f + 6 * s + 2) / (9 * f + 2), name

    def test_bos_eos_framing(self, small_corpus):
        for name, mesh in small_corpus:
            for fn in (tokenize, tokenize_fixed_side_baseline, tokenize_naive):
                ids = fn(mesh).ids
                assert ids[0] == BOS and ids[-1] == EOS, name
                assert ids.count(BOS) == 1 and ids.count(EOS) == 1, name

    def test_pad_never_emitted(self, small_corpus):
        for name, mesh in small_corpus:
            for fn in (tokenize, tokenize_fixed_side_baseline, tokenize_naive):
                assert PAD not in fn(mesh).ids, name

    def test_coord_groups_are_input_vertices(self, small_corpus):
        # every 3-coord group after a face-type token is some input vertex
        for name, mesh in small_corpus:
            cells = {tuple(v) for v in mesh.vertices.tolist()}
            ids = tokenize(mesh).ids
            i = 1
            while ids[i] != EOS:
                tid = ids[i]
                assert tid in FACE_TYPE_IDS, name
                groups = 3 if tid == B else 1
                i += 1
                for _ in range(groups):
                    assert tuple(ids[i:i + 3]) in cells, name
                    i += 3

    def test_structure_after_b(self, small_corpus):
        # B is always followed by exactly 9 coord ids before the next
        # face-type token or EOS
        for name, mesh in small_corpus:
            ids = tokenize(mesh).ids
            for i, tid in enumerate(ids):
                if tid == B:
                    run = ids[i + 1:i + 10]
                    assert len(run) == 9 and all(t < 512 for t in run), name


def _components(mesh) -> int:
    parent = list(range(mesh.n_faces))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    import edgetok
    hem = edgetok.build(mesh)
    for h in range(hem.n_halfedges):
        t = int(hem.twin[h])
        if t >= 0:
            a, b = find(int(hem.face[h])), find(int(hem.face[t]))
            if a != b:
                parent[a] = b
    return len({find(f) for f in range(mesh.n_faces)})


class TestSubsequences:
    def test_at_least_components(self, small_corpus):
        for name, mesh in small_corpus:
            assert tokenize(mesh).subsequences >= _components(mesh), name

    def test_two_components(self):
        # two disjoint triangles: S must be 2
        mesh = QuantizedMesh(
            resolution=512,
            vertices=[[1, 1, 1], [2, 2, 2], [3, 3, 3],
                      [10, 10, 10], [11, 11, 11], [12, 12, 12]],
            faces=[[0, 1, 2], [3, 4, 5]],
        )
        assert tokenize(mesh).subsequences == 2

    def test_never_more_than_fixed_side_on_corpus_mean(self, full_corpus):
        ours = np.mean([tokenize(m).subsequences for _, m in full_corpus])
        fixed = np.mean([tokenize_fixed_side_baseline(m).subsequences for _, m in full_corpus])
        assert ours < fixed


class TestDeterminism:
    def test_repeat_identical(self, golden_mesh):
        assert tokenize(golden_mesh).ids == tokenize(golden_mesh).ids

    def test_fresh_arrays_identical(self, golden_mesh):
        copy = QuantizedMesh(resolution=golden_mesh.resolution,
                             vertices=golden_mesh.vertices.copy(),
                             faces=golden_mesh.faces.copy())
        assert tokenize(copy).ids == tokenize(golden_mesh).ids

    def test_does_not_mutate_input(self, golden_mesh):
        verts = golden_mesh.vertices.copy()
        faces = golden_mesh.faces.copy()
        tokenize(golden_mesh)
        assert np.array_equal(golden_mesh.vertices, verts)
        assert np.array_equal(golden_mesh.faces, faces)


class TestStats:
    def test_golden_row(self, golden_mesh):
        seq = tokenize(golden_mesh)
        st_ = stats(seq, golden_mesh, elapsed=0.001)
        assert st_.faces == 8
        assert st_.vertices == 9
        assert st_.token_count == 46
        assert st_.subsequences == 2
        assert st_.tokens_per_face == 5.5
        assert st_.compression_ratio == pytest.approx(44 / 72)
        assert st_.tokenize_seconds == 0.001

    def test_single_triangle_exceeds_naive(self):
        mesh = QuantizedMesh(resolution=512,
                             vertices=[[0, 0, 0], [1, 1, 1], [2, 2, 2]],
                             faces=[[0, 1, 2]])
        st_ = stats(tokenize(mesh), mesh, 0.0)
        assert st_.compression_ratio == pytest.approx(10 / 9)

    def test_long_strip_approaches_four_ninths(self):
        mesh = corpus_util.strip_mesh(400)
        seq = tokenize(mesh)
        st_ = stats(seq, mesh, 0.0)
        assert seq.subsequences == 1
        assert 4.0 < st_.tokens_per_face < 4.02
        assert st_.compression_ratio < 0.45

    def test_naive_ratio_is_one(self, golden_mesh):
        st_ = stats(tokenize_naive(golden_mesh), golden_mesh, 0.0)
        assert st_.compression_ratio == 1.0
        assert st_.tokens_per_face == 9.0

    def test_json_field_names(self, golden_mesh):
        d = stats(tokenize(golden_mesh), golden_mesh, 0.5).to_json_dict()
        assert set(d) == {"faces", "vertices", "tokens", "subsequences",
                          "tokens_per_face", "compression_ratio", "tokenize_seconds"}
        assert d["tokens"] == 46


class TestErrors:
    def test_zero_faces(self):
        mesh = QuantizedMesh(resolution=512, vertices=[[0, 0, 0]], faces=[])
        with pytest.raises(DegenerateMeshError):
            tokenize(mesh)
        with pytest.raises(DegenerateMeshError):
            tokenize_fixed_side_baseline(mesh)
        with pytest.raises(ValueError):
            tokenize_naive(mesh)


class TestTokenSequence:
    def test_tokens_view(self, golden_mesh):
        seq = tokenize(golden_mesh)
        toks = seq.tokens
        assert len(toks) == len(seq.ids)
        vocab = Vocabulary(512)
        assert [vocab.id_of(t) for t in toks] == seq.ids

    @given(st.integers(2, 40), st.integers(2, 12))
    @settings(max_examples=25, deadline=None)
    def test_length_law_random_grids(self, nx, ny):
        mesh = corpus_util.grid_mesh(nx, ny)
        seq = tokenize(mesh)
        assert len(seq.ids) == 2 + 4 * mesh.n_faces + 6 * seq.subsequences
