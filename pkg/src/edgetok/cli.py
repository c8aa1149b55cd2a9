"""Command-line surface: tokenize, detokenize, roundtrip, mask, bench, prep.

Machine-readable JSON goes to stdout, diagnostics to stderr. Exit codes:

    0  success
    1  unreadable mesh content (OBJ parse error, degenerate/empty mesh,
       out-of-range coordinates)
    2  non-manifold connectivity (offending directed edges reported)
    3  I/O failure
    4  ungrammatical or structurally invalid token stream
    5  roundtrip mismatch (tokenize/detokenize disagreement; should not
       happen on manifold input)

``EDGETOK_JOBS`` provides the default for every ``--jobs`` flag.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import ertk
from .detokenizer import detokenize
from .errors import (
    DegenerateMeshError,
    ErtkFormatError,
    IllegalTokenError,
    NonManifoldError,
    ObjParseError,
    QuantizationRangeError,
)
from .grammar import Vocabulary, advance, allowed_next, initial_state, mask_to_bitset
from .mesh_core import (
    QuantizedMesh,
    RawMesh,
    canonically_equal,
    clean,
    normalize,
    parse_obj,
    quantize,
    write_obj,
)
from .tokenizer import (
    TokenSequence,
    stats,
    tokenize,
    tokenize_fixed_side_baseline,
    tokenize_naive,
)

EX_OK = 0
EX_PARSE = 1
EX_NONMANIFOLD = 2
EX_IO = 3
EX_UNGRAMMATICAL = 4
EX_ROUNDTRIP = 5

TOKENIZERS = (
    ("ours", tokenize),
    ("fixed-side", tokenize_fixed_side_baseline),
    ("naive", tokenize_naive),
)


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("EDGETOK_JOBS", "1")))
    except ValueError:
        return 1


def _load_quantized(path: Path, resolution: int) -> QuantizedMesh:
    """OBJ file -> cleaned QuantizedMesh (normalize -> quantize -> clean)."""
    raw = parse_obj(path.read_text())
    unit, _ = normalize(raw)
    return clean(quantize(unit, resolution))


def _print_json(obj) -> None:
    json.dump(obj, sys.stdout)
    sys.stdout.write("\n")
    sys.stdout.flush()


def _err(message: str) -> None:
    print(f"edgetok: {message}", file=sys.stderr)


# ---------------------------------------------------------------- tokenize


def cmd_tokenize(args) -> int:
    in_path = Path(args.input)
    mesh = _load_quantized(in_path, args.resolution)
    t0 = time.perf_counter()
    seq = tokenize(mesh)
    elapsed = time.perf_counter() - t0

    if args.output:
        out_path = Path(args.output)
    else:
        suffix = ".ertk" if args.format == "ertk" else ".tokens.json"
        out_path = in_path.with_suffix(suffix)
    if args.format == "ertk":
        ertk.write_token_file(out_path, seq)
    else:
        out_path.write_text(json.dumps({"resolution": seq.resolution, "ids": seq.ids}))

    _print_json(stats(seq, mesh, elapsed).to_json_dict())
    return EX_OK


# -------------------------------------------------------------- detokenize


def cmd_detokenize(args) -> int:
    seq = ertk.read_token_file(Path(args.input))
    mesh = detokenize(seq, keep_degenerate=args.keep_degenerate)
    out_path = Path(args.output) if args.output else Path(args.input).with_suffix(".obj")
    out_path.write_text(write_obj(mesh))
    _print_json({"vertices": mesh.n_vertices, "faces": mesh.n_faces,
                 "output": str(out_path)})
    return EX_OK


# --------------------------------------------------------------- roundtrip


def cmd_roundtrip(args) -> int:
    mesh = _load_quantized(Path(args.input), args.resolution)
    t0 = time.perf_counter()
    seq = tokenize(mesh)
    elapsed = time.perf_counter() - t0
    recovered = detokenize(seq)
    equal = canonically_equal(mesh, recovered)
    report = stats(seq, mesh, elapsed).to_json_dict()
    report["roundtrip_equal"] = equal
    _print_json(report)
    if not equal:
        _err("roundtrip mismatch: detokenized mesh differs from input")
        return EX_ROUNDTRIP
    return EX_OK


# -------------------------------------------------------------------- mask


def cmd_mask(args) -> int:
    source = args.input
    if os.path.exists(source):
        seq = ertk.read_token_file(Path(source))
        ids, resolution = seq.ids, seq.resolution
    else:
        try:
            ids = [int(part) for part in source.replace(",", " ").split()]
        except ValueError:
            _err(f"input is neither a file nor an id list: {source!r}")
            return EX_PARSE
        resolution = args.resolution

    vocab = Vocabulary(resolution, include_face_buckets=args.buckets)
    state = initial_state(vocab)
    for pos, tid in enumerate(ids):
        try:
            state = advance(state, tid, position=pos)
        except (IllegalTokenError, ValueError):
            _err(f"invalid prefix at index {pos} (token id {tid})")
            return EX_UNGRAMMATICAL
    mask = allowed_next(state)
    if args.bitset:
        Path(args.bitset).write_bytes(mask_to_bitset(mask))
    _print_json([int(i) for i in np.flatnonzero(mask)])
    return EX_OK


# ------------------------------------------------------------------- bench


def _bench_one(task: tuple[str, int]) -> dict:
    """Worker: run all three tokenizers on one mesh file."""
    path, resolution = task
    try:
        mesh = _load_quantized(Path(path), resolution)
        rows = {}
        for name, fn in TOKENIZERS:
            t0 = time.perf_counter()
            seq = fn(mesh)
            dt = time.perf_counter() - t0
            st = stats(seq, mesh, dt)
            rows[name] = {
                "compression_ratio": st.compression_ratio,
                "subsequences": st.subsequences,
                "tokens_per_face": st.tokens_per_face,
                "tokenize_seconds": st.tokenize_seconds,
            }
        return {"path": path, "faces": mesh.n_faces, "rows": rows}
    except NonManifoldError as exc:
        return {"path": path, "error": str(exc), "kind": "nonmanifold"}
    except (ObjParseError, DegenerateMeshError, QuantizationRangeError, ValueError) as exc:
        return {"path": path, "error": str(exc), "kind": "parse"}


def _aggregate_bench(results: list[dict], resolution: int, jobs: int,
                     wall_seconds: float, skipped: list[dict]) -> dict:
    rows = []
    for name, _ in TOKENIZERS:
        ratios = [r["rows"][name]["compression_ratio"] for r in results]
        subs = [r["rows"][name]["subsequences"] for r in results]
        tpf = [r["rows"][name]["tokens_per_face"] for r in results]
        secs = sum(r["rows"][name]["tokenize_seconds"] for r in results)
        rows.append({
            "name": name,
            "compression_ratio": float(np.mean(ratios)),
            "subsequences": float(np.mean(subs)),
            "tokens_per_face": float(np.mean(tpf)),
            "meshes_per_second": len(results) / secs if secs > 0 else math.inf,
        })
    faces = [r["faces"] for r in results]
    return {
        "corpus": {
            "meshes": len(results),
            "faces_min": min(faces),
            "faces_max": max(faces),
            "resolution": resolution,
            "skipped": len(skipped),
            "jobs": jobs,
            "wall_seconds": wall_seconds,
            "wall_meshes_per_second": len(results) / wall_seconds if wall_seconds > 0 else math.inf,
        },
        "rows": rows,
    }


def _format_table(report: dict) -> str:
    headers = ("tokenizer", "compression_ratio", "subsequences",
               "tokens_per_face", "meshes_per_second")
    lines = [headers]
    for row in report["rows"]:
        lines.append((
            row["name"],
            f"{row['compression_ratio']:.4f}",
            f"{row['subsequences']:.2f}",
            f"{row['tokens_per_face']:.3f}",
            f"{row['meshes_per_second']:.1f}",
        ))
    widths = [max(len(line[i]) for line in lines) for i in range(len(headers))]
    return "\n".join(
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip()
        for line in lines
    )


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    paths = sorted(str(p) for p in corpus.glob("*.obj"))
    if not paths:
        _err(f"no .obj meshes in {corpus}")
        return EX_PARSE

    tasks = [(p, args.resolution) for p in paths]
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_bench_one, tasks, chunksize=max(1, len(tasks) // (4 * args.jobs))))
    else:
        outcomes = [_bench_one(t) for t in tasks]
    wall = time.perf_counter() - t0

    results = [o for o in outcomes if "error" not in o]
    failures = [o for o in outcomes if "error" in o]
    for f in failures:
        _err(f"{f['path']}: {f['error']}")
    if failures and not args.skip_invalid:
        return EX_NONMANIFOLD if any(f["kind"] == "nonmanifold" for f in failures) else EX_PARSE
    if not results:
        _err("no valid meshes in corpus")
        return EX_PARSE

    report = _aggregate_bench(results, args.resolution, args.jobs, wall, failures)
    print(_format_table(report), file=sys.stderr)
    _print_json(report)
    return EX_OK


# -------------------------------------------------------------------- prep


def _file_rng(seed: int, name: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def _rotate_vertical(raw: RawMesh, degrees: float) -> RawMesh:
    """Rotate about the vertical (Y) axis through the bbox center."""
    th = math.radians(degrees)
    c, s = math.cos(th), math.sin(th)
    rot = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    center = (raw.vertices.min(axis=0) + raw.vertices.max(axis=0)) / 2.0
    return RawMesh(vertices=(raw.vertices - center) @ rot.T + center, faces=raw.faces)


def _prep_one(task: tuple[str, str, int, tuple[float, float] | None, float | None, int]) -> dict:
    in_path, out_path, resolution, scale_range, rotate_max, seed = task
    try:
        rng = _file_rng(seed, Path(in_path).name)
        raw = parse_obj(Path(in_path).read_text())
        if rotate_max is not None:
            raw = _rotate_vertical(raw, float(rng.uniform(-rotate_max, rotate_max)))
        unit, _ = normalize(raw)
        if scale_range is not None:
            # Shrink about the cube center; no re-fit afterwards, so the
            # longest axis extent equals the sampled factor.
            factor = float(rng.uniform(scale_range[0], scale_range[1]))
            unit = RawMesh(vertices=0.5 + (unit.vertices - 0.5) * factor, faces=unit.faces)
        mesh = clean(quantize(unit, resolution))
        Path(out_path).write_text(write_obj(mesh))
        return {"path": in_path, "output": out_path,
                "vertices": mesh.n_vertices, "faces": mesh.n_faces}
    except Exception as exc:  # per-file skip, keep the batch going
        return {"path": in_path, "error": str(exc)}


def cmd_prep(args) -> int:
    in_dir = Path(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = sorted(in_dir.glob("*.obj"))
    if not paths:
        _err(f"no .obj meshes in {in_dir}")
        return EX_PARSE

    scale_range = tuple(args.scale_jitter) if args.scale_jitter else None
    tasks = [
        (str(p), str(out_dir / p.name), args.resolution, scale_range,
         args.rotate_max, args.seed)
        for p in paths
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_prep_one, tasks))
    else:
        outcomes = [_prep_one(t) for t in tasks]

    prepared = [o for o in outcomes if "error" not in o]
    skipped = [o for o in outcomes if "error" in o]
    for s in skipped:
        _err(f"skipping {s['path']}: {s['error']}")
    _print_json({"prepared": len(prepared), "skipped": len(skipped),
                 "output_dir": str(out_dir)})
    return EX_OK


# -------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgetok",
        description="Lossless triangular-mesh tokenizer and benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="OBJ -> token file + stats JSON")
    p.add_argument("input")
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("ertk", "json"), default="ertk")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("detokenize", help="ERTK token file -> OBJ")
    p.add_argument("input")
    p.add_argument("--output", default=None)
    p.add_argument("--keep-degenerate", action="store_true")
    p.set_defaults(func=cmd_detokenize)

    p = sub.add_parser("roundtrip", help="tokenize + detokenize + compare")
    p.add_argument("input")
    p.add_argument("--resolution", type=int, default=512)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("mask", help="next-token mask for a prefix (JSON id array)")
    p.add_argument("input", help="ERTK file path or whitespace/comma-separated id list")
    p.add_argument("--resolution", type=int, default=512,
                   help="vocabulary resolution when input is an id list")
    p.add_argument("--buckets", action="store_true",
                   help="size the mask for the face-bucket extension vocabulary")
    p.add_argument("--bitset", default=None,
                   help="also write the mask as a raw little-endian bitset file")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("bench", help="Table-style tokenizer comparison on a mesh corpus")
    p.add_argument("corpus")
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--skip-invalid", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("prep", help="clean + quantize (optionally augment) a mesh corpus")
    p.add_argument("input")
    p.add_argument("--output", required=True)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--scale-jitter", type=float, nargs=2, metavar=("LO", "HI"),
                   default=None, help="random uniform shrink range, e.g. 0.75 0.95")
    p.add_argument("--rotate-max", type=float, default=None,
                   help="max vertical-axis rotation in degrees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.set_defaults(func=cmd_prep)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NonManifoldError as exc:
        _err(str(exc))
        return EX_NONMANIFOLD
    except (ObjParseError, DegenerateMeshError, QuantizationRangeError) as exc:
        _err(str(exc))
        return EX_PARSE
    except IllegalTokenError as exc:
        _err(f"ungrammatical sequence: {exc}")
        return EX_UNGRAMMATICAL
    except ErtkFormatError as exc:
        _err(f"invalid token file: {exc}")
        return EX_UNGRAMMATICAL
    except OSError as exc:
        _err(str(exc))
        return EX_IO


if __name__ == "__main__":
    sys.exit(main())
