"""Command-line harness.

Verbs:
  build           ingest an operation trace, write the sketch's exported form
  query           load an export, print one estimate per key
  export          inspect an export file (header fields, optionally counters)
  bench-accuracy  shared-stream accuracy run, CSV output
  bench-speed     update and threaded-query throughput, CSV output
  selftest        fast invariant suite, pass/fail per property

Exit codes: 0 ok, 2 usage or bad configuration, 3 unreadable or malformed
input, 4 contract violation (phantom delete, unsupported op, saturation),
5 selftest property failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    ACCURACY_HEADER,
    CDF_HEADER,
    SKETCH_KINDS,
    SPEED_HEADER,
    BenchConfig,
    make_sketch,
    run_accuracy,
    run_speed,
    write_csv,
)
from .errors import (
    ConfigurationError,
    ExportFormatError,
    PhantomDeletionError,
    SaturationError,
    TraceFormatError,
    UndefinedMetricError,
    UnsupportedOperationError,
)
from .hashing import key_from_string
from .params import SketchParams
from .selftest import run_selftest
from .serialize import export_slim, import_slim
from .workloads import DELETION_MODES, WorkloadSpec, load_trace, stream_length

_CODE_NAMES = {1: "sf1", 2: "sf2", 3: "sf3", 4: "sf4", 6: "sff",
               10: "cm", 11: "c", 12: "cu", 13: "cml"}


def _add_shape_flags(p, require_dims=True):
    p.add_argument("--d", type=int, required=require_dims, default=None,
                   help="number of counter arrays")
    p.add_argument("--w", type=int, required=require_dims, default=None,
                   help="counters per slim array")
    p.add_argument("--z", type=int, default=1, help="fat slots per bucket")
    p.add_argument("--w-prime", type=int, default=None, dest="w_prime",
                   help="fat array width (defaults to z*w)")
    p.add_argument("--seed", type=int, default=0,
                   help="master seed for hashing and workload generation")


def _add_workload_flags(p):
    p.add_argument("--workload", choices=("uniform", "zipf", "trace"),
                   default="uniform")
    p.add_argument("--items", type=int, default=0, help="distinct items")
    p.add_argument("--ops", type=int, default=0, help="total operations")
    p.add_argument("--zipf-skew", type=float, default=0.99, dest="zipf_skew")
    p.add_argument("--deletion-mode", choices=DELETION_MODES, default="none",
                   dest="deletion_mode")
    p.add_argument("--delete-prob", type=float, default=0.0, dest="delete_prob")
    p.add_argument("--trace", default=None, help="trace file (workload=trace)")


def _build_parser():
    parser = argparse.ArgumentParser(prog="sfsketch")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("build", help="ingest a trace, write an export file")
    p.add_argument("--sketch", required=True, choices=SKETCH_KINDS)
    _add_shape_flags(p)
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("query", help="answer estimates from an export file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--string-keys", action="store_true", dest="string_keys",
                   help="hash key tokens as strings instead of parsing integers")
    p.add_argument("keys", nargs="*", help="keys (reads stdin when omitted)")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("export", help="dump an export file's header")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--counters", action="store_true",
                   help="also dump the counter rows")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("bench-accuracy", help="shared-stream accuracy benchmark")
    p.add_argument("--sketches", default="cm,sff",
                   help="comma-separated kinds (oracle allowed)")
    _add_shape_flags(p)
    _add_workload_flags(p)
    p.add_argument("--checkpoints", default=None,
                   help="comma-separated op counts")
    p.add_argument("--checkpoint-every", type=int, default=None,
                   dest="checkpoint_every")
    p.add_argument("--out", required=True)
    p.add_argument("--cdf-out", default=None, dest="cdf_out",
                   help="CDF file (default: derived from --out)")
    p.set_defaults(func=_cmd_bench_accuracy)

    p = sub.add_parser("bench-speed", help="throughput benchmark")
    p.add_argument("--sketches", default="cm,sff")
    _add_shape_flags(p)
    _add_workload_flags(p)
    p.add_argument("--threads", default="1",
                   help="comma-separated query thread counts")
    p.add_argument("--queries", type=int, default=1_000_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_bench_speed)

    p = sub.add_parser("selftest", help="run the built-in property checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-clamp", action="store_true", dest="corrupt_clamp",
                   help="negative control: break the deletion clamp on purpose")
    p.set_defaults(func=_cmd_selftest)

    return parser


def _params_from(args) -> SketchParams:
    return SketchParams(d=args.d, w=args.w, z=args.z,
                        w_prime=args.w_prime, master_seed=args.seed)


def _workload_from(args) -> WorkloadSpec:
    return WorkloadSpec(kind=args.workload,
                        distinct_items=args.items,
                        total_ops=args.ops,
                        zipf_skew=args.zipf_skew,
                        seed=args.seed,
                        deletion_mode=args.deletion_mode,
                        delete_prob=args.delete_prob,
                        trace_path=args.trace)


def _cmd_build(args) -> int:
    ops, keys = load_trace(args.trace)
    sketch = make_sketch(args.sketch, _params_from(args))
    sketch.apply_ops(ops, keys)
    blob = export_slim(sketch)
    with open(args.out, "wb") as fh:
        fh.write(blob)
    return 0


def _parse_keys(tokens, string_keys: bool) -> np.ndarray:
    out = np.empty(len(tokens), dtype=np.uint64)
    for i, tok in enumerate(tokens):
        if string_keys:
            out[i] = key_from_string(tok)
            continue
        try:
            value = int(tok, 0)
        except ValueError as exc:
            raise TraceFormatError(i + 1, f"not an integer key: {tok!r}") from exc
        if not 0 <= value < 1 << 64:
            raise TraceFormatError(i + 1, f"key out of 64-bit range: {tok!r}")
        out[i] = value
    return out


def _cmd_query(args) -> int:
    with open(args.infile, "rb") as fh:
        collector = import_slim(fh.read())
    tokens = args.keys if args.keys else sys.stdin.read().split()
    estimates = collector.query_many(_parse_keys(tokens, args.string_keys))
    sys.stdout.write("".join(f"{int(e)}\n" for e in estimates))
    return 0


def _cmd_export(args) -> int:
    with open(args.infile, "rb") as fh:
        collector = import_slim(fh.read())
    print(f"variant={_CODE_NAMES[collector.variant_code]}")
    print(f"d={collector.d}")
    print(f"w={collector.w}")
    print(f"master_seed={collector.master_seed}")
    print(f"insertions_seen={collector.insertions_seen}")
    if args.counters:
        for row in collector.counters:
            print(" ".join(str(int(c)) for c in row))
    return 0


def _parse_int_list(text: str, flag: str):
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{flag} expects comma-separated integers") from exc


def _checkpoints_from(args, total_ops: int):
    if args.checkpoints is not None and args.checkpoint_every is not None:
        raise ConfigurationError(
            "--checkpoints and --checkpoint-every are mutually exclusive")
    if args.checkpoints is not None:
        return _parse_int_list(args.checkpoints, "--checkpoints")
    if args.checkpoint_every is not None:
        step = args.checkpoint_every
        if step < 1:
            raise ConfigurationError("--checkpoint-every must be >= 1")
        cps = list(range(step, total_ops + 1, step))
        if not cps or cps[-1] != total_ops:
            cps.append(total_ops)
        return tuple(cps)
    return ()


def _derive_cdf_path(out: str) -> str:
    if out.endswith(".csv"):
        return out[:-4] + "_cdf.csv"
    return out + "_cdf.csv"


def _cmd_bench_accuracy(args) -> int:
    workload = _workload_from(args)
    config = BenchConfig(
        sketches=tuple(args.sketches.split(",")),
        params=_params_from(args),
        workload=workload,
        checkpoints=_checkpoints_from(args, stream_length(workload)),
    )
    rows, cdf_rows = run_accuracy(config)
    write_csv(args.out, ACCURACY_HEADER, rows)
    cdf_path = args.cdf_out or _derive_cdf_path(args.out)
    write_csv(cdf_path, CDF_HEADER, cdf_rows)
    return 0


def _cmd_bench_speed(args) -> int:
    config = BenchConfig(
        sketches=tuple(args.sketches.split(",")),
        params=_params_from(args),
        workload=_workload_from(args),
        threads=_parse_int_list(args.threads, "--threads"),
        query_ops=args.queries,
    )
    rows = run_speed(config)
    write_csv(args.out, SPEED_HEADER, rows)
    return 0


def _cmd_selftest(args) -> int:
    results = run_selftest(seed=args.seed, corrupt_clamp=args.corrupt_clamp)
    failed = False
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag} {res.name}: {res.detail}")
        failed = failed or not res.passed
    return 5 if failed else 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (None, 0) else 2
    try:
        return args.func(args)
    except (ConfigurationError, UndefinedMetricError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TraceFormatError, ExportFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PhantomDeletionError, UnsupportedOperationError, SaturationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
