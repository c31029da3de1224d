"""Command-line entry point: ``sqdsim run|audit|efficiency|golden``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import golden
from .analysis import (ExperimentSpec, count_resources, efficiency,
                       formula_resources, leakage_audit, run_experiment, run_trial)
from .adversary import guess_messages
from .channel import Transcript
from .errors import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GOLDEN = 3
EXIT_ABORT = 4

# flag dest -> ExperimentSpec field
_RUN_FIELDS = {
    "protocol": "protocol", "n": "n", "m": "m", "adversary": "adversary",
    "trials": "trials", "seed": "seed", "threshold": "threshold",
    "p_ctrl": "p_ctrl", "p_zsift": "p_zsift", "max_attempts": "max_attempts",
    "messages": "messages",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqdsim",
                                description="Semi-quantum dialogue simulator.")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="Monte Carlo experiment with report output.")
    r.add_argument("--config", type=Path,
                   help="JSON file with the same keys as the flags (flags win)")
    r.add_argument("--protocol", type=int, choices=(1, 2))
    r.add_argument("--n", type=int)
    r.add_argument("--m", type=int, help="SIFT sample count for protocol 2 (default N)")
    r.add_argument("--adversary", help="passive | intercept-resend[:z|x|random] | "
                   "measure-resend:Z|X | fake[:0|1|+|-|random]; add ',legs=step1+step2'")
    r.add_argument("--trials", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--threshold", type=float, help="protocol 1 check threshold")
    r.add_argument("--p-ctrl", type=float, dest="p_ctrl")
    r.add_argument("--p-zsift", type=float, dest="p_zsift")
    r.add_argument("--max-attempts", type=int, dest="max_attempts",
                   help="re-runs per trial on a Z-photon shortfall")
    r.add_argument("--messages", choices=("random", "zeros", "ones"))
    r.add_argument("--out", type=Path, help="report path (JSON)")
    r.add_argument("--csv", type=Path, help="optional flat per-trial CSV")
    r.add_argument("--transcript-dir", type=Path,
                   help="write one JSONL transcript per trial here")
    r.add_argument("--fail-on-abort", action="store_true",
                   help=f"exit {EXIT_ABORT} if any trial aborted")

    a = sub.add_parser("audit", help="Per-position leakage from a transcript.")
    a.add_argument("--transcript", type=Path, required=True)
    a.add_argument("--json", action="store_true", help="machine-readable output")

    e = sub.add_parser("efficiency", help="Information-theoretical efficiency.")
    e.add_argument("--protocol", type=int, choices=(1, 2), required=True)
    e.add_argument("--n", type=int, required=True)

    sub.add_parser("golden", help="Re-derive the encoding tables and examples.")
    return p


def _spec_from_args(args) -> ExperimentSpec:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        for key in ("out", "csv", "transcript_dir", "fail_on_abort"):
            if key in data and getattr(args, key) in (None, False):
                setattr(args, key, Path(data[key]) if key != "fail_on_abort" else data[key])
            data.pop(key, None)
    for dest, name in _RUN_FIELDS.items():
        value = getattr(args, dest)
        if value is not None:
            data[name] = value
    for required in ("protocol", "n"):
        if required not in data:
            raise ConfigError(f"--{required} is required")
    return ExperimentSpec.from_dict(data)


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    report = run_experiment(spec, keep_transcripts=args.transcript_dir is not None)
    if args.out is not None:
        report.write(args.out, args.csv, args.transcript_dir)
    else:
        if args.csv is not None:
            args.csv.write_text(report.to_csv())
        if args.transcript_dir is not None:
            report.write(Path("/dev/null"), None, args.transcript_dir)
    agg = report.aggregate
    print(f"protocol {spec.protocol}  n={spec.n}  adversary={spec.adversary}  "
          f"trials={spec.trials}  seed={spec.seed}")
    print(f"abort_rate          {agg['abort_rate']:.4f}  {agg['aborts_by_phase']}")
    for name, c in agg["checks"].items():
        rate = "n/a" if c["pooled_rate"] is None else f"{c['pooled_rate']:.4f}"
        print(f"{name + '_rate':<20}{rate}  ({c['errors']}/{c['checked']})")
    acc = agg["recovery_accuracy"]
    print(f"recovery_accuracy   {'n/a' if acc is None else f'{acc:.4f}'}")
    ent = agg["public_entropy_mean"]
    print(f"public_entropy      {'n/a' if ent is None else f'{ent:.4f}'} bits/position")
    print(f"efficiency          {agg['efficiency']['fraction']}")
    if args.fail_on_abort and agg["completed"] < agg["trials"]:
        return EXIT_ABORT
    return EXIT_OK


def cmd_audit(args) -> int:
    transcript = Transcript.read(args.transcript)
    sets = guess_messages(None, transcript)
    entropies = leakage_audit(transcript)
    if args.json:
        print(json.dumps([{"position": i, "hypotheses": sorted(map(list, h)),
                           "entropy_bits": e}
                          for i, (h, e) in enumerate(zip(sets, entropies))], indent=2))
        return EXIT_OK
    print(f"protocol {transcript.protocol}: {len(sets)} message positions")
    print("position  consistent (a,b)               entropy")
    for i, (h, e) in enumerate(zip(sets, entropies)):
        pairs = " ".join(f"{a}{b}" for a, b in sorted(h))
        print(f"{i:>8}  {pairs:<30} {e:.4f}")
    return EXIT_OK


def cmd_efficiency(args) -> int:
    eta = efficiency(args.protocol, args.n)
    formula = formula_resources(args.protocol, args.n)
    spec = ExperimentSpec(args.protocol, args.n, messages="random", seed=0)
    outcome, *_ = run_trial(spec, 0)
    print(f"eta = {formula.secret_bits}/({formula.qubits}+{formula.classical_bits})"
          f" = {eta.numerator}/{eta.denominator} = {float(eta):.1%}")
    if outcome.aborted:
        print(f"instrumented run aborted at {outcome.aborted_at}; no count")
        return EXIT_OK
    counted = count_resources(outcome)
    print(f"counted: secret={counted.secret_bits} qubits={counted.qubits} "
          f"classical={counted.classical_bits} -> {counted.efficiency}")
    return EXIT_OK if counted == formula else EXIT_GOLDEN


def cmd_golden(args) -> int:
    results = golden.check_all()
    for r in results:
        line = f"{'ok  ' if r.ok else 'FAIL'} {r.name}"
        if not r.ok:
            line += f"  expected={r.expected!r} actual={r.actual!r}"
        print(line)
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} golden checks passed")
    return EXIT_GOLDEN if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "audit": cmd_audit, "efficiency": cmd_efficiency,
               "golden": cmd_golden}[args.cmd]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"sqdsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
