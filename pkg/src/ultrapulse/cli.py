"""Command-line front end: profiles, metrics, derivation, table checks.

Every run is fully determined by its flags (the derive seed included); the
same invocation always produces byte-identical output.  Data goes to
standard output, diagnostics to standard error.  Exit codes: 0 on success,
1 when verify-tables finds failing cells, 2 on usage or data errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import IO, Sequence

from . import metrics as metrics_mod
from . import optimize as optimize_mod
from . import sequences as sequences_mod
from .sequences import CompositeSequence, Family

PI = math.pi


def _resolve_sequence(ref: str) -> CompositeSequence:
    try:
        return sequences_mod.get_sequence(ref)
    except KeyError:
        pass
    path = Path(ref)
    if path.exists():
        with path.open() as fh:
            return sequences_mod.load_sequence(fh)
    raise KeyError(
        f"unknown sequence label {ref!r} and no such file; "
        f"known labels: {', '.join(sequences_mod.list_labels())}"
    )


def _fmt_phase(radians: float) -> str:
    text = f"{radians / PI:.4f}"
    if text in ("0.0000", "2.0000", "-0.0000"):
        return "0"
    return text


def _fmt_range(interval: tuple[float, float] | None) -> str:
    if interval is None:
        return "n/a"
    lo, hi = interval
    return f"[{lo:.4f} pi, {hi:.4f} pi]"


def _print_metrics_text(report, out: IO[str]) -> None:
    out.write(f"label:         {report.label}\n")
    out.write(f"family:        {report.family}\n")
    out.write(f"kind:          {report.kind}\n")
    out.write(f"pulses:        {report.n_pulses}\n")
    out.write(f"run time:      {report.run_time_pi:.4f} pi\n")
    out.write(f"centre value:  {report.centre_value:.9f}\n")
    out.write(f"sigma:         {report.sigma:.6f}\n")
    out.write(f"sigma_b:       {report.sigma_b:.6f}\n")
    out.write(f"sigma_n:       {report.sigma_n:.6f}\n")
    range_text = _fmt_range(report.range_90)
    if report.range_90 is not None:
        range_text += f"  (half-width {metrics_mod.range_halfwidth_percent(report.range_90):.2f}%)"
        if report.range_90_enclosing:
            range_text += "  [enclosing scan]"
    out.write(f"range(0.9):    {range_text}\n")
    fwhm_text = _fmt_range(report.fwhm)
    if report.fwhm is not None:
        fwhm_text += f"  (half-width {metrics_mod.range_halfwidth_percent(report.fwhm):.2f}%)"
    out.write(f"fwhm:          {fwhm_text}\n")
    kappa_text = "n/a" if report.kappa is None else f"{report.kappa:.4f}"
    out.write(f"kappa:         {kappa_text}\n")


def _cmd_profile(args, out: IO[str]) -> int:
    seq = _resolve_sequence(args.sequence)
    kind = None if args.kind == "auto" else args.kind
    profile = metrics_mod.sample_profile(seq, args.points, kind)
    if args.axis == "phi":
        profile = metrics_mod.conversion_efficiency_axis(profile)
    metrics_mod.write_profile_csv(profile, out)
    return 0


def _cmd_metrics(args, out: IO[str]) -> int:
    seq = _resolve_sequence(args.sequence)
    report = metrics_mod.compute_metrics(seq, alpha=args.alpha)
    if args.format == "json":
        out.write(json.dumps(report.as_dict(), sort_keys=True) + "\n")
    else:
        _print_metrics_text(report, out)
    return 0


def _cmd_derive(args, out: IO[str]) -> int:
    family = Family(args.family)
    problem = optimize_mod.OptimizationProblem(family=family, n_pulses=args.n_pulses)
    result = optimize_mod.derive(problem, restarts=args.restarts, seed=args.seed)
    seq = optimize_mod.sequence_for(family, result.free_phases)
    if args.format == "json":
        doc = sequences_mod.sequence_to_dict(seq)
        doc["optimization"] = {
            "objective_value": result.objective_value,
            "restarts": args.restarts,
            "seed": args.seed,
            "converged": result.converged,
        }
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        out.write(f"family:     {family.value}\n")
        out.write(f"pulses:     {seq.n_pulses}\n")
        out.write(f"phases/pi:  {', '.join(_fmt_phase(p) for p in seq.phases)}\n")
        out.write(f"objective:  {result.objective_value:.4f}\n")
        out.write(f"starts:     {result.n_restarts_used}\n")
        out.write(f"converged:  {'yes' if result.converged else 'no'}\n")
    return 0


def _cell_line(cell) -> str:
    status = "PASS" if cell.passed else "FAIL"
    if isinstance(cell.computed, tuple):
        computed = f"[{cell.computed[0]:.4f}, {cell.computed[1]:.4f}]"
        expected = f"[{cell.expected[0]:.4f}, {cell.expected[1]:.4f}]"
    else:
        computed = f"{cell.computed:.6f}"
        expected = f"{cell.expected:.6f}"
    line = (
        f"{status}  {cell.label:<10s} {cell.group:<10s} {cell.metric:<11s} "
        f"{computed} vs {expected} (tol {cell.tolerance:g})"
    )
    if cell.note:
        line += f"  # {cell.note}"
    return line


def _cmd_verify_tables(args, out: IO[str]) -> int:
    report = optimize_mod.verify_tables(
        tolerance_area=args.tolerance_area,
        tolerance_range=args.tolerance_range,
    )
    if args.format == "json":
        doc = {
            "all_passed": report.all_passed,
            "cells": [
                {
                    "label": c.label,
                    "group": c.group,
                    "metric": c.metric,
                    "computed": list(c.computed) if isinstance(c.computed, tuple) else c.computed,
                    "expected": list(c.expected) if isinstance(c.expected, tuple) else c.expected,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "note": c.note,
                }
                for c in report.cells
            ],
        }
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        for cell in report.cells:
            out.write(_cell_line(cell) + "\n")
        n_failed = len(report.failures())
        if n_failed:
            out.write(f"{n_failed} of {len(report.cells)} cells FAILED\n")
        else:
            out.write(f"all {len(report.cells)} cells passed\n")
    return 0 if report.all_passed else 1


_LOWER_IS_BETTER = {"run_time_pi": True, "sigma_b": False, "sigma_n": True,
                    "kappa": False, "range_width": False, "fwhm_width": True}


def _winner(values: list[float | None], lower_better: bool | None) -> int | None:
    if lower_better is None:
        return None
    present = [(v, i) for i, v in enumerate(values) if v is not None]
    if len(present) < 2:
        return None
    ordered = sorted(present, key=lambda t: t[0], reverse=not lower_better)
    if abs(ordered[0][0] - ordered[1][0]) <= 1e-12:
        return None
    return ordered[0][1]


# Which direction is "better" depends on what the compared sequences are
# for: broadening families want wide ranges and large areas, narrowing
# families the opposite.  The single pulse is the neutral baseline of both.
_BROADENING = {"ub", "bb2", "ubph", "single"}
_NARROWING = {"un", "nb2", "single"}
_SQUARING = {"upb", "pb2", "single"}


def _directions(families: set[str]) -> dict[str, bool | None]:
    broad = families <= (_BROADENING | _SQUARING)
    narrow = families <= _NARROWING
    return {
        "sigma": (False if families <= _BROADENING else
                  True if narrow else None),
        "range_90": False if broad else (True if narrow else None),
        "fwhm": True if narrow else None,
    }


def _cmd_compare(args, out: IO[str]) -> int:
    seqs = [_resolve_sequence(ref) for ref in args.sequences]
    reports = [metrics_mod.compute_metrics(s, alpha=args.alpha) for s in seqs]
    if args.format == "json":
        out.write(json.dumps([r.as_dict() for r in reports], sort_keys=True) + "\n")
        return 0

    def interval_cell(interval: tuple[float, float] | None) -> str:
        if interval is None:
            return "n/a"
        return (
            f"{_fmt_range(interval)}"
            f" {metrics_mod.range_halfwidth_percent(interval):.2f}%"
        )

    run_times = [r.run_time_pi for r in reports]
    sigmas = [r.sigma for r in reports]
    sb = [r.sigma_b for r in reports]
    sn = [r.sigma_n for r in reports]
    r90w = [
        None if r.range_90 is None else metrics_mod.range_halfwidth_percent(r.range_90)
        for r in reports
    ]
    fw = [
        None if r.fwhm is None else metrics_mod.range_halfwidth_percent(r.fwhm)
        for r in reports
    ]
    kappas = [r.kappa for r in reports]
    directions = _directions({r.family for r in reports})

    rows: list[tuple[str, list[str], int | None]] = [
        ("metric", [r.label for r in reports], None),
        ("family", [r.family for r in reports], None),
        ("pulses", [str(r.n_pulses) for r in reports], None),
        ("run time/pi", [f"{t:.4f}" for t in run_times], _winner(run_times, True)),
        ("sigma", [f"{v:.6f}" for v in sigmas], _winner(sigmas, directions["sigma"])),
        ("sigma_b", [f"{v:.6f}" for v in sb], _winner(sb, False)),
        ("sigma_n", [f"{v:.6f}" for v in sn], _winner(sn, True)),
        ("range(0.9)", [interval_cell(r.range_90) for r in reports],
         _winner(r90w, directions["range_90"])),
        ("fwhm", [interval_cell(r.fwhm) for r in reports],
         _winner(fw, directions["fwhm"])),
        ("kappa", ["n/a" if k is None else f"{k:.4f}" for k in kappas],
         _winner(kappas, False)),
    ]

    marked = [
        [f"{cell} *" if flag == i else cell for i, cell in enumerate(cells)]
        for _, cells, flag in rows
    ]
    width = max(len(cell) for cells in marked for cell in cells) + 2
    for (name, _, _), cells in zip(rows, marked):
        out.write(f"{name:<14s}" + "".join(f"{c:<{width}s}" for c in cells).rstrip() + "\n")
    out.write("(* marks the better value where a direction is defined)\n")
    return 0


def _cmd_list(args, out: IO[str]) -> int:
    entries = []
    for label in sequences_mod.list_labels():
        seq = sequences_mod.get_sequence(label)
        groups = sorted({row.group for row in sequences_mod.rows_for_label(label)})
        entries.append(
            {
                "label": label,
                "family": seq.family.value,
                "n_pulses": seq.n_pulses,
                "groups": groups,
            }
        )
    if args.format == "json":
        out.write(json.dumps(entries, sort_keys=True) + "\n")
    else:
        for e in entries:
            out.write(
                f"{e['label']:<12s} family={e['family']:<7s} pulses={e['n_pulses']:<3d}"
                f" tables={','.join(e['groups'])}\n"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultrapulse",
        description="Composite pi-pulse / composite wave-plate toolbox",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="emit a robustness profile as CSV")
    p.add_argument("sequence", help="a bundled label (see 'list') or a sequence file")
    p.add_argument("--points", type=int, default=2001, help="odd grid size (default 2001)")
    p.add_argument("--kind", choices=("auto", "probability", "fidelity"), default="auto")
    p.add_argument("--axis", choices=("epsilon", "phi"), default="epsilon")
    p.set_defaults(fn=_cmd_profile)

    p = sub.add_parser("metrics", help="print all figures of merit of a sequence")
    p.add_argument("sequence")
    p.add_argument("--alpha", type=float, default=0.1, help="rectangularity benchmark")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_metrics)

    p = sub.add_parser("derive", help="re-derive optimal phases for a family")
    p.add_argument("family", choices=("ub", "un", "upb", "ubph"))
    p.add_argument("n_pulses", type=int)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_derive)

    p = sub.add_parser("verify-tables", help="recompute and check every table cell")
    p.add_argument("--tolerance-area", type=float, default=1.5e-3)
    p.add_argument("--tolerance-range", type=float, default=0.002)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_verify_tables)

    p = sub.add_parser("compare", help="side-by-side metrics for several sequences")
    p.add_argument("sequences", nargs="+")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("list", help="list the bundled sequence labels")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(fn=_cmd_list)

    return parser


def main(argv: Sequence[str] | None = None, out: IO[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    stream = out if out is not None else sys.stdout
    if args.command == "compare" and len(args.sequences) < 2:
        print("error: compare needs at least two sequences", file=sys.stderr)
        return 2
    try:
        return args.fn(args, stream)
    except (KeyError, ValueError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
