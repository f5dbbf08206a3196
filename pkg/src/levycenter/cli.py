"""Command-line front end.

Subcommands::

    charfn           tabulate the characteristic function of a measure
    center-symmetry  universal centering with respect to a symmetry group
    center-qd        strictness centering for quasi-decomposability
    criterion        seed-moment existence criterion for a representation
    validate         check every invariant of a specification file

Exit codes: 0 when all verdicts are positive, 2 when a verdict is negative
(an obstruction was found or a validation failed), 1 on input errors.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .grids import frequency_grid
from .idmeasure import IdMeasure, charfn, conv_power, pushforward, shifted, triplet_diff
from .levyrep import materialize, validate_spectral_support
from .quasidecomp import (
    center_qd,
    center_stable,
    check_qd,
    criterion,
    criterion_ordinary,
    make_shift_flow,
    with_certificate,
)
from .report import Report
from .specfile import SpecData, SpecError, load_frequencies, load_spec
from .symmetry import centering_deviation, symmetry_group, universal_center

#: Orbit truncation depth used when a discrete representation has to be
#: materialized into a concrete measure for the direct solve.
MATERIALIZE_DEPTH = 30


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levycenter", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--spec", required=True, help="path to the specification file")
        sp.add_argument("--format", choices=["text", "machine"], default="text")
        sp.add_argument("--report", help="also write the report to this path")
        sp.add_argument("--grid", type=int, default=64, help="verification grid size")
        sp.add_argument("--tol-rank", type=float, default=1e-9)
        sp.add_argument("--tol-verify", type=float, default=1e-8)
        sp.add_argument("--tol-criterion", type=float, default=1e-9)

    sp = sub.add_parser("charfn", help="tabulate the characteristic function")
    common(sp)
    sp.add_argument("--frequencies", help="JSON file with frequency vectors (default: grid)")

    for name, help_ in [
        ("center-symmetry", "universal centering w.r.t. a symmetry group"),
        ("center-qd", "strictness centering for quasi-decomposability"),
        ("criterion", "seed-moment existence criterion"),
        ("validate", "validate a specification file"),
    ]:
        common(sub.add_parser(name, help=help_))
    return p


def _tolerances(args) -> dict:
    return {"rank": args.tol_rank, "verify": args.tol_verify, "criterion": args.tol_criterion}


def cmd_charfn(args, spec: SpecData) -> tuple[Report, int]:
    if spec.measure is None:
        raise SpecError("charfn needs a 'measure' entity")
    rep = Report("charfn", spec.digest, _tolerances(args))
    if args.frequencies:
        freq = load_frequencies(args.frequencies, spec.dimension)
    else:
        freq = frequency_grid(spec.dimension, n=args.grid)
    values = charfn(spec.measure, freq)
    rep.add("n_frequencies", freq.shape[0])
    for i, (u, v) in enumerate(zip(freq, np.atleast_1d(values))):
        rep.add(f"freq.{i}", u)
        rep.add(f"phi.{i}", complex(v))
    return rep, 0


def cmd_center_symmetry(args, spec: SpecData) -> tuple[Report, int]:
    if spec.measure is None or spec.group_elements is None:
        raise SpecError("center-symmetry needs 'measure' and 'group' entities")
    rep = Report("center-symmetry", spec.digest, _tolerances(args))
    G = symmetry_group(spec.measure, spec.group_elements, close=spec.group_close)
    h = universal_center(spec.measure, G, verify_tol=max(args.tol_verify, 1e-9))
    rep.add("group_order", len(G))
    rep.add("centering", h)
    centered = shifted(spec.measure, h)
    grid = frequency_grid(spec.dimension, n=args.grid)
    base = charfn(centered, grid)
    for i, (S, _) in enumerate(G):
        dev = float(np.max(np.abs(base - charfn(pushforward(S, centered), grid))))
        rep.add_check(f"element{i}.charfn_dev", dev, args.tol_verify)
    return rep, 0


def _report_result(rep: Report, prefix: str, result) -> bool:
    rep.add(f"{prefix}.exists", result.exists)
    rep.add(f"{prefix}.certificate", result.certificate)
    if result.exists:
        rep.add(f"{prefix}.centering", result.hhat)
        for key in sorted(result.details):
            val = result.details[key]
            if isinstance(val, float):
                rep.add(f"{prefix}.{key}", val)
    else:
        rep.add(f"{prefix}.obstruction", result.obstruction)
        rep.add_check(f"{prefix}.pairing", result.pairing, result.details.get("threshold", 0.0))
    return result.exists


def cmd_center_qd(args, spec: SpecData) -> tuple[Report, int]:
    rep = Report("center-qd", spec.digest, _tolerances(args))
    all_ok = True
    if spec.measure is not None:
        if not spec.pairs:
            raise SpecError("center-qd with a measure needs a 'pairs' section")
        for i, (a, A) in enumerate(spec.pairs):
            witness = check_qd(spec.measure, a, A, tol=args.tol_rank * 10)
            if witness is None:
                raise SpecError(f"not quasi-decomposable for pair {i} (power {a:g})")
            rep.add(f"pair{i}.power", a)
            rep.add(f"pair{i}.shift", witness.shift)
            result = center_qd(
                spec.measure, witness, rank_tol=args.tol_rank, verify_tol=args.tol_verify
            )
            all_ok &= _report_result(rep, f"pair{i}", result)
    elif spec.orbit_rep is not None:
        ok, obstructions = criterion(spec.orbit_rep, tol=args.tol_criterion)
        rep.add("criterion.satisfied", ok)
        mu = IdMeasure(
            np.zeros(spec.dimension),
            np.zeros((spec.dimension, spec.dimension)),
            materialize(spec.orbit_rep, MATERIALIZE_DEPTH),
        )
        witness = check_qd(mu, spec.orbit_rep.power, spec.orbit_rep.op, tol=1e-8)
        if witness is None:
            raise SpecError("not quasi-decomposable: materialized orbit failed the witness test")
        result = center_qd(mu, witness, rank_tol=args.tol_rank, verify_tol=args.tol_verify)
        result = with_certificate(result, "criterion_discrete")
        if result.exists != ok:
            raise SpecError("criterion and direct solve disagree; representation is inconsistent")
        all_ok &= _report_result(rep, "orbit", result)
    elif spec.mixing_rep is not None:
        B = spec.mixing_rep.exponent
        flow = make_shift_flow(np.zeros(spec.dimension), spec.mixing_rep, B)
        rep.add("rate", flow.rate)
        result = center_stable(flow, rank_tol=args.tol_rank, verify_tol=args.tol_verify)
        result = with_certificate(result, "criterion_continuous")
        all_ok &= _report_result(rep, "mixing", result)
    if not all_ok:
        rep.set_verdict("obstruction")
    return rep, 0 if all_ok else 2


def cmd_criterion(args, spec: SpecData) -> tuple[Report, int]:
    rep_obj = spec.orbit_rep if spec.orbit_rep is not None else spec.mixing_rep
    if rep_obj is None:
        raise SpecError("criterion needs an 'orbit_rep' or 'mixing_rep' entity")
    rep = Report("criterion", spec.digest, _tolerances(args))
    ok, obstructions = criterion(rep_obj, tol=args.tol_criterion)
    from .quasidecomp import _criterion_space  # stable internal surface

    space = _criterion_space(rep_obj)
    rep.add("null_space_dim", space.dim)
    for j in range(space.dim):
        rep.add(f"null_basis.{j}", space.basis[:, j])
    sw = float(np.sum(rep_obj.seeds.weights))
    moment = rep_obj.seeds.weights @ rep_obj.seeds.points if rep_obj.seeds.n else np.zeros(spec.dimension)
    for j in range(space.dim):
        rep.add_check(f"pairing.{j}", float(moment @ space.basis[:, j]), args.tol_criterion * max(sw, 1e-300))
    rep.add("satisfied", ok)
    if spec.orbit_rep is not None and np.allclose(
        rep_obj.op, rep_obj.power * np.eye(spec.dimension), atol=1e-12
    ):
        rep.add("ordinary_semistable", criterion_ordinary(rep_obj, "semistable", tol=args.tol_criterion))
    if spec.mixing_rep is not None and np.allclose(rep_obj.exponent, np.eye(spec.dimension), atol=1e-12):
        rep.add("ordinary_stable", criterion_ordinary(rep_obj, "stable", tol=args.tol_criterion))
    if not ok:
        rep.set_verdict("obstruction")
    return rep, 0 if ok else 2


def cmd_validate(args, spec_path: str) -> tuple[Report, int]:
    spec = load_spec(spec_path, validate_reps=False)
    rep = Report("validate", spec.digest, _tolerances(args))
    rep.add("dimension", spec.dimension)
    rep.add("entity", spec.kind)
    ok = True
    if spec.measure is not None:
        rep.add("measure.atoms", spec.measure.atoms.n)
        rep.add("measure.ok", True)  # construction already enforced the invariants
    for name, obj in (("orbit_rep", spec.orbit_rep), ("mixing_rep", spec.mixing_rep)):
        if obj is None:
            continue
        try:
            type(obj)(obj.seeds, *(
                (obj.op, obj.power) if name == "orbit_rep" else (obj.exponent,)
            ), validate=True)
            rep.add(f"{name}.invariants", "pass")
        except ValueError as exc:
            rep.add(f"{name}.invariants", f"fail: {exc}")
            ok = False
        support = validate_spectral_support(obj)
        rep.add(f"{name}.support_dim", support.subspace.dim)
        rep.add_check(f"{name}.support_distance", support.max_distance, 1e-9)
        ok &= support.passed
    if spec.group_elements is not None and spec.measure is not None:
        try:
            G = symmetry_group(spec.measure, spec.group_elements, close=spec.group_close)
            rep.add("group.order", len(G))
            rep.add("group.ok", True)
        except ValueError as exc:
            rep.add("group.ok", f"fail: {exc}")
            ok = False
    if spec.pairs is not None and spec.measure is not None:
        for i, (a, A) in enumerate(spec.pairs):
            witness = check_qd(spec.measure, a, A)
            rep.add(f"pair{i}.quasi_decomposable", witness is not None)
            ok &= witness is not None
    if not ok:
        rep.set_verdict("failed")
    return rep, 0 if ok else 2


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            report, code = cmd_validate(args, args.spec)
        else:
            spec = load_spec(args.spec)
            handler = {
                "charfn": cmd_charfn,
                "center-symmetry": cmd_center_symmetry,
                "center-qd": cmd_center_qd,
                "criterion": cmd_criterion,
            }[args.command]
            report, code = handler(args, spec)
    except (SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = report.render(args.format)
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
