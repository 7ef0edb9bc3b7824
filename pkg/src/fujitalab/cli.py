"""Command-line front end.

Four subcommands: ``exponents`` (regime report for one parameter point),
``simulate`` (one time integration, trajectory to CSV/JSON), ``sweep``
(parameter grid with predicted-vs-observed agreement, optionally parallel),
``verify`` (the analytic lemma suite with pass/fail lines).

Exit codes: 0 success, 1 malformed input or a failed verification, 2 for
parameter sets rejected by base validation.  Artifacts land under the
directory named by FUJITA_LAB_OUT when relative paths are given; trajectory
and sweep payloads are byte-deterministic, while wall-clock metadata goes to
separate ``*.meta.json`` files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import oracles
from .exponents import (
    Regime,
    blowup_criterion,
    certificate_exponent,
    classify,
    exponent_report,
    gep_exponents,
)
from .field import BoxGeometry, lq_norm, sample
from .problem import (
    InadmissibleError,
    ProblemSpec,
    ProfileSpec,
    SpecFieldError,
    scale_profile,
    validate,
)
from .solver import SolverConfig, run

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for
    # inadmissible parameters, so route usage problems through exit 1.
    def error(self, message):
        raise _UsageError(message)


def _resolve_out(path_str: str) -> Path:
    p = Path(path_str)
    if not p.is_absolute():
        p = Path(os.environ.get("FUJITA_LAB_OUT", ".")) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _load_spec(path: str) -> ProblemSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _UsageError(f"cannot read spec file {path!r}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFieldError("<document>", f"invalid JSON: {exc}") from exc
    return ProblemSpec.from_json_dict(payload)


def _write_meta(prefix: Path, extra: dict) -> None:
    meta = {"created_unix": time.time()}
    meta.update(extra)
    Path(str(prefix) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


# ---------------------------------------------------------------------------
# exponents

def cmd_exponents(args) -> int:
    spec = _load_spec(args.spec)
    validation = validate(spec)
    if not validation.base_ok:
        for name in validation.failed():
            print(f"inadmissible: {name}", file=sys.stderr)
        return 2
    rep = exponent_report(spec)
    if args.format == "json":
        text = json.dumps(rep.to_json_dict(), indent=2)
    else:
        text = rep.table()
    print(text)
    if args.out:
        out = _resolve_out(args.out)
        out.write_text(json.dumps(rep.to_json_dict(), indent=2) + "\n")
        print(f"wrote {out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args) -> int:
    spec = _load_spec(args.spec)
    validation = validate(spec)
    if not validation.base_ok:
        for name in validation.failed():
            print(f"inadmissible: {name}", file=sys.stderr)
        return 2
    if not validation.lwp_ok:
        print("note: outside the well-posedness range; integrating anyway",
              file=sys.stderr)
    config = SolverConfig(
        dt0=args.dt0,
        t_end=args.t_end,
        blowup_threshold=args.threshold,
        adapt=not args.no_adapt,
        disable_nonlinearity=args.disable_nonlinearity,
    )
    geometry = BoxGeometry(half_width=args.half_width,
                           points_per_axis=args.points)
    record = run(spec, config, geometry)
    print(f"verdict: {record.verdict.value}")
    print(f"t_final: {record.times[-1]!r}")
    print(f"q_norm_final: {record.q_norms[-1]!r}")
    print(f"sup_norm_final: {record.sup_norms[-1]!r}")
    if record.blowup_time_estimate is not None:
        print(f"blowup_time_estimate: {record.blowup_time_estimate!r}")
    if args.out_prefix:
        prefix = _resolve_out(args.out_prefix)
        Path(str(prefix) + ".csv").write_text(record.csv_text())
        Path(str(prefix) + ".json").write_text(
            json.dumps(record.to_json_dict(), indent=2) + "\n")
        _write_meta(prefix, {"command": "simulate"})
        print(f"wrote {prefix}.csv {prefix}.json", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# sweep

_SWEEP_COLUMNS = (
    "index", "p", "q", "alpha", "rho",
    "predicted", "verdict", "agreement",
    "t_final", "sup_final", "blowup_time",
)


def _sweep_point(payload) -> tuple:
    """Worker for one grid point; must stay module-level for process pools."""
    (idx, base_json, assignment, amplitude, epsilon,
     t_end, dt0, half_width, points, threshold) = payload
    doc = dict(base_json)
    doc.update(assignment)
    try:
        spec = ProblemSpec.from_json_dict(doc)
    except (SpecFieldError, InadmissibleError):
        row = {k: assignment.get(k, base_json[k]) for k in ("p", "q", "alpha", "rho")}
        row.update(index=idx, predicted="inadmissible", verdict="skipped",
                   agreement="not_applicable", t_final="", sup_final="",
                   blowup_time="")
        return idx, row
    regime = classify(spec)
    u0 = scale_profile(spec.u0, amplitude)
    w = spec.w
    if regime is Regime.GLOBAL_SMALL_DATA:
        # rescale data and forcing so the norms the small-data theory sees
        # sit at epsilon; the grid plays the role of the function space here
        gep = gep_exponents(spec.dim, spec.p, spec.q, spec.alpha, spec.rho)
        L, M = BoxGeometry(half_width=half_width,
                           points_per_axis=points).resolve(spec.dim)
        f = sample(u0, spec.dim, L, M)
        biggest = max(lq_norm(f, gep.p_c), lq_norm(f, gep.ell))
        if biggest > 0:
            s = epsilon / biggest
            u0 = scale_profile(u0, s)
            w = scale_profile(w, s)
    sim_spec = dataclasses.replace(spec, u0=u0, w=w)
    config = SolverConfig(dt0=dt0, t_end=t_end, blowup_threshold=threshold)
    geometry = BoxGeometry(half_width=half_width, points_per_axis=points)
    record = run(sim_spec, config, geometry)
    verdict = record.verdict.value
    if regime is Regime.BLOWUP:
        agreement = "match" if verdict == "blowup_detected" else "mismatch"
    elif regime is Regime.GLOBAL_SMALL_DATA:
        agreement = "match" if verdict == "completed" else "mismatch"
    else:
        agreement = "not_applicable"
    row = {
        "index": idx,
        "p": float(spec.p), "q": float(spec.q),
        "alpha": float(spec.alpha), "rho": float(spec.rho),
        "predicted": regime.value,
        "verdict": verdict,
        "agreement": agreement,
        "t_final": repr(record.times[-1]),
        "sup_final": repr(record.sup_norms[-1]),
        "blowup_time": "" if record.blowup_time_estimate is None
        else repr(record.blowup_time_estimate),
    }
    return idx, row


def _parse_axis(text: str):
    try:
        name, rng = text.split("=", 1)
        start, stop, count = rng.split(":")
        name = name.strip()
        if name not in ("p", "q", "alpha", "rho"):
            raise ValueError(f"axis must be one of p,q,alpha,rho, got {name!r}")
        count = int(count)
        if count < 1:
            raise ValueError("axis count must be >= 1")
        values = np.linspace(float(start), float(stop), count)
        return name, [float(v) for v in values]
    except ValueError as exc:
        raise _UsageError(f"bad --axis {text!r}: {exc}") from exc


def cmd_sweep(args) -> int:
    spec = _load_spec(args.spec)
    if not validate(spec).base_ok:
        print("inadmissible baseline spec", file=sys.stderr)
        return 2
    axes = [_parse_axis(a) for a in args.axis]
    if not axes:
        raise _UsageError("need at least one --axis")
    if len(axes) > 2:
        raise _UsageError("at most two --axis arguments")
    base_json = spec.to_json_dict()

    assignments = []
    if len(axes) == 1:
        name0, vals0 = axes[0]
        for v in vals0:
            assignments.append({name0: v})
    else:
        (name0, vals0), (name1, vals1) = axes
        for v0 in vals0:
            for v1 in vals1:
                assignments.append({name0: v0, name1: v1})

    payloads = [
        (idx, base_json, asg, args.amplitude, args.epsilon,
         args.t_end, args.dt0, args.half_width, args.points, args.threshold)
        for idx, asg in enumerate(assignments)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, payloads))
    else:
        results = [_sweep_point(p) for p in payloads]
    results.sort(key=lambda pair: pair[0])
    rows = [row for _, row in results]

    lines = [",".join(_SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in _SWEEP_COLUMNS))
    csv_text = "\n".join(lines) + "\n"

    counts = {}
    for row in rows:
        counts[row["agreement"]] = counts.get(row["agreement"], 0) + 1
    print(f"points: {len(rows)}")
    for key in ("match", "mismatch", "not_applicable"):
        if key in counts:
            print(f"{key}: {counts[key]}")

    if args.out_prefix:
        prefix = _resolve_out(args.out_prefix)
        Path(str(prefix) + ".csv").write_text(csv_text)
        _write_meta(prefix, {"command": "sweep", "jobs": args.jobs,
                             "axes": [a for a in args.axis]})
        print(f"wrote {prefix}.csv", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
    return 0


# ---------------------------------------------------------------------------
# verify

def _lemma_young(scale: float):
    ok, excess = oracles.young_batch(100_000, seed=7, slack=1e-12 * scale)
    return ok, f"max excess {excess:.3e} over 1e5 draws"


def _lemma_contraction(scale: float):
    details = []
    ok = True
    for p, alpha in ((2.0, 1.0), (3.0, 1.5), (1.5, 0.5), (2.0, 0.0)):
        head, full = oracles.contraction_constant_study(p, alpha, n=100_000, seed=3)
        stable = full <= head * (1.0 + 0.10 * scale) and math.isfinite(full)
        ok = ok and stable
        details.append(f"(p={p},a={alpha}) sup {full:.4f}")
    return ok, "; ".join(details)


def _lemma_mittag_leffler(scale: float):
    r1 = oracles.mittag_leffler(oracles.MLParams(1.0, 1.0))
    ref1 = math.e
    r2 = oracles.mittag_leffler(oracles.MLParams(0.5, 1.0))
    ref2 = math.e * math.erfc(-1.0)
    ok = (
        abs(r1.value - ref1) <= 1e-12 * scale * ref1
        and abs(r2.value - ref2) <= 1e-12 * scale * ref2
        and r1.remainder_bound < 1e-10 * scale
        and r2.remainder_bound < 1e-10 * scale
    )
    return ok, (f"E_1(1)={r1.value:.12f} (bound {r1.remainder_bound:.1e}), "
                f"E_1/2(1)={r2.value:.12f} (bound {r2.remainder_bound:.1e})")


def _lemma_gronwall(scale: float):
    A, M, sigma, t_end = 1.0, 1.0, 0.5, 1.0
    n = 4000
    dt = t_end / n
    t = np.arange(1, n + 1) * dt
    psi = np.empty(n + 1)
    psi[0] = A
    # product integration, exact for piecewise-constant psi on each cell
    ex = 1.0 - sigma
    for j in range(1, n + 1):
        tj = j * dt
        s_left = np.arange(j) * dt
        s_right = s_left + dt
        # clip the last cell: s_right can land one ulp past tj
        weights = ((tj - s_left) ** ex
                   - np.maximum(tj - s_right, 0.0) ** ex) / ex
        psi[j] = A + M * float(weights @ psi[:j])
    bound = oracles.gronwall_bound(A, M, sigma, t_end)
    discrete = float(psi[-1])
    rel = abs(bound - discrete) / bound
    majorant = discrete <= bound * (1.0 + 1e-6)
    ok = rel <= 0.02 * scale and majorant
    return ok, f"bound {bound:.6f} vs discrete {discrete:.6f} (rel {rel:.2e})"


def _lemma_exponent_sign(scale: float):
    from fractions import Fraction
    import random

    rng = random.Random(11)
    checked = 0
    for _ in range(10_000):
        N = rng.randint(3, 8)
        p = Fraction(rng.randint(11, 60), 10)
        q = Fraction(rng.randint(11, 80), 10)
        alpha = Fraction(rng.randint(0, 30), 10)
        rho = Fraction(-rng.randint(0, 9), 10)
        crit = blowup_criterion(N, p, q, alpha, rho)
        if not crit.admissible:
            continue
        theta = certificate_exponent(N, p, q, alpha, rho)
        if bool(crit) != (theta < 0):
            return False, (f"mismatch at N={N} p={p} q={q} "
                           f"alpha={alpha} rho={rho}")
        checked += 1
    return checked > 1000, f"{checked} admissible draws agree exactly"


def _lemma_cutoff_laplacian(scale: float):
    c_values = []
    ok = True
    details = []
    for T in (10.0, 100.0, 1000.0):
        chk = oracles.cutoff_laplacian_check("psi2", theta=4.0, T=T, dim=1)
        ok = ok and chk.passed
        c_values.append(chk.c_emp)
        details.append(f"T={T:g}: order {chk.order:.2f}")
    spread = (max(c_values) - min(c_values)) / max(c_values)
    ok = ok and spread <= 0.05 * scale
    chk1 = oracles.cutoff_laplacian_check("psi1", theta=4.0, T=100.0, dim=1)
    chk2 = oracles.cutoff_laplacian_check("psi2", theta=4.0, T=100.0, dim=2,
                                          points=801)
    ok = ok and chk1.passed and chk2.passed
    details.append(f"C spread {spread:.2%}; psi1 order {chk1.order:.2f}; "
                   f"2d order {chk2.order:.2f}")
    return ok, "; ".join(details)


def _lemma_w_condition(scale: float):
    good = ProfileSpec.gaussian(1.0, 1.0, (0.0,))
    rep_good = oracles.w_condition_check(good, dim=1)
    mixed = ProfileSpec.gaussian_sum(
        [(0.8, 1.0, (0.0,)), (-1.0, 2.0, (0.0,))])
    rep_mixed = oracles.w_condition_check(mixed, dim=1)
    # independent quadrature of the worst kernel average found
    lam, x0 = rep_mixed.argmin
    yy = np.linspace(-30.0, 30.0, 240_001)
    wvals = 0.8 * np.exp(-yy**2) - np.exp(-2.0 * yy**2)
    direct = float(np.trapezoid(
        np.exp(-((x0[0] - yy) ** 2) / lam) * wvals, yy))
    ok = (
        rep_good.holds_kernel_nonneg
        and rep_good.integral_positive
        and rep_mixed.integral_positive
        and not rep_mixed.holds_kernel_nonneg
        and abs(direct - rep_mixed.min_kernel_average) <= 1e-8 * scale
    )
    return ok, (f"good min {rep_good.min_kernel_average:.2e}; mixed min "
                f"{rep_mixed.min_kernel_average:.6e} vs quadrature {direct:.6e}")


def _lemma_certificate_scaling(scale: float):
    w = ProfileSpec.gaussian(1.0, 1.0, (0.0, 0.0, 0.0))
    rep = oracles.certificate_scaling_check(
        3, 1.5, 1.25, 1.0, -0.5, w=w, tol=0.1 * scale)
    sign_ok = rep.applicable and rep.sign_gap is not None and (
        (rep.sign_gap > 0) == (rep.theta < 0))
    ok = rep.passed and sign_ok
    return ok, (f"slope_I1 {rep.slope_I1:.3f} (bound {rep.slope_bound_I1:.3f}), "
                f"slope_F {rep.slope_F:.3f} (expected {rep.slope_expected_F:.3f}), "
                f"gap {rep.sign_gap:.3f} vs -theta {-rep.theta:.3f}")


_LEMMAS = {
    "young": _lemma_young,
    "contraction": _lemma_contraction,
    "mittag_leffler": _lemma_mittag_leffler,
    "gronwall": _lemma_gronwall,
    "exponent_sign": _lemma_exponent_sign,
    "cutoff_laplacian": _lemma_cutoff_laplacian,
    "w_condition": _lemma_w_condition,
    "certificate_scaling": _lemma_certificate_scaling,
}


def cmd_verify(args) -> int:
    names = [args.lemma] if args.lemma else list(_LEMMAS)
    verdicts = {}
    all_ok = True
    for name in names:
        passed, detail = _LEMMAS[name](args.tolerance_scale)
        verdicts[name] = {"passed": passed, "detail": detail}
        all_ok = all_ok and passed
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    if args.out:
        out = _resolve_out(args.out)
        out.write_text(json.dumps(
            {"lemmas": verdicts, "all_passed": all_ok}, indent=2) + "\n")
        print(f"wrote {out}", file=sys.stderr)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="fujita-lab",
                     description="semilinear heat blow-up laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_exp = sub.add_parser("exponents", help="critical exponent report")
    p_exp.add_argument("--spec", required=True, help="problem JSON file")
    p_exp.add_argument("--format", choices=("table", "json"), default="table")
    p_exp.add_argument("--out", help="also write the JSON report here")
    p_exp.set_defaults(func=cmd_exponents)

    p_sim = sub.add_parser("simulate", help="integrate one problem")
    p_sim.add_argument("--spec", required=True)
    p_sim.add_argument("--t-end", type=float, default=10.0)
    p_sim.add_argument("--dt0", type=float, default=1e-2)
    p_sim.add_argument("--threshold", type=float, default=1e8)
    p_sim.add_argument("--half-width", type=float, default=16.0)
    p_sim.add_argument("--points", type=int, default=None)
    p_sim.add_argument("--no-adapt", action="store_true")
    p_sim.add_argument("--disable-nonlinearity", action="store_true")
    p_sim.add_argument("--out-prefix")
    p_sim.set_defaults(func=cmd_simulate)

    p_swp = sub.add_parser("sweep", help="grid of simulations vs predictions")
    p_swp.add_argument("--spec", required=True)
    p_swp.add_argument("--axis", action="append", default=[],
                       metavar="NAME=START:STOP:COUNT",
                       help="vary p,q,alpha or rho (max two axes)")
    p_swp.add_argument("--amplitude", type=float, default=1.0,
                       help="scale factor applied to the initial profile")
    p_swp.add_argument("--epsilon", type=float, default=1e-2,
                       help="target norm for small-data rescaling")
    p_swp.add_argument("--t-end", type=float, default=10.0)
    p_swp.add_argument("--dt0", type=float, default=1e-2)
    p_swp.add_argument("--threshold", type=float, default=1e8)
    p_swp.add_argument("--half-width", type=float, default=16.0)
    p_swp.add_argument("--points", type=int, default=None)
    p_swp.add_argument("--jobs", type=int, default=1)
    p_swp.add_argument("--out-prefix")
    p_swp.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the analytic lemma checks")
    p_ver.add_argument("--lemma", choices=sorted(_LEMMAS))
    p_ver.add_argument("--tolerance-scale", type=float, default=1.0,
                       help="multiply tolerances (test hook; <1 tightens)")
    p_ver.add_argument("--out", help="write JSON verdicts here")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SpecFieldError as exc:
        print(f"error: field {exc.field_name!r}: {exc.reason}", file=sys.stderr)
        return 1
    except InadmissibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
