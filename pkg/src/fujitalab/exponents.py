"""Critical-exponent calculus for the nonlocal heat problem.

Every function here is plain arithmetic on its arguments: feed floats for the
usual double-precision answers, or ``fractions.Fraction`` throughout for exact
rational results (the test suite uses the latter as a shadow oracle).

Notation used across the package:

* ``delta``  -- effective exponent shift contributed by the nonlocal factor,
  ``alpha * (1 - 1/q)``.
* ``sigma``  -- time-weight exponent of the q-norm smoothing bound,
  ``dim * (p - 1) / (2 p q)``; the fixed-point argument needs ``p*sigma < 1``.
* ``p_star`` -- forcing-driven existence threshold in ``p`` as a function of
  the forcing singularity ``rho``.
* ``p_c``, ``ell``, ``r`` -- integrability exponents used by the small-data
  global-existence scheme; admissible ``1/r`` live in an open window.
* ``theta`` -- certificate exponent whose sign separates the blow-up range
  from the rest (negative means blow-up for positive-mass forcing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .problem import ProblemSpec, profile_integral, validate

__all__ = [
    "Regime",
    "BlowupCriterion",
    "GepExponents",
    "RWindow",
    "ExponentReport",
    "delta",
    "sigma",
    "fujita_scaling_p",
    "p_star",
    "blowup_criterion",
    "gep_exponents",
    "r_window",
    "beta",
    "beta_upper_bound",
    "certificate_exponent",
    "classify",
    "exponent_report",
]


class Regime(str, Enum):
    BLOWUP = "blowup"
    GLOBAL_SMALL_DATA = "global_small_data"
    GAP = "gap"
    INADMISSIBLE = "inadmissible"


def delta(alpha, q):
    """Nonlocal exponent shift alpha * (1 - 1/q).  Requires q >= 1."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return alpha * (1 - 1 / q)


def sigma(N, p, q):
    """Smoothing time-weight exponent N*(p-1)/(2*p*q)."""
    if p <= 1 or q < 1 or N < 1:
        raise ValueError("need N >= 1, p > 1, q >= 1")
    return N * (p - 1) / (2 * p * q)


def fujita_scaling_p(N, q, alpha):
    """The p solving p + delta = 1 + 2/N (zero-mass scaling balance)."""
    # written over the common denominator so integer N stays exact under Fractions
    return (N + 2 - N * delta(alpha, q)) / N


def p_star(N, rho):
    """Existence threshold in p induced by t^rho forcing.

    Finite for -1 < rho < 0 (value (N-2rho)/(N-2rho-2)), infinite for
    rho > 0.  The two one-sided limits disagree at rho = 0, so that point is
    a domain error rather than a value.
    """
    if rho <= -1:
        raise ValueError("rho must be > -1")
    if rho == 0:
        raise ValueError("p_star is undefined at rho = 0 (one-sided limits disagree)")
    if rho > 0:
        return math.inf
    den = N - 2 * rho - 2
    if den <= 0:
        raise ValueError("need N - 2*rho - 2 > 0 for the finite branch")
    return (N - 2 * rho) / den


@dataclass(frozen=True)
class BlowupCriterion:
    """Outcome of the blow-up inequality plus its admissibility flags."""

    holds: bool
    admissible: bool
    conditions: dict

    def __bool__(self) -> bool:
        return self.holds


def blowup_criterion(N, p, q, alpha, rho) -> BlowupCriterion:
    """Blow-up range test: p + N*delta/(N-2rho-2) < (N-2rho)/(N-2rho-2).

    Preconditions (N >= 3, rho <= 0, delta < 2/N) are reported as flags, not
    raised: ``admissible`` is False when any of them fails, and ``holds`` is
    still the literal inequality whenever the denominator is positive.
    """
    d = delta(alpha, q)
    den = N - 2 * rho - 2
    conditions = {
        "dim_ge_3": N >= 3,
        "rho_nonpos": -1 < rho <= 0,
        "delta_subcritical": d * N < 2,
        "denominator_positive": den > 0,
    }
    admissible = all(conditions.values())
    holds = bool(den > 0 and p + N * d / den < (N - 2 * rho) / den)
    return BlowupCriterion(holds, admissible, conditions)


@dataclass(frozen=True)
class GepExponents:
    """Global-existence exponent pack: entry threshold for p, p_c and ell."""

    threshold: object
    p_c: object
    ell: object
    conditions: dict

    @property
    def admissible(self) -> bool:
        return all(self.conditions.values())


def gep_exponents(N, p, q, alpha, rho) -> GepExponents:
    """Compute the small-data global-existence exponents.

    threshold = (N - 2 rho - N delta) / (N - 2 rho - 2)
    p_c = N ((p-1)(q-1) + delta q) / (2(q-1) + N delta)
    ell = N ((p-1)(q-1) + delta)
          / (2(q-1) + N delta + 2(rho+1)(p-1)(q-1) + 2(rho+1) delta)

    Raises ValueError when any denominator is nonpositive; hypothesis flags
    (dimension, rho range, delta subcritical, p >= threshold, q band) are
    reported in ``conditions``.
    """
    d = delta(alpha, q)
    den_thr = N - 2 * rho - 2
    den_pc = 2 * (q - 1) + N * d
    den_ell = den_pc + 2 * (rho + 1) * (p - 1) * (q - 1) + 2 * (rho + 1) * d
    for name, den in (("threshold", den_thr), ("p_c", den_pc), ("ell", den_ell)):
        if den <= 0:
            raise ValueError(f"{name} denominator must be positive, got {den}")
    threshold = (N - 2 * rho - N * d) / den_thr
    p_c = N * ((p - 1) * (q - 1) + d * q) / den_pc
    ell = N * ((p - 1) * (q - 1) + d) / den_ell
    conditions = {
        "dim_ge_2": N >= 2,
        "rho_in_minus1_0": -1 < rho < 0,
        "delta_subcritical": d * N < 2,
        "p_ge_threshold": p >= threshold,
        "q_band": N * (p - 1) <= 2 * q and q <= p,
    }
    return GepExponents(threshold, p_c, ell, conditions)


@dataclass(frozen=True)
class RWindow:
    """Open admissibility window for 1/r, plus the printed helper inequalities.

    ``lo``/``hi`` bound 1/r; the window is the max/min of the two candidate
    bounds on each side.  ``e1``..``e4`` are the four auxiliary inequalities
    evaluated exactly as printed; e4's long form is reported independently and
    is not folded into the window.
    """

    lo: object
    hi: object
    lo_candidates: tuple
    hi_candidates: tuple
    e1: bool
    e2: bool
    e3: bool
    e4: bool

    @property
    def nonempty(self) -> bool:
        return self.lo < self.hi

    def contains_r(self, r) -> bool:
        inv = 0 if r == math.inf else 1 / r
        return self.lo < inv < self.hi


def r_window(N, p, q, alpha, rho) -> RWindow:
    """Admissible window in 1/r for the global-existence fixed point."""
    d = delta(alpha, q)
    gep = gep_exponents(N, p, q, alpha, rho)
    p_c = gep.p_c
    mix = (p - 1) * (q - 1) + q * d  # recurring combination
    if mix <= 0:
        raise ValueError("window denominators require (p-1)(q-1) + q*delta > 0")
    lo1 = (2 * (q - 1) + N * d * p) / (N * p * mix)
    lo2 = 1 / p_c + 2 * rho / N + 2 * d / (N * p * mix)
    hi1 = 1 / p_c
    hi2 = (p - 1) * (q + d - 1) / (p * mix)
    e1 = bool(p >= gep.threshold)
    e2 = bool(lo1 < hi1)
    e3 = bool(lo1 < hi2)
    e4_lhs = (
        1 / p_c
        + 2 * rho / N
        + ((p - 1) * (2 * N * q * p - N * q * d * (2 - d)) - N * d - 2 * p * q * d)
        / (N * p * (p - 1) * mix)
    )
    e4 = bool(e4_lhs < N * (p - 1) * (q + d - 1) / (N * p * mix))
    return RWindow(
        lo=max(lo1, lo2),
        hi=min(hi1, hi2),
        lo_candidates=(lo1, lo2),
        hi_candidates=(hi1, hi2),
        e1=e1,
        e2=e2,
        e3=e3,
        e4=e4,
    )


def beta(N, p_c, r):
    """Smoothing budget beta = (N/2) * (1/p_c - 1/r); needs r > p_c."""
    inv_r = 0 if r == math.inf else 1 / r
    if not r > p_c:
        raise ValueError("need r > p_c")
    return N * (1 / p_c - inv_r) / 2


def beta_upper_bound(p, q, alpha):
    """Admissible ceiling for beta: (q-1)/(p(q-1) + q*delta) == 1/(p+alpha)."""
    d = delta(alpha, q)
    den = p * (q - 1) + q * d
    if den <= 0:
        raise ValueError("beta bound denominator must be positive")
    return (q - 1) / den


def certificate_exponent(N, p, q, alpha, rho):
    """theta = (N - 2 rho - 2)/2 + (N delta - 2)/(2 (p-1)).

    For positive-mass forcing with delta < 2/N, theta < 0 is equivalent to the
    blow-up inequality; its sign is what the scaling certificate measures.
    """
    if p <= 1:
        raise ValueError("p must be > 1")
    d = delta(alpha, q)
    return (N - 2 * rho - 2) / 2 + (N * d - 2) / (2 * (p - 1))


def classify(spec: ProblemSpec) -> Regime:
    """Coarse regime verdict for a full problem record.

    blowup            -- criterion admissible and true, and the forcing has
                         strictly positive total integral;
    global_small_data -- every small-data global-existence hypothesis holds
                         (exponent pack admissible and a nonempty r-window);
    gap               -- admissible parameters matching neither set;
    inadmissible      -- base parameter violations.
    """
    rep = validate(spec)
    if not rep.base_ok:
        return Regime.INADMISSIBLE
    bc = blowup_criterion(spec.dim, spec.p, spec.q, spec.alpha, spec.rho)
    w_mass = profile_integral(spec.w, spec.dim)
    if bc.admissible and bc.holds and w_mass > 0:
        return Regime.BLOWUP
    try:
        gep = gep_exponents(spec.dim, spec.p, spec.q, spec.alpha, spec.rho)
        if gep.admissible:
            if r_window(spec.dim, spec.p, spec.q, spec.alpha, spec.rho).nonempty:
                return Regime.GLOBAL_SMALL_DATA
    except ValueError:
        pass
    return Regime.GAP


_REPORT_KEYS = (
    "dim",
    "p",
    "q",
    "alpha",
    "rho",
    "delta",
    "sigma",
    "p_sigma",
    "fujita_scaling_p",
    "p_star",
    "blowup_admissible",
    "blowup_holds",
    "gep_threshold",
    "p_c",
    "ell",
    "r_window_lo",
    "r_window_hi",
    "r_window_nonempty",
    "beta_mid",
    "beta_upper_bound",
    "certificate_exponent",
    "w_integral",
    "regime",
)


@dataclass(frozen=True)
class ExponentReport:
    """Flat, fixed-order summary of every derived exponent for one problem.

    Fields that are undefined for the given parameters (e.g. p_star at
    rho = 0, or the window when a denominator degenerates) are None.
    """

    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError as exc:
            raise AttributeError(name) from exc

    def to_json_dict(self) -> dict:
        return {k: _jsonable(self.values[k]) for k in _REPORT_KEYS}

    def table(self) -> str:
        width = max(len(k) for k in _REPORT_KEYS)
        lines = [f"{k.ljust(width)}  {_fmt(self.values[k])}" for k in _REPORT_KEYS]
        return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, Regime):
        return v.value
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _fmt(v) -> str:
    if v is None:
        return "undefined"
    if isinstance(v, Regime):
        return v.value
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def exponent_report(spec: ProblemSpec) -> ExponentReport:
    """Evaluate the whole calculus for one problem, None-ing undefined parts."""
    N, p, q, a, rho = spec.dim, spec.p, spec.q, spec.alpha, spec.rho
    vals = {k: None for k in _REPORT_KEYS}
    vals.update(dim=N, p=p, q=q, alpha=a, rho=rho)
    rep = validate(spec)
    if not rep.base_ok:
        vals["regime"] = Regime.INADMISSIBLE
        return ExponentReport(vals)
    vals["delta"] = delta(a, q)
    vals["sigma"] = sigma(N, p, q)
    vals["p_sigma"] = p * vals["sigma"]
    vals["fujita_scaling_p"] = fujita_scaling_p(N, q, a)
    try:
        vals["p_star"] = p_star(N, rho)
    except ValueError:
        pass
    bc = blowup_criterion(N, p, q, a, rho)
    vals["blowup_admissible"] = bc.admissible
    vals["blowup_holds"] = bc.holds
    try:
        gep = gep_exponents(N, p, q, a, rho)
        vals["gep_threshold"] = gep.threshold
        vals["p_c"] = gep.p_c
        vals["ell"] = gep.ell
        win = r_window(N, p, q, a, rho)
        vals["r_window_lo"] = win.lo
        vals["r_window_hi"] = win.hi
        vals["r_window_nonempty"] = win.nonempty
        if win.nonempty:
            inv_mid = (win.lo + win.hi) / 2
            vals["beta_mid"] = beta(N, gep.p_c, 1 / inv_mid)
    except ValueError:
        pass
    try:
        vals["beta_upper_bound"] = beta_upper_bound(p, q, a)
    except ValueError:
        pass
    vals["certificate_exponent"] = certificate_exponent(N, p, q, a, rho)
    vals["w_integral"] = profile_integral(spec.w, N)
    vals["regime"] = classify(spec)
    return ExponentReport(vals)
