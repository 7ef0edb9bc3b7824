"""Numerical verifiers for the analytic ingredients the solver leans on.

Each check here is an independent route to a claim used elsewhere: direct
sampling for the scalar inequalities, series with explicit remainder control
for the singular Gronwall bound, finite differences against the closed-form
radial Laplacian for the cutoff calculus, and log-log slope fits for the
space-time scaling certificate whose sign separates blow-up from existence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponents import certificate_exponent, delta
from .problem import ProfileSpec, profile_integral

__all__ = [
    "YoungRow",
    "young_check",
    "young_batch",
    "ContractionRow",
    "contraction_bound_check",
    "contraction_constant_study",
    "MLParams",
    "MLResult",
    "SeriesDivergenceError",
    "mittag_leffler",
    "gronwall_bound",
    "smoothstep",
    "smoothstep_d1",
    "smoothstep_d2",
    "CUTOFF_KINDS",
    "cutoff_value",
    "cutoff_d1",
    "cutoff_d2",
    "radial_power_laplacian",
    "CutoffCheck",
    "cutoff_laplacian_check",
    "WConditionReport",
    "w_condition_check",
    "CertificateReport",
    "certificate_scaling_check",
]


# ---------------------------------------------------------------------------
# scalar product inequality

@dataclass(frozen=True)
class YoungRow:
    lhs: float
    rhs: float
    passed: bool


def young_check(a: float, b: float, p: float, q: float, eps: float) -> YoungRow:
    """ab <= eps*a^p + (p*eps)^(-q/p) * b^q / q for conjugate p, q.

    Conjugacy |1/p + 1/q - 1| <= 1e-12 is required, not checked for truth.
    """
    if a < 0 or b < 0 or eps <= 0:
        raise ValueError("need a, b >= 0 and eps > 0")
    if p <= 1 or abs(1.0 / p + 1.0 / q - 1.0) > 1e-12:
        raise ValueError("p, q must be conjugate exponents with p > 1")
    lhs = a * b
    rhs = eps * a**p + (p * eps) ** (-q / p) * b**q / q
    return YoungRow(lhs, rhs, lhs <= rhs + 1e-12)


def young_batch(n: int = 100_000, seed: int = 0, slack: float = 1e-12):
    """Vectorized sweep over random (a, b, p, eps); returns (all_ok, max_excess)."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 10.0, n)
    b = rng.uniform(0.0, 10.0, n)
    p = rng.uniform(1.05, 8.0, n)
    q = p / (p - 1.0)
    eps = 10.0 ** rng.uniform(-3, 3, n)
    lhs = a * b
    rhs = eps * a**p + (p * eps) ** (-q / p) * b**q / q
    excess = lhs - rhs
    return bool(np.all(excess <= slack)), float(np.max(excess))


# ---------------------------------------------------------------------------
# product-difference contraction bound

@dataclass(frozen=True)
class ContractionRow:
    lhs: float
    rhs: float
    ratio: float


def contraction_bound_check(
    a: float, b: float, xnorm: float, ynorm: float, diffnorm: float,
    p: float, alpha: float,
) -> ContractionRow:
    """Ratio of |a^p x^alpha - b^p y^alpha| to its splitting bound.

    The bound splits the difference through the scalar factor and the norm
    factor; for alpha >= 1 the norm part is Lipschitz
    (diffnorm * (x^(alpha-1) + y^(alpha-1))), for alpha < 1 it is the Hoelder
    piece diffnorm^alpha.  Inputs must be consistent norms:
    |xnorm - ynorm| <= diffnorm up to roundoff.
    """
    vals = (a, b, xnorm, ynorm, diffnorm)
    if any(v < 0 for v in vals):
        raise ValueError("norm inputs must be nonnegative")
    if p < 1 or alpha < 0:
        raise ValueError("need p >= 1, alpha >= 0")
    if abs(xnorm - ynorm) > diffnorm + 1e-12 * (1.0 + xnorm + ynorm):
        raise ValueError("inconsistent norms: |xnorm - ynorm| exceeds diffnorm")
    lhs = abs(a**p * xnorm**alpha - b**p * ynorm**alpha)
    scalar_part = ynorm**alpha * abs(a - b) * (a ** (p - 1) + b ** (p - 1))
    if alpha >= 1:
        norm_part = a**p * diffnorm * (xnorm ** (alpha - 1) + ynorm ** (alpha - 1))
    else:
        norm_part = a**p * diffnorm**alpha
    rhs = scalar_part + norm_part
    ratio = 0.0 if lhs == 0 else (math.inf if rhs == 0 else lhs / rhs)
    return ContractionRow(lhs, rhs, ratio)


def contraction_constant_study(
    p: float, alpha: float, n: int = 100_000, seed: int = 0
):
    """Empirical sup of the contraction ratio over scalar realizations.

    Draws (a, b, x, y) uniform in [0, 2] with diffnorm = |x - y| and returns
    (max over the first n//10 draws, max over all n).  A well-behaved bound
    has the two within a few percent of each other: the sup saturates early.
    """
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 2.0, n)
    b = rng.uniform(0.0, 2.0, n)
    x = rng.uniform(0.0, 2.0, n)
    y = rng.uniform(0.0, 2.0, n)
    diff = np.abs(x - y)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = np.abs(a**p * x**alpha - b**p * y**alpha)
        scalar_part = y**alpha * np.abs(a - b) * (a ** (p - 1) + b ** (p - 1))
        if alpha >= 1:
            norm_part = a**p * diff * (x ** (alpha - 1) + y ** (alpha - 1))
        else:
            norm_part = a**p * diff**alpha
        rhs = scalar_part + norm_part
        ratio = np.where(lhs == 0, 0.0, lhs / np.where(rhs == 0, np.nan, rhs))
    ratio = np.nan_to_num(ratio, nan=0.0)
    head = float(np.max(ratio[: max(1, n // 10)]))
    full = float(np.max(ratio))
    return head, full


# ---------------------------------------------------------------------------
# Mittag-Leffler series and the singular Gronwall bound

class SeriesDivergenceError(ArithmeticError):
    """Series terms or partial sums escaped double range before convergence."""


@dataclass(frozen=True)
class MLParams:
    order: float        # in (0, 1]; order 1 is the plain exponential
    argument: float     # z >= 0
    max_terms: int = 100_000

    def __post_init__(self):
        if not (0 < self.order <= 1):
            raise ValueError("order must be in (0, 1]")
        if self.argument < 0 or not math.isfinite(self.argument):
            raise ValueError("argument must be finite and >= 0")


@dataclass(frozen=True)
class MLResult:
    value: float
    remainder_bound: float
    terms_used: int

    def __float__(self) -> float:
        return self.value


def mittag_leffler(params: MLParams) -> MLResult:
    """E_order(z) = sum z^n / Gamma(n*order + 1) with a certified tail bound.

    Terms are formed in log space, so the gamma never overflows on its own.
    Summation stops once the term ratio has dropped below 1/2 and the next
    term is below 1e-16 of the partial sum; the geometric tail then bounds
    the remainder by twice the next term.
    """
    nu, z = params.order, params.argument
    if z == 0.0:
        return MLResult(1.0, 0.0, 1)
    log_z = math.log(z)
    total = 0.0
    term = 1.0
    for n in range(params.max_terms):
        total += term
        if not math.isfinite(total):
            raise SeriesDivergenceError("partial sums overflow double range")
        log_next = (n + 1) * log_z - math.lgamma((n + 1) * nu + 1.0)
        next_term = math.exp(log_next) if log_next < 709.0 else math.inf
        ratio = next_term / term if term > 0 else math.inf
        if ratio < 0.5 and next_term <= 1e-16 * total:
            return MLResult(total, 2.0 * next_term, n + 1)
        term = next_term
        if not math.isfinite(term):
            raise SeriesDivergenceError("series terms overflow double range")
    raise SeriesDivergenceError(f"no convergence within {params.max_terms} terms")


def gronwall_bound(A: float, M: float, sigma: float, t: float) -> float:
    """Closed-form majorant A * E_(1-sigma)(M * Gamma(1-sigma) * t^(1-sigma)).

    This is the exact solution of psi = A + M * int (t-s)^(-sigma) psi ds, so
    any psi satisfying the inequality sits below it.  A = 0 collapses to 0.
    """
    if A < 0 or M < 0 or t < 0:
        raise ValueError("need A, M, t >= 0")
    if not (0 <= sigma < 1):
        raise ValueError("sigma must be in [0, 1)")
    if A == 0.0 or t == 0.0:
        return float(A)
    z = M * math.gamma(1.0 - sigma) * t ** (1.0 - sigma)
    return A * mittag_leffler(MLParams(1.0 - sigma, z)).value


# ---------------------------------------------------------------------------
# smooth cutoffs and their radial power Laplacian

CUTOFF_KINDS = ("psi1", "psi2")


def _bump(s):
    """exp(-1/s) continued by 0 for s <= 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, B(u)/(B(u)+B(1-u)) between."""
    u = np.asarray(u, dtype=float)
    out = np.where(u >= 1.0, 1.0, 0.0)
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    bu = np.exp(-1.0 / um)
    bc = np.exp(-1.0 / (1.0 - um))
    out[mid] = bu / (bu + bc)
    return out


def _step_parts(um):
    """B, C and their first two derivatives on the open interval (0, 1)."""
    bu = np.exp(-1.0 / um)
    bc = np.exp(-1.0 / (1.0 - um))
    bu1 = bu / um**2
    bc1 = -bc / (1.0 - um) ** 2
    bu2 = bu * (1.0 - 2.0 * um) / um**4
    bc2 = bc * (2.0 * um - 1.0) / (1.0 - um) ** 4
    return bu, bc, bu1, bc1, bu2, bc2


def smoothstep_d1(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    mid = (u > 0.0) & (u < 1.0)
    bu, bc, bu1, bc1, _, _ = _step_parts(u[mid])
    d = bu + bc
    out[mid] = (bu1 * bc - bu * bc1) / d**2
    return out


def smoothstep_d2(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    mid = (u > 0.0) & (u < 1.0)
    bu, bc, bu1, bc1, bu2, bc2 = _step_parts(u[mid])
    d = bu + bc
    d1 = bu1 + bc1
    num = bu1 * bc - bu * bc1
    out[mid] = (bu2 * bc - bu * bc2) / d**2 - 2.0 * num * d1 / d**3
    return out


def cutoff_value(kind: str, s):
    """psi1: plateau [1/2, 3/4] inside support [1/4, 4/5]; psi2: 1 on [0,1], 0 past 2."""
    s = np.asarray(s, dtype=float)
    if kind == "psi1":
        return smoothstep(4.0 * s - 1.0) * smoothstep(16.0 - 20.0 * s)
    if kind == "psi2":
        return smoothstep(2.0 - s)
    raise ValueError(f"unknown cutoff kind {kind!r}")


def cutoff_d1(kind: str, s):
    s = np.asarray(s, dtype=float)
    if kind == "psi1":
        a, b = 4.0 * s - 1.0, 16.0 - 20.0 * s
        return 4.0 * smoothstep_d1(a) * smoothstep(b) - 20.0 * smoothstep(a) * smoothstep_d1(b)
    if kind == "psi2":
        return -smoothstep_d1(2.0 - s)
    raise ValueError(f"unknown cutoff kind {kind!r}")


def cutoff_d2(kind: str, s):
    s = np.asarray(s, dtype=float)
    if kind == "psi1":
        a, b = 4.0 * s - 1.0, 16.0 - 20.0 * s
        return (
            16.0 * smoothstep_d2(a) * smoothstep(b)
            - 160.0 * smoothstep_d1(a) * smoothstep_d1(b)
            + 400.0 * smoothstep(a) * smoothstep_d2(b)
        )
    if kind == "psi2":
        return smoothstep_d2(2.0 - s)
    raise ValueError(f"unknown cutoff kind {kind!r}")


def radial_power_laplacian(kind: str, theta: float, T: float, dim: int, y):
    """Closed-form Laplacian of g(|x|^2/T)^theta at y = |x|^2/T.

    Delta = (2 theta dim g' g + 4 theta y g'' g + 4 theta (theta-1) y g'^2)
            * g^(theta-2) / T.
    Needs theta > 2 so the edge factor g^(theta-2) vanishes where g does.
    """
    if theta <= 2:
        raise ValueError("the power Laplacian form needs theta > 2")
    y = np.asarray(y, dtype=float)
    g = cutoff_value(kind, y)
    g1 = cutoff_d1(kind, y)
    g2 = cutoff_d2(kind, y)
    bracket = (
        2.0 * theta * dim * g1 * g
        + 4.0 * theta * y * g2 * g
        + 4.0 * theta * (theta - 1.0) * y * g1**2
    )
    power = np.zeros_like(g)
    pos = g > 0
    power[pos] = g[pos] ** (theta - 2.0)
    return bracket * power / T


@dataclass(frozen=True)
class CutoffCheck:
    error_coarse: float
    error_fine: float
    order: float
    c_emp: float
    passed: bool


def cutoff_laplacian_check(
    kind: str = "psi2",
    theta: float = 4.0,
    T: float = 100.0,
    dim: int = 1,
    points: int = 2001,
    min_order: float = 1.6,
) -> CutoffCheck:
    """Finite differences against the closed-form radial Laplacian.

    The composite G(x) = g(|x|^2/T)^theta is differenced centrally on a grid
    covering the support; halving h must shrink the sup mismatch at second
    order.  The empirical constant c_emp = sup T |Delta G| / g^(theta-2) is
    taken from the differenced Laplacian over the region g >= 1e-3, where the
    quotient is numerically clean; by design it depends on the cutoff alone,
    not on T, which the verification suite exercises across decades of T.
    """
    if kind not in CUTOFF_KINDS:
        raise ValueError(f"unknown cutoff kind {kind!r}")
    y_max = 0.8 if kind == "psi1" else 2.0
    half = math.sqrt(y_max * T) * 1.05

    def fd_error_and_ratio(n):
        if dim == 1:
            x = np.linspace(-half, half, n)
            h = x[1] - x[0]
            y = x**2 / T
            G = cutoff_value(kind, y) ** theta
            lap_fd = (G[2:] - 2.0 * G[1:-1] + G[:-2]) / h**2
            y_in = y[1:-1]
            g_in = cutoff_value(kind, y_in)
        elif dim == 2:
            x = np.linspace(-half, half, n)
            h = x[1] - x[0]
            xx, yy = np.meshgrid(x, x, indexing="ij")
            y = (xx**2 + yy**2) / T
            G = cutoff_value(kind, y) ** theta
            lap_fd = (
                G[2:, 1:-1] + G[:-2, 1:-1] + G[1:-1, 2:] + G[1:-1, :-2]
                - 4.0 * G[1:-1, 1:-1]
            ) / h**2
            y_in = y[1:-1, 1:-1]
            g_in = cutoff_value(kind, y_in)
        else:
            raise ValueError("finite-difference check supports dim 1 or 2")
        lap_exact = radial_power_laplacian(kind, theta, T, dim, y_in)
        err = float(np.max(np.abs(lap_fd - lap_exact)))
        clean = g_in >= 1e-3
        c_emp = float(np.max(T * np.abs(lap_fd[clean]) / g_in[clean] ** (theta - 2.0)))
        return err, c_emp

    e_coarse, _ = fd_error_and_ratio(points)
    e_fine, c_emp = fd_error_and_ratio(2 * points - 1)
    order = math.log2(e_coarse / e_fine) if e_fine > 0 else math.inf
    return CutoffCheck(e_coarse, e_fine, order, c_emp, order >= min_order)


# ---------------------------------------------------------------------------
# forcing-profile certificate

@dataclass(frozen=True)
class WConditionReport:
    min_kernel_average: float
    argmin: tuple
    holds_kernel_nonneg: bool
    integral: float
    integral_positive: bool


def w_condition_check(
    w: ProfileSpec,
    dim: int,
    lambdas=None,
    x_extent: float = 12.0,
    x_points: int = 25,
    tol: float = 1e-10,
) -> WConditionReport:
    """Grid certificate for the two forcing conditions.

    Scans the closed-form Gaussian-kernel averages
    integral exp(-|x-y|^2/lambda) w(y) dy over widths lambda (log-spaced
    1e-3..1e6 by default) and centers x in a box, reporting the minimum; the
    first condition asks it to be nonnegative for every width and center.
    The second is plain positivity of the total integral.  Radial profiles
    collapse the center scan to a ray.
    """
    if lambdas is None:
        lambdas = np.logspace(-3, 6, 40)
    radial = all(all(c == 0 for c in t.center) for t in w.terms)
    if radial:
        rr = np.linspace(0.0, x_extent, 201)
        centers = np.zeros((rr.size, dim))
        centers[:, 0] = rr
    else:
        ax = np.linspace(-x_extent, x_extent, x_points)
        centers = np.stack(
            np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1
        ).reshape(-1, dim)
    best = math.inf
    best_at = (math.nan, None)
    for lam in lambdas:
        rate = 1.0 / lam
        # vectorized closed form over all centers at once
        total = np.zeros(centers.shape[0])
        for t in w.terms:
            s = rate + t.rate
            d2 = np.sum((centers - np.asarray(t.center)) ** 2, axis=1)
            total += (
                t.coefficient
                * (math.pi / s) ** (dim / 2.0)
                * np.exp(-(rate * t.rate / s) * d2)
            )
        i = int(np.argmin(total))
        if total[i] < best:
            best = float(total[i])
            best_at = (float(lam), tuple(float(c) for c in centers[i]))
    integral = profile_integral(w, dim)
    return WConditionReport(
        min_kernel_average=best,
        argmin=best_at,
        holds_kernel_nonneg=best >= -tol,
        integral=integral,
        integral_positive=integral > 0,
    )


# ---------------------------------------------------------------------------
# space-time scaling certificate

@dataclass(frozen=True)
class CertificateReport:
    T_list: tuple
    I1_values: tuple
    F_values: tuple
    slope_I1: float
    slope_bound_I1: float
    slope_F: float | None
    slope_expected_F: float
    sign_gap: float | None
    theta: float
    applicable: bool
    passed: bool


def _simpson(fvals: np.ndarray, h: float) -> float:
    n = fvals.size
    if n % 2 == 0:
        raise ValueError("simpson needs an odd number of nodes")
    return float(h / 3.0 * (fvals[0] + fvals[-1]
                            + 4.0 * fvals[1:-1:2].sum() + 2.0 * fvals[2:-2:2].sum()))


def certificate_scaling_check(
    N: int,
    p: float,
    q: float,
    alpha: float,
    rho: float,
    w: ProfileSpec | None = None,
    T_list=(1e2, 1e3, 1e4),
    time_points: int = 4097,
    radial_points: int = 4097,
    space_points: int = 65,
    tol: float = 0.1,
) -> CertificateReport:
    """Log-log slopes of the rescaled test-function functionals.

    I1(T) couples the time weight t^(N*delta/(2(p-1))) under the time cutoff
    with the space integral of |Delta psi2^kappa|^(p/(p-1)) * psi2^(-kappa/(p-1)),
    kappa = 2p/(p-1); its slope in ln T must stay below
    1 + N/2 - p/(p-1) + N*delta/(2(p-1)) (+tol).  F(T) couples t^rho under the
    same time cutoff with the w integral under the space cutoff; its slope
    must reach rho + 1 (-tol).  The difference of the two slopes estimates
    -theta, the certificate exponent, and its sign is the decisive part.
    """
    d = delta(alpha, q)
    kappa = 2.0 * p / (p - 1.0)
    pw = p / (p - 1.0)
    t_weight_exp = N * d / (2.0 * (p - 1.0))

    tau = np.linspace(0.0, 1.0, time_points)
    psi1_pow = cutoff_value("psi1", tau) ** pw

    # radial reduction of the space factor; the cutoff powers cancel exactly:
    # |bracket * g^(kappa-2)|^(p/(p-1)) * g^(-kappa/(p-1)) == |bracket|^(p/(p-1))
    # because (kappa-2)*p/(p-1) == kappa/(p-1) for kappa = 2p/(p-1).
    y = np.linspace(0.0, 2.0, radial_points)
    g = cutoff_value("psi2", y)
    g1 = cutoff_d1("psi2", y)
    g2 = cutoff_d2("psi2", y)
    bracket = (
        2.0 * kappa * N * g1 * g
        + 4.0 * kappa * y * g2 * g
        + 4.0 * kappa * (kappa - 1.0) * y * g1**2
    )
    omega = 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)
    with np.errstate(divide="ignore"):
        radial_integrand = np.abs(bracket) ** pw * np.where(y > 0, y, np.nan) ** (
            N / 2.0 - 1.0
        )
    radial_integrand[0] = 0.0  # bracket vanishes with y faster than any power
    radial_base = _simpson(np.nan_to_num(radial_integrand), y[1] - y[0])

    I1_vals = []
    F_vals = []
    for T in T_list:
        upper = (T - 1.0) / T
        mask = tau <= upper
        time_I1 = T * _simpson(
            np.where(mask, (1.0 + T * tau) ** t_weight_exp * psi1_pow, 0.0),
            tau[1] - tau[0],
        )
        space_I1 = (omega / 2.0) * T ** (N / 2.0) * T ** (-pw) * radial_base
        I1_vals.append(time_I1 * space_I1)
        if w is not None and w.terms:
            time_F = T * _simpson(
                np.where(mask, (1.0 + T * tau) ** rho * psi1_pow, 0.0),
                tau[1] - tau[0],
            )
            F_vals.append(time_F * _space_cutoff_integral(w, N, T, kappa, space_points))
        else:
            F_vals.append(0.0)

    lnT = np.log(np.asarray(T_list))
    slope_I1 = float(np.polyfit(lnT, np.log(I1_vals), 1)[0])
    slope_bound = 1.0 + N / 2.0 - pw + t_weight_exp
    applicable = all(v > 0 for v in F_vals)
    slope_F = float(np.polyfit(lnT, np.log(F_vals), 1)[0]) if applicable else None
    theta = certificate_exponent(N, p, q, alpha, rho)
    sign_gap = (slope_F - slope_I1) if applicable else None
    passed = slope_I1 <= slope_bound + tol and (
        not applicable or slope_F >= (rho + 1.0) - tol
    )
    return CertificateReport(
        T_list=tuple(T_list),
        I1_values=tuple(I1_vals),
        F_values=tuple(F_vals),
        slope_I1=slope_I1,
        slope_bound_I1=slope_bound,
        slope_F=slope_F,
        slope_expected_F=rho + 1.0,
        sign_gap=sign_gap,
        theta=theta,
        applicable=applicable,
        passed=passed,
    )


def _space_cutoff_integral(w: ProfileSpec, N: int, T: float, kappa: float, n: int) -> float:
    """Tensor-trapezoid integral of psi2(|x|^2/T)^kappa * w over w's support."""
    reach = max(
        (abs(c) for t in w.terms for c in t.center), default=0.0
    ) + 10.0 / math.sqrt(min(t.rate for t in w.terms))
    ax = np.linspace(-reach, reach, n)
    pts = np.stack(np.meshgrid(*([ax] * N), indexing="ij"), axis=-1)
    r2 = np.sum(pts**2, axis=-1)
    from .problem import evaluate_profile

    vals = cutoff_value("psi2", r2 / T) ** kappa * evaluate_profile(w, pts)
    h = ax[1] - ax[0]
    for _ in range(N):
        vals = np.trapezoid(vals, dx=h, axis=-1)
    return float(vals)
