"""Problem data: Gaussian-sum profiles and the full parameter record.

A problem instance is the dimension, the four scalar exponents (p, q, alpha,
rho) and two spatial profiles: the initial state u0 and the forcing shape w.
Profiles are finite sums of isotropic Gaussians so that their integrals and
kernel-weighted averages have closed forms the rest of the package can lean on.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GaussianTerm",
    "ProfileSpec",
    "ProblemSpec",
    "ValidationReport",
    "SpecFieldError",
    "InadmissibleError",
    "evaluate_profile",
    "profile_integral",
    "gaussian_weighted_integral",
    "profile_min_rate",
    "scale_profile",
    "check_parameters",
    "validate",
]

PROFILE_KINDS = ("gaussian_sum", "zero")

_BASE_CONDITIONS = (
    "dim_positive_integer",
    "p_gt_1",
    "q_ge_1",
    "alpha_nonneg",
    "rho_gt_minus_1",
)


class SpecFieldError(ValueError):
    """Raised when a serialized problem record has a malformed field."""

    def __init__(self, field_name: str, reason: str):
        self.field_name = field_name
        self.reason = reason
        super().__init__(f"field '{field_name}': {reason}")


class InadmissibleError(ValueError):
    """Raised for structurally valid records whose parameter values fall
    outside the admissible base region (dim >= 1 integer, p > 1, q >= 1,
    alpha >= 0, rho > -1)."""

    def __init__(self, failed_conditions):
        self.failed_conditions = tuple(failed_conditions)
        super().__init__(
            "inadmissible base parameters: " + ", ".join(self.failed_conditions))


@dataclass(frozen=True)
class GaussianTerm:
    """One term c * exp(-rate * |x - center|^2)."""

    coefficient: float
    rate: float
    center: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "rate", float(self.rate))
        if not math.isfinite(self.coefficient):
            raise ValueError("gaussian coefficient must be finite")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ValueError("gaussian rate must be positive and finite")
        if not all(math.isfinite(c) for c in self.center):
            raise ValueError("gaussian center must be finite")


@dataclass(frozen=True)
class ProfileSpec:
    """A spatial profile: either a finite Gaussian sum or identically zero."""

    kind: str
    terms: tuple[GaussianTerm, ...] = ()

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        terms = tuple(
            t if isinstance(t, GaussianTerm) else GaussianTerm(*t) for t in self.terms
        )
        object.__setattr__(self, "terms", terms)
        if self.kind == "zero" and terms:
            raise ValueError("zero profile carries no terms")
        if self.kind == "gaussian_sum" and not terms:
            raise ValueError("gaussian_sum needs at least one term")

    @classmethod
    def zero(cls) -> "ProfileSpec":
        return cls("zero")

    @classmethod
    def gaussian(cls, coefficient: float, rate: float, center=(0.0,)) -> "ProfileSpec":
        return cls("gaussian_sum", (GaussianTerm(coefficient, rate, center),))

    @classmethod
    def gaussian_sum(cls, terms) -> "ProfileSpec":
        return cls("gaussian_sum", tuple(GaussianTerm(*t) for t in terms))

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "terms": [[t.coefficient, t.rate, list(t.center)] for t in self.terms],
        }

    @classmethod
    def from_json_dict(cls, d: dict, field_name: str = "profile") -> "ProfileSpec":
        if not isinstance(d, dict):
            raise SpecFieldError(field_name, "profile must be an object")
        kind = d.get("kind")
        if kind not in PROFILE_KINDS:
            raise SpecFieldError(f"{field_name}.kind", f"must be one of {PROFILE_KINDS}")
        raw_terms = d.get("terms", [])
        if not isinstance(raw_terms, list):
            raise SpecFieldError(f"{field_name}.terms", "must be a list")
        terms = []
        for i, t in enumerate(raw_terms):
            try:
                c, r, center = t
                terms.append(GaussianTerm(float(c), float(r), tuple(center)))
            except (TypeError, ValueError) as exc:
                raise SpecFieldError(f"{field_name}.terms[{i}]", str(exc)) from exc
        try:
            return cls(kind, tuple(terms))
        except ValueError as exc:
            raise SpecFieldError(field_name, str(exc)) from exc


def evaluate_profile(prof: ProfileSpec, x) -> np.ndarray:
    """Evaluate a profile at points ``x``.

    ``x`` is array-like with the space dimension on the last axis; a bare
    scalar or 1-d array is treated as points on the line.  Returns an array
    shaped like ``x`` without its last axis.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
        squeeze = True
    elif x.ndim == 1:
        # ambiguous: a list of 1-d points
        x = x[:, None]
        squeeze = False
    else:
        squeeze = False
    out = np.zeros(x.shape[:-1])
    for t in prof.terms:
        center = np.asarray(t.center)
        if center.shape[0] != x.shape[-1]:
            raise ValueError(
                f"profile center has dim {center.shape[0]}, points have dim {x.shape[-1]}"
            )
        r2 = np.sum((x - center) ** 2, axis=-1)
        out += t.coefficient * np.exp(-t.rate * r2)
    return out[0] if squeeze else out


def profile_integral(prof: ProfileSpec, dim: int) -> float:
    """Closed-form integral over all of space: sum of c * (pi/rate)^(dim/2)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return sum(t.coefficient * (math.pi / t.rate) ** (dim / 2) for t in prof.terms)


def gaussian_weighted_integral(
    prof: ProfileSpec, dim: int, rate: float, center=None
) -> float:
    """Closed form of ``integral exp(-rate*|x-center|^2) * prof(x) dx``.

    Gaussian-times-Gaussian integrates to
    (pi/(rate+r))^(dim/2) * exp(-(rate*r/(rate+r)) * |center - c|^2) per term.
    """
    if rate <= 0:
        raise ValueError("weight rate must be positive")
    if center is None:
        center = (0.0,) * dim
    center = np.asarray(center, dtype=float)
    total = 0.0
    for t in prof.terms:
        s = rate + t.rate
        d2 = float(np.sum((center - np.asarray(t.center)) ** 2))
        total += t.coefficient * (math.pi / s) ** (dim / 2) * math.exp(
            -(rate * t.rate / s) * d2
        )
    return total


def profile_min_rate(prof: ProfileSpec) -> float:
    """Slowest decay rate among the terms; +inf for the zero profile."""
    if not prof.terms:
        return math.inf
    return min(t.rate for t in prof.terms)


def scale_profile(prof: ProfileSpec, factor: float) -> ProfileSpec:
    if prof.kind == "zero" or factor == 1.0:
        return prof
    return ProfileSpec(
        "gaussian_sum",
        tuple(GaussianTerm(t.coefficient * factor, t.rate, t.center) for t in prof.terms),
    )


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem record: geometry-free parameters plus the two profiles."""

    dim: int
    p: float
    q: float
    alpha: float
    rho: float
    u0: ProfileSpec = field(default_factory=ProfileSpec.zero)
    w: ProfileSpec = field(default_factory=ProfileSpec.zero)

    def __post_init__(self):
        rep = check_parameters(self.dim, self.p, self.q, self.alpha, self.rho)
        if not rep.base_ok:
            bad = [k for k in _BASE_CONDITIONS if not rep.conditions[k]]
            raise InadmissibleError(bad)
        for name, prof in (("u0", self.u0), ("w", self.w)):
            for t in prof.terms:
                if len(t.center) != self.dim:
                    raise ValueError(f"{name} term center must have dim {self.dim}")

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "p": self.p,
            "q": self.q,
            "alpha": self.alpha,
            "rho": self.rho,
            "u0": self.u0.to_json_dict(),
            "w": self.w.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, d: dict) -> "ProblemSpec":
        if not isinstance(d, dict):
            raise SpecFieldError("spec", "top level must be an object")
        params = _extract_parameters(d)
        u0 = ProfileSpec.from_json_dict(d.get("u0", {"kind": "zero"}), "u0")
        w = ProfileSpec.from_json_dict(d.get("w", {"kind": "zero"}), "w")
        try:
            return cls(u0=u0, w=w, **params)
        except InadmissibleError:
            raise
        except ValueError as exc:
            raise SpecFieldError("spec", str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        return cls.from_json_dict(json.loads(text))

    def spec_hash(self) -> str:
        canon = json.dumps(self.to_json_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


def _extract_parameters(d: dict) -> dict:
    """Pull and type-check the five scalar fields; no domain checks here."""
    out = {}
    for name, caster in (
        ("dim", int),
        ("p", float),
        ("q", float),
        ("alpha", float),
        ("rho", float),
    ):
        if name not in d:
            raise SpecFieldError(name, "missing")
        v = d[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecFieldError(name, f"must be a number, got {type(v).__name__}")
        if name == "dim" and v != int(v):
            raise SpecFieldError(name, "must be an integer")
        out[name] = caster(v)
    return out


@dataclass(frozen=True)
class ValidationReport:
    """Named admissibility conditions, independently queryable."""

    base_ok: bool
    lwp_ok: bool
    uniq_ok: bool
    conditions: dict

    def failed(self) -> list[str]:
        return [k for k, v in self.conditions.items() if not v]


def check_parameters(dim, p, q, alpha, rho) -> ValidationReport:
    """Admissibility of raw parameters; never raises on out-of-domain values.

    base: dim positive integer, p > 1, q >= 1, alpha >= 0, rho > -1.
    lwp:  base plus q > dim*(p-1)/2 and (alpha == 0 or alpha >= 1); the band
          0 < alpha < 1 is outside the fixed-point argument's reach.
    uniq: lwp plus q >= p.
    """
    conditions = {
        "dim_positive_integer": isinstance(dim, (int, np.integer)) and not isinstance(dim, bool) and dim >= 1,
        "p_gt_1": _num(p) and p > 1,
        "q_ge_1": _num(q) and q >= 1,
        "alpha_nonneg": _num(alpha) and alpha >= 0,
        "rho_gt_minus_1": _num(rho) and rho > -1,
    }
    base_ok = all(conditions.values())
    if base_ok:
        conditions["q_gt_scaling"] = q > dim * (p - 1) / 2
        conditions["alpha_fixed_point_ok"] = alpha == 0 or alpha >= 1
        conditions["q_ge_p"] = q >= p
        lwp_ok = conditions["q_gt_scaling"] and conditions["alpha_fixed_point_ok"]
        uniq_ok = lwp_ok and conditions["q_ge_p"]
    else:
        conditions["q_gt_scaling"] = False
        conditions["alpha_fixed_point_ok"] = False
        conditions["q_ge_p"] = False
        lwp_ok = uniq_ok = False
    return ValidationReport(base_ok, lwp_ok, uniq_ok, conditions)


def _num(x) -> bool:
    return isinstance(x, (int, float, np.floating, np.integer)) and not isinstance(
        x, bool
    ) and math.isfinite(float(x))


def validate(spec: ProblemSpec) -> ValidationReport:
    return check_parameters(spec.dim, spec.p, spec.q, spec.alpha, spec.rho)
