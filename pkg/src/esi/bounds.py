"""Calculators for the a-priori guarantees of extended source inversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ETA_MAX",
    "BoundsInapplicable",
    "NoiseLevel",
    "BoundReport",
    "f_eta",
    "result2_radius",
    "lambda_min",
    "eps_min",
    "result1_predicate",
    "bound_report",
    "format_report",
    "closer_count",
]

#: Noise-to-signal ratios at or above this make the slowness bound void.
ETA_MAX = (math.sqrt(5.0) - 1.0) / 2.0


class BoundsInapplicable(ValueError):
    """Raised when eta is too large for the stationary-point bound to hold."""


@dataclass(frozen=True)
class NoiseLevel:
    eta: float

    def __post_init__(self):
        if not self.eta >= 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta}")


def f_eta(eta):
    """Noise amplification ``2 eta (1 + eta) / (1 - eta (1 + eta))``."""
    if eta < 0:
        raise ValueError(f"eta must be nonnegative, got {eta}")
    q = eta * (1.0 + eta)
    if eta >= ETA_MAX or q >= 1.0:
        raise BoundsInapplicable(f"eta={eta} is not below {ETA_MAX:.6f}")
    return 2.0 * q / (1.0 - q)


def result2_radius(eta, lam, r):
    """Largest possible distance from the target of any reduced-ESI stationary point."""
    return (1.0 + f_eta(eta)) * lam / r


def lambda_min(mu, eta):
    """Smallest truncation lag guaranteed to solve the inverse problem."""
    return (2.0 + f_eta(eta)) * mu


def eps_min(alpha, mu, eta, r):
    """Relative data error guaranteed after truncation; very conservative."""
    k2 = (8.0 * math.pi * r * alpha * mu) ** 2
    if math.isinf(k2):
        return 1.0 + eta
    return k2 / (1.0 + k2) + eta


def result1_predicate(m, m_star, lam, r):
    """True where the FWI objectives sit on their flat plateaus.

    The boundary is inclusive; a relative slack of 1e-12 absorbs rounding
    in ``m - m_star``.
    """
    return abs(m - m_star) >= 2.0 * lam / r * (1.0 - 1e-12)


@dataclass(frozen=True)
class BoundReport:
    mu: float
    eta: float
    r: float
    alpha: float
    lam: float
    f_eta: float = math.nan
    result2_radius: float = math.nan
    lambda_min: float = math.nan
    eps_min: float = math.nan
    applicable: dict = field(default_factory=dict)


def bound_report(mu, eta, r, alpha, lam):
    """Evaluate every calculator; inapplicable ones are left as NaN and flagged."""
    applicable = {"result2": True, "result3_lambda": True, "result3_eps": True}
    try:
        f = f_eta(eta)
        radius = result2_radius(eta, lam, r)
        lmin = lambda_min(mu, eta)
    except BoundsInapplicable:
        f = radius = lmin = math.nan
        applicable["result2"] = applicable["result3_lambda"] = False
    return BoundReport(mu=mu, eta=eta, r=r, alpha=alpha, lam=lam, f_eta=f,
                       result2_radius=radius, lambda_min=lmin,
                       eps_min=eps_min(alpha, mu, eta, r), applicable=applicable)


def format_report(rep):
    lines = [
        f"inputs: mu={rep.mu:g} s, eta={rep.eta:g}, r={rep.r:g} km, "
        f"alpha={rep.alpha:g}, lambda={rep.lam:g} s",
        f"f(eta)                 = {rep.f_eta:.6f}",
        f"stationary-point radius = {rep.result2_radius:.6f} s/km  ((1+f) lambda / r)",
        f"minimum truncation lag  = {rep.lambda_min:.6f} s  ((2+f) mu)",
        f"guaranteed data error   = {rep.eps_min:.6f}  (conservative)",
        f"plateau offset          = {2.0 * rep.lam / rep.r:.6f} s/km  (2 lambda / r)",
    ]
    if not rep.applicable.get("result2", True):
        lines.append(f"note: eta >= {ETA_MAX:.6f}; slowness and lag bounds do not apply")
    return "\n".join(lines) + "\n"


def closer_count(distances):
    """Count consecutive pairs in which the distance to the target shrinks.

    Used for the qualitative check that stationary points approach the
    target slowness as the penalty weight grows.
    """
    return sum(1 for a, b in zip(distances, distances[1:]) if b < a)
