"""Closed-form spectra of the oscillator, isochronous and isotonic families.

The quantization rule comes from polynomial termination of the confluent
hypergeometric solution of

    -y'' + (a^2 x^2 + b + c / x^2) y = 0,    b = v0 - E,

which requires ``b/(4a) + (1 +- sqrt(1/4 + c))/2 = -n``. The ``+`` branch
behaves as x^(1/2 + sqrt(1/4 + c)) at the origin and is the one that obeys a
Dirichlet wall there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ComplexIndex, ConfigError, Degenerate

PLUS = "plus"
MINUS = "minus"


def _sign(branch) -> int:
    if branch in (PLUS, "+", 1, "upper"):
        return 1
    if branch in (MINUS, "-", -1, "lower"):
        return -1
    raise ConfigError(f"branch must be 'plus' or 'minus', got {branch!r}")


@dataclass(frozen=True)
class QuantizationInput:
    a: float
    c: float
    v0: float
    branch: str = PLUS

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"quartic coefficient a must be positive, got {self.a}")
        if 0.25 + self.c < 0:
            raise ComplexIndex(f"1/4 + c = {0.25 + self.c} < 0: indicial exponent is complex")
        _sign(self.branch)

    @property
    def index(self) -> float:
        return math.sqrt(0.25 + self.c)


def quantization_energy(q_in: QuantizationInput, n: int) -> float:
    """E = v0 + 4 a n + 2 a (1 +- sqrt(1/4 + c))."""
    if n < 0 or int(n) != n:
        raise ConfigError(f"n must be a non-negative integer, got {n}")
    s = _sign(q_in.branch)
    return q_in.v0 + 4.0 * q_in.a * n + 2.0 * q_in.a * (1.0 + s * q_in.index)


def quantization_constraint(q_in: QuantizationInput, energy: float) -> float:
    """Left-hand side b/(4a) + (1 +- sqrt(1/4 + c))/2; equals -n on a level."""
    s = _sign(q_in.branch)
    b = q_in.v0 - energy
    return b / (4.0 * q_in.a) + 0.5 * (1.0 + s * q_in.index)


def isochronous_input(beta: float, q: int, branch=PLUS) -> QuantizationInput:
    """Quantization data of the q-member of the isochronous pair (q = +1 is V+)."""
    if q not in (1, -1):
        raise ConfigError(f"q must be +1 or -1, got {q}")
    return QuantizationInput(1.0, beta * beta + q * beta, 2.0 * beta - q, branch)


def isochronous_energy_paper(n: int, beta: float, q: int) -> float:
    """E = 4n + 2(beta + 1) - q (sqrt(1 + 4(beta^2 + q beta)) - 1), as printed."""
    if q not in (1, -1):
        raise ConfigError(f"q must be +1 or -1, got {q}")
    disc = 1.0 + 4.0 * (beta * beta + q * beta)
    if disc < 0:
        raise ComplexIndex(f"1 + 4(beta^2 + q beta) = {disc} < 0")
    return 4.0 * n + 2.0 * (beta + 1.0) - q * (math.sqrt(disc) - 1.0)


# in-text special cases, keyed by (beta, q); value is E(n)
IN_TEXT_CLAIMS = {
    (0.0, -1): lambda n: 4 * n + 2,
    (0.0, 1): lambda n: 4 * n,
    (-1.0, 1): lambda n: 4 * n - 2,
    (-1.0, -1): lambda n: 4 * n,
}


@dataclass(frozen=True)
class IsotonicMatch:
    omega_cap: float
    eta: float
    sign: str
    r: float
    s: float
    lambda_shift: float
    physical: bool


def isotonic_match(omega_cap: float, eta: float, sign: str = "upper") -> IsotonicMatch:
    """Parameters making V- + Lambda of r(eta x + 1) - s/(eta x + 1) equal to
    Omega (eta x + 1 - 1/(eta x + 1))^2.

    ``physical`` is False when r or s fails the positivity the family assumes.
    """
    if omega_cap == 0.0 or eta == 0.0:
        raise Degenerate("Omega = 0 or eta = 0 collapses the superpotential to a constant")
    if omega_cap < 0:
        raise ConfigError(f"Omega must be positive, got {omega_cap}")
    sg = _sign(sign)
    root = math.sqrt(eta * eta + 4.0 * omega_cap)
    r = math.sqrt(omega_cap)
    s = 0.5 * (-eta + sg * root)
    lam = -2.0 * omega_cap - r * (2.0 * eta - sg * root)
    return IsotonicMatch(omega_cap, eta, "upper" if sg > 0 else "lower", r, s, lam, r > 0 and s > 0)


def ho_energy(n, omega: float):
    """omega * n, the spectrum of the shifted oscillator with its zero mode."""
    if not omega > 0:
        raise ConfigError(f"omega must be positive, got {omega}")
    return omega * np.asarray(n, dtype=float)
