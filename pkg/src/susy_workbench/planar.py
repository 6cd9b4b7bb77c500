"""Massless planar Dirac electrons in a Landau-gauge magnetic field.

The y momentum is a plane-wave quantum number k, so only 1-D operators in x
appear. Charge and velocity factors are absorbed into ``a_y`` (the quantity
e*A_y/c), which turns the effective superpotential into ``k + a_y(x)``.

The reduced Schroedinger pair is written with the planar labels

    V^+ = (k + a_y)^2 + a_y'      (psi^+ component)
    V^- = (k + a_y)^2 - a_y'      (psi^- component)

so ``V^+`` is the ``v_minus`` partner of ``w_eff`` and ``V^-`` its
``v_plus``. A Schroedinger eigenvalue eps maps to Dirac energies
``E = +- v_F sqrt(eps)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dirac import BlockElement, QuasiElements, dirac_blocks
from .eigensolver import Grid
from .errors import ConfigError, NegativeEigenvalue, NonConfining
from .potentials import (IsotonicShifted, Linear, LinearInverse, PartnerPair, Superpotential,
                         Tabulated, ground_state, partner_potentials)

CONVENTION_TABLE = {"V^+ (psi^+)": "v_minus", "V^- (psi^-)": "v_plus"}

_FAMILY_FIELDS = {
    "linear": ("lambda", "mu"),
    "isochronous": ("p", "q", "r"),
    "isotonic": ("r", "s", "eta", "upsilon"),
    "tabulated": ("xs", "ys"),
}
_POSITIVE = {"linear": ("lambda", "mu"), "isochronous": ("p", "q", "r"), "isotonic": ("r", "s")}


@dataclass(frozen=True, eq=False)
class VectorPotential:
    family: str
    params: dict
    allow_nonpositive: bool = False

    def __post_init__(self):
        if self.family not in _FAMILY_FIELDS:
            raise ConfigError(f"unknown vector potential family {self.family!r}")
        names = _FAMILY_FIELDS[self.family]
        unknown = set(self.params) - set(names)
        if unknown:
            raise ConfigError(f"unknown field(s) {sorted(unknown)} for vector potential {self.family!r}")
        defaults = {"upsilon": 0.0}
        full = {}
        for n in names:
            if n in self.params:
                full[n] = self.params[n]
            elif n in defaults:
                full[n] = defaults[n]
            else:
                raise ConfigError(f"vector potential {self.family!r} needs field {n!r}")
        if not self.allow_nonpositive:
            for n in _POSITIVE.get(self.family, ()):
                if not full[n] > 0:
                    raise ConfigError(
                        f"vector potential {self.family!r} needs {n} > 0 (got {full[n]}); "
                        "set allow_nonpositive to override")
        object.__setattr__(self, "params", full)

    def superpotential(self, k: float = 0.0) -> Superpotential:
        """``k + a_y(x)`` as a superpotential family."""
        p = self.params
        if self.family == "linear":
            return Linear(p["lambda"], p["mu"] + k)
        if self.family == "isochronous":
            return LinearInverse(k, p["p"], p["q"], p["r"])
        if self.family == "isotonic":
            return IsotonicShifted(p["r"], p["s"], p["eta"], p["upsilon"] + k)
        return Tabulated(np.asarray(p["xs"], float), np.asarray(p["ys"], float) + k)

    def a_y(self, x):
        return self.superpotential(0.0).value(x)

    @classmethod
    def from_json(cls, obj: dict) -> "VectorPotential":
        try:
            return cls(obj["family"], dict(obj.get("params", {})), bool(obj.get("allow_nonpositive", False)))
        except (KeyError, TypeError):
            raise ConfigError(f"vector potential spec needs 'family' and 'params': {obj!r}") from None

    def to_json(self):
        params = {k: (list(v) if isinstance(v, (list, np.ndarray)) else v) for k, v in self.params.items()}
        out = {"family": self.family, "params": params}
        if self.allow_nonpositive:
            out["allow_nonpositive"] = True
        return out


@dataclass(frozen=True)
class PlanarConfig:
    vector_potential: VectorPotential
    wavenumber_k: float = 0.0
    s0: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    fermi_velocity: float = 1.0

    def __post_init__(self):
        if not self.fermi_velocity > 0:
            raise ConfigError("fermi_velocity must be positive")

    @classmethod
    def from_json(cls, obj: dict) -> "PlanarConfig":
        try:
            a = VectorPotential.from_json(obj["A"])
            return cls(a, float(obj.get("k", 0.0)), float(obj.get("S0", 0.0)),
                       float(obj.get("gamma", 0.0)), float(obj.get("delta", 0.0)), float(obj.get("vF", 1.0)))
        except KeyError as exc:
            raise ConfigError(f"planar config missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad planar config: {exc}") from None

    def to_json(self):
        return {"A": self.vector_potential.to_json(), "k": self.wavenumber_k, "S0": self.s0,
                "gamma": self.gamma, "delta": self.delta, "vF": self.fermi_velocity}


def _const(c):
    c = complex(c)
    return lambda x: np.full(np.shape(x), c, dtype=complex)


def planar_quasi_elements(cfg: PlanarConfig) -> QuasiElements:
    """Blocks of ``H_P^2 + 2 gamma H_P + delta`` at fixed k, constant S0."""
    w = cfg.vector_potential.superpotential(cfg.wavenumber_k)
    v, s, g, d = cfg.fermi_velocity, cfg.s0, cfg.gamma, cfg.delta

    def c0_11(x):
        return (v**2 * (w.value(x)**2 + w.derivative(x)) + s**2 + 2 * g * s + d).astype(complex)

    def c0_22(x):
        return (v**2 * (w.value(x)**2 - w.derivative(x)) + s**2 - 2 * g * s + d).astype(complex)

    def c0_12(x):
        return -2j * g * v * w.value(x)

    def c0_21(x):
        return 2j * g * v * w.value(x)

    return QuasiElements(
        BlockElement(v**2, _const(0), c0_11),
        BlockElement(0.0, _const(-2j * g * v), c0_12),
        BlockElement(0.0, _const(-2j * g * v), c0_21),
        BlockElement(v**2, _const(0), c0_22),
    )


def build_planar(cfg: PlanarConfig, grid: Grid):
    """Sparse H_P at fixed k: [[S0, -i v (D + w)], [-i v (D - w), -S0]]."""
    w = cfg.vector_potential.superpotential(cfg.wavenumber_k)
    x = grid.x
    return dirac_blocks(np.full(x.size, cfg.s0), w.value(x), grid, cfg.fermi_velocity)


@dataclass(frozen=True)
class PlanarReduction:
    pair: PartnerPair
    w_eff: Superpotential
    has_discrete_spectrum: bool = field(default=True)

    def __iter__(self):
        yield self.pair
        yield self.w_eff


def reduce_planar(a: VectorPotential, k: float = 0.0) -> PlanarReduction:
    """Partner pair of the psi^+/psi^- equations.

    ``pair.v_plus`` / ``pair.v_minus`` keep the SUSY labels of ``w_eff``;
    the planar V^+ (sign +a_y') is ``pair.v_minus``.
    """
    w = a.superpotential(k)
    pair = partner_potentials(w)
    return PlanarReduction(pair, w, w.confining())


def planar_potentials(a: VectorPotential, k: float = 0.0):
    """(V^+, V^-) in planar labels as callables."""
    red = reduce_planar(a, k)
    return red.pair.v_minus, red.pair.v_plus


def zero_mode_side(w: Superpotential, grid: Grid, tail_rise: float = 3.0):
    """Which SUSY partner hosts the zero mode: 'plus' if exp(-int W) is
    normalizable, 'minus' if exp(+int W) is, else None."""
    if ground_state(w, grid, tail_rise).normalizable:
        return "plus"
    if ground_state(_Negated(w), grid, tail_rise).normalizable:
        return "minus"
    return None


@dataclass(frozen=True)
class _Negated(Superpotential):
    inner: Superpotential

    def value(self, x):
        return -self.inner.value(x)

    def derivative(self, x):
        return -self.inner.derivative(x)

    def antiderivative(self, x):
        a = self.inner.antiderivative(x)
        return None if a is None else -a


def dirac_energies(eps, fermi_velocity: float = 1.0, tol: float = 1e-3):
    """+v_F sqrt(eps) for Schroedinger eigenvalues eps.

    Values in (-tol, 0) are discretization noise around a zero mode and map
    to 0; anything more negative raises NegativeEigenvalue.
    """
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < -tol):
        raise NegativeEigenvalue(f"cannot map eigenvalue {eps.min()} < 0 to a Dirac energy")
    return fermi_velocity * np.sqrt(np.clip(eps, 0.0, None))


def linear_field_superpotential(lambda_slope: float, mu: float = 0.0, k: float = 0.0):
    """Superpotential and analytic level rule for a_y = lambda x + mu.

    Returns ``(Linear(lambda, k + mu), rule)`` with ``rule(n) = omega * n`` and
    ``omega = 2 * lambda``.
    """
    if not lambda_slope > 0:
        raise NonConfining(f"linear field needs lambda > 0, got {lambda_slope}")
    omega = 2.0 * lambda_slope

    def rule(n):
        return omega * np.asarray(n, dtype=float)

    return Linear(float(lambda_slope), float(k + mu)), rule
