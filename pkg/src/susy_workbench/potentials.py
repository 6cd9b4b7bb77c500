"""Superpotential families, SUSY partner potentials and ground states.

Natural units throughout: hbar = 1 and 2m = 1, so the partner potentials of
a superpotential W are ``V(+-) = W**2 -+ W' + Lambda`` and kinetic terms are
``-d^2/dx^2``. ``scale`` arguments multiply the derivative term for callers
that want hbar/sqrt(2m) != 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, OutOfDomain, OutOfRange, SingularPoint

FULL_LINE = "full-line"
HALF_LINE_LEFT = "half-line-left"
CUSTOM = "custom"


@dataclass(frozen=True)
class Domain:
    """Open interval with a boundary-condition tag.

    For ``half-line-left`` the left end ``lo`` is a singular point and the
    solver places a guarded Dirichlet wall next to it.
    """
    lo: float
    hi: float
    kind: str = FULL_LINE

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)


def _check_poles(x, poles):
    x = np.asarray(x, dtype=float)
    for p in poles:
        if np.any(x == p):
            raise SingularPoint(f"evaluation at the pole x = {p}")
    return x


class Superpotential:
    """Base class. Subclasses are frozen dataclasses and vectorize over x."""

    family: str = ""

    def value(self, x):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def antiderivative(self, x):
        """Closed-form primitive, or None when only samples are available."""
        return None

    @property
    def poles(self) -> tuple:
        return ()

    def domain(self) -> Domain:
        return Domain(-np.inf, np.inf, FULL_LINE)

    def confining(self) -> bool:
        return True

    def to_json(self) -> dict:
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)


@dataclass(frozen=True)
class Linear(Superpotential):
    """W(x) = slope_half * x + offset (omega/2 * x + kappa)."""
    slope_half: float
    offset: float = 0.0
    family = "linear"

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.slope_half * x + self.offset

    def derivative(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.slope_half)

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.slope_half * x * x + self.offset * x

    def confining(self):
        return self.slope_half != 0.0

    def to_json(self):
        return {"family": self.family, "params": {"slope_half": self.slope_half, "offset": self.offset}}


@dataclass(frozen=True)
class LinearInverse(Superpotential):
    """W(x) = k + l*x + z/x + t."""
    k: float
    l: float
    z: float
    t: float
    family = "linear_inverse"

    @property
    def poles(self):
        return (0.0,) if self.z != 0.0 else ()

    def value(self, x):
        x = _check_poles(x, self.poles)
        if self.z == 0.0:
            return self.k + self.t + self.l * x
        return self.k + self.t + self.l * x + self.z / x

    def derivative(self, x):
        x = _check_poles(x, self.poles)
        if self.z == 0.0:
            return np.full_like(x, self.l)
        return self.l - self.z / (x * x)

    def antiderivative(self, x):
        x = _check_poles(x, self.poles)
        out = (self.k + self.t) * x + 0.5 * self.l * x * x
        if self.z != 0.0:
            out = out + self.z * np.log(np.abs(x))
        return out

    def domain(self):
        if self.z != 0.0:
            return Domain(0.0, np.inf, HALF_LINE_LEFT)
        return Domain(-np.inf, np.inf, FULL_LINE)

    def confining(self):
        return self.l != 0.0

    def to_json(self):
        return {"family": self.family, "params": {"k": self.k, "l": self.l, "z": self.z, "t": self.t}}


@dataclass(frozen=True)
class IsotonicShifted(Superpotential):
    """W(x) = r*(eta*x + 1) - s/(eta*x + 1) + offset.

    ``offset`` is zero for the bare family; it carries k + upsilon when the
    superpotential comes from a planar vector potential.
    """
    r: float
    s: float
    eta: float
    offset: float = 0.0
    family = "isotonic"

    @property
    def poles(self):
        if self.eta != 0.0 and self.s != 0.0:
            return (-1.0 / self.eta,)
        return ()

    def _u(self, x):
        x = _check_poles(x, self.poles)
        return self.eta * x + 1.0

    def value(self, x):
        u = self._u(x)
        return self.r * u - self.s / u + self.offset

    def derivative(self, x):
        u = self._u(x)
        return self.r * self.eta + self.s * self.eta / (u * u)

    def antiderivative(self, x):
        if self.eta == 0.0:
            return (self.r - self.s + self.offset) * np.asarray(x, dtype=float)
        u = self._u(x)
        return (0.5 * self.r * u * u - self.s * np.log(np.abs(u))) / self.eta + self.offset * np.asarray(x, float)

    def domain(self):
        if not self.poles:
            return Domain(-np.inf, np.inf, FULL_LINE)
        p = self.poles[0]
        if self.eta > 0:
            return Domain(p, np.inf, HALF_LINE_LEFT)
        return Domain(-np.inf, p, CUSTOM)

    def confining(self):
        return self.r != 0.0 and self.eta != 0.0

    def to_json(self):
        params = {"r": self.r, "s": self.s, "eta": self.eta}
        if self.offset:
            params["offset"] = self.offset
        return {"family": self.family, "params": params}


@dataclass(frozen=True, eq=False)
class Tabulated(Superpotential):
    """Sampled superpotential.

    Derivatives are second-order finite differences at the nodes (central
    inside, one-sided at the ends); values and derivatives between nodes are
    linearly interpolated.
    """
    xs: np.ndarray
    ws: np.ndarray
    dws: np.ndarray = field(init=False, repr=False)
    family = "tabulated"

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ws = np.asarray(self.ws, dtype=float)
        if xs.ndim != 1 or xs.shape != ws.shape:
            raise ConfigError("tabulated xs and ws must be 1-D arrays of equal length")
        if xs.size < 3:
            raise ConfigError("tabulated superpotential needs at least 3 abscissae")
        if np.any(np.diff(xs) <= 0):
            raise ConfigError("tabulated abscissae must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ws", ws)
        object.__setattr__(self, "dws", np.gradient(ws, xs, edge_order=2))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.xs[0]) or np.any(x > self.xs[-1]):
            raise OutOfRange(f"x outside tabulated range [{self.xs[0]}, {self.xs[-1]}]")
        return x

    def value(self, x):
        return np.interp(self._check(x), self.xs, self.ws)

    def derivative(self, x):
        return np.interp(self._check(x), self.xs, self.dws)

    def domain(self):
        return Domain(float(self.xs[0]), float(self.xs[-1]), CUSTOM)

    def to_json(self):
        return {"family": self.family, "params": {"xs": self.xs.tolist(), "ws": self.ws.tolist()}}


def eval_superpotential(w: Superpotential, x):
    """Return ``(W(x), W'(x))``."""
    return w.value(x), w.derivative(x)


@dataclass(frozen=True)
class PartnerPair:
    v_plus: Callable
    v_minus: Callable
    lambda_offset: float
    domain: Domain
    confining: bool = True

    def sample(self, x):
        return self.v_plus(x), self.v_minus(x)


def partner_potentials(w: Superpotential, lambda_offset: float = 0.0, scale: float = 1.0) -> PartnerPair:
    """V+ = W^2 - scale*W' + Lambda and V- = W^2 + scale*W' + Lambda."""

    def v_plus(x):
        return w.value(x) ** 2 - scale * w.derivative(x) + lambda_offset

    def v_minus(x):
        return w.value(x) ** 2 + scale * w.derivative(x) + lambda_offset

    return PartnerPair(v_plus, v_minus, float(lambda_offset), w.domain(), w.confining())


def isochronous_pair(z: float) -> PartnerPair:
    """V+- = (2z -+ 1) + x^2 + (z^2 +- z)/x^2 on x > 0."""
    z = float(z)

    def v_plus(x):
        x = _check_poles(x, (0.0,))
        return (2 * z - 1) + x * x + (z * z + z) / (x * x)

    def v_minus(x):
        x = _check_poles(x, (0.0,))
        return (2 * z + 1) + x * x + (z * z - z) / (x * x)

    return PartnerPair(v_plus, v_minus, 0.0, Domain(0.0, np.inf, HALF_LINE_LEFT))


@dataclass
class GroundStateResult:
    samples: np.ndarray
    normalizable: bool
    log_norm_integral: float


def ground_state(w: Superpotential, grid, tail_rise: float = 3.0) -> GroundStateResult:
    """Sample psi0 ~ exp(-int W) on the interior nodes of ``grid``.

    Closed-form primitives are used where the family has one, the
    trapezoidal rule otherwise. The state is declared normalizable when the
    exponent rises by at least ``tail_rise`` from its interior minimum toward
    both ends of the grid. Samples are scaled to ``h * sum(psi**2) = 1`` when
    normalizable and to unit maximum otherwise.
    """
    x = grid.x
    phi = w.antiderivative(x)
    if phi is None:
        wv = w.value(x)
        phi = np.concatenate(([0.0], np.cumsum(0.5 * (wv[1:] + wv[:-1]) * np.diff(x))))
    phi = np.asarray(phi, dtype=float)
    imin = int(np.argmin(phi))
    pmin = phi[imin]
    normalizable = bool(
        0 < imin < x.size - 1 and phi[0] - pmin >= tail_rise and phi[-1] - pmin >= tail_rise
    )
    psi = np.exp(-(phi - pmin))
    log_norm = float(np.log(grid.h * np.sum(psi * psi)) - 2.0 * pmin)
    if normalizable:
        psi = psi / np.sqrt(grid.h * np.sum(psi * psi))
    return GroundStateResult(psi, normalizable, log_norm)


def isotonic_potential(omega_cap: float, eta: float, x):
    """Omega * (eta*x + 1 - 1/(eta*x + 1))**2."""
    x = np.asarray(x, dtype=float)
    u = eta * x + 1.0
    if np.any(u == 0.0):
        raise SingularPoint(f"isotonic potential evaluated at x = {-1.0 / eta}")
    return omega_cap * (u - 1.0 / u) ** 2


def urabe_potential(zeta: float, omega: float, x):
    """(omega^2 / (2 zeta^2)) * (1 - sqrt(1 + 2 zeta x))^2 on [-1/(2 zeta), 3/(2 zeta)]."""
    if zeta == 0.0:
        raise OutOfDomain("Urabe potential needs zeta != 0")
    x = np.asarray(x, dtype=float)
    lo, hi = sorted((-0.5 / zeta, 1.5 / zeta))
    arg = 1.0 + 2.0 * zeta * x
    if np.any(arg < 0) or np.any(x < lo) or np.any(x > hi):
        raise OutOfDomain(f"Urabe potential is defined on [{lo}, {hi}]")
    return omega ** 2 / (2.0 * zeta ** 2) * (1.0 - np.sqrt(arg)) ** 2


@dataclass(frozen=True)
class HarmonicPotential:
    """(omega/2)^2 x^2, whose levels are omega*(n + 1/2)."""
    omega: float = 2.0
    family = "ho"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return 0.25 * self.omega ** 2 * x * x

    def domain(self):
        return Domain(-np.inf, np.inf, FULL_LINE)

    def to_json(self):
        return {"family": self.family, "params": {"omega": self.omega}}


@dataclass(frozen=True)
class IsotonicPotential:
    omega_cap: float
    eta: float
    family = "isotonic_potential"

    def __call__(self, x):
        return isotonic_potential(self.omega_cap, self.eta, x)

    def domain(self):
        if self.eta == 0.0:
            return Domain(-np.inf, np.inf, FULL_LINE)
        p = -1.0 / self.eta
        if self.eta > 0:
            return Domain(p, np.inf, HALF_LINE_LEFT)
        return Domain(-np.inf, p, CUSTOM)

    def to_json(self):
        return {"family": self.family, "params": {"omega_cap": self.omega_cap, "eta": self.eta}}


@dataclass(frozen=True)
class UrabePotential:
    zeta: float
    omega: float
    family = "urabe"

    def __post_init__(self):
        if self.zeta == 0.0:
            raise OutOfDomain("Urabe potential needs zeta != 0")

    def __call__(self, x):
        return urabe_potential(self.zeta, self.omega, x)

    def domain(self):
        lo, hi = sorted((-0.5 / self.zeta, 1.5 / self.zeta))
        return Domain(lo, hi, CUSTOM)

    def to_json(self):
        return {"family": self.family, "params": {"zeta": self.zeta, "omega": self.omega}}


# ------------------------------------------------------------------ JSON io

_SUPERPOTENTIALS = {
    "linear": (Linear, ("slope_half", "offset")),
    "linear_inverse": (LinearInverse, ("k", "l", "z", "t")),
    "isotonic": (IsotonicShifted, ("r", "s", "eta", "offset")),
    "tabulated": (Tabulated, ("xs", "ws")),
}


def superpotential_from_json(obj: dict) -> Superpotential:
    try:
        family = obj["family"]
        params = dict(obj.get("params", {}))
    except (TypeError, KeyError):
        raise ConfigError(f"superpotential spec needs 'family' and 'params': {obj!r}") from None
    if family not in _SUPERPOTENTIALS:
        raise ConfigError(f"unknown superpotential family {family!r}")
    cls, names = _SUPERPOTENTIALS[family]
    unknown = set(params) - set(names)
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for family {family!r}")
    try:
        if family == "tabulated":
            return cls(np.asarray(params["xs"], float), np.asarray(params["ws"], float))
        return cls(**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {family!r}: {exc}") from None
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad parameter {exc} for family {family!r}") from None


def superpotential_to_json(w: Superpotential) -> dict:
    return w.to_json()


_POTENTIALS = {
    "ho": (HarmonicPotential, ("omega",)),
    "isotonic_potential": (IsotonicPotential, ("omega_cap", "eta")),
    "urabe": (UrabePotential, ("zeta", "omega")),
}


def potential_from_json(obj: dict):
    """Build a plain potential (not a superpotential) from its JSON spec."""
    try:
        family = obj["family"]
        params = dict(obj.get("params", {}))
    except (TypeError, KeyError):
        raise ConfigError(f"potential spec needs 'family' and 'params': {obj!r}") from None
    if family not in _POTENTIALS:
        raise ConfigError(f"unknown potential family {family!r}")
    cls, names = _POTENTIALS[family]
    unknown = set(params) - set(names)
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for family {family!r}")
    try:
        return cls(**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {family!r}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad parameter value for family {family!r}: {exc}") from None


def parse_family_string(text: str, order: dict) -> dict:
    """Parse ``family:1,0`` or ``family:name=value,...`` into a JSON spec.

    ``order`` maps each family to its positional parameter names.
    """
    family, _, rest = text.partition(":")
    family = family.strip()
    if family not in order:
        raise ConfigError(f"unknown family {family!r} in {text!r}; expected one of {sorted(order)}")
    names = order[family]
    params = {}
    if rest.strip():
        for pos, item in enumerate(rest.split(",")):
            item = item.strip()
            if "=" in item:
                key, _, val = item.partition("=")
                key = key.strip()
                if key not in names:
                    raise ConfigError(f"unknown field {key!r} for family {family!r}")
            else:
                if pos >= len(names):
                    raise ConfigError(f"too many values for family {family!r} in {text!r}")
                key, val = names[pos], item
            try:
                params[key] = float(val)
            except ValueError:
                raise ConfigError(f"field {key!r} of {family!r}: cannot parse {val!r} as a number") from None
    return {"family": family, "params": params}


SUPERPOTENTIAL_FIELDS = {k: v[1] for k, v in _SUPERPOTENTIALS.items() if k != "tabulated"}
POTENTIAL_FIELDS = {k: v[1] for k, v in _POTENTIALS.items()}
