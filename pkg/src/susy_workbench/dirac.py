"""One-dimensional Dirac Hamiltonian with scalar and pseudoscalar potentials.

With hbar = c = 1 and no electrostatic term the Hamiltonian is

    H = [[m + S,          -i d - i W],
         [-i d + i W,     -m - S    ]]

and the quasi-Hamiltonian is ``K = H^2 + 2 gamma H + (delta - m^2) 1``.
Each block of K is a second-order operator ``-c2 d^2 + c1 d + c0``.

Sign convention between K blocks and partner-potential labels:

    ========  =================  ==========================
    block     potential          partner label
    ========  =================  ==========================
    K11       W^2 + W' + ...     v_minus (W^2 + W')
    K22       W^2 - W' + ...     v_plus  (W^2 - W')
    ========  =================  ==========================
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .eigensolver import Grid, fit_order, smooth_test_vectors
from .errors import ConfigError, GridTooCoarse
from .potentials import (Linear, PartnerPair, Superpotential, partner_potentials,
                         superpotential_from_json)

CONVENTION_TABLE = {"K11": "v_minus", "K22": "v_plus"}


def constant(s0: float) -> Linear:
    """A constant scalar potential expressed through the Linear family."""
    return Linear(0.0, float(s0))


@dataclass(frozen=True)
class DiracParams:
    scalar_s: Superpotential
    pseudo_w: Superpotential
    rest_mass_energy: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.rest_mass_energy < 0:
            raise ConfigError("rest_mass_energy must be non-negative")

    def perfect_square(self) -> "DiracParams":
        """Copy with delta = gamma^2 + m^2."""
        return replace(self, delta=self.gamma ** 2 + self.rest_mass_energy ** 2)

    @classmethod
    def from_json(cls, obj: dict) -> "DiracParams":
        try:
            s_spec = obj.get("S", {"const": 0.0})
            s = constant(s_spec["const"]) if "const" in s_spec else superpotential_from_json(s_spec)
            w = superpotential_from_json(obj["W"])
            m = float(obj.get("m0c2", 1.0))
            g = float(obj.get("gamma", 0.0))
            d = obj.get("delta", 0.0)
        except KeyError as exc:
            raise ConfigError(f"Dirac parameters missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad Dirac parameters: {exc}") from None
        if d == "perfect_square":
            d = g * g + m * m
        try:
            d = float(d)
        except (TypeError, ValueError):
            raise ConfigError(f"delta must be a number or 'perfect_square', got {d!r}") from None
        return cls(s, w, m, g, d)

    def to_json(self) -> dict:
        s = self.scalar_s
        if isinstance(s, Linear) and s.slope_half == 0.0:
            s_spec = {"const": s.offset}
        else:
            s_spec = s.to_json()
        return {"S": s_spec, "W": self.pseudo_w.to_json(), "m0c2": self.rest_mass_energy,
                "gamma": self.gamma, "delta": self.delta}


@dataclass(frozen=True)
class BlockElement:
    """``-c2 d^2 + c1(x) d + c0(x)``; c1 and c0 return complex arrays."""
    c2: float
    c1: Callable
    c0: Callable


@dataclass(frozen=True)
class QuasiElements:
    e11: BlockElement
    e12: BlockElement
    e21: BlockElement
    e22: BlockElement

    def blocks(self):
        return {"11": self.e11, "12": self.e12, "21": self.e21, "22": self.e22}


def _const(c):
    c = complex(c)
    return lambda x: np.full(np.shape(x), c, dtype=complex)


def quasi_elements(params: DiracParams) -> QuasiElements:
    """Blocks of ``H^2 + 2 gamma H + (delta - m^2)``."""
    w, s = params.pseudo_w, params.scalar_s
    m, g, d = params.rest_mass_energy, params.gamma, params.delta

    def c0_11(x):
        wv, sv = w.value(x), s.value(x)
        return (wv**2 + w.derivative(x) + 2 * (m + g) * sv + sv**2 + 2 * g * m + d).astype(complex)

    def c0_22(x):
        wv, sv = w.value(x), s.value(x)
        return (wv**2 - w.derivative(x) + 2 * (m - g) * sv + sv**2 - 2 * g * m + d).astype(complex)

    def c0_12(x):
        return 1j * s.derivative(x) - 2j * g * w.value(x)

    def c0_21(x):
        return -1j * s.derivative(x) + 2j * g * w.value(x)

    return QuasiElements(
        BlockElement(1.0, _const(0), c0_11),
        BlockElement(0.0, _const(-2j * g), c0_12),
        BlockElement(0.0, _const(-2j * g), c0_21),
        BlockElement(1.0, _const(0), c0_22),
    )


def perfect_square_elements(params: DiracParams) -> QuasiElements:
    """Blocks of ``(H + gamma)^2``, i.e. delta fixed to gamma^2 + m^2."""
    w, s = params.pseudo_w, params.scalar_s
    m, g = params.rest_mass_energy, params.gamma

    def c0_11(x):
        return (w.value(x)**2 + w.derivative(x) + (s.value(x) + m + g)**2).astype(complex)

    def c0_22(x):
        return (w.value(x)**2 - w.derivative(x) + (s.value(x) + m - g)**2).astype(complex)

    def c0_12(x):
        return 1j * (s.derivative(x) - 2 * g * w.value(x))

    def c0_21(x):
        return -1j * s.derivative(x) + 2j * g * w.value(x)

    return QuasiElements(
        BlockElement(1.0, _const(0), c0_11),
        BlockElement(0.0, _const(-2j * g), c0_12),
        BlockElement(0.0, _const(-2j * g), c0_21),
        BlockElement(1.0, _const(0), c0_22),
    )


def hermiticity_defect(q: QuasiElements, x) -> float:
    """Max deviation of block 21 from the formal adjoint of block 12."""
    x = np.asarray(x, dtype=float)
    c1_12, c0_12 = q.e12.c1(x), q.e12.c0(x)
    dc1 = np.gradient(np.conj(c1_12), x, edge_order=2)
    adj_c1 = -np.conj(c1_12)
    adj_c0 = np.conj(c0_12) - dc1
    diag = max(abs(np.imag(q.e11.c2)), abs(np.imag(q.e22.c2)),
               float(np.max(np.abs(np.imag(q.e11.c0(x))))), float(np.max(np.abs(np.imag(q.e22.c0(x))))))
    return max(float(np.max(np.abs(q.e21.c1(x) - adj_c1))),
               float(np.max(np.abs(q.e21.c0(x) - adj_c0))), diag)


def diagonal_reduction(s0: float, w: Superpotential, rest_mass_energy: float = 1.0):
    """Partner pair of the diagonal K blocks for S = s0, gamma = 0.

    Returns ``(pair, e0)`` with ``e0 = (m + s0)^2``; ``pair.v_minus`` is the
    K11 potential W^2 + W' + e0 and ``pair.v_plus`` the K22 one.
    """
    e0 = (rest_mass_energy + s0) ** 2
    return partner_potentials(w, e0), e0


def offdiagonal_residual(q: QuasiElements, grid: Grid) -> float:
    """max over nodes (walls included) of |c0| + |c1| for blocks 12 and 21."""
    x = grid.x_closed
    r12 = np.max(np.abs(q.e12.c0(x)) + np.abs(q.e12.c1(x)))
    r21 = np.max(np.abs(q.e21.c0(x)) + np.abs(q.e21.c1(x)))
    return float(max(r12, r21))


# ---------------------------------------------------------------- matrices

@dataclass(eq=False)
class BlockOperator:
    """2N x 2N sparse complex matrix; rows/cols ordered (upper comp., lower comp.)."""
    matrix: sp.csr_matrix
    grid: Grid

    def dense(self):
        return self.matrix.toarray()

    def hermitian_defect(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.toarray()))) if diff.nnz else 0.0


def _central(grid: Grid):
    n, h = grid.n_points, grid.h
    return sp.diags([np.full(n - 1, -0.5 / h), np.full(n - 1, 0.5 / h)], [-1, 1], format="csr")


def dirac_blocks(mass, w_vals, grid: Grid, velocity: float = 1.0):
    """Assemble [[M, -i v (D + W)], [-i v (D - W), -M]] from node samples."""
    d1 = _central(grid).astype(complex)
    mdiag = sp.diags(np.asarray(mass, dtype=complex))
    wdiag = sp.diags(np.asarray(w_vals, dtype=complex))
    upper = -1j * velocity * (d1 + wdiag)
    lower = -1j * velocity * (d1 - wdiag)
    return sp.bmat([[mdiag, upper], [lower, -mdiag]], format="csr")


def build_dirac(params: DiracParams, grid: Grid) -> BlockOperator:
    x = grid.x
    mass = params.rest_mass_energy + params.scalar_s.value(x)
    return BlockOperator(dirac_blocks(mass, params.pseudo_w.value(x), grid), grid)


def assemble_quasi(q: QuasiElements, grid: Grid) -> sp.csr_matrix:
    """Per-block discretization; the kinetic part uses D @ D so that constant
    coefficient blocks match products of the Dirac stencil exactly."""
    x = grid.x
    d1 = _central(grid).astype(complex)
    dd = d1 @ d1

    def block(e: BlockElement):
        out = sp.diags(e.c0(x)) + sp.diags(e.c1(x)) @ d1
        if e.c2:
            out = out - e.c2 * dd
        return out

    return sp.bmat([[block(q.e11), block(q.e12)], [block(q.e21), block(q.e22)]], format="csr")


def quasi_matrix_residual(params: DiracParams, grid: Grid, perfect_square: bool = False,
                          trim: int = 2) -> float:
    """Defect between the assembled K and ``H^2 + 2 gamma H + (delta - m^2)``.

    Measured as max |(K - P(H)) f| / max |f| over smooth test vectors placed
    in either spinor component, restricted to nodes at least ``trim`` away
    from the walls.
    """
    n = grid.n_points
    if n < 16:
        raise GridTooCoarse(f"need at least 16 nodes, got {n}")
    if perfect_square:
        params = params.perfect_square()
        q = perfect_square_elements(params)
    else:
        q = quasi_elements(params)
    h = build_dirac(params, grid).matrix
    eye = sp.identity(2 * n, dtype=complex, format="csr")
    poly = h @ h + 2 * params.gamma * h + (params.delta - params.rest_mass_energy**2) * eye
    diff = assemble_quasi(q, grid) - poly
    keep = np.zeros(2 * n, dtype=bool)
    keep[trim:n - trim] = True
    keep[n + trim:2 * n - trim] = True
    worst = 0.0
    zeros = np.zeros(n)
    for f in smooth_test_vectors(grid).T:
        for vec in (np.concatenate([f, zeros]), np.concatenate([zeros, f])):
            r = diff @ vec.astype(complex)
            worst = max(worst, float(np.max(np.abs(r[keep]))) / float(np.max(np.abs(f))))
    return worst


def quasi_convergence(params: DiracParams, a: float = -12.0, b: float = 12.0,
                      ns=(200, 400, 800), perfect_square: bool = False):
    """(h values, residuals, fitted order) for a refinement sequence."""
    hs, res = [], []
    for n in ns:
        g = Grid(a, b, n)
        hs.append(g.h)
        res.append(quasi_matrix_residual(params, g, perfect_square))
    res = np.asarray(res)
    if len(ns) < 2:
        order = float("nan")
    else:
        order = fit_order(hs, res) if np.all(res > 0) else float("inf")
    return np.asarray(hs), res, order
