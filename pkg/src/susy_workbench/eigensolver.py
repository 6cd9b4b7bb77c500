"""Finite-difference Schroedinger operators and their lowest eigenpairs.

Operators are ``-kinetic * d^2/dx^2 + V`` on a uniform grid with Dirichlet
walls at both ends, discretized with the 3-point stencil. Eigenvalues come
from Sturm-sequence bisection and eigenvectors from inverse iteration.
"""
from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import ConfigError, ConvergenceFailure, SingularPoint
from .potentials import CUSTOM, FULL_LINE, HALF_LINE_LEFT, Domain, partner_potentials

EIG_TOL = 1e-10
RESIDUAL_TOL = 1e-8
GUARD_FRACTION = 1e-3
GUARD_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class Grid:
    """Interior nodes ``a + i*h``, ``i = 1..n_points``, with ``h = (b - a)/(n_points + 1)``.

    ``epsilon_guard`` records how far ``a`` (or ``b``) was pulled away from a
    singular endpoint; it does not move the nodes.
    """
    a: float
    b: float
    n_points: int
    bc: str = "dirichlet"
    epsilon_guard: float = 0.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ConfigError(f"grid needs b > a, got [{self.a}, {self.b}]")
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise ConfigError(f"grid needs a positive integer n_points, got {self.n_points}")
        if self.bc != "dirichlet":
            raise ConfigError(f"only Dirichlet boundaries are supported, got {self.bc!r}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n_points + 1)

    @property
    def x(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.n_points + 1)

    @property
    def x_closed(self) -> np.ndarray:
        """Interior nodes plus both wall positions."""
        return self.a + self.h * np.arange(0, self.n_points + 2)

    def with_points(self, n_points: int) -> "Grid":
        return replace(self, n_points=n_points)


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    grid: Grid

    def matvec(self, x):
        return kernels.tridiag_matvec_numpy(self.diagonal, self.off_diagonal, np.asarray(x, float))

    def to_sparse(self):
        return sp.diags([self.off_diagonal, self.diagonal, self.off_diagonal], [-1, 0, 1], format="csr")

    def to_dense(self):
        return self.to_sparse().toarray()


@dataclass(eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    residuals: np.ndarray
    grid: Optional[Grid] = None

    def __len__(self):
        return self.eigenvalues.size

    def node_counts(self, rel_floor: float = 1e-12) -> np.ndarray:
        """Sign changes of each eigenvector, ignoring entries below ``rel_floor * max``."""
        if self.eigenvectors is None:
            raise ValueError("spectrum was computed without eigenvectors")
        counts = []
        for v in self.eigenvectors.T:
            keep = v[np.abs(v) > rel_floor * np.max(np.abs(v))]
            counts.append(int(np.count_nonzero(np.diff(np.sign(keep)) != 0)))
        return np.asarray(counts)

    def certified(self, rtol: float = RESIDUAL_TOL) -> bool:
        ok = bool(np.all(self.residuals <= rtol))
        if self.eigenvectors is not None:
            ok = ok and bool(np.all(self.node_counts() == np.arange(len(self))))
        return ok


def discretize(v: Callable, grid: Grid, kinetic: float = 1.0) -> TridiagonalOperator:
    """3-point stencil of ``-kinetic * d2 + v`` on the interior nodes."""
    x = grid.x
    vals = np.asarray(v(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        bad = x[~np.isfinite(vals)][0]
        raise SingularPoint(f"potential is not finite at node x = {bad}; use an epsilon guard")
    h2 = grid.h ** 2
    diag = 2.0 * kinetic / h2 + vals
    off = np.full(grid.n_points - 1, -kinetic / h2)
    return TridiagonalOperator(diag, off, grid)


def _start_vectors(n, m):
    return np.random.default_rng(20240531).standard_normal((n, m))


def eigen_lowest(op: TridiagonalOperator, m: int, vectors: bool = True,
                 tol: float = EIG_TOL, rtol: float = RESIDUAL_TOL, max_iter: int = 400) -> Spectrum:
    """The ``m`` smallest eigenpairs of ``op``.

    Residuals are ``||H psi - E psi||_2`` for unit ``psi``; without vectors
    they are reported as NaN.
    """
    n = op.diagonal.size
    if not 1 <= m <= n:
        raise ConfigError(f"requested {m} levels from an operator of size {n}")
    d = np.ascontiguousarray(op.diagonal, dtype=np.float64)
    e = np.ascontiguousarray(op.off_diagonal, dtype=np.float64)
    eigs, _, conv = kernels.bisect_lowest(d, e, m, tol, max_iter)
    if not np.all(conv):
        raise ConvergenceFailure(f"bisection did not converge in {max_iter} steps")
    eigs = np.asarray(eigs, dtype=float)
    if not vectors:
        return Spectrum(eigs, None, np.full(m, np.nan), op.grid)
    scale = float(np.max(np.abs(d))) + 2.0 * float(np.max(np.abs(e), initial=0.0))
    vecs, res, _ = kernels.inverse_iteration(d, e, eigs, _start_vectors(n, m), 0.1 * rtol, 8,
                                             1e-7 * max(1.0, scale))
    vecs = np.asarray(vecs)
    # deterministic sign: first significant entry positive
    for k in range(m):
        col = vecs[:, k]
        j = int(np.argmax(np.abs(col) > 1e-6 * np.max(np.abs(col))))
        if col[j] < 0:
            vecs[:, k] = -col
    return Spectrum(eigs, vecs, np.asarray(res, dtype=float), op.grid)


def level_spacing(spec) -> np.ndarray:
    vals = spec.eigenvalues if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    if vals.size < 2:
        raise ValueError("level spacing needs at least two levels")
    return np.diff(vals)


# ------------------------------------------------------------ domain solves

def grid_for_domain(domain: Domain, n_points: int, a: float = -12.0, b: float = 12.0,
                    guard: Optional[float] = None) -> Grid:
    """Finite Dirichlet box for ``domain``.

    Infinite ends are cut at ``a`` / ``b``. A singular end is replaced by a
    wall ``guard`` away from it (default ``GUARD_FRACTION * (b - lo)``).
    """
    if domain.kind == FULL_LINE:
        lo = max(a, domain.lo)
        hi = min(b, domain.hi)
        return Grid(lo, hi, n_points)
    if domain.kind == HALF_LINE_LEFT:
        hi = min(b, domain.hi)
        eps = GUARD_FRACTION * (hi - domain.lo) if guard is None else guard
        return Grid(domain.lo + eps, hi, n_points, epsilon_guard=eps)
    # custom: finite ends are walls as given, infinite ends are cut; a pole at a
    # finite right end is guarded like the left one.
    lo = domain.lo if np.isfinite(domain.lo) else a
    if np.isfinite(domain.hi):
        eps = 0.0 if guard is None and np.isfinite(domain.lo) else (
            GUARD_FRACTION * (domain.hi - lo) if guard is None else guard)
        return Grid(lo, domain.hi - eps, n_points, epsilon_guard=eps)
    return Grid(lo, b, n_points)


def _needs_guard(domain: Domain) -> bool:
    return domain.kind == HALF_LINE_LEFT or (
        domain.kind == CUSTOM and np.isfinite(domain.hi) and not np.isfinite(domain.lo))


def solve_on_domain(v: Callable, domain: Domain, m: int, n_points: int = 3000,
                    a: float = -12.0, b: float = 12.0, kinetic: float = 1.0,
                    drift_tol: float = GUARD_DRIFT_TOL, max_halvings: int = 40) -> Spectrum:
    """Lowest ``m`` levels of ``-kinetic d2 + v`` on ``domain``.

    For domains with a singular end the guard is halved until no eigenvalue
    moves by more than ``drift_tol``; the last grid is the one reported.
    """
    if not _needs_guard(domain):
        return eigen_lowest(discretize(v, grid_for_domain(domain, n_points, a, b), kinetic), m)
    grid = grid_for_domain(domain, n_points, a, b)
    eps = grid.epsilon_guard
    prev = eigen_lowest(discretize(v, grid, kinetic), m, vectors=False).eigenvalues
    for _ in range(max_halvings):
        eps *= 0.5
        grid = grid_for_domain(domain, n_points, a, b, guard=eps)
        cur = eigen_lowest(discretize(v, grid, kinetic), m, vectors=False).eigenvalues
        if np.max(np.abs(cur - prev)) < drift_tol:
            return eigen_lowest(discretize(v, grid, kinetic), m)
        prev = cur
    raise ConvergenceFailure(f"guard halving did not settle below {drift_tol} after {max_halvings} steps")


def solve_pair(pair, m: int, n_points: int = 3000, a: float = -12.0, b: float = 12.0):
    """(spectrum of V+, spectrum of V-) on the pair's domain."""
    plus = solve_on_domain(pair.v_plus, pair.domain, m, n_points, a, b)
    minus = solve_on_domain(pair.v_minus, pair.domain, m, n_points, a, b)
    return plus, minus


def worker_count() -> int:
    raw = os.environ.get("WORKBENCH_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"WORKBENCH_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def solve_many(tasks: Sequence[Callable[[], object]]) -> list:
    """Run independent zero-argument solve callables, results in task order."""
    workers = min(worker_count(), max(1, len(tasks)))
    if workers == 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: t(), tasks))


# ----------------------------------------------------------- SUSY checks

@dataclass
class PairingReport:
    paired: bool
    zero_mode_side: Optional[str]
    zero_mode_value: Optional[float]
    levels_compared: int
    deviations: np.ndarray
    first_mismatch: Optional[int]
    tol: float

    def lines(self):
        side = self.zero_mode_side or "none"
        out = [f"pairing: {'PASS' if self.paired else 'FAIL'} (tol {self.tol:g}, "
               f"{self.levels_compared} levels, zero mode side: {side})"]
        if self.zero_mode_value is not None:
            out.append(f"zero mode eigenvalue: {self.zero_mode_value:.17g}")
        if self.deviations.size:
            out.append(f"max level deviation: {np.max(np.abs(self.deviations)):.3e}")
        if self.first_mismatch is not None:
            out.append(f"first mismatch at level {self.first_mismatch}")
        return out


def susy_pairing_check(spec_plus, spec_minus, tol: float) -> PairingReport:
    """Compare two partner spectra with the unpaired lowest level removed.

    The side holding the unpaired level is the one whose lowest eigenvalue is
    smaller by more than ``tol``; if neither is, the spectra are compared as
    fully isospectral.
    """
    p = np.asarray(getattr(spec_plus, "eigenvalues", spec_plus), dtype=float)
    q = np.asarray(getattr(spec_minus, "eigenvalues", spec_minus), dtype=float)
    side, zero = None, None
    if p[0] < q[0] - tol:
        side, zero = "plus", float(p[0])
        p = p[1:]
    elif q[0] < p[0] - tol:
        side, zero = "minus", float(q[0])
        q = q[1:]
    k = min(p.size, q.size)
    dev = q[:k] - p[:k]
    bad = np.flatnonzero(np.abs(dev) > tol)
    first = int(bad[0]) if bad.size else None
    return PairingReport(first is None and k > 0, side, zero, k, dev, first, tol)


def _first_derivative(grid: Grid):
    n, h = grid.n_points, grid.h
    return sp.diags([np.full(n - 1, -0.5 / h), np.full(n - 1, 0.5 / h)], [-1, 1], format="csr")


def _second_derivative(grid: Grid):
    n, h = grid.n_points, grid.h
    return sp.diags([np.full(n - 1, 1 / h**2), np.full(n, -2 / h**2), np.full(n - 1, 1 / h**2)],
                    [-1, 0, 1], format="csr")


def smooth_test_vectors(grid: Grid) -> np.ndarray:
    """Gaussian bumps placed inside the grid, as columns."""
    x, span = grid.x, grid.b - grid.a
    sigma = span / 12.0
    cols = []
    for frac in (0.4, 0.5, 0.6):
        c = grid.a + frac * span
        g = np.exp(-(((x - c) / sigma) ** 2))
        cols.append(g)
        cols.append(g * (x - c) / sigma)
    return np.column_stack(cols)


def intertwining_residual(w, grid: Grid, scale: float = 1.0, trim: int = 2) -> float:
    """max |(L H+ - H- L) f| over interior nodes and smooth test vectors f.

    ``L = scale * D + W`` with the central first difference ``D``; ``H+-`` are
    the discretized partner Hamiltonians. ``trim`` nodes at each wall are
    excluded where the stencils are truncated.
    """
    x = grid.x
    pair = partner_potentials(w, 0.0, scale)
    d1 = _first_derivative(grid)
    d2 = _second_derivative(grid)
    wv = sp.diags(w.value(x))
    lop = scale * d1 + wv
    hp = -scale**2 * d2 + sp.diags(pair.v_plus(x))
    hm = -scale**2 * d2 + sp.diags(pair.v_minus(x))
    worst = 0.0
    for f in smooth_test_vectors(grid).T:
        r = lop @ (hp @ f) - hm @ (lop @ f)
        worst = max(worst, float(np.max(np.abs(r[trim:x.size - trim]))) / float(np.max(np.abs(f))))
    return worst


def fit_order(hs, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


# ---------------------------------------------------------------- CSV io

def spectrum_to_csv(spec: Spectrum, fh=None) -> str:
    """Columns n, eigenvalue, residual at 17 significant digits."""
    buf = io.StringIO()
    buf.write("n,eigenvalue,residual\n")
    for n, (ev, res) in enumerate(zip(spec.eigenvalues, spec.residuals)):
        buf.write(f"{n},{ev:.17g},{res:.17g}\n")
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def spectrum_from_csv(text: str) -> Spectrum:
    lines = [ln for ln in text.strip().splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0].strip() != "n,eigenvalue,residual":
        raise ConfigError("spectrum CSV must start with the header 'n,eigenvalue,residual'")
    rows = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]], dtype=float).reshape(-1, 3)
    return Spectrum(rows[:, 1].copy(), None, rows[:, 2].copy())
