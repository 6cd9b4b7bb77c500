"""Property tests for the invariants of each module."""
import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.linalg import eigh_tridiagonal

from susy_workbench import analytic as an
from susy_workbench import dirac as dq
from susy_workbench import eigensolver as es
from susy_workbench import kernels
from susy_workbench import planar as pl
from susy_workbench import potentials as pt

FAST = settings(max_examples=40, deadline=None)
SLOW = settings(max_examples=12, deadline=None)

coef = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
pos = st.floats(0.1, 3.0)


@st.composite
def superpotentials(draw):
    kind = draw(st.sampled_from(["linear", "linear_inverse", "isotonic"]))
    if kind == "linear":
        return pt.Linear(draw(coef), draw(coef))
    if kind == "linear_inverse":
        return pt.LinearInverse(draw(coef), draw(coef), draw(coef.filter(lambda z: abs(z) > 1e-3)), draw(coef))
    return pt.IsotonicShifted(draw(pos), draw(pos), draw(st.floats(0.1, 2.0)))


def _sample_in_domain(w, n=64):
    d = w.domain()
    lo = d.lo + 0.05 if np.isfinite(d.lo) else -5.0
    hi = d.hi - 0.05 if np.isfinite(d.hi) else lo + 10.0
    return np.linspace(lo, hi, n)


@FAST
@given(superpotentials(), st.floats(-5, 5))
def test_partner_sum_and_difference(w, lam):
    pair = pt.partner_potentials(w, lam)
    x = _sample_in_domain(w)
    vp, vm = pair.sample(x)
    scale = 1.0 + np.abs(w.value(x)) ** 2 + np.abs(lam)
    assert np.all(np.abs(vp + vm - 2 * (w.value(x) ** 2 + lam)) <= 1e-12 * scale)
    assert np.all(np.abs(vm - vp - 2 * w.derivative(x)) <= 1e-12 * (scale + np.abs(w.derivative(x))))


@FAST
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_isochronous_equals_reduction(z, t):
    x = np.linspace(0.05, 6.0, 100)
    pair = pt.isochronous_pair(z)
    ref = pt.partner_potentials(pt.LinearInverse(-t, 1.0, z, t))
    np.testing.assert_allclose(pair.v_plus(x), ref.v_plus(x), rtol=1e-12, atol=1e-10)
    np.testing.assert_allclose(pair.v_minus(x), ref.v_minus(x), rtol=1e-12, atol=1e-10)


@FAST
@given(st.floats(0.5, 3.0), st.floats(-2, 2))
def test_ground_state_nodeless(slope, offset):
    # the exponent's minimum sits at -offset/slope, inside [-4, 4]
    gs = pt.ground_state(pt.Linear(slope, offset), es.Grid(-10, 10, 400))
    assert np.all(gs.samples > 0)
    assert gs.normalizable
    assert not pt.ground_state(pt.Linear(-slope, offset), es.Grid(-10, 10, 400)).normalizable


@st.composite
def dirac_params(draw, gamma=None, scalar_const=False):
    w = draw(superpotentials())
    if scalar_const:
        s = dq.constant(draw(coef))
    else:
        s = pt.Linear(draw(coef), draw(coef))
    g = draw(coef) if gamma is None else gamma
    return dq.DiracParams(s, w, draw(st.floats(0.0, 3.0)), g, draw(coef))


@FAST
@given(dirac_params())
def test_perfect_square_identity(p):
    p = p.perfect_square()
    x = _sample_in_domain(p.pseudo_w)
    q, ps = dq.quasi_elements(p), dq.perfect_square_elements(p)
    for key, e in q.blocks().items():
        f = ps.blocks()[key]
        for a, b in ((e.c0(x), f.c0(x)), (e.c1(x), f.c1(x))):
            assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1.0, np.abs(b)))
        assert e.c2 == f.c2


@FAST
@given(dirac_params())
def test_quasi_hermiticity(p):
    x = _sample_in_domain(p.pseudo_w)
    scale = 1.0 + float(np.max(np.abs(p.pseudo_w.value(x))))
    assert dq.hermiticity_defect(dq.quasi_elements(p), x) <= 1e-12 * scale


@FAST
@given(dirac_params(), st.booleans(), st.booleans())
def test_offdiagonal_vanishes_iff_gamma_and_slope_zero(p, zero_gamma, zero_slope):
    s = pt.Linear(0.0 if zero_slope else p.scalar_s.slope_half, p.scalar_s.offset)
    p = dq.DiracParams(s, p.pseudo_w, p.rest_mass_energy, 0.0 if zero_gamma else p.gamma, p.delta)
    g = es.grid_for_domain(p.pseudo_w.domain(), 64, -5, 5)
    res = dq.offdiagonal_residual(dq.quasi_elements(p), g)
    vanish = p.gamma == 0.0 and s.slope_half == 0.0
    assert (res == 0.0) == vanish


@FAST
@given(pos, pos, pos, coef, coef, st.floats(0.1, 3.0), coef)
def test_planar_offdiagonal_zero_for_constant_mass(p, q, r, k, s0, vf, delta):
    a = pl.VectorPotential("isochronous", {"p": p, "q": q, "r": r})
    cfg = pl.PlanarConfig(a, k, s0, 0.0, delta, vf)
    g = es.grid_for_domain(a.superpotential(k).domain(), 50, -5, 5)
    assert dq.offdiagonal_residual(pl.planar_quasi_elements(cfg), g) == 0.0


@SLOW
@given(superpotentials())
def test_dirac_hermitian(w):
    g = es.grid_for_domain(w.domain(), 40, -4, 4)
    p = dq.DiracParams(pt.Linear(0.3, 0.1), w, 1.0)
    assert dq.build_dirac(p, g).hermitian_defect() <= 1e-12


@SLOW
@given(st.floats(0.2, 2.0), st.floats(-1, 1))
def test_chiral_pairs_without_mass(slope, offset):
    g = es.Grid(-5, 5, 60)
    p = dq.DiracParams(dq.constant(0.0), pt.Linear(slope, offset), 0.0)
    e = np.sort(np.linalg.eigvalsh(dq.build_dirac(p, g).dense()))
    np.testing.assert_allclose(e, -e[::-1], atol=1e-9)


@FAST
@given(st.floats(0.1, 5.0), st.floats(-0.25, 20.0), st.floats(-10, 10), st.sampled_from([an.PLUS, an.MINUS]),
       st.integers(0, 50))
def test_constraint_round_trip(a, c, v0, branch, n):
    q_in = an.QuantizationInput(a, c, v0, branch)
    e = an.quantization_energy(q_in, n)
    assert abs(an.quantization_constraint(q_in, e) + n) <= 1e-12 * max(1.0, n)


@FAST
@given(st.floats(0.05, 10.0), st.floats(0.1, 3.0) | st.floats(-3.0, -0.1))
def test_isotonic_match_residual(omega_cap, eta):
    m = an.isotonic_match(omega_cap, eta, "upper")
    pair = pt.partner_potentials(pt.IsotonicShifted(m.r, m.s, eta))
    u = np.linspace(0.25, 4.0, 200)
    x = (u - 1.0) / eta
    ref = pt.isotonic_potential(omega_cap, eta, x)
    assert np.max(np.abs(pair.v_minus(x) + m.lambda_shift - ref)) <= 1e-12 * max(1.0, omega_cap) * 20


@st.composite
def tridiagonals(draw):
    n = draw(st.integers(16, 120))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    v = rng.uniform(-5, 5, n)
    return es.discretize(lambda x: v, es.Grid(0.0, 1.0 + n * 0.01, n))


@FAST
@given(tridiagonals(), st.floats(-50, 5e4))
def test_sturm_count_matches_dense(op, shift):
    ev = np.linalg.eigvalsh(op.to_dense())
    assume(np.min(np.abs(ev - shift)) > 1e-8 * max(1.0, abs(shift)))
    assert kernels.sturm_count_numpy(op.diagonal, op.off_diagonal, shift)[0] == np.sum(ev < shift)
    if kernels.HAS_NUMBA:
        assert kernels.sturm_count_numba(op.diagonal, op.off_diagonal, shift) == np.sum(ev < shift)


@FAST
@given(tridiagonals(), st.integers(1, 8))
def test_eigen_lowest_certified(op, m):
    spec = es.eigen_lowest(op, m)
    ref = eigh_tridiagonal(op.diagonal, op.off_diagonal, eigvals_only=True, select="i", select_range=(0, m - 1))
    np.testing.assert_allclose(spec.eigenvalues, ref, atol=1e-9 * max(1.0, np.max(np.abs(ref))))
    assert np.all(np.diff(spec.eigenvalues) > 0)
    assert np.all(spec.residuals <= es.RESIDUAL_TOL)
    np.testing.assert_array_equal(spec.node_counts(), np.arange(m))


@FAST
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=10))
def test_csv_round_trip(values):
    vals = np.sort(np.array(values))
    spec = es.Spectrum(vals, None, np.abs(vals) * 1e-12)
    back = es.spectrum_from_csv(es.spectrum_to_csv(spec))
    np.testing.assert_array_equal(back.eigenvalues, spec.eigenvalues)
    np.testing.assert_array_equal(back.residuals, spec.residuals)
