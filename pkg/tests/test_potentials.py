import json

import numpy as np
import pytest

from susy_workbench import potentials as pt
from susy_workbench.eigensolver import Grid
from susy_workbench.errors import ConfigError, OutOfDomain, OutOfRange, SingularPoint


# ---- eval_superpotential

def test_linear_value_and_derivative():
    assert pt.eval_superpotential(pt.Linear(1.0, 0.0), 2.0) == (2.0, 1.0)


def test_linear_inverse_value_and_derivative():
    v, d = pt.eval_superpotential(pt.LinearInverse(0.0, 1.0, -1.0, 0.0), 1.0)
    assert v == pytest.approx(0.0)
    assert d == pytest.approx(2.0)


def test_isotonic_shifted_value_and_derivative():
    v, d = pt.eval_superpotential(pt.IsotonicShifted(1.0, 1.0, 1.0), 0.0)
    assert v == pytest.approx(0.0)
    assert d == pytest.approx(2.0)


@pytest.mark.parametrize("w, pole", [
    (pt.LinearInverse(0.0, 1.0, -1.0, 0.0), 0.0),
    (pt.IsotonicShifted(1.0, 1.0, 2.0), -0.5),
])
def test_pole_evaluation_raises(w, pole):
    with pytest.raises(SingularPoint):
        w.value(pole)
    with pytest.raises(SingularPoint):
        w.derivative(np.array([1.0, pole]))


def test_linear_inverse_without_z_has_no_pole():
    w = pt.LinearInverse(1.0, 2.0, 0.0, 0.5)
    assert w.poles == ()
    assert w.value(0.0) == pytest.approx(1.5)
    assert w.domain().kind == pt.FULL_LINE


def test_tabulated_needs_three_increasing_points():
    with pytest.raises(ConfigError):
        pt.Tabulated([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ConfigError):
        pt.Tabulated([0.0, 1.0, 1.0], [0.0, 1.0, 2.0])
    with pytest.raises(ConfigError):
        pt.Tabulated([0.0, 2.0, 1.0], [0.0, 1.0, 2.0])


def test_tabulated_out_of_range():
    w = pt.Tabulated(np.linspace(0, 1, 5), np.linspace(0, 1, 5) ** 2)
    with pytest.raises(OutOfRange):
        w.value(1.5)
    with pytest.raises(OutOfRange):
        w.derivative(-0.1)


def test_tabulated_derivative_is_second_order():
    # exact for quadratics, ends included
    xs = np.linspace(-1.0, 2.0, 31)
    w = pt.Tabulated(xs, 3 * xs**2 - xs + 1)
    np.testing.assert_allclose(w.derivative(xs), 6 * xs - 1, atol=1e-12)


def test_tabulated_derivative_converges_at_order_two():
    errs = []
    for n in (21, 41, 81):
        xs = np.linspace(0, 2, n)
        w = pt.Tabulated(xs, np.sin(xs))
        errs.append(np.max(np.abs(w.derivative(xs) - np.cos(xs))))
    ratio = errs[1] / errs[2]
    assert 3.5 < ratio < 4.5


# ---- partner_potentials

def test_partners_of_x():
    pair = pt.partner_potentials(pt.Linear(1.0, 0.0))
    x = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(pair.v_plus(x), x**2 - 1, atol=1e-14)
    np.testing.assert_allclose(pair.v_minus(x), x**2 + 1, atol=1e-14)
    assert pair.domain.kind == pt.FULL_LINE


def test_partners_of_constant():
    pair = pt.partner_potentials(pt.Linear(0.0, 1.5))
    x = np.linspace(-3, 3, 7)
    np.testing.assert_allclose(pair.v_plus(x), 2.25)
    np.testing.assert_allclose(pair.v_minus(x), 2.25)


def test_partners_of_x_minus_inverse():
    pair = pt.partner_potentials(pt.LinearInverse(0.0, 1.0, -1.0, 0.0))
    x = np.linspace(0.1, 5, 50)
    np.testing.assert_allclose(pair.v_plus(x), x**2 - 3, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(pair.v_minus(x), x**2 + 2 / x**2 - 1, rtol=1e-12)
    assert pair.domain.kind == pt.HALF_LINE_LEFT
    assert pair.domain.lo == 0.0


def test_lambda_offset_shifts_both():
    pair = pt.partner_potentials(pt.Linear(1.0, 0.0), lambda_offset=2.5)
    assert pair.v_plus(0.0) == pytest.approx(1.5)
    assert pair.v_minus(0.0) == pytest.approx(3.5)
    assert pair.lambda_offset == 2.5


def test_isotonic_domain_follows_eta_sign():
    assert pt.IsotonicShifted(1.0, 1.0, 1.0).domain() == pt.Domain(-1.0, np.inf, pt.HALF_LINE_LEFT)
    d = pt.IsotonicShifted(1.0, 1.0, -2.0).domain()
    assert d.kind == pt.CUSTOM and d.hi == 0.5 and d.lo == -np.inf


# ---- isochronous_pair

def test_isochronous_z0():
    pair = pt.isochronous_pair(0.0)
    x = np.linspace(0.2, 4, 20)
    np.testing.assert_allclose(pair.v_plus(x), x**2 - 1)
    np.testing.assert_allclose(pair.v_minus(x), x**2 + 1)


def test_isochronous_zm1():
    pair = pt.isochronous_pair(-1.0)
    x = np.linspace(0.2, 4, 20)
    np.testing.assert_allclose(pair.v_plus(x), x**2 - 3, atol=1e-12)
    np.testing.assert_allclose(pair.v_minus(x), x**2 + 2 / x**2 - 1)


def test_isochronous_z1():
    pair = pt.isochronous_pair(1.0)
    x = np.linspace(0.2, 4, 20)
    np.testing.assert_allclose(pair.v_plus(x), 1 + x**2 + 2 / x**2)
    np.testing.assert_allclose(pair.v_minus(x), 3 + x**2)


@pytest.mark.parametrize("z", [-1.0, 0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.0, 0.7, -1.3])
def test_isochronous_matches_linear_inverse_reduction(z, t):
    pair = pt.isochronous_pair(z)
    ref = pt.partner_potentials(pt.LinearInverse(-t, 1.0, z, t))
    x = np.linspace(0.05, 6, 200)
    np.testing.assert_allclose(pair.v_plus(x), ref.v_plus(x), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(pair.v_minus(x), ref.v_minus(x), rtol=1e-12, atol=1e-12)


def test_isochronous_pole():
    with pytest.raises(SingularPoint):
        pt.isochronous_pair(1.0).v_plus(0.0)


# ---- ground_state

def test_ground_state_gaussian():
    g = Grid(-10, 10, 2001)
    gs = pt.ground_state(pt.Linear(1.0, 0.0), g)
    assert gs.normalizable
    assert np.all(gs.samples > 0)
    ref = np.exp(-g.x**2 / 2)
    ref /= np.sqrt(g.h * np.sum(ref**2))
    np.testing.assert_allclose(gs.samples, ref, atol=1e-12)
    assert g.h * np.sum(gs.samples**2) == pytest.approx(1.0)


def test_ground_state_of_minus_x_not_normalizable():
    gs = pt.ground_state(pt.Linear(-1.0, 0.0), Grid(-10, 10, 501))
    assert not gs.normalizable


def test_ground_state_x_minus_inverse():
    g = Grid(1e-3, 10, 2000)
    gs = pt.ground_state(pt.LinearInverse(0.0, 1.0, -1.0, 0.0), g)
    assert gs.normalizable
    ref = g.x * np.exp(-g.x**2 / 2)
    ratio = gs.samples / ref
    assert np.max(np.abs(ratio / ratio[0] - 1.0)) < 1e-10


def test_ground_state_tabulated_uses_trapezoid():
    xs = np.linspace(-8, 8, 4001)
    w = pt.Tabulated(xs, xs)
    g = Grid(-7.9, 7.9, 1500)
    gs = pt.ground_state(w, g)
    ref = pt.ground_state(pt.Linear(1.0, 0.0), g)
    assert gs.normalizable
    np.testing.assert_allclose(gs.samples, ref.samples, atol=1e-5)


def test_ground_state_first_order_equation_residual_is_second_order():
    # (d/dx + W) psi0 = 0 with the central difference
    w = pt.LinearInverse(0.0, 1.0, -1.0, 0.0)
    errs = []
    for n in (200, 400, 800):
        g = Grid(0.5, 6.0, n)
        psi = pt.ground_state(w, g).samples
        d = (psi[2:] - psi[:-2]) / (2 * g.h)
        res = d + w.value(g.x[1:-1]) * psi[1:-1]
        errs.append(np.max(np.abs(res)))
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


# ---- plain potentials

def test_isotonic_potential_values():
    assert pt.isotonic_potential(1.0, 1.0, 0.0) == pytest.approx(0.0)
    assert pt.isotonic_potential(2.0, 1.0, 1.0) == pytest.approx(4.5)


def test_isotonic_potential_normalized_variant():
    # Omega = omega^2 / (8 beta^2) with omega = 2, beta = 1
    omega, beta = 2.0, 1.0
    assert pt.isotonic_potential(omega**2 / (8 * beta**2), 1.0, 1.0) == pytest.approx(1.125)


def test_isotonic_potential_pole():
    with pytest.raises(SingularPoint):
        pt.isotonic_potential(1.0, 2.0, -0.5)


def test_urabe_values():
    for zeta, omega in ((1.0, 2.0), (0.3, 1.1), (-2.0, 0.5)):
        assert pt.urabe_potential(zeta, omega, 0.0) == pytest.approx(0.0)
    assert pt.urabe_potential(1.0, 2.0, 1.5) == pytest.approx(2.0)
    assert pt.urabe_potential(1.0, 2.0, -0.5) == pytest.approx(2.0)


@pytest.mark.parametrize("x", [-0.6, 1.6])
def test_urabe_out_of_domain(x):
    with pytest.raises(OutOfDomain):
        pt.urabe_potential(1.0, 2.0, x)


def test_urabe_negative_zeta_domain():
    d = pt.UrabePotential(-1.0, 1.0).domain()
    assert (d.lo, d.hi) == (-1.5, 0.5)
    with pytest.raises(OutOfDomain):
        pt.UrabePotential(0.0, 1.0)


# ---- JSON and family strings

@pytest.mark.parametrize("w", [
    pt.Linear(1.0, 0.5),
    pt.LinearInverse(0.1, 1.0, -1.0, 0.2),
    pt.IsotonicShifted(1.4, 1.0, 1.0),
    pt.Tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 4.0]),
])
def test_superpotential_json_round_trip(w):
    obj = json.loads(json.dumps(pt.superpotential_to_json(w)))
    back = pt.superpotential_from_json(obj)
    x = np.array([0.5, 1.5])
    np.testing.assert_allclose(back.value(x), w.value(x))
    assert back.to_json() == w.to_json()


def test_superpotential_json_errors():
    with pytest.raises(ConfigError):
        pt.superpotential_from_json({"family": "nope", "params": {}})
    with pytest.raises(ConfigError, match="bogus"):
        pt.superpotential_from_json({"family": "linear", "params": {"bogus": 1}})
    with pytest.raises(ConfigError):
        pt.superpotential_from_json({"params": {}})


def test_potential_json():
    p = pt.potential_from_json({"family": "urabe", "params": {"zeta": 1, "omega": 2}})
    assert p(1.5) == pytest.approx(2.0)
    assert pt.potential_from_json(p.to_json()) == p
    ho = pt.potential_from_json({"family": "ho", "params": {}})
    assert ho(1.0) == pytest.approx(1.0)


def test_parse_family_string_positional_and_keyword():
    assert pt.parse_family_string("linear:1,0", pt.SUPERPOTENTIAL_FIELDS) == \
        {"family": "linear", "params": {"slope_half": 1.0, "offset": 0.0}}
    spec = pt.parse_family_string("urabe:zeta=1,omega=2", pt.POTENTIAL_FIELDS)
    assert spec["params"] == {"zeta": 1.0, "omega": 2.0}
    assert pt.parse_family_string("ho", pt.POTENTIAL_FIELDS) == {"family": "ho", "params": {}}


@pytest.mark.parametrize("text, field", [
    ("linear:1,x", "offset"),
    ("linear:slope=1", "slope"),
    ("wobble:1", "wobble"),
])
def test_parse_family_string_names_bad_field(text, field):
    with pytest.raises(ConfigError, match=field):
        pt.parse_family_string(text, pt.SUPERPOTENTIAL_FIELDS)


def test_parse_family_string_too_many_values():
    with pytest.raises(ConfigError):
        pt.parse_family_string("linear:1,2,3", pt.SUPERPOTENTIAL_FIELDS)
