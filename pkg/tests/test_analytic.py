import math

import numpy as np
import pytest

from susy_workbench import analytic as an
from susy_workbench import eigensolver as es
from susy_workbench import potentials as pt
from susy_workbench.errors import ComplexIndex, ConfigError, Degenerate

HALF = pt.Domain(0.0, np.inf, pt.HALF_LINE_LEFT)


def _levels(q_in, count=3):
    return [an.quantization_energy(q_in, n) for n in range(count)]


def test_regular_branch_c0():
    assert _levels(an.QuantizationInput(1.0, 0.0, -1.0, an.PLUS)) == [2.0, 6.0, 10.0]


def test_other_branch_c0():
    assert _levels(an.QuantizationInput(1.0, 0.0, -1.0, an.MINUS)) == [0.0, 4.0, 8.0]


def test_regular_branch_c2():
    assert _levels(an.QuantizationInput(1.0, 2.0, -1.0, an.PLUS)) == [4.0, 8.0, 12.0]


def test_regular_branch_agrees_with_half_line_numerics():
    for c, v in ((0.0, lambda x: x * x - 1.0), (2.0, lambda x: x * x + 2.0 / (x * x) - 1.0),
                 (0.75, lambda x: x * x + 0.75 / (x * x) + 0.5)):
        q_in = an.QuantizationInput(1.0, c, -1.0 if c != 0.75 else 0.5, an.PLUS)
        spec = es.solve_on_domain(v, HALF, 4)
        np.testing.assert_allclose(spec.eigenvalues, _levels(q_in, 4), atol=1e-2)
        other = an.QuantizationInput(q_in.a, q_in.c, q_in.v0, an.MINUS)
        assert np.max(np.abs(spec.eigenvalues - _levels(other, 4))) > 0.5


def test_stiffer_oscillator():
    # a = 2: -y'' + 4x^2 y on the half-line -> 4(2n + 3/2)
    q_in = an.QuantizationInput(2.0, 0.0, 0.0, an.PLUS)
    assert _levels(q_in, 2) == [6.0, 14.0]
    spec = es.solve_on_domain(lambda x: 4 * x * x, HALF, 2, b=8.0)
    np.testing.assert_allclose(spec.eigenvalues, [6.0, 14.0], atol=1e-2)


def test_constraint_round_trip():
    for q_in in (an.QuantizationInput(1.0, 0.0, -1.0, an.PLUS), an.QuantizationInput(1.3, 5.1, 0.7, an.MINUS)):
        for n in range(10):
            assert an.quantization_constraint(q_in, an.quantization_energy(q_in, n)) == pytest.approx(-n, abs=1e-12)


def test_complex_index():
    with pytest.raises(ComplexIndex):
        an.QuantizationInput(1.0, -0.3, 0.0)
    an.QuantizationInput(1.0, -0.25, 0.0)   # boundary is allowed


def test_input_validation():
    with pytest.raises(ConfigError):
        an.QuantizationInput(0.0, 0.0, 0.0)
    with pytest.raises(ConfigError):
        an.QuantizationInput(1.0, 0.0, 0.0, "sideways")
    with pytest.raises(ConfigError):
        an.quantization_energy(an.QuantizationInput(1.0, 0.0, 0.0), -1)


# ---- printed isochronous formula

def test_printed_formula_values():
    for n in range(4):
        assert an.isochronous_energy_paper(n, 0.0, -1) == 4 * n + 2
        assert an.isochronous_energy_paper(n, 0.0, 1) == 4 * n + 2
        assert an.isochronous_energy_paper(n, -1.0, 1) == pytest.approx(4 * n)


def test_printed_formula_errors():
    # beta^2 + q beta >= -1/4 for real beta, so the root is at worst zero
    assert an.isochronous_energy_paper(0, -0.5, 1) == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        an.isochronous_energy_paper(0, 0.0, 2)


def test_printed_formula_equals_matching_branch():
    # beta = 0, q = -1: c = 0 and v0 = +1; the printed values are the minus branch
    q_in = an.isochronous_input(0.0, -1, an.MINUS)
    assert (q_in.c, q_in.v0) == (0.0, 1.0)
    for n in range(5):
        assert an.quantization_energy(q_in, n) == pytest.approx(an.isochronous_energy_paper(n, 0.0, -1))


def test_isochronous_input_matches_pair():
    for beta in (-1.0, 0.0, 1.0, 2.0):
        pair = pt.isochronous_pair(beta)
        x = np.linspace(0.3, 3, 10)
        for q, v in ((1, pair.v_plus), (-1, pair.v_minus)):
            q_in = an.isochronous_input(beta, q)
            np.testing.assert_allclose(v(x), q_in.a**2 * x**2 + q_in.c / x**2 + q_in.v0, rtol=1e-12)


def test_in_text_claims_table():
    assert set(an.IN_TEXT_CLAIMS) == {(0.0, -1), (0.0, 1), (-1.0, 1), (-1.0, -1)}
    assert an.IN_TEXT_CLAIMS[(-1.0, 1)](0) == -2


# ---- isotonic matching

def test_isotonic_match_upper():
    m = an.isotonic_match(2.0, 1.0, "upper")
    assert m.s == pytest.approx(1.0)
    assert m.r == pytest.approx(math.sqrt(2.0))
    assert m.lambda_shift == pytest.approx(-4.0 + math.sqrt(2.0))
    assert m.physical


@pytest.mark.parametrize("omega_cap, eta", [(1.0, 1.0), (2.0, 1.0), (4.0, 0.5), (0.3, -2.0)])
def test_isotonic_match_pointwise(omega_cap, eta):
    m = an.isotonic_match(omega_cap, eta, "upper")
    pair = pt.partner_potentials(pt.IsotonicShifted(m.r, m.s, eta))
    u = np.linspace(0.25, 4.0, 1000)
    x = (u - 1.0) / eta
    ref = pt.isotonic_potential(omega_cap, eta, x)
    assert np.max(np.abs(pair.v_minus(x) + m.lambda_shift - ref)) < 1e-12


def test_isotonic_match_lower_sign_flagged():
    m = an.isotonic_match(2.0, 1.0, "lower")
    assert m.s == pytest.approx(-2.0)
    assert not m.physical
    # still an exact match for the lower root
    pair = pt.partner_potentials(pt.IsotonicShifted(m.r, m.s, 1.0))
    x = np.linspace(-0.5, 2.0, 50)
    np.testing.assert_allclose(pair.v_minus(x) + m.lambda_shift, pt.isotonic_potential(2.0, 1.0, x), atol=1e-11)


def test_isotonic_match_degenerate():
    with pytest.raises(Degenerate):
        an.isotonic_match(1.0, 0.0)
    with pytest.raises(Degenerate):
        an.isotonic_match(0.0, 1.0)
    with pytest.raises(ConfigError):
        an.isotonic_match(-1.0, 1.0)


# ---- oscillator

def test_ho_energy():
    assert an.ho_energy(0, 2.0) == 0.0
    assert an.ho_energy(3, 2.0) == 6.0
    with pytest.raises(ConfigError):
        an.ho_energy(1, 0.0)


def test_ho_energy_matches_numerics():
    pair = pt.partner_potentials(pt.Linear(1.0, 0.0))
    spec = es.eigen_lowest(es.discretize(pair.v_plus, es.Grid(-12, 12, 3000)), 6)
    np.testing.assert_allclose(spec.eigenvalues, an.ho_energy(np.arange(6), 2.0), atol=1e-3)
