import math

import numpy as np
import pytest

from neumann_holes import bessel
from neumann_holes.analytic import (BoxCosine, DiskRadial, TaylorPolynomial, box_gamma_levels, box_spectrum,
                                    disk_gamma_radii, disk_spectrum, gamma_contour, gamma_indicator,
                                    predict_shift_2d, predict_shift_general, predict_shift_Nd, vanishing_order,
                                    volume_term)
from neumann_holes.errors import DomainError, OrderTooHigh, SimplicityError
from neumann_holes.geometry import circle_hole

L4, L3 = 2**0.25, 3**0.25
PAPER_BOX = (1.0, L4, L3)
RECT = (1.0, L4)


def test_paper_box_lowest_nontrivial():
    modes = box_spectrum(PAPER_BOX, 3)
    assert modes[0].lam == 1.0 and modes[0].n == (0, 0, 0)
    assert modes[1].n == (0, 0, 1)
    assert modes[1].lam == pytest.approx(math.pi**2 / math.sqrt(3) + 1, rel=1e-14)
    assert round(modes[1].lam, 2) == 6.70
    assert modes[1].simple


def test_paper_box_triple_index():
    modes = box_spectrum(PAPER_BOX, 40)
    m = next(m for m in modes if m.n == (1, 1, 1))
    assert m.lam == pytest.approx(math.pi**2 * (1 + 1 / math.sqrt(2) + 1 / math.sqrt(3)) + 1, rel=1e-14)


def test_rectangle_and_square_multiplicity():
    modes = box_spectrum(RECT, 3)
    assert modes[1].n == (0, 1) and modes[1].simple
    assert modes[1].lam - 1 == pytest.approx(math.pi**2 / math.sqrt(2), rel=1e-14)
    square = box_spectrum((1.0, 1.0), 3)
    assert not square[1].simple and not square[2].simple


def test_exact_ties_on_rational_sides():
    # on sides (1, 2) the modes (1,0) and (0,2) share μ = π²
    modes = box_spectrum((1.0, 2.0), 6)
    tied = [m for m in modes if m.n in ((1, 0), (0, 2))]
    assert len(tied) == 2 and not any(m.simple for m in tied)


def test_disk_spectrum():
    modes = disk_spectrum(2.0, 2)
    assert f"{modes[0].alpha:.4f}" == "3.8317" and f"{modes[1].alpha:.4f}" == "7.0156"
    assert modes[0].lam == pytest.approx(modes[0].alpha ** 2 / 4 + 1, rel=1e-15)
    assert abs(bessel.j1(modes[0].alpha)) <= 1e-12


@pytest.mark.parametrize("phi", [BoxCosine(RECT, (1, 2)), BoxCosine(PAPER_BOX, (1, 0, 1)), DiskRadial(2.0, 2),
                                 DiskRadial(1.5, 1, center=(0.2, 0.1))])
def test_normalization_and_pde(phi):
    rng = np.random.default_rng(3)
    box = np.array(phi.bbox).reshape(-1, 2)
    x = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((400, phi.dim))
    x = x[phi.contains(x)][:100]
    v = phi.value(x)
    res = -phi.laplacian(x) + v - phi.lam * v
    assert np.max(np.abs(res)) <= 1e-8 * phi.lam * np.max(np.abs(v))


def test_l2_normalization_by_quadrature():
    from scipy.integrate import quad

    phi = DiskRadial(2.0, 1)
    val, _ = quad(lambda r: 2 * math.pi * r * float(phi.radial(r)) ** 2, 0, 2, epsabs=0, epsrel=1e-12)
    assert val == pytest.approx(1.0, rel=1e-10)
    box = BoxCosine(RECT, (1, 1))
    assert box.norm_constant**2 * (1 / 2) * (L4 / 2) == pytest.approx(1.0)


def test_face_centre_critical_point():
    phi = BoxCosine(RECT, (0, 1))
    assert np.max(np.abs(phi.gradient(np.array([[0.5, 0.0]])))) <= 1e-14


def test_disk_nodal_circle():
    phi = DiskRadial(2.0, 1)
    r = 2 * bessel.j0_zero(1) / bessel.j1_zero(1)
    assert phi.nodal_radii() == pytest.approx([r], rel=1e-14)
    assert abs(float(phi.value(np.array([[r, 0.0]]))[0])) <= 1e-10


@pytest.mark.parametrize("phi", [BoxCosine(RECT, (2, 1)), DiskRadial(2.0, 2)])
def test_gradient_against_central_differences(phi):
    rng = np.random.default_rng(11)
    box = np.array(phi.bbox).reshape(-1, 2)
    x = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((80, 2))
    x = x[phi.contains(x)][:20]
    h = 1e-5
    fd = np.column_stack([(phi.value(x + h * e) - phi.value(x - h * e)) / (2 * h) for e in np.eye(2)])
    g = phi.gradient(x)
    assert np.max(np.abs(fd - g)) <= 1e-6 * np.max(np.abs(g))


def test_disk_high_order_derivatives_match_differences_of_lower_ones():
    phi = DiskRadial(2.0, 1)
    x = np.array([[0.3, -0.4]])
    h = 1e-4
    d3 = phi.derivative(x, (2, 1))
    fd = (phi.derivative(x + [0, h], (2, 0)) - phi.derivative(x - [0, h], (2, 0))) / (2 * h)
    assert d3 == pytest.approx(fd, rel=1e-6)


def test_vanishing_orders():
    phi = BoxCosine(RECT, (1, 1))
    assert vanishing_order(phi, (0.3, 0.4))[0] == 1
    anti = BoxCosine(RECT, (0, 2))
    assert vanishing_order(anti, (0.5, L4 / 2))[0] == 2
    k, P = vanishing_order(phi, (0.5, L4 / 2))
    assert k == 2
    mono = P.monomials()
    assert abs(mono[(2, 0)]) <= 1e-12 and abs(mono[(0, 2)]) <= 1e-12 and abs(mono[(1, 1)]) > 1
    assert P.harmonic_defect() <= 1e-10


def test_order_too_high_for_constant_mode():
    with pytest.raises(OrderTooHigh):
        vanishing_order(BoxCosine(RECT, (0, 0)), (0.4, 0.4))


def test_taylor_polynomial_sphere_integral():
    P = TaylorPolynomial((0.0, 0.0, 0.0), 1, {(1, 0, 0): 1.0, (0, 1, 0): 0.0, (0, 0, 1): 0.0})
    assert P.sphere_integral_sq() == pytest.approx(4 * math.pi / 3)
    Q = TaylorPolynomial((0.0, 0.0), 2, {(2, 0): 0.0, (1, 1): 1.0, (0, 2): 0.0})
    # ∫ over the unit circle of cos²θ sin²θ = π/4
    assert Q.sphere_integral_sq() == pytest.approx(math.pi / 4)


def test_prediction_on_a_nodal_line():
    phi = BoxCosine(RECT, (0, 1))
    x0 = (0.5, L4 / 2)
    g = float(np.linalg.norm(phi.gradient(np.array([x0]))[0]))
    pred = predict_shift_2d(phi, x0)
    assert pred.exponent == 2 and pred.case == "regular"
    assert pred.coefficient == pytest.approx(-2 * math.pi * g**2, rel=1e-12)
    assert pred.coefficient == pytest.approx(-4 * math.pi**3 / L4**3, rel=1e-12)


def test_prediction_at_an_anti_node():
    phi = BoxCosine(RECT, (0, 2))
    x0 = (0.5, L4 / 2)
    A = float(phi.value(np.array([x0]))[0])
    pred = predict_shift_2d(phi, x0)
    assert pred.case == "critical"
    assert pred.coefficient == pytest.approx(math.pi * (phi.lam - 1) * A**2, rel=1e-12)
    c, p, log = pred.diagnostic
    assert (p, log) == (4.0, True) and c == pytest.approx(-0.5 * math.pi * (phi.lam - 1) ** 2 * A**2)


def test_prediction_at_a_saddle():
    phi = BoxCosine(RECT, (1, 1))
    pred = predict_shift_2d(phi, (0.5, L4 / 2))
    # φ ≈ c π (π/L) x y near the centre; harmonic data x y = r² sin 2θ / 2
    dxy = phi.norm_constant * math.pi * math.pi / L4
    assert pred.case == "singular" and pred.exponent == 4
    assert pred.coefficient == pytest.approx(-4 * math.pi * (dxy / 2) ** 2, rel=1e-12)


def test_prediction_needs_a_simple_planar_mode():
    with pytest.raises(SimplicityError):
        predict_shift_2d(BoxCosine((1.0, 1.0), (0, 1), simple=False), (0.5, 0.5))
    with pytest.raises(DomainError):
        predict_shift_2d(BoxCosine(PAPER_BOX, (0, 0, 1)), (0.5, 0.5, 0.5))


def test_three_dimensional_predictions():
    lam, A = 7.0, 0.8
    pred = predict_shift_Nd(3, lam, value=A, gradient=(0.0, 0.0, 0.0))
    assert pred.exponent == 3
    assert pred.coefficient == pytest.approx(4 * math.pi / 3 * (lam - 1) * A**2, rel=1e-14)
    P = TaylorPolynomial((0.0, 0.0, 0.0), 2, {(1, 1, 0): 1.0})
    sing = predict_shift_Nd(3, lam, taylor=P)
    assert sing.exponent == 5
    assert sing.coefficient == pytest.approx(-10 / 3 * P.sphere_integral_sq(), rel=1e-14)
    assert predict_shift_Nd(3, lam).coefficient == 0.0
    with pytest.raises(DomainError):
        predict_shift_Nd(2, lam, value=1.0)


def test_volume_term_limit_at_a_nodal_point():
    phi = BoxCosine(RECT, (0, 1))
    x0 = (0.31, L4 / 2)
    g2 = float(np.sum(phi.gradient(np.array([x0])) ** 2))
    eps = 1e-3
    assert volume_term(phi, circle_hole(x0, eps)) / eps**2 == pytest.approx(math.pi * g2, rel=1e-5)


def test_general_split_with_zero_inputs():
    assert predict_shift_general(0.0, 0.0).delta == 0.0
    assert predict_shift_general(1.5, -0.5).delta == pytest.approx(-1.0)


def test_paper_box_interface_planes():
    c = L3 / math.pi
    want = [c * math.atan(math.sqrt(2 / 3)), c * (math.pi - math.atan(math.sqrt(2 / 3)))]
    phi = BoxCosine(PAPER_BOX, (0, 0, 1))
    got = box_gamma_levels(phi)
    assert got == pytest.approx(want, abs=1e-12)
    pts = np.array([[0.3, 0.7, z] for z in got])
    assert np.max(np.abs(gamma_indicator(phi, pts))) <= 1e-12


def test_disk_interface_circle():
    phi = DiskRadial(2.0, 1)
    radii = disk_gamma_radii(phi)
    for r in radii:
        assert abs(float(gamma_indicator(phi, np.array([[r, 0.0]]))[0])) <= 1e-12
        z = phi.alpha * r / 2
        assert 2 * bessel.j1(z) ** 2 == pytest.approx(bessel.j0(z) ** 2, abs=1e-12)
    lines = gamma_contour(phi, shape=(201, 201))
    measured = sorted(float(np.median(np.hypot(*line.T))) for line in lines)
    assert measured == pytest.approx(sorted(radii), abs=2e-3)


def test_indicator_is_positive_at_regular_nodal_points():
    phi = BoxCosine(RECT, (1, 1))
    pts = np.array([[0.5, 0.2], [0.5, 0.9], [0.1, L4 / 2]])
    assert np.all(gamma_indicator(phi, pts) > 0)
