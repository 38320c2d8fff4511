import math

import numpy as np
import pytest

from neumann_holes.analytic import BoxCosine
from neumann_holes.assembly import BoundaryTrace, assemble_all, normal_derivative
from neumann_holes.errors import DomainError, NoHoleError, ZeroVector
from neumann_holes.geometry import Disk, DomainSpec, circle_hole, generate_mesh, rectangle, refine_uniform
from neumann_holes.torsion import (FourierHoleData, annulus_fourier_torsion, annulus_solution,
                                   annulus_torsion_leading, divergence_check, exterior_ball_torsion,
                                   radial_exterior_ode_check, solve_interior_torsion, solve_zero_mean_torsion,
                                   sup_characterization_bound)

L4 = 2**0.25
PHI1 = BoxCosine((1.0, L4), (0, 1))


@pytest.fixture(scope="module")
def rect_with_hole():
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, L4), circle_hole((0.33, 0.41), 0.08)), 0.06)
    space, K, M = assemble_all(mesh, 2)
    f = normal_derivative(PHI1.gradient)
    return space, K, M, f, solve_interior_torsion(space, K, M, f)


def test_zero_load_gives_zero_torsion(rect_with_hole):
    space, K, M, _, _ = rect_with_hole
    sol = solve_interior_torsion(space, K, M, BoundaryTrace.constant(0.0))
    assert sol.T == 0.0 and not np.any(sol.U)


def test_identities_and_positivity(rect_with_hole):
    *_, sol = rect_with_hole
    assert sol.T > 0
    assert sol.residual <= 1e-10
    assert sol.load_identity <= 1e-10 and sol.energy_identity <= 1e-10


def test_sup_characterization(rect_with_hole):
    space, K, M, f, sol = rect_with_hole
    assert sup_characterization_bound(space, K, M, f, sol.U) == pytest.approx(sol.T, rel=1e-10)
    ones = np.ones(space.dof_count)
    area = space.mesh.area()
    flux = float(sol.b.sum())
    assert sup_characterization_bound(space, K, M, f, ones) == pytest.approx(flux**2 / area, rel=1e-10)
    assert flux**2 / area <= sol.T
    rng = np.random.default_rng(7)
    for _ in range(100):
        u = rng.standard_normal(space.dof_count)
        assert sup_characterization_bound(space, K, M, f, u, sol.b) <= sol.T * (1 + 1e-12)
    with pytest.raises(ZeroVector):
        sup_characterization_bound(space, K, M, f, np.zeros(space.dof_count))


def test_torsion_needs_a_hole():
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, 1)), 0.2)
    space, K, M = assemble_all(mesh, 1)
    with pytest.raises(NoHoleError):
        solve_interior_torsion(space, K, M, BoundaryTrace.constant(1.0))


def test_divergence_check_is_small_for_the_domain_normal(rect_with_hole):
    space = rect_with_hole[0]
    assert divergence_check(space) < 1e-2


def test_annulus_cosine_data_matches_closed_form():
    # f = cos θ on the hole: the gradient-only problem the Fourier series solves
    eps, R = 0.1, 1.0
    data = FourierHoleData(1, (0.0, 1.0), ())
    exact = math.pi * eps**2 * (R**2 + eps**2) / (R**2 - eps**2)
    assert annulus_fourier_torsion(eps, R, data) == pytest.approx(exact, rel=1e-14)
    mesh = generate_mesh(DomainSpec(Disk((0.0, 0.0), R), circle_hole((0.0, 0.0), eps)), 0.1)
    errs = []
    for _ in range(3):
        space, K, M = assemble_all(mesh, 1)
        errs.append(abs(solve_zero_mean_torsion(space, K, M, data.trace((0, 0), eps)).T / exact - 1))
        mesh = refine_uniform(mesh)
    assert errs[-1] <= 0.01
    assert math.log2(errs[1] / errs[2]) >= 1.8


def test_annulus_solution_satisfies_its_boundary_conditions():
    eps, R = 0.2, 1.0
    data = FourierHoleData(3, (0.4, -0.3, 0.8, 0.2), (0.5, -0.7, 0.1))
    t = np.linspace(0, 2 * np.pi, 13)
    d = 1e-6

    def circle(r):
        return np.column_stack([r * np.cos(t), r * np.sin(t)])

    def radial_derivative(r):
        return (annulus_solution(circle(r + d), eps, R, data) - annulus_solution(circle(r - d), eps, R, data)) / (2 * d)

    assert np.allclose(radial_derivative(R), 0, atol=1e-7)
    # the domain normal on the hole points to the centre, so the datum is -∂_r W
    datum = data.trace((0, 0), eps)(circle(eps), None)
    assert np.allclose(-radial_derivative(eps), datum, atol=1e-6)


def test_annulus_zero_data_and_domain_error():
    assert annulus_fourier_torsion(0.1, 1.0, FourierHoleData(2, (), ())) == 0.0
    with pytest.raises(DomainError):
        annulus_fourier_torsion(1.0, 1.0, FourierHoleData(1, (0, 1), ()))


def test_annulus_mean_mode_limit():
    a0 = 1.3
    data = FourierHoleData(2, (a0,), ())

    def ratio(e):
        return annulus_fourier_torsion(e, 1.0, data) / (e**4 * abs(math.log(e)))

    # remove the 1/|log ε| correction using two small ε
    l1, l2 = abs(math.log(1e-6)), abs(math.log(1e-8))
    limit = (ratio(1e-6) * l1 - ratio(1e-8) * l2) / (l1 - l2)
    assert limit == pytest.approx(2 * math.pi * a0**2, rel=1e-3)
    assert annulus_torsion_leading(1e-3, data) == pytest.approx(0.5 * math.pi * 4 * a0**2 * 1e-12 * math.log(1e3))


def test_fourier_data_from_polynomial():
    data = FourierHoleData.from_polynomial({(2, 0): 1.0}, 2)  # cos² = 1/2 + cos(2t)/2
    assert data.a == pytest.approx((1.0, 0.0, 0.5), abs=1e-14)
    assert data.b == pytest.approx((0.0, 0.0), abs=1e-14)


def test_closed_form_monotone_in_outer_radius():
    data = FourierHoleData(2, (0.0, 0.7, -1.1), (0.4, 0.9))
    values = [annulus_fourier_torsion(0.1, R, data) for R in (0.5, 0.8, 1.0, 2.0, 5.0)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_exterior_ball_values():
    assert exterior_ball_torsion(3, 1, 4 * math.pi / 3).tau == pytest.approx(2 * math.pi / 3)
    assert exterior_ball_torsion(4, 2, 0.0).tau == 0.0
    with pytest.raises(ValueError):
        exterior_ball_torsion(3, 0, 1.0)
    with pytest.raises(DomainError):
        exterior_ball_torsion(2, 1, 1.0)


def test_radial_ode_closed_form():
    c = radial_exterior_ode_check(3, 1)
    assert c.u_at_1 == pytest.approx(-0.5, rel=1e-8)
    assert c.max_rel_deviation <= 1e-8
    assert c.tau(4 * math.pi / 3) == pytest.approx(exterior_ball_torsion(3, 1, 4 * math.pi / 3).tau, rel=1e-8)
    c = radial_exterior_ode_check(4, 2)
    assert c.u_at_1 == pytest.approx(-0.5, rel=1e-8)
    assert c.decay_exponent == pytest.approx(4.0)
    with pytest.raises(ValueError):
        radial_exterior_ode_check(3, 1, R_max=5.0)
