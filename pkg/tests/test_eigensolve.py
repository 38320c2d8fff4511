import math

import numpy as np
import pytest
import scipy.sparse as sp

from neumann_holes.assembly import assemble_all
from neumann_holes.eigensolve import EigenPair, align_sign, check_simple, richardson, solve_lowest
from neumann_holes.errors import AmbiguousSign
from neumann_holes.geometry import DomainSpec, circle_hole, generate_mesh, rectangle, refine_uniform

L4 = 2**0.25


@pytest.fixture(scope="module")
def square_system():
    _, K, M = assemble_all(generate_mesh(DomainSpec(rectangle(0, 1, 0, 1)), 0.05), 1)
    return K, M


@pytest.fixture(scope="module")
def rect_family():
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, L4)), 0.1)
    out = []
    for _ in range(3):
        _, K, M = assemble_all(mesh, 1)
        out.append(solve_lowest(K, M, 6))
        mesh = refine_uniform(mesh)
    return out


def test_constant_mode_is_exact(square_system):
    K, M = square_system
    spec = solve_lowest(K, M, 4)
    assert abs(spec[0].lam - 1.0) <= 1e-10
    v = spec[0].vector
    ones = np.ones_like(v)
    cos = abs(v @ (M @ ones)) / math.sqrt((v @ (M @ v)) * (ones @ (M @ ones)))
    assert cos == pytest.approx(1.0, abs=1e-6)


def test_pairs_are_normalized_and_orthogonal(square_system):
    K, M = square_system
    spec = solve_lowest(K, M, 6, 1e-9)
    X = np.column_stack([p.vector for p in spec.pairs])
    G = X.T @ (M @ X)
    assert np.allclose(np.diag(G), 1.0, atol=1e-12)
    assert np.max(np.abs(G - np.diag(np.diag(G)))) <= 1e-8
    assert all(p.residual <= 1e-9 for p in spec.pairs)
    assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_rectangle_first_eigenvalue_by_richardson(rect_family):
    vals = [s.eigenvalues[1] for s in rect_family]
    ext, err, observed = richardson(vals, 2)
    exact = 1 + math.pi**2 / math.sqrt(2)
    assert abs(ext - exact) <= 1e-4 * exact
    assert abs(vals[-1] - exact) > abs(ext - exact)
    assert observed == pytest.approx(2, abs=0.2)


def test_eigenvalues_decrease_under_refinement(rect_family):
    for coarse, fine in zip(rect_family, rect_family[1:]):
        assert np.all(fine.eigenvalues <= coarse.eigenvalues + 1e-10)


def test_rayleigh_quotient_consistency(rect_family):
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, L4)), 0.1)
    _, K, M = assemble_all(mesh, 1)
    spec = solve_lowest(K, M, 6, 1e-9)
    A = K + M
    for p in spec.pairs:
        assert abs(p.lam - p.vector @ (A @ p.vector)) <= 10 * 1e-9 * p.lam
        assert p.mu == pytest.approx(p.lam - 1)


def test_dense_and_lanczos_agree():
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, L4), circle_hole((0.4, 0.6), 0.08)), 0.08)
    for order in (1, 2):
        _, K, M = assemble_all(mesh, order)
        a = solve_lowest(K, M, 8, method="lanczos").eigenvalues
        b = solve_lowest(K, M, 8, method="dense").eigenvalues
        assert np.allclose(a, b, rtol=1e-8, atol=0)


def test_reproducible(square_system):
    K, M = square_system
    a = solve_lowest(K, M, 5)
    b = solve_lowest(K, M, 5)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert all(np.array_equal(p.vector, q.vector) for p, q in zip(a.pairs, b.pairs))


def test_m_too_large():
    M = sp.identity(8, format="csr")
    with pytest.raises(ValueError):
        solve_lowest(M * 0, M, 3)


def test_align_sign():
    M = sp.diags([1.0, 2.0, 3.0]).tocsr()
    pair = EigenPair(2.0, np.array([1.0, 0.0, 0.0]), 0.0)
    assert align_sign(pair, np.array([1.0, 1.0, 0.0]), M) is pair
    flipped = align_sign(pair, np.array([-1.0, 1.0, 0.0]), M)
    assert np.array_equal(flipped.vector, -pair.vector)
    assert align_sign(flipped, np.array([-1.0, 1.0, 0.0]), M) is flipped
    with pytest.raises(AmbiguousSign):
        align_sign(pair, np.array([0.0, 1.0, 1.0]), M)


def test_check_simple_on_rectangle_and_square(rect_family, square_system):
    assert check_simple(rect_family[-1], 1, 1e-3)
    K, M = square_system
    square = solve_lowest(K, M, 5)
    # π² is double on the unit square; the discrete pair splits by much less than 1e-3 λ
    assert not check_simple(square, 1, 1e-3)
    with pytest.raises(ValueError):
        check_simple(square, 0)


def test_richardson_exact_power_law():
    h = np.array([1.0, 0.5, 0.25])
    ext, err, observed = richardson(3.0 + 0.7 * h**2, 2)
    assert ext == pytest.approx(3.0, abs=1e-14)
    assert err <= 1e-14
    assert observed == pytest.approx(2.0, abs=1e-12)
