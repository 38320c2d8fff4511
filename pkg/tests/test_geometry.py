import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neumann_holes.errors import GeometryError, MeshError
from neumann_holes.geometry import (Disk, DomainSpec, HoleSpec, Mesh, Polygon, Tag, circle_hole,
                                    generate_mesh, mesh_problems, mesh_quality, mesh_to_string, read_mesh,
                                    rectangle, refine_uniform, triangle_angles)

L4 = 2**0.25


def test_unit_square_without_hole():
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, 1)), 0.25)
    assert mesh.n_triangles >= 32
    assert mesh_problems(mesh) == []
    assert mesh.area() == pytest.approx(1.0, rel=1e-12)
    assert not mesh.has_hole


def test_circle_hole_is_resolved():
    eps = 0.05
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, L4), circle_hole((0.3, 0.3), eps)), 0.02)
    assert mesh_problems(mesh) == []
    hole = mesh.tagged_edges(Tag.HOLE)
    assert len(hole) >= 32
    pts = mesh.vertices[np.unique(hole)]
    assert np.allclose(np.hypot(pts[:, 0] - 0.3, pts[:, 1] - 0.3), eps, atol=1e-14)


def test_annulus_perimeter_converges():
    spec = DomainSpec(Disk((0.0, 0.0), 1.0), circle_hole((0.0, 0.0), 0.1))
    mesh = generate_mesh(spec, 0.1)
    errs = []
    for _ in range(3):
        errs.append(abs(mesh.boundary_length(Tag.HOLE) - 2 * math.pi * 0.1))
        mesh = refine_uniform(mesh)
    assert errs[-1] <= 0.01 * 2 * math.pi * 0.1
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(4, rel=0.05)


def test_refine_two_triangle_square():
    mesh = Mesh(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float), np.array([[0, 1, 2], [0, 2, 3]]),
                np.array([[0, 1], [1, 2], [2, 3], [3, 0]]), np.zeros(4, dtype=np.int8), 1.0)
    fine = refine_uniform(mesh)
    assert fine.n_triangles == 8 and fine.n_vertices == 9
    assert fine.h_target == 0.5
    assert fine.area() == pytest.approx(1.0)


def test_refine_preserves_tags():
    spec = DomainSpec(rectangle(0, 1, 0, 1), circle_hole((0.5, 0.5), 0.1))
    mesh = generate_mesh(spec, 0.1)
    fine = refine_uniform(mesh)
    for tag in (Tag.OUTER, Tag.HOLE):
        assert len(fine.tagged_edges(tag)) == 2 * len(mesh.tagged_edges(tag))
    pts = fine.vertices[np.unique(fine.tagged_edges(Tag.HOLE))]
    assert np.allclose(np.hypot(*(pts - 0.5).T), 0.1, atol=1e-14)
    assert mesh_problems(fine) == []


def test_triangle_angles():
    eq = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert triangle_angles(eq, np.array([[0, 1, 2]])).min() == pytest.approx(60.0)
    right = np.array([[0, 0], [1, 0], [0, 1]], float)
    assert triangle_angles(right, np.array([[0, 1, 2]])).min() == pytest.approx(45.0)


def test_square_quality():
    q = mesh_quality(generate_mesh(DomainSpec(rectangle(0, 1, 0, 1)), 0.1))
    assert q.min_angle >= 20.0


def test_hole_containment_is_enforced():
    with pytest.raises(GeometryError):
        generate_mesh(DomainSpec(rectangle(0, 1, 0, 1), circle_hole((0.05, 0.5), 0.04)), 0.1)


def test_h_must_resolve_the_domain():
    with pytest.raises(GeometryError):
        generate_mesh(DomainSpec(rectangle(0, 1, 0, 1)), 0.5)


def test_polygon_hole_must_be_counterclockwise():
    bad = HoleSpec(Polygon(((0, 1), (1, 0), (0, -1), (-1, 0))), (0.5, 0.5), 0.05)
    with pytest.raises(GeometryError):
        DomainSpec(rectangle(0, 1, 0, 1), bad).validate()


def test_polygon_hole_mesh_area():
    square = Polygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))
    spec = DomainSpec(rectangle(0, 1, 0, 1), HoleSpec(square, (0.5, 0.5), 0.05))
    mesh = generate_mesh(spec, 0.1)
    assert mesh.area() == pytest.approx(1 - 0.01, rel=1e-12)


def test_domain_normal_points_into_hole():
    hole = circle_hole((0.5, 0.5), 0.1)
    p = np.array([[0.6, 0.5], [0.5, 0.4]])
    assert np.allclose(hole.domain_normal(p), [[-1, 0], [0, 1]])


def test_mesh_roundtrip():
    mesh = generate_mesh(DomainSpec(rectangle(0, 1, 0, 1), circle_hole((0.5, 0.5), 0.1)), 0.2)
    text = mesh_to_string(mesh)
    back = read_mesh(text)
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert np.array_equal(back.boundary_tags, mesh.boundary_tags)
    assert back.spec == mesh.spec
    assert mesh_to_string(back) == text


def test_generation_is_deterministic():
    spec = DomainSpec(rectangle(0, 1, 0, L4), circle_hole((0.4, 0.6), 0.05))
    assert mesh_to_string(generate_mesh(spec, 0.1, seed=3)) == mesh_to_string(generate_mesh(spec, 0.1, seed=3))


def test_filled_mesh_regions():
    spec = DomainSpec(rectangle(0, 1, 0, 1), circle_hole((0.5, 0.5), 0.1))
    mesh = generate_mesh(spec, 0.1, fill_hole=True)
    outer, inner = mesh.submesh(0), mesh.submesh(1)
    assert outer.area() + inner.area() == pytest.approx(1.0, rel=1e-12)
    assert outer.has_hole and mesh_problems(outer) == []
    with pytest.raises(MeshError):
        outer.submesh(0)


@settings(max_examples=8, deadline=None)
@given(cx=st.floats(0.3, 0.7), cy=st.floats(0.3, 0.7), eps=st.floats(0.02, 0.08))
def test_random_holes_give_valid_meshes(cx, cy, eps):
    spec = DomainSpec(rectangle(0, 1, 0, 1), circle_hole((cx, cy), eps))
    mesh = generate_mesh(spec, 0.1)
    assert mesh_problems(mesh) == []
    assert mesh.area() == pytest.approx(1 - math.pi * eps**2, rel=2e-2)
