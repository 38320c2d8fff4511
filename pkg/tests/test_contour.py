import numpy as np

from neumann_holes.contour import contour_function, marching_squares


def circle_field(p):
    return np.hypot(p[:, 0], p[:, 1]) - 0.6


def test_circle_is_one_closed_polyline():
    lines = contour_function(circle_field, (-1, 1, -1, 1), (81, 81))
    assert len(lines) == 1
    line = lines[0]
    assert np.allclose(line[0], line[-1])
    assert np.max(np.abs(np.hypot(*line.T) - 0.6)) < 1e-3


def test_linear_field_is_exact():
    x = np.linspace(0, 1, 11)
    y = np.linspace(0, 2, 21)
    F = (x[:, None] - 0.43) + 0 * y[None, :]
    (line,) = marching_squares(x, y, F)
    assert np.allclose(line[:, 0], 0.43, atol=1e-14)
    assert line[:, 1].min() == 0 and line[:, 1].max() == 2


def test_no_crossing_gives_no_lines():
    assert marching_squares(np.arange(3.0), np.arange(3.0), np.ones((3, 3))) == []


def test_saddle_cells_do_not_cross():
    # the nodal set of x y is two crossing lines; the saddle rule keeps them as four arms
    lines = contour_function(lambda p: p[:, 0] * p[:, 1] + 1e-3, (-1, 1, -1, 1), (41, 41))
    assert len(lines) == 2
    for line in lines:
        assert np.all(line[:, 0] * line[:, 1] < 0.05)


def test_mask_cuts_lines():
    lines = contour_function(lambda p: p[:, 1] - 0.1, (-1, 1, -1, 1), (41, 41),
                             mask=lambda p: np.abs(p[:, 0]) > 0.3)
    assert len(lines) == 2
    assert all(np.all(np.abs(line[:, 0]) > 0.3) for line in lines)


def test_deterministic_order():
    a = contour_function(circle_field, (-1, 1, -1, 1), (61, 61))
    b = contour_function(circle_field, (-1, 1, -1, 1), (61, 61))
    assert all(np.array_equal(u, v) for u, v in zip(a, b))
