import numpy as np
import pytest

from monocolor.propagation import PropagationConfig, build_affinity, propagate
from monocolor.scribbler import ScribbleMap, Status

from synthetic import texture


def hints_at(shape, points):
    a = np.full(shape, np.nan)
    b = np.full(shape, np.nan)
    status = np.full(shape, Status.OCCLUDED, np.int8)
    for (r, c), (va, vb) in points.items():
        a[r, c], b[r, c] = va, vb
        status[r, c] = Status.VALID
    return ScribbleMap(a, b, status)


def test_rows_sum_to_one():
    w = build_affinity(texture((20, 30), 1))
    assert np.allclose(np.asarray(w.sum(axis=1)).ravel(), 1.0, atol=1e-9)
    assert w.diagonal().max() == 0


def test_constant_image_uniform_weights():
    w = build_affinity(np.full((5, 5), 0.4)).toarray()
    centre = 2 * 5 + 2
    row = w[centre][w[centre] > 0]
    assert row.size == 8 and np.allclose(row, 1 / 8)
    corner = w[0][w[0] > 0]
    assert corner.size == 3 and np.allclose(corner, 1 / 3)


def test_step_edge_weight_ratio():
    mono = np.full((10, 10), 0.2)
    mono[:, 5:] = 0.8
    w = build_affinity(mono).toarray()
    i = 4 * 10 + 4  # left of the step
    same, cross = w[i, i - 1], w[i, i + 1]
    assert cross / same < 0.01


def test_correlation_kernel_rows():
    w = build_affinity(texture((12, 12), 4), PropagationConfig(kernel="correlation"))
    assert np.allclose(np.asarray(w.sum(axis=1)).ravel(), 1.0)


@pytest.mark.parametrize("solver", ["direct", "cg"])
def test_single_hint_on_flat_image(solver):
    mono = np.full((24, 24), 0.5)
    res = propagate(mono, hints_at(mono.shape, {(5, 7): (0.3, 0.6)}),
                    PropagationConfig(solver=solver, solver_tolerance=1e-10))
    assert np.abs(res.a - 0.3).max() <= 1e-4
    assert np.abs(res.b - 0.6).max() <= 1e-4


def test_hint_preservation_bit_exact():
    rng = np.random.default_rng(0)
    mono = texture((30, 30), 5)
    pts = {(int(r), int(c)): tuple(rng.random(2)) for r, c in rng.integers(0, 30, (40, 2))}
    hints = hints_at(mono.shape, pts)
    res = propagate(mono, hints)
    m = hints.hinted
    assert np.array_equal(res.a[m], hints.a[m]) and np.array_equal(res.b[m], hints.b[m])
    assert (res.status[~m] == Status.PROPAGATED).all()


def test_fully_hinted_is_identity():
    mono = texture((8, 8), 1)
    rng = np.random.default_rng(1)
    pts = {(r, c): tuple(rng.random(2)) for r in range(8) for c in range(8)}
    hints = hints_at(mono.shape, pts)
    res = propagate(mono, hints)
    assert np.array_equal(res.a, hints.a)


def test_two_sides_of_edge_keep_their_colours():
    mono = np.where(np.arange(60)[None, :] < 30, 0.2, 0.7) * np.ones((40, 1))
    hints = hints_at(mono.shape, {(20, 5): (0.2, 0.2), (20, 55): (0.8, 0.8)})
    res = propagate(mono, hints)
    truth = np.where(np.arange(60)[None, :] < 30, 0.2, 0.8)
    blended = np.abs(res.a - truth) > 5 / 255
    assert blended.mean() <= 0.01


def test_textured_edge_with_dense_hints():
    rng = np.random.default_rng(0)
    left = np.arange(60)[None, :] < 30
    mono = np.where(left, 0.0, 0.5) + texture((40, 60), 6, lo=0.15, hi=0.3)
    truth = np.where(left, 0.2, 0.8) * np.ones((40, 1))
    pts = {(int(r), int(c)): (truth[r, c], truth[r, c])
           for r, c in zip(*np.nonzero(rng.random(mono.shape) < 0.3))}
    res = propagate(mono, hints_at(mono.shape, pts))
    assert (np.abs(res.a - truth) > 5 / 255).mean() <= 0.01


@pytest.mark.parametrize("seed", range(20))
def test_maximum_principle(seed):
    rng = np.random.default_rng(seed)
    mono = texture((20, 24), seed)
    pts = {(int(r), int(c)): tuple(rng.random(2)) for r, c in rng.integers(0, 20, (6, 2))}
    hints = hints_at(mono.shape, pts)
    res = propagate(mono, hints)
    va = hints.a[hints.hinted]
    tol = 1e-6
    assert va.min() - tol <= res.a.min() and res.a.max() <= va.max() + tol


def test_hint_order_does_not_matter():
    mono = texture((16, 16), 2)
    pts = {(2, 3): (0.1, 0.2), (12, 12): (0.9, 0.5), (8, 1): (0.4, 0.4)}
    r1 = propagate(mono, hints_at(mono.shape, pts))
    r2 = propagate(mono, hints_at(mono.shape, dict(reversed(list(pts.items())))))
    assert np.array_equal(r1.a, r2.a)


def test_needs_a_hint():
    with pytest.raises(ValueError):
        propagate(np.zeros((4, 4)), hints_at((4, 4), {}))


def test_config_validation():
    with pytest.raises(ValueError):
        PropagationConfig(kernel="laplace")
    with pytest.raises(ValueError):
        PropagationConfig(solver_tolerance=0)
