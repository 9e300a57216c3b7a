import numpy as np
import pytest

from treepsdo.boundary import build_partition
from treepsdo.spectral import total_mass
from treepsdo.transform import exponentials, fh_forward, fh_inverse, plancherel_pairing
from treepsdo.tree import build_ball

from conftest import delta, geometry, rand_f


def test_delta_root_is_constant_one(small):
    ball, part, grid = small
    F = fh_forward(delta(ball.n_vertices, 0), part, grid)
    assert F.shape == (part.n_cylinders, grid.M)
    np.testing.assert_array_equal(F, 1)


def test_delta_vertex(small):
    ball, part, grid = small
    q = ball.q
    x = 9
    F = fh_forward(delta(ball.n_vertices, x), part, grid)
    h = part.heights[x][:, None]
    expected = np.exp((0.5 + 1j * grid.nodes[None, :]) * h * np.log(q))
    np.testing.assert_allclose(F, expected, rtol=1e-14)


def test_direct_sum_oracle(small, rng):
    ball, part, grid = small
    f = rand_f(rng, 1, ball.n_vertices)[0]
    ln_q = np.log(ball.q)
    ref = np.zeros((part.n_cylinders, grid.M), dtype=complex)
    for y in range(ball.n_vertices):
        ref += f[y] * np.exp((0.5 + 1j * grid.nodes) * part.heights[y][:, None] * ln_q)
    np.testing.assert_allclose(fh_forward(f, part, grid), ref, rtol=1e-12, atol=1e-12)


def test_linearity(small, rng):
    ball, part, grid = small
    f, g = rand_f(rng, 2, ball.n_vertices)
    a, b = 0.3 - 1.2j, 2.0 + 0.5j
    lhs = fh_forward(a * f + b * g, part, grid)
    rhs = a * fh_forward(f, part, grid) + b * fh_forward(g, part, grid)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_inverse_of_ones_is_delta_root():
    ball, part, grid = geometry(2, 4)
    f = fh_inverse(np.ones((part.n_cylinders, grid.M)), part, grid)
    np.testing.assert_allclose(f, delta(ball.n_vertices, 0), atol=1e-10)


@pytest.mark.parametrize("q,R", [(2, 4), (3, 3), (3, 4)])
def test_roundtrip(q, R, rng):
    ball, part, grid = geometry(q, R)
    fs = rand_f(rng, 5, ball.n_vertices)
    back = fh_inverse(fh_forward(fs, part, grid), part, grid)
    err = np.abs(back - fs).max(axis=1) / np.abs(fs).max(axis=1)
    assert err.max() <= 1e-8


def test_zero_maps_to_zero(small):
    ball, part, grid = small
    np.testing.assert_array_equal(fh_forward(np.zeros(ball.n_vertices), part, grid), 0)
    np.testing.assert_array_equal(fh_inverse(np.zeros((part.n_cylinders, grid.M)), part, grid), 0)


def test_plancherel(rng):
    ball, part, grid = geometry(2, 4)
    f, g = rand_f(rng, 2, ball.n_vertices)
    lhs = plancherel_pairing(fh_forward(f, part, grid), fh_forward(g, part, grid), part, grid)
    assert abs(lhs - np.vdot(g, f)) <= 1e-8 * np.linalg.norm(f) * np.linalg.norm(g)
    one = np.ones((part.n_cylinders, grid.M))
    assert plancherel_pairing(one, one, part, grid) == pytest.approx(total_mass(grid), abs=1e-15)
    assert abs(plancherel_pairing(one, one, part, grid) - 1) <= 1e-10
    assert plancherel_pairing(one, np.zeros_like(one), part, grid) == 0
    F = fh_forward(f, part, grid)
    norm2 = plancherel_pairing(F, F, part, grid)
    assert abs(norm2.imag) <= 1e-12 * norm2.real


def test_batches_match_single(small, rng):
    ball, part, grid = small
    fs = rand_f(rng, 3, ball.n_vertices)
    F = fh_forward(fs, part, grid)
    for k in range(3):
        np.testing.assert_allclose(F[k], fh_forward(fs[k], part, grid), rtol=1e-14)


def test_shape_errors(small):
    ball, part, grid = small
    with pytest.raises(ValueError):
        fh_forward(np.zeros(ball.n_vertices + 1), part, grid)
    with pytest.raises(ValueError):
        fh_inverse(np.zeros((part.n_cylinders, grid.M + 1)), part, grid)
    with pytest.raises(ValueError):
        plancherel_pairing(np.zeros((2, 3)), np.zeros((2, 3)), part, grid)


def test_truncated_partition_rejected():
    from treepsdo.boundary import TruncationError
    from treepsdo.spectral import build_grid
    ball = build_ball(2, 3)
    part = build_partition(ball, 2)
    with pytest.raises(TruncationError):
        fh_forward(np.zeros(ball.n_vertices), part, build_grid(2, 16))


def test_exponential_tables(small):
    ball, part, grid = small
    E = exponentials(part, grid)
    assert exponentials(part, grid) is E
    power = np.broadcast_to(float(ball.q) ** part.heights[:, :, None], E.shape)
    np.testing.assert_allclose(E.plus * E.minus, power, rtol=1e-13)
    np.testing.assert_allclose(np.abs(E.plus), np.broadcast_to(E.modulus[:, :, None], E.shape),
                               rtol=1e-13)
