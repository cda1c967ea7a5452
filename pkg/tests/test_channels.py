import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nmcollide import channels as ch
from nmcollide.nmk import classify, dynamical_matrix, intermediate_map
from nmcollide.states import bell_state, concurrence

from _helpers import I2, X, Y, Z, random_density, random_pauli_weights

seeds = st.integers(0, 2**32 - 1)
PAULI_MATS = (I2, X, Y, Z)


def _kraus_flip(rho, op, F):
    # imperfect flip written out from its definition, no Pauli bookkeeping
    if op == "0":
        return rho
    err = (1 - F) / 2
    if op == "x":
        return F * X @ rho @ X + err * Y @ rho @ Y + err * Z @ rho @ Z
    return F * Z @ rho @ Z + err * Y @ rho @ Y + err * X @ rho @ X


def _two_collisions_brute(rho, table, F):
    out = np.zeros_like(rho)
    for a, m in enumerate(ch.COLLISION_OPS):
        for b, n in enumerate(ch.COLLISION_OPS):
            out = out + table.p[a, b] * _kraus_flip(_kraus_flip(rho, m, F), n, F)
    return out


def _bloch_matrix_brute(channel):
    return np.array(
        [[np.trace(s_i @ ch.apply_to_qubit(s_j, channel)).real / 2 for s_j in (X, Y, Z)] for s_i in (X, Y, Z)]
    )


def test_collision_table_at_eps_02():
    t = ch.collision_table(0.2)
    assert t["0", "0"] == pytest.approx(0.36)
    for key in [("0", "x"), ("0", "z"), ("x", "0"), ("z", "0")]:
        assert t[key] == pytest.approx(0.12)
    assert t["x", "x"] == pytest.approx(0.08) and t["z", "z"] == pytest.approx(0.08)
    assert t["x", "z"] == 0 and t["z", "x"] == 0


def test_collision_table_other_values():
    t = ch.collision_table(0.0)
    assert t["0", "0"] == 1 and t.p.sum() == 1
    t = ch.collision_table(0.25)
    assert t["0", "0"] == pytest.approx(0.25)
    assert t["0", "x"] == pytest.approx(0.125) and t["x", "x"] == pytest.approx(0.125)


@pytest.mark.parametrize("eps", [-0.01, 0.51])
def test_collision_table_domain(eps):
    with pytest.raises(ValueError):
        ch.collision_table(eps)


@given(st.floats(0, 0.5))
def test_collision_table_sums_to_one(eps):
    t = ch.collision_table(eps)
    assert abs(t.p.sum() - 1) <= 1e-12 and np.all(t.p >= 0)


def test_correlation_factor():
    assert ch.correlation_factor(ch.collision_table(0.2)) == pytest.approx(1)
    sym = ch.JointCollisionTable.from_dict({"00": 0.6, "xx": 0.1, "zz": 0.1, "xz": 0.1, "zx": 0.1})
    assert ch.correlation_factor(sym) == pytest.approx(0)
    assert ch.correlation_factor(ch.product_table(0.15, 0.15)) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError, match="Q undefined"):
        ch.correlation_factor(ch.collision_table(0.0))


def test_invalid_tables_rejected():
    with pytest.raises(ValueError):
        ch.JointCollisionTable(np.full((3, 3), 0.2))
    with pytest.raises(ValueError):
        ch.JointCollisionTable(np.eye(2))


def test_noisy_flip():
    assert ch.noisy_flip("X", 1).allclose([0, 1, 0, 0])
    assert ch.noisy_flip("X", 0.97).allclose([0, 0.97, 0.015, 0.015])
    assert ch.noisy_flip("Z", 0.9).allclose([0, 0.05, 0.05, 0.9])
    with pytest.raises(ValueError):
        ch.noisy_flip("Y", 0.9)
    with pytest.raises(ValueError):
        ch.noisy_flip("X", 1.1)


def test_channel_after_one():
    assert ch.channel_after_one(ch.collision_table(0.1), 1).allclose([0.8, 0.1, 0, 0.1])
    assert ch.channel_after_one(ch.collision_table(0.0), 0.5).allclose([1, 0, 0, 0])
    assert ch.channel_after_one(ch.collision_table(0.1), 0.97).allclose([0.8, 0.0985, 0.003, 0.0985])


def test_channel_after_two():
    assert ch.channel_after_two(ch.collision_table(0.1), 1).allclose([0.68, 0.16, 0, 0.16])
    assert ch.channel_after_two(ch.collision_table(0.0), 0.7).allclose([1, 0, 0, 0])
    extreme = ch.JointCollisionTable.from_dict({"xx": 0.5, "zz": 0.5})
    assert ch.channel_after_two(extreme, 1).allclose([1, 0, 0, 0])
    # after one collision the extreme table is an equal X/Z mixture
    assert ch.channel_after_one(extreme, 1).allclose([0, 0.5, 0, 0.5])


@given(seeds, st.floats(0, 0.5), st.floats(0, 1))
def test_two_collision_channel_matches_sequential_kraus(seed, eps, F):
    rho = random_density(np.random.default_rng(seed), 2)
    t = ch.collision_table(eps)
    got = ch.apply_to_qubit(rho, ch.channel_after_two(t, F))
    np.testing.assert_allclose(got, _two_collisions_brute(rho, t, F), atol=1e-12)


@given(seeds)
def test_two_collision_channel_arbitrary_table(seed):
    rng = np.random.default_rng(seed)
    t = ch.JointCollisionTable(rng.dirichlet(np.ones(9)).reshape(3, 3))
    F = rng.uniform()
    rho = random_density(rng, 2)
    got = ch.apply_to_qubit(rho, ch.channel_after_two(t, F))
    np.testing.assert_allclose(got, _two_collisions_brute(rho, t, F), atol=1e-12)


@given(seeds)
def test_produced_channels_are_valid(seed):
    rng = np.random.default_rng(seed)
    t = ch.JointCollisionTable(rng.dirichlet(np.ones(9)).reshape(3, 3))
    for c in (ch.channel_after_one(t, rng.uniform()), ch.channel_after_two(t, rng.uniform())):
        assert abs(c.q.sum() - 1) <= 1e-12 and np.all(c.q >= 0)


def test_apply_to_system_examples():
    s = bell_state(0, 1)
    np.testing.assert_allclose(ch.apply_to_system(s, ch.IDENTITY_CHANNEL).rho, s.rho)
    out = ch.apply_to_system(s, ch.channel_after_one(ch.collision_table(0.1), 1))
    assert concurrence(out) == pytest.approx(0.6, abs=1e-12)
    out = ch.apply_to_system(s, ch.channel_after_two(ch.collision_table(0.3), 1))
    assert concurrence(out) == pytest.approx(0.04, abs=1e-12)


@given(seeds)
def test_apply_to_system_leaves_ancilla_untouched(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(rng)
    c = ch.PauliProbabilities(random_pauli_weights(rng))
    out = ch.apply_to_system(rho, c)
    assert abs(np.trace(out.rho) - 1) < 1e-12
    np.testing.assert_allclose(out.ancilla.rho, ch.apply_to_system(rho, ch.IDENTITY_CHANNEL).ancilla.rho, atol=1e-12)


def test_bloch_map_examples():
    np.testing.assert_allclose(ch.bloch_map(ch.IDENTITY_CHANNEL).M, np.eye(3))
    eps = 0.15
    m = ch.bloch_map(ch.channel_after_one(ch.collision_table(eps), 1)).M
    np.testing.assert_allclose(np.diag(m), [1 - 2 * eps, 1 - 4 * eps, 1 - 2 * eps], atol=1e-15)
    np.testing.assert_allclose(ch.bloch_map(ch.PauliProbabilities([0, 1, 0, 0])).M, np.diag([1, -1, -1]))


@given(seeds)
def test_bloch_map_matches_matrix_action(seed):
    c = ch.PauliProbabilities(random_pauli_weights(np.random.default_rng(seed)))
    np.testing.assert_allclose(ch.bloch_map(c).M, _bloch_matrix_brute(c), atol=1e-14)
    assert np.linalg.norm(ch.bloch_map(c).t) <= 1e-12


@given(seeds)
def test_bloch_map_is_homomorphism(seed):
    rng = np.random.default_rng(seed)
    c1 = ch.PauliProbabilities(random_pauli_weights(rng))
    c2 = ch.PauliProbabilities(random_pauli_weights(rng))
    lhs = ch.bloch_map(ch.convolve(c1, c2)).M
    rhs = ch.compose(ch.bloch_map(c2), ch.bloch_map(c1)).M
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_compose_examples():
    b = ch.BlochAffineMap(np.diag([0.2, 0.5, 0.7]), [0.1, 0, 0])
    got = ch.compose(ch.BlochAffineMap.identity(), b)
    np.testing.assert_allclose(got.M, b.M)
    np.testing.assert_allclose(got.t, b.t)
    got = ch.compose(ch.BlochAffineMap(np.diag([2, 3, 4])), ch.BlochAffineMap(np.diag([0.5, 0.1, 1])))
    np.testing.assert_allclose(got.M, np.diag([1, 0.3, 4]))


def test_compose_order_and_shift():
    first = ch.BlochAffineMap(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]]), [0.1, 0.2, 0.3])
    second = ch.BlochAffineMap(np.diag([1, 2, 3]), [1, 1, 1])
    r = np.array([0.3, -0.4, 0.5])
    np.testing.assert_allclose(ch.compose(second, first)(r), second(first(r)))


def test_uncorrelated_two_step_is_square_of_one_step():
    b1 = ch.bloch_map(ch.channel_after_one(ch.collision_table(0.1), 1))
    b2 = ch.bloch_map(ch.channel_after_two(ch.product_table(0.1, 0.1), 1))
    np.testing.assert_allclose(ch.compose(b1, b1).M, b2.M, atol=1e-15)


def test_invert_examples():
    inv = ch.invert(ch.BlochAffineMap(np.diag([0.8, 0.6, 0.8])))
    np.testing.assert_allclose(np.diag(inv.M), [1.25, 1 / 0.6, 1.25])
    assert inv.singular_directions == ()

    b = ch.bloch_map(ch.channel_after_one(ch.collision_table(0.25), 1))
    inv = ch.invert(b)
    assert inv.M[1, 1] == 0
    assert inv.singular_axes() == ["y"]

    inv = ch.invert(ch.BlochAffineMap.identity())
    np.testing.assert_allclose(inv.M, np.eye(3))
    assert inv.singular_directions == ()


@given(seeds)
def test_invert_general_matrix(seed):
    m = np.random.default_rng(seed).normal(size=(3, 3))
    inv = ch.invert(ch.BlochAffineMap(m))
    np.testing.assert_allclose(inv.M @ m, np.eye(3), atol=1e-8 * np.linalg.cond(m))


def test_invert_general_singular_matrix_flags_direction():
    m = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.5]])
    inv = ch.invert(ch.BlochAffineMap(m))
    assert len(inv.singular_directions) == 1
    np.testing.assert_allclose(inv.M, np.linalg.pinv(m), atol=1e-12)


def test_repeat_uncorrelated():
    c = ch.channel_after_one(ch.collision_table(0.1), 1)
    assert ch.repeat_uncorrelated(c, 1).allclose(c.q)
    # XZ and ZX both land on Y: 2 * 0.1 * 0.1
    assert ch.repeat_uncorrelated(c, 2).allclose([0.66, 0.16, 0.02, 0.16])
    assert ch.repeat_uncorrelated(ch.PauliProbabilities([0, 1, 0, 0]), 2).allclose([1, 0, 0, 0])
    assert ch.repeat_uncorrelated(c, 0).allclose([1, 0, 0, 0])
    two = ch.channel_after_two(ch.product_table(0.1, 0.1), 1)
    assert ch.repeat_uncorrelated(c, 2).allclose(two.q)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.24])
def test_intermediate_map_contracts_below_quarter(eps):
    t = ch.collision_table(eps)
    m = intermediate_map(ch.bloch_map(ch.channel_after_two(t, 1)), ch.bloch_map(ch.channel_after_one(t, 1))).M
    assert np.all(np.abs(np.diag(m)) <= 1)


@pytest.mark.parametrize("eps", [0.26, 0.3, 0.4, 0.45])
def test_intermediate_map_expands_above_quarter(eps):
    t = ch.collision_table(eps)
    m = intermediate_map(ch.bloch_map(ch.channel_after_two(t, 1)), ch.bloch_map(ch.channel_after_one(t, 1))).M
    assert m[0, 0] > 1 and m[2, 2] > 1


def test_intermediate_map_unit_at_quarter():
    t = ch.collision_table(0.25)
    m = intermediate_map(ch.bloch_map(ch.channel_after_two(t, 1)), ch.bloch_map(ch.channel_after_one(t, 1))).M
    assert m[0, 0] == pytest.approx(1, abs=1e-15) and m[2, 2] == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("eps", np.round(np.arange(0.0, 0.451, 0.05), 12))
def test_uncorrelated_control_is_cp(eps):
    t = ch.product_table(eps, eps)
    lam21 = intermediate_map(ch.bloch_map(ch.channel_after_two(t, 1)), ch.bloch_map(ch.channel_after_one(t, 1)))
    assert classify(dynamical_matrix(lam21)).lambda_min >= -1e-10
