import itertools

import numpy as np
import pytest

from hptdyn.nfg import (
    NormalFormGame,
    SymmetryError,
    brute_force_expected_payoff,
    check_population_interchangeable,
    check_symmetric,
    from_bimatrix,
    nfg_to_hpt_asymmetric,
    nfg_to_hpt_symmetric,
)
from hptdyn.payoff import expected_payoff_asymmetric, expected_payoff_symmetric
from hptdyn.tables import CapacityError, SymmetricHpt, enumerate_rows_symmetric

PD_MATRIX = np.array([[3.0, 0.0], [5.0, 1.0]])


def symmetric_game_from_matrix(a):
    a = np.asarray(a, dtype=float)
    return from_bimatrix(a, a.T)


def random_symmetric_3player_game(rng, k=3):
    """Payoffs depend on own strategy and the co-player count vector only."""
    values = {}
    payoffs = {}
    for assignment in itertools.product(range(k), repeat=3):
        rewards = []
        for p in range(3):
            others = tuple(sorted(assignment[:p] + assignment[p + 1:]))
            key = (assignment[p], others)
            if key not in values:
                values[key] = float(rng.uniform(-3, 3))
            rewards.append(values[key])
        payoffs[assignment] = tuple(rewards)
    return NormalFormGame((k,) * 3, payoffs)


class TestNormalFormGame:
    def test_incomplete_tensor_rejected(self):
        with pytest.raises(ValueError):
            NormalFormGame((2, 2), {(0, 0): (1.0, 1.0)})

    def test_reward_lookup(self):
        game = from_bimatrix(PD_MATRIX, PD_MATRIX.T)
        assert game.reward((1, 0), 0) == 5.0
        assert game.reward((1, 0), 1) == 0.0


class TestSymmetryChecks:
    def test_pd_is_symmetric(self):
        check_symmetric(symmetric_game_from_matrix(PD_MATRIX))

    def test_asymmetric_game_witness(self):
        game = from_bimatrix(np.array([[3.0, 0.0], [0.0, 2.0]]),
                             np.array([[2.0, 0.0], [0.0, 3.0]]))
        with pytest.raises(SymmetryError) as excinfo:
            check_symmetric(game)
        assert excinfo.value.witness is not None
        assignment, perm, player, expected, got = excinfo.value.witness
        assert game.reward(assignment, perm[player]) == expected

    def test_population_check_passes_bimatrix(self):
        game = from_bimatrix(np.array([[3.0, 0.0], [0.0, 2.0]]),
                             np.array([[2.0, 0.0], [0.0, 3.0]]))
        check_population_interchangeable(game, 1, 1)

    def test_within_population_violation(self):
        # 2 vs 1: the two pop-1 players get different rewards in the same role
        payoffs = {}
        for assignment in itertools.product(range(2), repeat=3):
            payoffs[assignment] = (float(assignment[0]), 0.5, -1.0)
        game = NormalFormGame((2, 2, 2), payoffs)
        with pytest.raises(SymmetryError):
            check_population_interchangeable(game, 2, 1)


class TestConversionSymmetric:
    def test_pd_matches_fixture(self, pd_table):
        table = nfg_to_hpt_symmetric(symmetric_game_from_matrix(PD_MATRIX))
        assert np.array_equal(table.counts, pd_table.counts)
        np.testing.assert_array_equal(table.payoffs, pd_table.payoffs)

    def test_zero_game(self):
        game = symmetric_game_from_matrix(np.zeros((2, 2)))
        table = nfg_to_hpt_symmetric(game)
        assert np.all(table.payoffs == 0.0)

    def test_three_player_matches_tensor_contraction(self):
        rng = np.random.default_rng(31)
        game = random_symmetric_3player_game(rng)
        table = nfg_to_hpt_symmetric(game)
        x = np.array([0.2, 0.3, 0.5])
        f = expected_payoff_symmetric(table, x)
        # direct contraction on the tensor, independent of any table code
        for i in range(3):
            expected = 0.0
            for co in itertools.product(range(3), repeat=2):
                prob = x[co[0]] * x[co[1]]
                expected += prob * game.reward((i,) + co, 0)
            assert f[i] == pytest.approx(expected, abs=1e-12)

    def test_player_permutation_leaves_hpt_unchanged(self):
        rng = np.random.default_rng(37)
        game = random_symmetric_3player_game(rng)
        permuted = NormalFormGame(
            game.strategy_counts,
            {(a[2], a[0], a[1]): (r[2], r[0], r[1]) for a, r in game.payoffs.items()})
        t1 = nfg_to_hpt_symmetric(game)
        t2 = nfg_to_hpt_symmetric(permuted)
        np.testing.assert_array_equal(t1.payoffs, t2.payoffs)


class TestConversionAsymmetric:
    def test_bos_matches_fixture(self, bos_table):
        game = from_bimatrix(np.array([[3.0, 0.0], [0.0, 2.0]]),
                             np.array([[2.0, 0.0], [0.0, 3.0]]))
        table = nfg_to_hpt_asymmetric(game, 1, 1)
        assert np.array_equal(table.counts1, bos_table.counts1)
        assert np.array_equal(table.counts2, bos_table.counts2)
        np.testing.assert_array_equal(table.payoffs1, bos_table.payoffs1)
        np.testing.assert_array_equal(table.payoffs2, bos_table.payoffs2)

    def test_two_vs_one_shape(self, starcraft_table):
        rng = np.random.default_rng(41)
        role_values = {}
        payoffs = {}
        for assignment in itertools.product(range(2), repeat=3):
            rewards = []
            for p in range(3):
                if p < 2:
                    key = (0, assignment[p], tuple(sorted(assignment[:p] + assignment[p + 1:2])),
                           assignment[2])
                else:
                    key = (1, assignment[2], tuple(sorted(assignment[:2])))
                if key not in role_values:
                    role_values[key] = float(rng.uniform(-2, 2))
                rewards.append(role_values[key])
            payoffs[assignment] = tuple(rewards)
        game = NormalFormGame((2, 2, 2), payoffs)
        table = nfg_to_hpt_asymmetric(game, 2, 1)
        assert table.num_rows == 6
        assert np.array_equal(table.counts1, starcraft_table.counts1)
        assert np.array_equal(table.counts2, starcraft_table.counts2)
        # expected payoffs must agree with the enumeration oracle
        x = np.array([0.4, 0.6])
        y = np.array([0.7, 0.3])
        f1, f2 = expected_payoff_asymmetric(table, x, y)
        for i in range(2):
            assert f1[i] == pytest.approx(
                brute_force_expected_payoff(table, x, y, strategy=i, population=1), abs=1e-12)
            assert f2[i] == pytest.approx(
                brute_force_expected_payoff(table, x, y, strategy=i, population=2), abs=1e-12)

    def test_unequal_strategy_sets_padded(self):
        payoffs = {}
        for a in itertools.product(range(2), range(3)):
            payoffs[a] = (float(a[0] - a[1]), float(a[0] + a[1]))
        game = NormalFormGame((2, 3), payoffs)
        table = nfg_to_hpt_asymmetric(game, 1, 1)
        assert table.strategies == 3
        assert table.padded == ((2,), ())
        assert table.num_rows == 2 * 3
        from hptdyn.tables import validate_hpt
        report = validate_hpt(table)
        assert report.ok, str(report)
        assert any("padded" in w for w in report.warnings)


class TestBruteForceOracle:
    def test_pd_value(self, pd_table):
        assert brute_force_expected_payoff(pd_table, [0.5, 0.5], strategy=0) == pytest.approx(
            1.5, abs=1e-15)

    def test_pure_co_player_profile(self, pd_table):
        # co-player certainly defects: focal cooperator earns the (1,1) row value
        assert brute_force_expected_payoff(pd_table, [0.0, 1.0], strategy=0) == 0.0
        assert brute_force_expected_payoff(pd_table, [0.0, 1.0], strategy=1) == 1.0

    def test_wolfpack_hand_expansion(self, wolfpack_table):
        value = brute_force_expected_payoff(
            wolfpack_table, [0.6, 0.4], [0.3, 0.7], strategy=0, population=1)
        # two-term sum: 0.3 * 1.32 + 0.7 * 0.82
        assert value == pytest.approx(0.97, abs=1e-15)
        f1, _ = expected_payoff_asymmetric(wolfpack_table, [0.6, 0.4], [0.3, 0.7])
        assert value == pytest.approx(f1[0], abs=1e-12)

    def test_capacity_guard(self):
        counts = enumerate_rows_symmetric(16, 3)
        table = SymmetricHpt(16, 3, counts, np.zeros(counts.shape))
        with pytest.raises(CapacityError):
            brute_force_expected_payoff(table, [0.3, 0.3, 0.4], strategy=0)


class TestRoundTrip:
    def test_symmetric_round_trip(self):
        rng = np.random.default_rng(43)
        for _ in range(25):
            a = rng.uniform(-4, 4, size=(3, 3))
            table = nfg_to_hpt_symmetric(symmetric_game_from_matrix(a))
            x = rng.dirichlet(np.ones(3))
            np.testing.assert_allclose(expected_payoff_symmetric(table, x), a @ x, atol=1e-12)

    def test_asymmetric_round_trip(self):
        rng = np.random.default_rng(47)
        for _ in range(25):
            a = rng.uniform(-4, 4, size=(2, 2))
            b = rng.uniform(-4, 4, size=(2, 2))
            table = nfg_to_hpt_asymmetric(from_bimatrix(a, b), 1, 1)
            x = rng.dirichlet(np.ones(2))
            y = rng.dirichlet(np.ones(2))
            f1, f2 = expected_payoff_asymmetric(table, x, y)
            np.testing.assert_allclose(f1, a @ y, atol=1e-12)
            np.testing.assert_allclose(f2, b.T @ x, atol=1e-12)
