import math

import numpy as np
import pytest

from stepwalk import (
    CheckpointOutOfRange,
    DiscreteFinite,
    Gaussian,
    GradualMemorySpec,
    InvalidMemoryCutoff,
    Rademacher,
    UniformInterval,
    WalkParams,
    WalkState,
    advance,
    conditional_mean,
    decade_checkpoints,
    derive_constants,
    geometric_checkpoints,
    simulate_gradual,
    simulate_gradual_coupled,
    simulate_trajectory,
    write_trajectory_csv,
)
from stepwalk.engine import support_atoms
from stepwalk.rng import RandomStream

PSET_A = WalkParams(0.8, 0.6, Rademacher(0.7))


def run_reference(params, horizon, seed):
    """Pure-Python walk; returns the full step history."""
    rng = RandomStream(seed)
    state = WalkState(params, rng)
    for _ in range(horizon - 1):
        advance(state, params, rng)
    return state


class TestKernelVsReference:
    @pytest.mark.parametrize("params,seed", [
        (PSET_A, 123),
        (WalkParams(1.0, 0.5, Rademacher(0.7)), 7),
        (WalkParams(0.0, 0.9, Rademacher(0.3)), 11),
        (WalkParams(0.3, 0.8, UniformInterval(-1.0, 1.0)), 17),
        (WalkParams(0.6, 0.4, Gaussian(0.0, 1.0)), 19),
        (WalkParams(0.7, 0.5, DiscreteFinite((1.0, 3.0), (0.5, 0.5))), 23),
    ])
    def test_pathwise_identical(self, params, seed):
        # the compiled kernel and the reference consume the same stream and
        # must produce bit-identical prefix sums at every step
        horizon = 700
        state = run_reference(params, horizon, seed)
        traj = simulate_trajectory(params, horizon,
                                   checkpoints=range(1, horizon + 1), seed=seed)
        ref_T = np.cumsum(state.history)
        ref_S = np.cumsum(np.square(state.history))
        assert np.array_equal(ref_T, traj.positions)
        assert np.array_equal(ref_S, traj.sum_sq)

    def test_first_step_is_innovation(self):
        # X_1 = xi_1: Rademacher(1.0) forces X_1 = +1 even with p = 0
        traj = simulate_trajectory(WalkParams(0.0, 1.0, Rademacher(1.0)), 1, seed=5)
        assert traj.positions[0] == 1.0


class TestWalkStateInvariants:
    def test_running_sums_match_history(self):
        state = run_reference(PSET_A, 500, 42)
        assert state.running_sum == pytest.approx(sum(state.history))
        assert state.running_sum_sq == pytest.approx(sum(x * x for x in state.history))

    def test_count_table_total(self):
        state = run_reference(PSET_A, 500, 42)
        assert sum(state.counts) == state.n == 500

    def test_branch_frequencies(self):
        # copy/flip/innovate frequencies match p*alpha, (1-p)*alpha, 1-alpha
        params = WalkParams(0.8, 0.6, Rademacher(0.7))
        state = run_reference(params, 40000, 3)
        total = sum(state.branch_tally)
        assert total == state.n - 1
        for observed, expected in zip(state.branch_tally, (0.48, 0.12, 0.4)):
            frac = observed / total
            assert abs(frac - expected) < 4 * math.sqrt(expected * (1 - expected) / total)

    def test_alpha_zero_always_innovates(self):
        state = run_reference(WalkParams(0.8, 0.0, Rademacher(0.7)), 1000, 1)
        assert state.branch_tally[0] == state.branch_tally[1] == 0
        assert state.branch_tally[2] == 999

    def test_p_one_never_flips(self):
        state = run_reference(WalkParams(1.0, 0.7, Rademacher(0.7)), 5000, 2)
        assert state.branch_tally[1] == 0

    def test_conditional_mean_formula(self):
        # E[X_{n+1} | F_n] = a T_n/n + (1-alpha) mu1
        consts = derive_constants(PSET_A)
        state = run_reference(PSET_A, 100, 9)
        expected = 0.36 * state.running_sum / 100 + 0.4 * 0.4
        assert conditional_mean(state, consts) == pytest.approx(expected)

    def test_conditional_mean_monte_carlo(self):
        # empirical mean of X_{n+1} over many continuations of one frozen
        # history matches the formula within 5 sigma
        consts = derive_constants(PSET_A)
        state = run_reference(PSET_A, 50, 77)
        target = conditional_mean(state, consts)
        rng = RandomStream(1234)
        draws = []
        for _ in range(40000):
            frozen = run_reference(PSET_A, 50, 77)
            draws.append(advance(frozen, PSET_A, rng))
        mean = float(np.mean(draws))
        stderr = float(np.std(draws, ddof=1) / math.sqrt(len(draws)))
        assert abs(mean - target) <= 5 * stderr


class TestSupportAtoms:
    def test_rademacher_already_closed(self):
        assert support_atoms(Rademacher(0.7)) == (1.0, -1.0)

    def test_asymmetric_atoms_gain_negations(self):
        assert support_atoms(DiscreteFinite((1.0, 3.0), (0.5, 0.5))) == (1.0, 3.0, -1.0, -3.0)

    def test_flip_stays_in_support(self):
        # a p < 1 walk on atoms {1, 3} must visit negative values and the
        # count-table backend must track them exactly
        params = WalkParams(0.2, 0.9, DiscreteFinite((1.0, 3.0), (0.5, 0.5)))
        state = run_reference(params, 2000, 31)
        assert set(state.history) <= {1.0, 3.0, -1.0, -3.0}
        assert min(state.history) < 0


class TestCheckpoints:
    def test_geometric_strictly_increasing_ends_at_horizon(self):
        cps = geometric_checkpoints(100000)
        assert np.all(np.diff(cps) > 0)
        assert cps[-1] == 100000
        assert cps[0] == 1

    def test_decade(self):
        assert decade_checkpoints(10**4).tolist() == [1, 10, 100, 1000, 10000]
        assert decade_checkpoints(5000).tolist() == [1, 10, 100, 1000, 5000]

    def test_out_of_range_rejected(self):
        with pytest.raises(CheckpointOutOfRange):
            simulate_trajectory(PSET_A, 100, checkpoints=[50, 200], seed=1)
        with pytest.raises(CheckpointOutOfRange):
            simulate_trajectory(PSET_A, 100, checkpoints=[0], seed=1)

    def test_horizon_appended(self):
        traj = simulate_trajectory(PSET_A, 100, checkpoints=[10, 50], seed=1)
        assert traj.checkpoints.tolist() == [10, 50, 100]
        assert traj.horizon == 100

    def test_position_at(self):
        traj = simulate_trajectory(PSET_A, 100, checkpoints=[10, 50], seed=1)
        assert traj.position_at(50) == traj.positions[1]
        with pytest.raises(CheckpointOutOfRange):
            traj.position_at(51)


class TestDeterminism:
    def test_same_seed_same_trajectory(self):
        t1 = simulate_trajectory(PSET_A, 5000, seed=99)
        t2 = simulate_trajectory(PSET_A, 5000, seed=99)
        assert np.array_equal(t1.positions, t2.positions)

    def test_checkpoint_subsets_agree(self):
        # recording fewer checkpoints must not change the path
        full = simulate_trajectory(PSET_A, 5000, checkpoints=range(1, 5001), seed=4)
        sparse = simulate_trajectory(PSET_A, 5000, checkpoints=[1000, 5000], seed=4)
        assert sparse.position_at(1000) == full.position_at(1000)
        assert sparse.position_at(5000) == full.position_at(5000)

    def test_different_seeds_differ(self):
        t1 = simulate_trajectory(PSET_A, 1000, seed=1)
        t2 = simulate_trajectory(PSET_A, 1000, seed=2)
        assert not np.array_equal(t1.positions, t2.positions)


class TestRademacherBounds:
    def test_position_bounded_by_n(self):
        traj = simulate_trajectory(PSET_A, 10000, checkpoints=range(1, 10001), seed=8)
        n = np.arange(1, 10001)
        assert np.all(np.abs(traj.positions) <= n)
        assert np.array_equal(traj.sum_sq, n.astype(float))

    def test_constant_walk(self):
        # Rademacher(1.0), p=1: every step is +1
        traj = simulate_trajectory(WalkParams(1.0, 0.5, Rademacher(1.0)), 1000,
                                   checkpoints=range(1, 1001), seed=6)
        assert np.array_equal(traj.positions, np.arange(1, 1001, dtype=float))


class TestGradualMemory:
    def test_spec_validation(self):
        with pytest.raises(InvalidMemoryCutoff):
            GradualMemorySpec(n=10, m_n=10)
        with pytest.raises(InvalidMemoryCutoff):
            GradualMemorySpec(n=10, m_n=0)
        GradualMemorySpec(n=10, m_n=9, theta_hint=0.9)

    def test_phase_one_matches_standard_walk(self):
        # the first m steps follow the standard recursion bit-for-bit
        m, n = 500, 1000
        S, T_m = simulate_gradual(PSET_A, GradualMemorySpec(n=n, m_n=m), seed=13)
        std = simulate_trajectory(PSET_A, m, checkpoints=[m], seed=13)
        assert T_m == std.positions[-1]

    def test_coupled_extension_matches_standard_walk(self):
        S, T_m, T_ext = simulate_gradual_coupled(PSET_A, 1000, 500, 2000, seed=13)
        std = simulate_trajectory(PSET_A, 2000, checkpoints=[500, 2000], seed=13)
        assert T_m == std.position_at(500)
        assert T_ext == std.position_at(2000)

    def test_flat_backend_coupling(self):
        params = WalkParams(0.3, 0.8, UniformInterval(-1.0, 1.0))
        S, T_m, T_ext = simulate_gradual_coupled(params, 800, 400, 1600, seed=29)
        std = simulate_trajectory(params, 1600, checkpoints=[400, 1600], seed=29)
        assert T_m == std.position_at(400)
        assert T_ext == std.position_at(1600)

    def test_tail_conditional_mean(self):
        # given the first m steps, each tail step has mean
        # a*T_m/m + (1-alpha)*mu1, so E[S_n - T_m | F_m] = (n-m)*that
        from stepwalk.distributions import sample_step

        params = PSET_A
        consts = derive_constants(params)
        m, n, reps = 200, 400, 30000
        state0 = run_reference(params, m, seed=777)
        counts0 = list(state0.counts)
        support = state0._support
        rng = RandomStream(999)
        sums = np.empty(reps)
        for rep in range(reps):
            s = 0.0
            for _ in range(n - m):
                u = rng.next_uniform()
                if u < params.alpha:
                    j = min(int(rng.next_uniform() * m), m - 1)
                    acc = 0
                    for value, c in zip(support, counts0):
                        acc += c
                        if j < acc:
                            x = value
                            break
                    if u >= params.p * params.alpha:
                        x = -x
                else:
                    x = sample_step(params.dist, rng)
                s += x
            sums[rep] = s
        per_step = consts.a * state0.running_sum / m + (1 - params.alpha) * consts.mu1
        target = (n - m) * per_step
        stderr = sums.std(ddof=1) / math.sqrt(reps)
        assert abs(sums.mean() - target) <= 5 * stderr


class TestTrajectoryCsv(object):
    def test_round_trip(self, tmp_path):
        traj = simulate_trajectory(PSET_A, 1000, seed=3)
        path = tmp_path / "t.csv"
        write_trajectory_csv(traj, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "n,T_n,sum_sq"
        assert len(lines) == len(traj.checkpoints) + 1
        last = lines[-1].split(",")
        assert int(last[0]) == 1000
        assert float(last[1]) == traj.positions[-1]
        assert float(last[2]) == traj.sum_sq[-1]
