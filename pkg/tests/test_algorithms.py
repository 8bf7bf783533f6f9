import math

import numpy as np
import pytest

from saea import probability as pr
from saea.algorithms import (AlgorithmSpec, AlgoState, ControlConfig, KOpt,
                             MutationModel, OneBit, RateSchedule,
                             SelfAdjusting, StaticRate, default_control,
                             initial_state, run_to_optimum, schedule_tables,
                             step)
from saea.core import leading_ones, make_rng


def crafted_state(prefix_ones, n, rho, tail_bit=0):
    x = np.zeros(n, dtype=np.uint8)
    x[:prefix_ones] = 1
    if tail_bit and prefix_ones + 1 < n:
        x[prefix_ones + 1:] = tail_bit
    return AlgoState(x=x, fitness=prefix_ones, rho=rho)


class TestConfigValidation:
    def test_F_must_exceed_one(self):
        with pytest.raises(ValueError):
            ControlConfig(F=1.0, s=1.0, rho0=0.1, rho_min=0.01, rho_max=0.5)

    def test_rate_ordering(self):
        with pytest.raises(ValueError):
            ControlConfig(F=1.5, s=1.0, rho0=0.6, rho_min=0.01, rho_max=0.5)

    def test_model_controller_pairing(self):
        with pytest.raises(ValueError):
            AlgorithmSpec(10, MutationModel.BINOMIAL, OneBit())
        with pytest.raises(ValueError):
            AlgorithmSpec(10, MutationModel.FIXED_K, StaticRate(0.1))

    def test_truncated_needs_positive_rate(self):
        with pytest.raises(ValueError):
            AlgorithmSpec(10, MutationModel.TRUNCATED, StaticRate(0.0))

    def test_defaults(self):
        cfg = default_control(1000, math.e - 1)
        assert cfg.F == pytest.approx(1.1)
        assert cfg.rho0 == 1e-3 and cfg.rho_min == 1e-6 and cfg.rho_max == 0.5


class TestStep:
    def test_final_bit_acceptance_and_rate_raise(self):
        # level n-1: only improving flip is the last bit; iterate until the
        # offspring hits it and verify the acceptance and the rate update
        cfg = ControlConfig(F=1.5, s=2.0, rho0=0.2, rho_min=1e-4, rho_max=1.0)
        spec = AlgorithmSpec(6, MutationModel.BINOMIAL, SelfAdjusting(cfg))
        rng = make_rng(5)
        st = crafted_state(5, 6, cfg.rho0)
        while st.fitness < 6:
            before = st.rho
            st, rec = step(st, spec, rng)
            if rec.success:
                assert st.rho == min(before * cfg.F ** cfg.s, cfg.rho_max)
            else:
                assert st.rho == max(before / cfg.F, cfg.rho_min)
        assert st.fitness == 6

    def test_zero_flip_offspring_counts_as_success(self):
        cfg = ControlConfig(F=2.0, s=1.0, rho0=1e-12, rho_min=1e-13,
                            rho_max=1.0)
        spec = AlgorithmSpec(8, MutationModel.BINOMIAL, SelfAdjusting(cfg))
        rng = make_rng(1)
        st = crafted_state(3, 8, cfg.rho0)
        st2, rec = step(st, spec, rng)
        assert rec.k == 0 and rec.success
        assert st2.fitness == 3
        assert st2.rho == pytest.approx(1e-12 * 2.0)

    def test_clamp_at_floor(self):
        cfg = ControlConfig(F=4.0, s=1.0, rho0=0.25, rho_min=0.25,
                            rho_max=1.0)
        spec = AlgorithmSpec(20, MutationModel.BINOMIAL, SelfAdjusting(cfg))
        rng = make_rng(3)
        st = crafted_state(15, 20, cfg.rho0)
        saw_failure = False
        for _ in range(200):
            if st.fitness >= 20:
                break
            st, rec = step(st, spec, rng)
            assert cfg.rho_min <= st.rho <= cfg.rho_max
            saw_failure |= not rec.success
        assert saw_failure

    def test_elitism_along_trajectory(self):
        spec = AlgorithmSpec(30, MutationModel.BINOMIAL, StaticRate(0.05))
        rng = make_rng(17)
        st = initial_state(spec, rng)
        tables = schedule_tables(spec)
        prev = st.fitness
        for _ in range(3000):
            if st.fitness >= 30:
                break
            st, _ = step(st, spec, rng, tables)
            assert st.fitness >= prev
            assert st.fitness == leading_ones(st.x)
            prev = st.fitness

    def test_truncated_never_flips_zero(self):
        cfg = ControlConfig(F=1.2, s=1.0, rho0=0.01, rho_min=1e-6,
                            rho_max=0.5)
        spec = AlgorithmSpec(50, MutationModel.TRUNCATED, SelfAdjusting(cfg))
        rng = make_rng(23)
        st = initial_state(spec, rng)
        tables = schedule_tables(spec)
        for _ in range(2000):
            if st.fitness >= 50:
                break
            st, rec = step(st, spec, rng, tables)
            assert rec.k >= 1

    def test_geometric_level_leaving_time(self):
        # prepared level-20 states under a static rate: mean exit time
        # within 3% of 1/p_imp over 1e4 trials
        rho, ell, n = 0.03, 20, 60
        spec = AlgorithmSpec(n, MutationModel.BINOMIAL, StaticRate(rho))
        tables = schedule_tables(spec)
        rng = make_rng(29)
        waits = []
        for _ in range(10_000):
            x = np.zeros(n, dtype=np.uint8)
            x[:ell] = 1
            x[ell + 1:] = rng.integers(0, 2, size=n - ell - 1)
            st = AlgoState(x=x, fitness=ell, rho=rho)
            t = 0
            while st.fitness == ell:
                st, _ = step(st, spec, rng, tables)
                t += 1
            waits.append(t)
        expected = 1.0 / pr.p_imp(rho, ell)
        assert abs(np.mean(waits) - expected) / expected < 0.03


class TestRunToOptimum:
    def test_deterministic(self):
        spec = AlgorithmSpec(80, MutationModel.FIXED_K, OneBit())
        a = run_to_optimum(spec, 123)
        b = run_to_optimum(spec, 123)
        assert a.T == b.T and np.array_equal(a.fixed_target, b.fixed_target)

    def test_n_one_static(self):
        # T = 0 iff the seeded start is already the optimum, otherwise the
        # exit time is geometric with mean 1/p_imp(rho, 0) = 1/rho
        rho = 0.3
        spec = AlgorithmSpec(1, MutationModel.BINOMIAL, StaticRate(rho))
        ts = [run_to_optimum(spec, seed).T for seed in range(2000)]
        zero = [t for t in ts if t == 0]
        nonzero = [t for t in ts if t > 0]
        assert abs(len(zero) / len(ts) - 0.5) < 0.05
        mean = np.mean(nonzero)
        se = np.std(nonzero, ddof=1) / math.sqrt(len(nonzero))
        assert abs(mean - 1 / rho) < 4 * se + 0.01

    def test_fixed_target_array_shape(self):
        spec = AlgorithmSpec(40, MutationModel.FIXED_K, OneBit())
        r = run_to_optimum(spec, 9)
        ft = r.fixed_target
        assert len(ft) == 41
        assert ft[-1] == r.T
        assert np.all(np.diff(ft) >= 0)
        init = int(np.sum(np.cumsum(ft) == 0))
        assert ft[0] == 0 and init >= 1  # targets met by the start point

    def test_timeout_flagged(self):
        spec = AlgorithmSpec(50, MutationModel.BINOMIAL, StaticRate(1e-9))
        r = run_to_optimum(spec, 3, cap=10)
        assert r.timeout
        assert np.any(r.fixed_target == -1)

    def test_kernel_agrees_with_step_semantics(self):
        # same distribution through the compiled path and the python path
        n, rho = 40, 1.0 / 40
        spec = AlgorithmSpec(n, MutationModel.BINOMIAL, StaticRate(rho))
        tables = schedule_tables(spec)
        kernel_ts = [run_to_optimum(spec, s).T for s in range(300)]

        py_ts = []
        for s in range(300):
            rng = make_rng(s)
            st = initial_state(spec, rng)
            t = 0
            while st.fitness < n:
                st, _ = step(st, spec, rng, tables)
                t += 1
            py_ts.append(t)
        from saea.theory import expected_runtime, static_schedule
        expect = expected_runtime(static_schedule(n, rho))
        for ts in (kernel_ts, py_ts):
            se = np.std(ts, ddof=1) / math.sqrt(len(ts))
            assert abs(np.mean(ts) - expect) < 4 * se

    def test_unconditional_zero_flip_frequency(self):
        # frequency of k = 0 offspring matches (1-rho)^n within 3 sigma
        from saea.core import sample_binomial
        n, rho = 100, 0.01
        rng = make_rng(31)
        draws = np.array([sample_binomial(n, rho, rng) for _ in range(100_000)])
        p0 = math.exp(n * math.log1p(-rho))
        freq = np.mean(draws == 0)
        sigma = math.sqrt(p0 * (1 - p0) / len(draws))
        assert abs(freq - p0) <= 3 * sigma

    def test_schedule_run_reaches_optimum(self):
        spec = AlgorithmSpec(100, MutationModel.TRUNCATED,
                             RateSchedule("p_gt0_opt"))
        r = run_to_optimum(spec, 11)
        assert not r.timeout and r.fixed_target[100] == r.T

    def test_target_rate_schedule_run(self):
        # the per-level target-rate schedule for the resampling model has no
        # target on high levels (rate 0 there means one-bit behavior)
        spec = AlgorithmSpec(100, MutationModel.TRUNCATED,
                             RateSchedule("hat_rho_star", s=1.285))
        r = run_to_optimum(spec, 19)
        assert not r.timeout
        spec_ea = AlgorithmSpec(100, MutationModel.BINOMIAL,
                                RateSchedule("rho_star", s=math.e - 1))
        r = run_to_optimum(spec_ea, 23)
        assert not r.timeout

    def test_kopt_run(self):
        spec = AlgorithmSpec(100, MutationModel.FIXED_K, KOpt())
        r = run_to_optimum(spec, 13)
        assert not r.timeout
