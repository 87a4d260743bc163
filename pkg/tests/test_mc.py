"""Monte Carlo plumbing: plans, kernels, determinism, merged estimates."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nedpca import (
    BudgetExceeded,
    DimensionMismatch,
    DomainError,
    ModelParams,
    ParamError,
    SimulationPlan,
    bitparallel_step,
    build_matrix,
    density_formula,
    kernel_throughput,
    run,
    scalar_step,
    solve_stationary,
    tv_distance,
)

P635 = ModelParams(6, 3, 0.3, 0.5)


def make_plan(**kw):
    base = dict(params=P635, seed=3, samples=1000, burn_in=200)
    base.update(kw)
    return SimulationPlan(**base)


class TestPlanValidation:
    def test_defaults_resolve(self):
        plan = make_plan()
        assert plan.histogram_enabled  # 64 states, well under the auto limit
        assert plan.start_code == 0
        assert plan.resolved_threads >= 1

    @pytest.mark.parametrize(
        "kw",
        [
            dict(seed=-1),
            dict(samples=-5),
            dict(chains=0),
            dict(thin=0),
            dict(burn_in=-1),
            dict(kernel="vectorized"),
            dict(threads=0),
            dict(start="10101"),  # wrong length
        ],
    )
    def test_rejects_bad_fields(self, kw):
        with pytest.raises(ParamError):
            make_plan(**kw)

    def test_start_shorthands(self):
        assert make_plan(start="ones").start_code == 63
        assert make_plan(start="zeros").start_code == 0
        assert make_plan(start="100000").start_code == 1
        assert make_plan(start=17).start_code == 17

    def test_histogram_cap(self):
        params = ModelParams(21, 2, 0.3, 0.5)
        with pytest.raises(BudgetExceeded):
            SimulationPlan(params=params, seed=1, samples=10, histogram=True)

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv("NEDPCA_THREADS", "4")
        assert make_plan().resolved_threads == 4
        monkeypatch.setenv("NEDPCA_THREADS", "junk")
        assert make_plan().resolved_threads == 1


class TestKernelAgreement:
    @given(
        st.integers(2, 5),
        st.integers(0, 20),
        st.integers(0, 2**25 - 1),
        st.integers(0, 10_000),
    )
    @settings(max_examples=150, deadline=None)
    def test_single_step_identical(self, m, extra, raw, seed):
        params = ModelParams(m + extra, m, 0.35, 0.6)
        code = raw & (params.n_states - 1)
        u = np.random.default_rng(seed).random(params.n)
        assert scalar_step(code, params, u) == bitparallel_step(code, params, u)

    def test_certain_evaporation(self):
        params = ModelParams(8, 2, 0.3, 1.0)
        u = np.full(8, 0.0)
        # blocked sites can never redeposit when evaporation is certain
        assert bitparallel_step(0b01010101, params, u) == scalar_step(
            0b01010101, params, u
        )


class TestRunDeterminism:
    def test_same_plan_same_summary(self):
        a, b = run(make_plan()), run(make_plan())
        assert a.histogram == b.histogram
        assert a.density_mean == b.density_mean
        assert a.pattern_means == b.pattern_means

    def test_kernel_choice_invisible(self):
        a = run(make_plan(kernel="bitparallel"))
        b = run(make_plan(kernel="scalar"))
        assert a.histogram == b.histogram
        assert a.density_mean == b.density_mean
        assert a.density_stderr == b.density_stderr

    def test_thread_count_invisible(self):
        a = run(make_plan(chains=3, threads=1))
        b = run(make_plan(chains=3, threads=3))
        assert a.histogram == b.histogram
        assert a.density_mean == b.density_mean

    def test_chains_extend_sample_count(self):
        summary = run(make_plan(chains=3))
        assert summary.total_samples == 3000
        assert sum(summary.histogram) == 3000

    def test_seed_changes_output(self):
        assert run(make_plan()).histogram != run(make_plan(seed=4)).histogram


class TestEstimates:
    def test_histogram_and_direct_pattern_paths_agree(self):
        # small state space counts patterns via the histogram; forcing the
        # histogram off must not change the merged means
        a = run(make_plan(samples=3000))
        b = run(make_plan(samples=3000, histogram=False))
        assert b.histogram is None
        assert a.pattern_means == b.pattern_means
        assert a.density_mean == b.density_mean

    def test_against_exact_law(self):
        summary = run(make_plan(samples=60_000, seed=12))
        table = solve_stationary(build_matrix(P635))
        assert tv_distance(summary, table) < 0.05
        assert abs(summary.density_mean - density_formula(P635)) < 6 * summary.density_stderr

    def test_empty_run(self):
        summary = run(make_plan(samples=0, burn_in=50))
        assert summary.is_empty
        assert math.isnan(summary.density_mean)
        payload = summary.to_json_dict()
        assert payload["density_mean"] is None

    def test_stderr_needs_batches(self):
        summary = run(make_plan(samples=1))
        assert math.isnan(summary.density_stderr)

    def test_json_round_trip(self):
        summary = run(make_plan())
        payload = json.loads(summary.to_json())
        assert payload["n"] == 6 and payload["m"] == 3
        assert payload["samples"] == 1000
        assert len(payload["histogram"]) == 64
        assert payload["pattern_means"]["n1"] == pytest.approx(summary.density_mean)

    def test_density_equals_n1_rate(self):
        summary = run(make_plan())
        assert summary.pattern_means["n1"] == pytest.approx(summary.density_mean)


class TestTrace:
    def test_trace_written(self, tmp_path):
        path = tmp_path / "trace.txt"
        summary = run(make_plan(samples=500, trace_path=str(path)))
        lines = path.read_text().splitlines()
        assert len(lines) == 500
        assert all(len(line) == 6 and set(line) <= {"0", "1"} for line in lines)
        assert summary.total_samples == 500

    def test_trace_only_first_chain(self, tmp_path):
        path = tmp_path / "trace.txt"
        run(make_plan(samples=300, chains=2, trace_path=str(path)))
        assert len(path.read_text().splitlines()) == 300


class TestTvDistance:
    def test_requires_histogram(self):
        summary = run(make_plan(histogram=False))
        table = solve_stationary(build_matrix(P635))
        with pytest.raises(DomainError):
            tv_distance(summary, table)

    def test_requires_matching_params(self):
        summary = run(make_plan())
        other = solve_stationary(build_matrix(ModelParams(6, 2, 0.3, 0.5)))
        with pytest.raises(DomainError):
            tv_distance(summary, other)

    def test_requires_matching_sizes(self):
        summary = run(make_plan())
        other = solve_stationary(build_matrix(ModelParams(5, 3, 0.3, 0.5)))
        with pytest.raises(DimensionMismatch):
            tv_distance(summary, other)

    def test_zero_for_self(self):
        summary = run(make_plan(samples=100))
        table = solve_stationary(build_matrix(P635))
        tv = tv_distance(summary, table)
        assert 0.0 <= tv <= 1.0


class TestThroughput:
    def test_positive_rates(self):
        params = ModelParams(16, 3, 0.3, 0.5)
        assert kernel_throughput(params, "bitparallel", 500) > 0
        assert kernel_throughput(params, "scalar", 200) > 0

    def test_rejects_bad_args(self):
        with pytest.raises(ParamError):
            kernel_throughput(P635, "gpu", 100)
        with pytest.raises(ParamError):
            kernel_throughput(P635, "scalar", 0)
