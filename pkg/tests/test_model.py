"""Model primitives: parameters, configurations, pattern counting, single steps."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nedpca import (
    Configuration,
    ModelParams,
    ParamError,
    PatternCounts,
    SiteWindow,
    classify_window,
    count_patterns,
    ror,
    scalar_step,
    site_update_prob,
    step_sample,
    transition_prob,
    window_masks,
)

small_params = st.builds(
    lambda n_extra, m, p1, p2: ModelParams(m + n_extra, m, p1, p2),
    st.integers(0, 6),
    st.integers(2, 5),
    st.floats(0.05, 0.95),
    st.floats(0.05, 1.0),
)


class TestModelParams:
    def test_accepts_boundary_p2(self):
        ModelParams(4, 2, 0.5, 1.0)

    @pytest.mark.parametrize(
        "n,m,p1,p2",
        [
            (2, 5, 0.3, 0.5),  # m > n
            (3, 1, 0.3, 0.5),  # m < 2
            (4, 2, 0.0, 0.5),
            (4, 2, 1.0, 0.5),
            (4, 2, 0.3, 0.0),
            (4, 2, 0.3, 1.1),
            (4, 2, -0.1, 0.5),
        ],
    )
    def test_rejects_out_of_range(self, n, m, p1, p2):
        with pytest.raises(ParamError):
            ModelParams(n, m, p1, p2)

    def test_rejects_non_integer_sizes(self):
        with pytest.raises(ParamError):
            ModelParams(4.0, 2, 0.3, 0.5)

    def test_exact_flag(self):
        assert ModelParams(3, 2, Fraction(1, 2), Fraction(1, 3)).exact
        assert not ModelParams(3, 2, 0.5, Fraction(1, 3)).exact

    def test_n_states(self):
        assert ModelParams(5, 2, 0.3, 0.5).n_states == 32


class TestConfiguration:
    def test_string_round_trip(self):
        conf = Configuration.from_string("10010")
        assert conf.to_string() == "10010"
        assert conf.code == 0b01001  # site 1 is the least significant bit
        assert conf.popcount() == 2

    def test_bit_is_one_based_and_cyclic(self):
        conf = Configuration.from_string("100")
        assert conf.bit(1) == 1
        assert conf.bit(2) == 0
        assert conf.bit(4) == conf.bit(1)

    def test_coerce_variants(self):
        conf = Configuration(5, 4)
        assert Configuration.coerce(conf, 4) is conf
        assert Configuration.coerce(5, 4) == conf
        assert Configuration.coerce("1010", 4) == conf
        with pytest.raises(ParamError):
            Configuration.coerce("101", 4)

    @given(st.integers(2, 24), st.integers(0, 2**24 - 1), st.integers(-30, 30))
    def test_rotation_preserves_popcount(self, n, raw, k):
        conf = Configuration(raw & ((1 << n) - 1), n)
        assert conf.rotated(k).popcount() == conf.popcount()

    @given(st.integers(2, 24), st.integers(0, 2**24 - 1), st.integers(-30, 30))
    def test_ror_inverts(self, n, raw, k):
        code = raw & ((1 << n) - 1)
        assert ror(ror(code, k, n), -k, n) == code


def naive_counts(bits, m):
    """Independent pattern scanner working on the tuple of site values."""
    n = len(bits)
    n1 = sum(bits)
    inner = [0] * (m - 2)
    blocked = 0
    for i in range(n):
        if bits[i] == 1:
            continue
        # length of the vacant stretch starting here
        run = 0
        while run < n and bits[(i + run) % n] == 0:
            run += 1
        if run >= m - 1 and bits[(i + m - 1) % n] == 1:
            blocked += 1
    for i in range(n):
        for r in range(1, m - 1):
            if (
                bits[i] == 1
                and bits[(i + r + 1) % n] == 1
                and all(bits[(i + j) % n] == 0 for j in range(1, r + 1))
            ):
                inner[r - 1] += 1
    return n1, tuple(inner), blocked


class TestCountPatterns:
    def test_reference_values(self):
        pc = count_patterns("10010", ModelParams(5, 3, 0.3, 0.5))
        assert (pc.n1, pc.n10r1, pc.n0m1) == (2, (1,), 1)
        pc = count_patterns("011", ModelParams(3, 2, 0.3, 0.5))
        assert (pc.n1, pc.n10r1, pc.n0m1) == (2, (), 1)

    def test_all_vacant_and_all_occupied(self):
        params = ModelParams(6, 4, 0.3, 0.5)
        pc = count_patterns(0, params)
        assert (pc.n1, pc.n10r1, pc.n0m1) == (0, (0, 0), 0)
        pc = count_patterns(2**6 - 1, params)
        assert (pc.n1, pc.n10r1, pc.n0m1) == (6, (0, 0), 0)

    @given(small_params, st.integers(0, 2**12 - 1))
    @settings(max_examples=200, deadline=None)
    def test_matches_naive_scanner(self, params, raw):
        code = raw & (params.n_states - 1)
        conf = Configuration(code, params.n)
        pc = count_patterns(conf, params)
        assert (pc.n1, pc.n10r1, pc.n0m1) == naive_counts(conf.bits(), params.m)

    def test_zero_exponent(self):
        # exponent of (1-p1) in the weight: one per inner vacancy, m-1 per full gap
        pc = PatternCounts(2, (1,), 1)
        assert pc.m == 3
        assert pc.weight_zero_exponent() == 1 * 1 + 2 * 1


class TestWindows:
    def test_classification_examples(self):
        params = ModelParams(5, 3, 0.3, 0.5)
        alpha = Configuration.from_string("00100")
        assert classify_window(alpha, 1, params) is SiteWindow.BLOCKED_VACANCY
        assert classify_window(alpha, 4, params) is SiteWindow.OPEN_VACANCY
        assert classify_window(alpha, 2, params) is SiteWindow.FORCED
        assert classify_window(alpha, 3, params) is SiteWindow.FORCED

    @given(small_params, st.integers(0, 2**12 - 1))
    @settings(max_examples=100, deadline=None)
    def test_update_probs_sum_to_one(self, params, raw):
        code = raw & (params.n_states - 1)
        for site in range(1, params.n + 1):
            w = classify_window(Configuration(code, params.n), site, params)
            assert math.isclose(
                site_update_prob(w, 0, params) + site_update_prob(w, 1, params), 1.0
            )

    @given(small_params, st.integers(0, 2**12 - 1))
    @settings(max_examples=100, deadline=None)
    def test_masks_agree_with_classification(self, params, raw):
        code = raw & (params.n_states - 1)
        open_mask, blocked_mask = window_masks(code, params)
        for site in range(1, params.n + 1):
            w = classify_window(Configuration(code, params.n), site, params)
            bit = 1 << (site - 1)
            assert bool(open_mask & bit) == (w is SiteWindow.OPEN_VACANCY)
            assert bool(blocked_mask & bit) == (w is SiteWindow.BLOCKED_VACANCY)


class TestTransitionProb:
    def test_single_blocked_site(self):
        params = ModelParams(3, 2, 0.3, 0.5)
        # only site 1 can stay occupied (blocked window), sites 2-3 are forced
        assert transition_prob("011", "100", params) == pytest.approx(1 - 0.5)

    def test_deposit_on_empty_ring(self):
        params = ModelParams(4, 2, 0.3, 0.5)
        assert transition_prob("0000", "1010", params) == pytest.approx(0.3**2 * 0.7**2)

    def test_exact_arithmetic(self):
        params = ModelParams(3, 2, Fraction(1, 2), Fraction(1, 3))
        assert transition_prob("011", "100", params) == Fraction(2, 3)

    @given(small_params, st.integers(0, 2**12 - 1))
    @settings(max_examples=30, deadline=None)
    def test_rows_sum_to_one(self, params, raw):
        if params.n > 6:
            params = ModelParams(6, min(params.m, 6), params.p1, params.p2)
        alpha = raw & (params.n_states - 1)
        total = math.fsum(
            transition_prob(alpha, beta, params) for beta in range(params.n_states)
        )
        assert total == pytest.approx(1.0, abs=1e-12)


class TestScalarStep:
    def test_forced_sites_ignore_draws(self):
        params = ModelParams(4, 2, 0.3, 0.5)
        # 1111: every window starts occupied, so the ring empties surely
        assert scalar_step(0b1111, params, [0.0, 0.0, 0.0, 0.0]) == 0

    def test_low_draws_fill_open_sites(self):
        params = ModelParams(4, 2, 0.3, 0.5)
        assert scalar_step(0, params, [0.0] * 4) == 0b1111
        assert scalar_step(0, params, [1.0] * 4) == 0

    def test_step_sample_reproducible(self):
        params = ModelParams(6, 3, 0.3, 0.5)
        out1 = step_sample("010010", params, np.random.default_rng(5))
        out2 = step_sample("010010", params, np.random.default_rng(5))
        assert out1 == out2
        assert isinstance(out1, Configuration)
