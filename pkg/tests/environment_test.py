import math

import numpy as np
import pytest
from scipy.stats import invweibull, ks_2samp, kstest

from entropy_lpp.core import Box, CONTINUOUS, LATTICE
from entropy_lpp.environment import (
    Environment,
    GENERATOR_ID,
    LATTICE_FIELD,
    MANUAL,
    PPP,
    SeedSpec,
    beta_for_nu,
    derive_stream,
    fit_lattice_box,
    m_of,
    ppp_from_exponentials,
    sample_lattice_cloud,
    sample_lattice_field,
    sample_ppp_ordered,
    sample_uniform_cloud,
    standard_exponentials,
)
from entropy_lpp.errors import (
    BoxCapacityError,
    EnvironmentFormatError,
    InvalidParameterError,
)


def _max_of_n_pareto_cdf(y, n_sites, alpha, scale):
    """Exact CDF of max(W_1..W_N) / scale for i.i.d. Pareto(alpha)."""
    z = np.maximum(np.asarray(y, dtype=np.float64) * scale, 1.0)
    return np.exp(n_sites * np.log1p(-(z ** -alpha)))


class TestSeeding:
    def test_same_seed_same_state(self):
        a = derive_stream(SeedSpec(11, 3)).random(5)
        b = derive_stream(SeedSpec(11, 3)).random(5)
        assert a.tolist() == b.tolist()

    def test_streams_differ(self):
        a = derive_stream(SeedSpec(11, 0)).random(5)
        b = derive_stream(SeedSpec(11, 1)).random(5)
        assert a.tolist() != b.tolist()

    def test_adjacent_streams_are_uncorrelated(self):
        a = derive_stream(SeedSpec(2024, 0)).random(10**6)
        b = derive_stream(SeedSpec(2024, 1)).random(10**6)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.01

    @pytest.mark.parametrize("master,stream", [(-1, 0), (2**64, 0), (0, -3)])
    def test_rejects_out_of_range_seeds(self, master, stream):
        with pytest.raises(InvalidParameterError):
            SeedSpec(master, stream)

    def test_accepts_the_full_uint64_range(self):
        seed = SeedSpec(2**64 - 1, 2**64 - 1)
        assert SeedSpec.from_dict(seed.to_dict()) == seed

    def test_generator_id_names_the_bit_generator(self):
        assert "PCG64" in GENERATOR_ID
        assert np.__version__ in GENERATOR_ID

    def test_standard_exponentials_have_unit_mean(self):
        draws = standard_exponentials(derive_stream(SeedSpec(5)), 200_000)
        assert draws.min() >= 0
        assert draws.mean() == pytest.approx(1.0, abs=0.01)


class TestEnvironment:
    def test_from_points_sorts_by_weight(self):
        env = Environment.from_points(
            [(0.2, 0), (0.4, 0.1), (0.6, -0.1)], weights=[1.0, 3.0, 2.0]
        )
        assert env.kind == MANUAL
        assert env.weights.tolist() == [3.0, 2.0, 1.0]
        assert env.t.tolist() == [0.4, 0.6, 0.2]

    def test_from_points_keeps_order_of_equal_weights(self, staircase_env):
        assert staircase_env.t.tolist() == [1, 2, 3, 3, 4]
        assert staircase_env.box == Box(CONTINUOUS, 4.0, 3.0)

    def test_arrays_are_read_only(self, weighted_env):
        with pytest.raises(ValueError):
            weighted_env.weights[0] = 10.0

    def test_rejects_increasing_weights(self):
        with pytest.raises(InvalidParameterError):
            Environment(
                box=Box(CONTINUOUS, 1, 1),
                weights=[1.0, 2.0],
                t=[0.1, 0.2],
                x=[0.0, 0.0],
                kind=MANUAL,
            )

    def test_rejects_points_outside_the_box(self):
        with pytest.raises(InvalidParameterError):
            Environment.from_points([(0.5, 2.0)], box=Box(CONTINUOUS, 1, 1))

    def test_rejects_fractional_lattice_points(self):
        with pytest.raises(InvalidParameterError):
            Environment.from_points([(1, 0.5)], box=Box(LATTICE, 2, 1))

    def test_head_and_beyond_split_the_ranks(self, weighted_env):
        assert weighted_env.head(1).weights.tolist() == [3.0]
        assert weighted_env.beyond(1).weights.tolist() == [2.0, 1.0]
        assert len(weighted_env.head(0)) == 0
        assert len(weighted_env.beyond(3)) == 0

    def test_reflected_and_scaled(self, weighted_env):
        assert weighted_env.reflected().x.tolist() == [-0.0, -1.5, -0.5]
        scaled = weighted_env.scaled_weights(2.0)
        assert scaled.weights.tolist() == [6.0, 4.0, 2.0]
        with pytest.raises(InvalidParameterError):
            weighted_env.scaled_weights(0.0)

    def test_document_round_trip(self, weighted_env):
        restored = Environment.from_dict(weighted_env.to_dict())
        assert restored.entries == weighted_env.entries
        assert restored.box == weighted_env.box

    @pytest.mark.parametrize(
        "document",
        [
            {"kind": "manual", "entries": []},
            {
                "kind": "manual",
                "box": {"mode": "continuous", "t_max": 1, "x_max": 1},
                "entries": [[1.0, 0.5]],
            },
            {
                "kind": "manual",
                "box": {"mode": "continuous", "t_max": 1, "x_max": 1},
                "entries": [[1.0, 0.5, 0.0], [2.0, 0.5, 0.0]],
            },
            {
                "kind": "bogus",
                "box": {"mode": "continuous", "t_max": 1, "x_max": 1},
                "entries": [],
            },
        ],
    )
    def test_bad_documents_raise_format_errors(self, document):
        with pytest.raises(EnvironmentFormatError):
            Environment.from_dict(document)


class TestUniformCloud:
    def test_single_point_lies_in_the_box(self, unit_box):
        env = sample_uniform_cloud(1, unit_box, SeedSpec(1))
        assert len(env) == 1
        assert 0 <= env.t[0] <= 1 and -1 <= env.x[0] <= 1

    def test_deterministic(self, unit_box):
        a = sample_uniform_cloud(50, unit_box, SeedSpec(9, 4))
        b = sample_uniform_cloud(50, unit_box, SeedSpec(9, 4))
        assert a.entries == b.entries

    def test_mean_time_is_one_half(self, unit_box):
        env = sample_uniform_cloud(10_000, unit_box, SeedSpec(77))
        assert 0.49 <= env.t.mean() <= 0.51

    def test_needs_a_continuous_box(self):
        with pytest.raises(InvalidParameterError):
            sample_uniform_cloud(3, Box(LATTICE, 3, 1), SeedSpec(0))


class TestLatticeCloud:
    def test_exhausts_the_box(self):
        box = Box(LATTICE, 4, 2)
        env = sample_lattice_cloud(box.cardinality, box, SeedSpec(3))
        sites = {(int(t), int(x)) for t, x in zip(env.t, env.x)}
        assert sites == {(t, x) for t in range(1, 5) for x in range(-2, 3)}

    def test_points_are_distinct(self):
        env = sample_lattice_cloud(5, Box(LATTICE, 10, 3), SeedSpec(3))
        assert len({(t, x) for t, x in zip(env.t, env.x)}) == 5

    def test_single_site_box(self):
        env = sample_lattice_cloud(1, Box(LATTICE, 1, 0), SeedSpec(3))
        assert (env.t.tolist(), env.x.tolist()) == ([1.0], [0.0])

    def test_rejects_more_points_than_sites(self):
        with pytest.raises(BoxCapacityError):
            sample_lattice_cloud(2, Box(LATTICE, 1, 0), SeedSpec(3))


class TestLatticeField:
    @pytest.mark.parametrize("method", ["full", "order-statistic"])
    def test_records_are_sorted_and_distinct(self, method):
        box = Box(LATTICE, 30, 5)
        env = sample_lattice_field(box, 1.0, SeedSpec(8), 12, method=method)
        assert env.kind == LATTICE_FIELD
        assert env.metadata == {"method": method, "sites": 330}
        assert len(env) == 12
        assert np.all(np.diff(env.weights) <= 0)
        assert env.weights.min() >= 1.0
        assert len({(t, x) for t, x in zip(env.t, env.x)}) == 12

    def test_auto_switches_on_box_size(self, config_override):
        config_override(ELPP_FULL_FIELD_MAX_SITES=100)
        small = sample_lattice_field(Box(LATTICE, 9, 5), 1.0, SeedSpec(1), 3)
        large = sample_lattice_field(Box(LATTICE, 10, 5), 1.0, SeedSpec(1), 3)
        assert small.metadata["method"] == "full"
        assert large.metadata["method"] == "order-statistic"
        with pytest.raises(BoxCapacityError):
            sample_lattice_field(
                Box(LATTICE, 10, 5), 1.0, SeedSpec(1), 3, method="full"
            )

    def test_rejects_top_k_beyond_the_box(self):
        with pytest.raises(BoxCapacityError):
            sample_lattice_field(Box(LATTICE, 2, 0), 1.0, SeedSpec(1), 3)

    @pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0])
    def test_rejects_alpha_outside_the_range(self, alpha):
        with pytest.raises(InvalidParameterError):
            sample_lattice_field(Box(LATTICE, 2, 1), alpha, SeedSpec(1), 1)

    @pytest.mark.parametrize(
        "method,box",
        [
            ("full", Box(LATTICE, 20, 10)),
            ("order-statistic", Box(LATTICE, 10**6, 500)),
        ],
    )
    def test_largest_weight_has_the_max_of_n_law(self, method, box):
        alpha = 1.5
        n_sites = box.cardinality
        scale = m_of(n_sites, alpha)
        sample = [
            sample_lattice_field(
                box, alpha, SeedSpec(31, r), 1, method=method
            ).weights[0]
            / scale
            for r in range(600)
        ]
        result = kstest(
            sample,
            lambda y: _max_of_n_pareto_cdf(y, n_sites, alpha, scale),
        )
        assert result.pvalue > 1e-3

    def test_both_methods_agree_on_the_second_record(self):
        box = Box(LATTICE, 25, 10)
        full, order = (
            [
                sample_lattice_field(
                    box, 1.0, SeedSpec(seed, r), 2, method=method
                ).weights[1]
                for r in range(500)
            ]
            for seed, method in ((1, "full"), (2, "order-statistic"))
        )
        assert ks_2samp(full, order).pvalue > 1e-3

    @pytest.mark.parametrize("alpha", [0.8, 1.0, 1.5])
    def test_record_weights_follow_the_rank_power_law(self, alpha):
        box = Box(LATTICE, 10**6, 500)
        env = sample_lattice_field(
            box, alpha, SeedSpec(44), 2000, method="order-statistic"
        )
        ranks = np.arange(1, 2001)
        # the first ranks fluctuate too much to weigh in the fit
        slope, _ = np.polyfit(
            np.log(ranks[19:]), np.log(env.weights[19:]), 1
        )
        assert slope == pytest.approx(-1 / alpha, abs=0.05)
        assert env.weights[999] / m_of(box.cardinality / 1000, alpha) == (
            pytest.approx(1.0, rel=0.15)
        )

    @pytest.mark.slow
    def test_frechet_limit_of_the_rescaled_maximum(self):
        alpha, n, h = 1.0, 100, 100
        box = Box(LATTICE, n, h)
        scale = m_of(n * h, alpha)
        sample = [
            sample_lattice_field(box, alpha, SeedSpec(99, r), 1).weights[0]
            / scale
            for r in range(2000)
        ]
        result = kstest(
            sample,
            lambda y: _max_of_n_pareto_cdf(y, box.cardinality, alpha, scale),
        )
        assert result.statistic < 0.05


class TestPoissonRecords:
    def test_forced_exponentials(self):
        env = ppp_from_exponentials(
            [0.5, 1.5], [0.2, 0.7], [0.0, 0.5], alpha=1.0, q=1.0
        )
        assert env.kind == PPP
        assert env.weights.tolist() == [4.0, 1.0]
        assert env.box == Box(CONTINUOUS, 1.0, 1.0)

    def test_records_decrease_and_stay_in_the_strip(self):
        env = sample_ppp_ordered(200, 1.2, 4.0, SeedSpec(6))
        assert np.all(np.diff(env.weights) < 0)
        assert np.all((env.t >= 0) & (env.t <= 1))
        assert np.all(np.abs(env.x) <= 4.0)

    def test_shorter_samples_are_prefixes(self):
        short = sample_ppp_ordered(10, 0.8, 2.0, SeedSpec(6, 1))
        long = sample_ppp_ordered(40, 0.8, 2.0, SeedSpec(6, 1))
        assert short.entries == long.head(10).entries

    def test_first_record_law(self):
        alpha, q = 1.0, 1.0
        sample = [
            sample_ppp_ordered(1, alpha, q, SeedSpec(12, r)).weights[0]
            for r in range(5000)
        ]
        law = invweibull(alpha, scale=(2 * q) ** (1 / alpha))
        assert kstest(sample, law.cdf).statistic < 0.05

    def test_rejects_nonpositive_width(self):
        with pytest.raises(InvalidParameterError):
            sample_ppp_ordered(3, 1.0, 0.0, SeedSpec(1))


@pytest.mark.parametrize(
    "x,alpha,expected",
    [(100, 2, 10.0), (1, 0.7, 1.0), (math.e, 1, math.e)],
)
def test_m_of(x, alpha, expected):
    assert m_of(x, alpha) == pytest.approx(expected)


def test_m_of_rejects_small_arguments():
    with pytest.raises(InvalidParameterError):
        m_of(0.5, 1.0)


def test_beta_for_nu_solves_the_normalization():
    n, h, alpha, nu = 4096, 512.0, 1.3, 0.7
    beta = beta_for_nu(nu, n, h, alpha)
    assert n / h**2 * beta * m_of(n * h, alpha) == pytest.approx(nu)
    assert beta == pytest.approx(nu * h * h / (n * (n * h) ** (1 / alpha)))


def test_fit_lattice_box_floors_the_width():
    assert fit_lattice_box(10, 2.7) == Box(LATTICE, 10, 2)
    assert fit_lattice_box(3, 0.4) == Box(LATTICE, 3, 0)
