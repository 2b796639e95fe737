from types import SimpleNamespace

from hypothesis import given, strategies as st
import numpy as np
import pytest

from entropy_lpp.core import Box, LATTICE
from entropy_lpp.environment import (
    Environment,
    SeedSpec,
    sample_lattice_field,
    sample_ppp_ordered,
)
from entropy_lpp.errors import (
    CurveShapeError,
    GuardExceededError,
    InvalidParameterError,
)
from entropy_lpp.solvers import (
    beta_sweep,
    brute_force_variational,
    check_maximizer_unique,
    continuum_T_truncated,
    solve_all,
    solve_tail,
    solve_variational,
    variational,
)

from .helpers.sample_environments import mirror, weighted
from .helpers.strategies import weighted_clouds

betas = st.floats(0.0, 5.0, allow_nan=False)

# well separated, so finite-difference slopes stay accurate
beta_grids = st.lists(
    st.integers(0, 50), min_size=2, max_size=6, unique=True
).map(lambda grid: sorted(b / 10 for b in grid))


@pytest.mark.parametrize(
    "beta,expected", list(weighted["expected"]["solutions"].items())
)
def test_weighted_solutions(weighted_env, beta, expected):
    value, indices = expected
    result = solve_variational(weighted_env, beta, 3)
    assert result.value == pytest.approx(value)
    assert result.indices == indices
    assert brute_force_variational(weighted_env, beta, 3) == (
        pytest.approx(value),
        indices,
    )


def test_head_and_tail_problems(weighted_env):
    value, indices = weighted["expected"]["head_2_at_1"]
    head = solve_variational(weighted_env, 1.0, 2)
    assert (head.value, head.indices) == (pytest.approx(value), indices)
    value, indices = weighted["expected"]["tail_1_at_1"]
    tail = solve_tail(weighted_env, 1.0, 1)
    assert (tail.value, tail.indices) == (pytest.approx(value), indices)
    assert tail.ell_used == 1


def test_result_document(weighted_env):
    document = solve_variational(weighted_env, 0.5, 3).to_dict()
    assert document == {
        "value": 1.5,
        "argmax": [[3.0, 1.0, 0.0]],
        "beta": 0.5,
        "ell": 3,
    }


@pytest.mark.parametrize("beta,value,size", [(4.0, 3.0, 1), (0.5, 0.0, 0)])
def test_single_entry(beta, value, size):
    env = Environment.from_points([(0.5, 1)], weights=[1.0])
    result = solve_variational(env, beta, 1)
    assert result.value == value
    assert len(result.argmax) == size


def test_ell_zero_is_the_empty_problem(weighted_env):
    result = solve_variational(weighted_env, 10.0, 0)
    assert result.value == 0.0
    assert result.indices == ()


def test_tail_at_ell_zero_solves_everything(weighted_env):
    tail = solve_tail(weighted_env, 0.8, 0)
    full = solve_all(weighted_env, 0.8)
    assert (tail.value, tail.indices) == (full.value, full.indices)


def test_tail_of_a_single_unprofitable_weight(weighted_env):
    # entry 2 has weight 1 at (0.25, 0.5): 0.3 * 1 < 0.5**2 / (2 * 0.25)
    assert solve_tail(weighted_env, 0.3, 2).value == 0.0


def test_tail_needs_something_left(weighted_env):
    with pytest.raises(InvalidParameterError):
        solve_tail(weighted_env, 1.0, 3)


@pytest.mark.parametrize("ell", [-1, 4])
def test_rejects_ell_out_of_range(weighted_env, ell):
    with pytest.raises(InvalidParameterError):
        solve_variational(weighted_env, 1.0, ell)


def test_rejects_negative_beta(weighted_env):
    with pytest.raises(InvalidParameterError):
        solve_variational(weighted_env, -1.0, 3)


class TestBetaSweep:
    def test_shape_on_the_weighted_instance(self, weighted_env):
        sweep = beta_sweep(weighted_env, [0.0, 0.1, 0.5, 0.8, 1.0, 3.0], 3)
        assert sweep.is_monotone
        assert sweep.is_convex
        assert sweep.values[0] == 0.0
        assert [row["argmax_size"] for row in sweep.rows()] == [
            0, 1, 1, 3, 3, 3
        ]

    def test_zero_beta_only(self, weighted_env):
        assert beta_sweep(weighted_env, [0.0], 3).values == (0.0,)

    def test_duplicated_betas_repeat_the_result(self, weighted_env):
        sweep = beta_sweep(weighted_env, [0.7, 0.7], 3)
        assert sweep.values[0] == sweep.values[1]
        assert sweep.argmax_ids[0] == sweep.argmax_ids[1]

    def test_rejects_descending_grids(self, weighted_env):
        with pytest.raises(InvalidParameterError):
            beta_sweep(weighted_env, [1.0, 0.5], 3)

    @given(weighted_clouds(), beta_grids)
    def test_monotone_and_convex(self, env, grid):
        sweep = beta_sweep(env, grid, len(env))
        assert sweep.is_monotone
        assert sweep.is_convex

    @pytest.mark.parametrize(
        "values,broken",
        [
            ([3.0, 1.0, 2.0], "monotone=False"),
            ([0.0, 2.0, 3.0], "convex=False"),
        ],
    )
    def test_broken_curve_raises(
        self, weighted_env, monkeypatch, values, broken
    ):
        solved = iter(values)
        monkeypatch.setattr(
            variational,
            "solve_variational",
            lambda env, beta, ell: SimpleNamespace(
                value=next(solved), indices=()
            ),
        )
        with pytest.raises(CurveShapeError) as error:
            beta_sweep(weighted_env, [0.0, 0.5, 1.0], 3)
        assert broken in error.value.message


class TestUniqueness:
    def test_single_profitable_entry_is_unique(self):
        env = Environment.from_points([(0.5, 1)], weights=[1.0])
        report = check_maximizer_unique(env, 4.0, 1)
        assert report.unique
        assert report.maximizers == ((0,),)

    def test_mirror_tie(self, mirror_env):
        report = check_maximizer_unique(mirror_env, 1.0, 2)
        assert not report.unique
        assert report.value == mirror["expected"]["value_at_1"]
        assert list(report.maximizers) == mirror["expected"]["maximizers_at_1"]
        assert report.to_dict()["maximizers"] == [[0], [1]]

    def test_guard(self, weighted_env, config_override):
        config_override(ELPP_UNIQUENESS_MAX=2)
        with pytest.raises(GuardExceededError):
            check_maximizer_unique(weighted_env, 1.0, 3)


@given(weighted_clouds(), betas)
def test_matches_exhaustive_search(env, beta):
    result = solve_variational(env, beta, len(env))
    value, _ = brute_force_variational(env, beta, len(env))
    assert result.value == pytest.approx(value, rel=1e-9, abs=1e-9)
    assert result.value >= 0
    recomputed = beta * result.energy - result.entropy
    assert recomputed == pytest.approx(result.value, rel=1e-9, abs=1e-9)


@given(weighted_clouds(), betas)
def test_more_weights_never_hurt(env, beta):
    values = [
        solve_variational(env, beta, ell).value
        for ell in range(len(env) + 1)
    ]
    assert all(b >= a for a, b in zip(values, values[1:]))
    tails = [solve_tail(env, beta, ell).value for ell in range(len(env))]
    assert all(b <= a for a, b in zip(tails, tails[1:]))


def _truncation_instances():
    for r in range(8):
        yield sample_ppp_ordered(20, 1.2, 2.0, SeedSpec(77, r))
        yield sample_lattice_field(
            Box(LATTICE, 40, 6), 1.0, SeedSpec(78, r), top_k=20
        )


@pytest.mark.parametrize("ell", [1, 3, 5, 10, 19])
def test_truncation_gap_is_bounded_by_the_dropped_energy(ell):
    # dropping points from a chain never raises its entropy
    for env in _truncation_instances():
        for beta in (0.05, 0.5, 2.0):
            gap = (
                solve_all(env, beta).value
                - solve_variational(env, beta, ell).value
            )
            assert gap >= -1e-9
            assert gap <= beta * env.beyond(ell).weights.sum() + 1e-9


def test_random_instances_match_exhaustive_search():
    for r in range(30):
        env = sample_ppp_ordered(10, 1.0, 1.0, SeedSpec(404, r))
        for beta in (0.5, 2.0, 8.0):
            result = solve_variational(env, beta, 10)
            value, ids = brute_force_variational(env, beta, 10)
            assert result.value == pytest.approx(value, rel=1e-12)
            assert result.indices == ids


class TestContinuum:
    def test_zero_intensity(self):
        assert continuum_T_truncated(1.0, 0.0, 4.0, 20, SeedSpec(3)).value == 0

    def test_nondecreasing_in_ell(self):
        values = [
            continuum_T_truncated(1.2, 1.0, 4.0, ell, SeedSpec(3, 8)).value
            for ell in (1, 5, 20, 80)
        ]
        assert values == sorted(values)

    def test_weights_scale_like_beta(self):
        seed = SeedSpec(17, 2)
        env = sample_ppp_ordered(30, 1.0, 4.0, seed)
        doubled = solve_variational(env.scaled_weights(2.0), 1.0, 30).value
        assert doubled == pytest.approx(solve_variational(env, 2.0, 30).value)

    def test_values_are_finite(self):
        values = np.array(
            [
                continuum_T_truncated(0.8, 1.0, 8.0, 50, SeedSpec(5, r)).value
                for r in range(20)
            ]
        )
        assert np.all(np.isfinite(values)) and np.all(values >= 0)
