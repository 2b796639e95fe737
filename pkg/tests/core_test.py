import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from entropy_lpp.core import (
    Box,
    CONTINUOUS,
    DeltaPath,
    LATTICE,
    TimeSpacePoint,
    canonical_indices,
    canonical_order,
    entropy,
    interpolate,
    reflect,
    scale_points,
    step_cost,
    step_costs,
)
from entropy_lpp.errors import InvalidParameterError, UnsortedPointsError

P = TimeSpacePoint

increasing_paths = st.lists(
    st.tuples(
        st.floats(0.01, 1.0, allow_nan=False),
        st.floats(-3.0, 3.0, allow_nan=False),
    ),
    min_size=1,
    max_size=6,
).map(
    lambda steps: [
        P(sum(dt for dt, _ in steps[: i + 1]), x)
        for i, (_, x) in enumerate(steps)
    ]
)


@pytest.mark.parametrize(
    "points,expected",
    [
        ([(1, 2)], 2.0),
        ([(0.5, 1), (1, 1)], 1.0),
        ([(0.3, 0), (0.3, 5)], math.inf),
        ([], 0.0),
    ],
)
def test_entropy(points, expected):
    assert entropy([P(*p) for p in points]) == expected


@pytest.mark.parametrize(
    "start,end,expected",
    [
        ((0, 0), (1, 2), 2.0),
        ((0.5, 1), (0.5, 3), math.inf),
        ((1, 1), (2, 1), 0.0),
        ((2, 0), (1, 0), math.inf),
    ],
)
def test_step_cost(start, end, expected):
    assert step_cost(P(*start), P(*end)) == expected


def test_step_costs_matches_scalar_cost():
    t_from = np.array([0.0, 0.5, 1.0, 2.0])
    x_from = np.array([0.0, 1.0, -1.0, 0.0])
    costs = step_costs(t_from, x_from, 1.0, 2.0)
    expected = [
        step_cost(P(a, b), P(1.0, 2.0)) for a, b in zip(t_from, x_from)
    ]
    assert costs.tolist() == expected


def test_entropy_rejects_unsorted_points():
    with pytest.raises(UnsortedPointsError):
        entropy([P(1, 0), P(0.5, 0)])


@pytest.mark.parametrize(
    "points,expected",
    [
        ([(1, 0), (0.5, 2)], [(0.5, 2), (1, 0)]),
        ([(1, 3), (1, -2)], [(1, -2), (1, 3)]),
        ([], []),
    ],
)
def test_canonical_order(points, expected):
    assert canonical_order([P(*p) for p in points]) == [
        P(*p) for p in expected
    ]


def test_canonical_indices_keep_input_order_on_full_ties():
    points = [P(1, 0), P(0.5, 0), P(1, 0)]
    assert canonical_indices(points) == [1, 0, 2]


@given(increasing_paths)
def test_entropy_is_nonnegative_and_reflection_invariant(path):
    value = entropy(path)
    assert value >= 0
    assert entropy(reflect(path)) == value


@given(
    increasing_paths,
    st.floats(0.1, 10.0, allow_nan=False),
    st.floats(0.1, 10.0, allow_nan=False),
)
def test_entropy_scaling(path, time_factor, space_factor):
    scaled = entropy(scale_points(path, time_factor, space_factor))
    expected = space_factor**2 / time_factor * entropy(path)
    assert scaled == pytest.approx(expected, rel=1e-9, abs=1e-12)


@given(increasing_paths)
def test_points_obey_the_entropy_envelope(path):
    """A path of entropy B cannot leave |x| <= sqrt(2 B t)."""
    budget = entropy(path)
    for p in path:
        assert abs(p.x) <= math.sqrt(2 * budget * p.t) * (1 + 1e-9) + 1e-12


def test_interpolate_follows_the_segments():
    path = [P(1, 2), P(3, 0)]
    positions = interpolate(path, [0.0, 0.5, 1.0, 2.0, 3.0, 4.0])
    assert positions.tolist() == [0.0, 1.0, 2.0, 1.0, 0.0, 0.0]


def test_delta_path_caches_entropy():
    path = DeltaPath.from_points([(0.5, 1), (1, 1)])
    assert len(path) == 2
    assert path.entropy == 1.0 == path.recompute_entropy()
    assert path.as_lists() == [[0.5, 1], [1, 1]]
    assert DeltaPath().entropy == 0.0


class TestBox:
    def test_lattice_cardinality(self):
        assert Box(LATTICE, 10, 3).cardinality == 70
        assert Box(LATTICE, 1, 0).cardinality == 1

    @pytest.mark.parametrize(
        "mode,t_max,x_max",
        [
            (CONTINUOUS, 1.0, 0.0),
            (CONTINUOUS, 0.0, 1.0),
            (LATTICE, 2.5, 1),
            (LATTICE, 2, -1),
            ("torus", 1, 1),
        ],
    )
    def test_rejects_bad_extents(self, mode, t_max, x_max):
        with pytest.raises(InvalidParameterError):
            Box(mode, t_max, x_max)

    def test_continuous_boxes_have_no_cardinality(self):
        with pytest.raises(InvalidParameterError):
            Box(CONTINUOUS, 1, 1).cardinality

    def test_contains(self):
        lattice = Box(LATTICE, 4, 1)
        assert lattice.contains(P(1, -1))
        assert not lattice.contains(P(0, 0))
        assert not lattice.contains(P(1.5, 0))
        continuous = Box(CONTINUOUS, 1, 1)
        assert continuous.contains(P(0, 0))
        assert not continuous.contains(P(0.5, 1.5))
