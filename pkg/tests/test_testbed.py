"""Tests for the synthetic test problems.

The two real-world suite problems are checked against straight-line
transcriptions of the published polynomial formulas written independently
below (scalar arithmetic, no shared code with the package).
"""

import math

import numpy as np
import pytest

from paretoduel.core import non_dominated_filter
from paretoduel.errors import ConfigError, DomainError
from paretoduel.testbed import get_problem, problem_names


def vehicle_safety_oracle(z):
    """Straight-line transcription; z are native variables in [1, 3]^5."""
    x1, x2, x3, x4, x5 = z
    mass = (
        1640.2823 + 2.3573285 * x1 + 2.3220035 * x2 + 4.5688768 * x3
        + 7.7213633 * x4 + 4.4559504 * x5
    )
    acc = (
        6.5856 + 1.15 * x1 - 1.0427 * x2 + 0.9738 * x3 + 0.8364 * x4
        - 0.3695 * x1 * x4 + 0.0861 * x1 * x5 + 0.3628 * x2 * x4
        - 0.1106 * x1 * x1 - 0.3437 * x3 * x3 + 0.1764 * x4 * x4
    )
    intrusion = (
        -0.0551 + 0.0181 * x1 + 0.1024 * x2 + 0.0421 * x3 - 0.0073 * x1 * x2
        + 0.024 * x2 * x3 - 0.0118 * x2 * x4 - 0.0204 * x3 * x4
        - 0.008 * x3 * x5 - 0.0241 * x3 * x3 + 0.0109 * x4 * x4
    )
    return [-mass, -acc, -intrusion]


def car_side_impact_oracle(z):
    """Straight-line transcription; z are native variables."""
    x1, x2, x3, x4, x5, x6, x7 = z
    f1 = (
        1.98 + 4.9 * x1 + 6.67 * x2 + 6.98 * x3 + 4.01 * x4 + 1.78 * x5
        + 0.00001 * x6 + 2.73 * x7
    )
    f2 = 4.72 - 0.5 * x4 - 0.19 * x2 * x3
    vmbp = 10.58 - 0.674 * x1 * x2 - 0.67275 * x2
    vfd = 16.45 - 0.489 * x3 * x7 - 0.843 * x5 * x6
    f3 = 0.5 * (vmbp + vfd)
    g = [
        1.0 - (1.16 - 0.3717 * x2 * x4 - 0.0092928 * x3),
        0.32 - (0.261 - 0.0159 * x1 * x2 - 0.06486 * x1 - 0.019 * x2 * x7
                + 0.0144 * x3 * x5 + 0.0154464 * x6),
        0.32 - (0.214 + 0.00817 * x5 - 0.045195 * x1 - 0.0135168 * x1
                + 0.03099 * x2 * x6 - 0.018 * x2 * x7 + 0.007176 * x3
                + 0.023232 * x3 - 0.00364 * x5 * x6 - 0.018 * x2 * x2),
        0.32 - (0.74 - 0.61 * x2 - 0.031296 * x3 - 0.031872 * x7
                + 0.227 * x2 * x2),
        32.0 - (28.98 + 3.818 * x3 - 4.2 * x1 * x2 + 1.27296 * x6
                - 2.68065 * x7),
        32.0 - (33.86 + 2.95 * x3 - 5.057 * x1 * x2 - 3.795 * x2
                - 3.4431 * x7 + 1.45728),
        32.0 - (46.36 - 9.9 * x2 - 4.4505 * x1),
        4.0 - f2,
        9.9 - vmbp,
        15.7 - vfd,
    ]
    f4 = sum(max(-gi, 0.0) for gi in g)
    return [-f1, -f2, -f3, -f4]


CAR_LO = [0.5, 0.45, 0.5, 0.5, 0.875, 0.4, 0.4]
CAR_HI = [1.5, 1.35, 1.5, 1.5, 2.625, 1.2, 1.2]


class TestDtlz1:
    def test_g_vanishes_at_half_positions(self):
        p = get_problem("dtlz1")
        for x1 in (0.0, 0.25, 0.5, 1.0):
            x = np.array([x1, 0.5, 0.5, 0.5, 0.5, 0.5])
            np.testing.assert_allclose(
                p.evaluate(x), [-0.5 * x1, -0.5 * (1 - x1)], atol=1e-12
            )

    def test_front_is_negated_simplex(self):
        p = get_problem("dtlz1")
        for x1 in np.linspace(0, 1, 7):
            y = p.evaluate(np.array([x1, 0.5, 0.5, 0.5, 0.5, 0.5]))
            assert y.sum() == pytest.approx(-0.5, abs=1e-12)

    def test_nonpositive_outputs(self):
        p = get_problem("dtlz1")
        X = np.random.default_rng(0).random((200, 6))
        Y = p.evaluate_many(X)
        assert np.all(np.isfinite(Y)) and np.all(Y <= 0.0)


class TestDtlz2:
    def test_axis_point(self):
        p = get_problem("dtlz2")
        np.testing.assert_allclose(
            p.evaluate(np.array([0.0, 0.5, 0.5])), [-1.0, 0.0], atol=1e-12
        )

    def test_diagonal_point(self):
        p = get_problem("dtlz2")
        np.testing.assert_allclose(
            p.evaluate(np.array([0.5, 0.5, 0.5])),
            [-math.cos(math.pi / 4), -math.sin(math.pi / 4)],
            atol=1e-12,
        )

    def test_front_is_unit_quarter_circle(self):
        p = get_problem("dtlz2")
        for x1 in np.linspace(0, 1, 9):
            y = p.evaluate(np.array([x1, 0.5, 0.5]))
            assert y[0] ** 2 + y[1] ** 2 == pytest.approx(1.0, abs=1e-12)
            assert np.all(y <= 0.0)

    def test_out_of_box_rejected(self):
        with pytest.raises(DomainError):
            get_problem("dtlz2").evaluate(np.array([0.5, 0.5, 1.5]))


class TestVehicleSafety:
    def test_midpoint_deterministic(self):
        p = get_problem("vehicle_safety")
        mid = np.full(5, 0.5)
        a, b = p.evaluate(mid), p.evaluate(mid)
        assert a.shape == (3,) and np.all(np.isfinite(a))
        np.testing.assert_array_equal(a, b)

    def test_matches_transcription_oracle(self):
        p = get_problem("vehicle_safety")
        rng = np.random.default_rng(11)
        for x in rng.random((10, 5)):
            native = 1.0 + 2.0 * x
            np.testing.assert_allclose(
                p.evaluate(x), vehicle_safety_oracle(native), rtol=1e-12
            )

    def test_output_shape(self):
        p = get_problem("vehicle_safety")
        X = np.random.default_rng(1).random((100, 5))
        assert p.evaluate_many(X).shape == (100, 3)


class TestCarSideImpact:
    def test_midpoint_deterministic(self):
        p = get_problem("car_side_impact")
        y = p.evaluate(np.full(7, 0.5))
        assert y.shape == (4,) and np.all(np.isfinite(y))

    def test_matches_transcription_oracle(self):
        p = get_problem("car_side_impact")
        rng = np.random.default_rng(12)
        for x in rng.random((10, 7)):
            native = [
                CAR_LO[i] + (CAR_HI[i] - CAR_LO[i]) * x[i] for i in range(7)
            ]
            np.testing.assert_allclose(
                p.evaluate(x), car_side_impact_oracle(native), rtol=1e-12
            )

    def test_output_shape(self):
        p = get_problem("car_side_impact")
        X = np.random.default_rng(2).random((50, 7))
        assert p.evaluate_many(X).shape == (50, 4)


class TestProblemRegistry:
    def test_names(self):
        assert problem_names() == [
            "car_side_impact", "dtlz1", "dtlz2", "vehicle_safety",
        ]

    def test_unknown_rejected(self):
        with pytest.raises(ConfigError):
            get_problem("zdt1")

    def test_dimensions_match_protocol(self):
        dims = {
            "dtlz1": (6, 2),
            "dtlz2": (3, 2),
            "vehicle_safety": (5, 3),
            "car_side_impact": (7, 4),
        }
        for name, (d, m) in dims.items():
            p = get_problem(name)
            assert (p.d, p.m) == (d, m)

    def test_dtlz2_norm_invariant_at_half_positions(self):
        p = get_problem("dtlz2")
        rng = np.random.default_rng(3)
        for x1 in rng.random(20):
            y = p.evaluate(np.array([x1, 0.5, 0.5]))
            assert np.linalg.norm(y) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("name", problem_names())
    def test_reference_dominated_by_sampled_front(self, name):
        p = get_problem(name)
        X = p.space.sample_uniform(np.random.default_rng(77), 10_000)
        Y = p.evaluate_many(X)
        nd = Y[non_dominated_filter(Y)]
        assert np.all(nd >= p.hv_reference)
