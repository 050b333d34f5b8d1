import math

import numpy as np
import pytest

from pseudoconformal import catalog
from pseudoconformal.conformal import lift_point
from pseudoconformal.errors import DegenerateBasisError
from pseudoconformal.hypersurface import (
    Immersion,
    causal_type_of_metric,
    classify_point,
    induced_metric,
    lightlike_kernel,
    survey,
)
from pseudoconformal.linalg import scalar_product


def polar_cone_immersion():
    """Light cone in polar parameters (r cos t, r sin t, r), hand jets."""

    def value(u):
        r, t = u
        return np.array([r * math.cos(t), r * math.sin(t), r])

    def jacobian(u):
        r, t = u
        return np.array(
            [
                [math.cos(t), -r * math.sin(t)],
                [math.sin(t), r * math.cos(t)],
                [1.0, 0.0],
            ]
        )

    return Immersion(n=3, domain=((0.2, 2.0), (0.0, 6.0)), value=value,
                     jacobian=jacobian, name="polar_cone")


class TestInducedMetric:
    def test_spacelike_slice_is_identity(self, model3):
        imm = catalog.build("spacelike_slice")
        m = induced_metric(imm, np.array([0.3, -0.4]), model=model3)
        assert np.abs(m - np.eye(2)).max() < 1e-12

    def test_timelike_hyperplane_is_lorentz(self, model3):
        imm = catalog.build("timelike_hyperplane")
        m = induced_metric(imm, np.array([0.1, 0.2]), model=model3)
        assert np.abs(m - np.diag([1.0, -1.0])).max() < 1e-12

    def test_polar_light_cone_degenerates_along_ray(self, model3):
        imm = polar_cone_immersion()
        u = np.array([0.8, 1.1])
        m = induced_metric(imm, u, model=model3)
        assert np.abs(m - np.diag([0.0, 0.8**2])).max() < 1e-12

    def test_finite_difference_jets_agree(self, model3):
        imm = polar_cone_immersion()
        fd = Immersion(n=3, domain=imm.domain, value=imm.value)
        u = np.array([0.9, 0.7])
        assert np.abs(
            induced_metric(imm, u, model=model3) - induced_metric(fd, u, model=model3)
        ).max() < 1e-8


class TestClassifyPoint:
    def test_slice_is_spacelike(self, model3):
        imm = catalog.build("spacelike_slice")
        assert classify_point(imm, np.array([0.0, 0.0]), model=model3).kind == "spacelike"

    def test_hyperplane_is_timelike(self, model3):
        imm = catalog.build("timelike_hyperplane")
        assert classify_point(imm, np.array([0.5, -0.5]), model=model3).kind == "timelike"

    def test_cone_is_lightlike_away_from_vertex(self, model3):
        imm = polar_cone_immersion()
        assert classify_point(imm, np.array([1.3, 0.4]), model=model3).kind == "lightlike"

    def test_causal_type_inertia_mapping(self):
        assert causal_type_of_metric(np.eye(3), 1e-7).kind == "spacelike"
        assert causal_type_of_metric(np.diag([1.0, 1.0, -1.0]), 1e-7).kind == "timelike"
        assert causal_type_of_metric(np.diag([1.0, 1.0, 0.0]), 1e-7).kind == "lightlike"
        assert causal_type_of_metric(np.diag([1.0, 0.0, 0.0]), 1e-7).kind == (
            "degenerate_beyond_lightlike"
        )
        assert causal_type_of_metric(np.diag([1.0, -1.0, -1.0]), 1e-7).kind == (
            "degenerate_beyond_lightlike"
        )

    def test_reparametrization_invariance(self, model3, rng):
        imm = catalog.build("tilted_null_family")
        a = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        b = np.array([1.0, 0.9])

        def value(u):
            return imm.value(a @ u + b)

        def jacobian(u):
            return imm.jacobian(a @ u + b) @ a

        reparam = Immersion(n=3, domain=((-0.2, 0.2), (-0.2, 0.2)),
                            value=value, jacobian=jacobian)
        u = np.array([0.05, -0.1])
        assert (
            classify_point(reparam, u, model=model3).kind
            == classify_point(imm, a @ u + b, model=model3).kind
        )

    def test_rank_deficient_jacobian_raises(self, model3):
        def value(u):
            return np.array([u[0], u[0], 0.0])

        imm = Immersion(n=3, domain=((-1, 1), (-1, 1)), value=value)
        with pytest.raises(DegenerateBasisError):
            classify_point(imm, np.array([0.2, 0.3]), model=model3)

    def test_lightlike_kernel_maps_to_null_vector(self, model3):
        imm = catalog.build("light_cone")
        u = np.array([1.1, 0.7])
        k = lightlike_kernel(imm, u, model=model3)
        v = imm.jet1(u) @ k
        assert abs(scalar_product(v, v, model3.metric)) < 1e-8 * float(v @ v)

    def test_homogeneous_lift_agrees_with_flat_computation(self, model3):
        flat = catalog.build("tilted_null_family")

        def lifted_value(u):
            return lift_point(flat.value(u), model3)

        lifted = Immersion(n=3, domain=flat.domain, value=lifted_value,
                           homogeneous=True)
        u = np.array([0.8, 1.0])
        m_flat = induced_metric(flat, u, model=model3)
        m_lift = induced_metric(lifted, u, model=model3)
        assert np.abs(m_flat - m_lift).max() < 1e-6
        assert classify_point(lifted, u, model=model3).kind == "lightlike"

    def test_conformal_rescaling_scales_metric_by_square(self, model3):
        flat = catalog.build("spacelike_slice")

        def sigma(u):
            return 1.0 + 0.25 * float(u[0])

        def lifted_value(u):
            return sigma(u) * lift_point(flat.value(u), model3)

        lifted = Immersion(n=3, domain=flat.domain, value=lifted_value,
                           homogeneous=True)
        u = np.array([0.3, -0.2])
        m_flat = induced_metric(flat, u, model=model3)
        m_lift = induced_metric(lifted, u, model=model3)
        assert np.abs(m_lift - sigma(u) ** 2 * m_flat).max() < 1e-7


class TestSurvey:
    def test_spacelike_hypersphere_pure(self, model3):
        report = survey(catalog.build("spacelike_hypersphere"), (12, 12), model=model3)
        assert report.pure == "spacelike"
        assert report.fractions()["spacelike"] == 1.0

    def test_timelike_hypersphere_pure(self, model3):
        report = survey(catalog.build("timelike_hypersphere"), (12, 12), model=model3)
        assert report.pure == "timelike"

    def test_light_cone_pure_lightlike(self, model3):
        report = survey(catalog.build("light_cone"), (10, 10), model=model3)
        assert report.pure == "lightlike"

    def test_euclidean_sphere_mixed_with_two_transition_circles(self, model3):
        imm = catalog.build("euclidean_sphere")
        report = survey(imm, (60, 12), model=model3)
        assert report.mixed
        assert report.counts["spacelike"] > 0 and report.counts["timelike"] > 0
        # tangency latitudes of the round sphere against the cones
        crossings = [t for t in report.transitions if t.axis == 0]
        assert crossings
        lows = np.array([t.u_low[0] for t in crossings])
        highs = np.array([t.u_high[0] for t in crossings])
        near_first = np.sum((lows <= math.pi / 4) & (math.pi / 4 <= highs))
        near_second = np.sum((lows <= 3 * math.pi / 4) & (3 * math.pi / 4 <= highs))
        assert near_first > 0 and near_second > 0
        for t in crossings:
            bracket_first = t.u_low[0] <= math.pi / 4 <= t.u_high[0]
            bracket_second = t.u_low[0] <= 3 * math.pi / 4 <= t.u_high[0]
            assert bracket_first or bracket_second

    def test_errors_recorded_not_fatal(self, model3):
        def value(u):
            return np.array([u[0], u[0], 0.0]) if u[1] > 0 else np.array([u[0], u[1], 0.0])

        imm = Immersion(n=3, domain=((-1, 1), (-1, 1)), value=value)
        report = survey(imm, (3, 4), model=model3)
        assert report.errors
        assert report.counts["spacelike"] > 0

    def test_parallel_survey_matches_serial(self, model3):
        imm = catalog.build("euclidean_sphere")
        serial = survey(imm, (8, 8), model=model3, workers=1)
        parallel = survey(imm, (8, 8), model=model3, workers=2)
        assert [p.causal.kind for p in serial.points] == [
            p.causal.kind for p in parallel.points
        ]

    def test_csv_rows_shape(self, model3):
        report = survey(catalog.build("spacelike_slice"), (3, 3), model=model3)
        rows = report.to_csv_rows()
        assert len(rows) == 9
        assert len(rows[0]) == 2 + 5
