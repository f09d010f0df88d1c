import numpy as np
import pytest

from kdvflow.projection import (
    RankDeficiencyError,
    build_frame,
    project_onto_span,
    project_tangent,
    project_via_gram,
)
from kdvflow.spectral import BasisSpec, unit_field, zero_field

from conftest import random_field


@pytest.fixture
def spec():
    return BasisSpec(10.0, 6)


class TestBuildFrame:
    def test_single_unit_input(self, spec):
        frame = build_frame([unit_field(spec, 0)])
        assert frame.retained_rank == 1
        assert frame.dropped == ()
        assert np.array_equal(frame.directions[0].coeffs, unit_field(spec, 0).coeffs)

    def test_dependent_input_dropped(self, spec):
        frame = build_frame([unit_field(spec, 0), 2.0 * unit_field(spec, 0)])
        assert frame.retained_rank == 1
        assert frame.dropped == (1,)

    def test_all_zero_inputs_give_empty_frame(self, spec):
        frame = build_frame([zero_field(spec), zero_field(spec)])
        assert frame.retained_rank == 0
        assert frame.dropped == (0, 1)
        # empty frame projects as the identity
        v = unit_field(spec, 3)
        assert np.array_equal(project_tangent(frame, v).coeffs, v.coeffs)

    def test_orthonormality(self, spec, rng):
        inputs = [random_field(spec, rng) for _ in range(3)]
        frame = build_frame(inputs)
        assert frame.retained_rank == 3
        for i, wi in enumerate(frame.directions):
            for j, wj in enumerate(frame.directions):
                assert wi.dot(wj) == pytest.approx(
                    1.0 if i == j else 0.0, abs=1e-12
                )

    def test_span_matches_normal_equations_route(self, spec, rng):
        inputs = [random_field(spec, rng) for _ in range(3)]
        frame = build_frame(inputs)
        for _ in range(5):
            v = random_field(spec, rng)
            a = project_onto_span(frame, v)
            b = project_via_gram(inputs, v)
            assert (a - b).norm() <= 1e-11 * v.norm()

    def test_empty_input_list_rejected(self):
        with pytest.raises(ValueError):
            build_frame([])

    def test_drop_tol_must_be_positive(self, spec):
        with pytest.raises(ValueError):
            build_frame([unit_field(spec, 0)], drop_tol=0.0)


class TestProjectTangent:
    def test_frame_direction_annihilated(self, spec, rng):
        frame = build_frame([random_field(spec, rng) for _ in range(3)])
        w1 = frame.directions[0]
        assert project_tangent(frame, w1).norm() <= 1e-13

    def test_orthogonal_vector_unchanged(self, spec, rng):
        frame = build_frame([random_field(spec, rng) for _ in range(2)])
        v = project_tangent(frame, random_field(spec, rng))  # already tangent
        again = project_tangent(frame, v)
        assert (again - v).norm() <= 1e-13 * (1 + v.norm())

    def test_matches_complement_of_gram_route(self, spec, rng):
        inputs = [random_field(spec, rng) for _ in range(3)]
        frame = build_frame(inputs)
        v = random_field(spec, rng)
        expected = v - project_via_gram(inputs, v)
        got = project_tangent(frame, v)
        assert (got - expected).norm() <= 1e-11 * v.norm()

    def test_annihilation_property(self, spec, rng):
        frame = build_frame([random_field(spec, rng) for _ in range(3)])
        for _ in range(10):
            v = random_field(spec, rng)
            t = project_tangent(frame, v)
            for w in frame.directions:
                assert abs(t.dot(w)) <= 1e-12 * v.norm()

    def test_idempotence(self, spec, rng):
        frame = build_frame([random_field(spec, rng) for _ in range(3)])
        v = random_field(spec, rng)
        once = project_tangent(frame, v)
        twice = project_tangent(frame, once)
        assert (twice - once).norm() <= 1e-12 * v.norm()

    def test_complementarity(self, spec, rng):
        frame = build_frame([random_field(spec, rng) for _ in range(3)])
        v = random_field(spec, rng)
        recomposed = project_tangent(frame, v) + project_onto_span(frame, v)
        assert (recomposed - v).norm() <= 1e-13 * (1 + v.norm())


class TestGramRoute:
    def test_projection_onto_constant_direction(self, spec):
        e0, e1 = unit_field(spec, 0), unit_field(spec, 1)
        out = project_via_gram([e0], e0 + e1)
        assert np.allclose(out.coeffs, e0.coeffs, atol=1e-14)

    def test_orthogonal_vector_annihilated(self, spec):
        out = project_via_gram([unit_field(spec, 0)], unit_field(spec, 1))
        assert out.norm() <= 1e-14

    def test_projector_is_idempotent_and_symmetric(self, spec, rng):
        inputs = [random_field(spec, rng) for _ in range(3)]
        dim = spec.dim
        P = np.column_stack(
            [project_via_gram(inputs, unit_field(spec, j)).coeffs for j in range(dim)]
        )
        assert np.max(np.abs(P @ P - P)) <= 1e-11
        assert np.max(np.abs(P - P.T)) <= 1e-11

    def test_rank_deficiency_raises(self, spec):
        e0 = unit_field(spec, 0)
        with pytest.raises(RankDeficiencyError, match="build_frame"):
            project_via_gram([e0, 2.0 * e0], unit_field(spec, 1))

    def test_empty_inputs_rejected(self, spec):
        with pytest.raises(ValueError):
            project_via_gram([], unit_field(spec, 0))


class TestFrameValidation:
    def test_mixed_bases_rejected(self, spec, rng):
        other = BasisSpec(10.0, 7)
        with pytest.raises(ValueError, match="different bases"):
            build_frame([random_field(spec, rng), random_field(other, rng)])

    def test_projection_checks_basis(self, spec, rng):
        frame = build_frame([random_field(spec, rng)])
        other = BasisSpec(10.0, 7)
        with pytest.raises(ValueError, match="different bases"):
            project_tangent(frame, random_field(other, rng))
