import numpy as np
import pytest

from kdvflow.spectral import (
    BasisSpec,
    GridField,
    SpectralField,
    analyze,
    apply_derivative,
    basis_eval,
    default_node_count,
    derivative_matrix,
    inner_product,
    synthesize,
    unit_field,
    zero_field,
)

from conftest import random_field


class TestBasisEval:
    def test_constant_mode(self):
        spec = BasisSpec(40.0, 2)
        # w_0 = sqrt(1/(2l)), independent of x
        assert basis_eval(spec, 0, 17.3) == pytest.approx(np.sqrt(1 / 80), abs=1e-15)
        assert basis_eval(spec, 0, -5.0) == basis_eval(spec, 0, 30.0)

    def test_first_sine_vanishes_at_left_endpoint(self):
        spec = BasisSpec(40.0, 2)
        assert basis_eval(spec, 1, -40.0) == pytest.approx(0.0, abs=1e-15)

    def test_first_cosine_at_origin(self):
        # sqrt(1/40) * cos(pi) evaluated independently
        spec = BasisSpec(40.0, 2)
        assert basis_eval(spec, 2, 0.0) == pytest.approx(-0.15811388300841897, abs=1e-15)

    def test_index_out_of_range(self):
        spec = BasisSpec(40.0, 2)
        with pytest.raises(IndexError):
            basis_eval(spec, 5, 0.0)
        with pytest.raises(IndexError):
            basis_eval(spec, -1, 0.0)

    @pytest.mark.parametrize("N,l", [(3, 2.5), (8, 40.0)])
    def test_orthonormality(self, N, l):
        spec = BasisSpec(l, N)
        M = default_node_count(N)
        x = spec.nodes(M)
        w = 2 * l / M
        for i in range(spec.dim):
            for j in range(i, spec.dim):
                quad = w * np.sum(basis_eval(spec, i, x) * basis_eval(spec, j, x))
                assert quad == pytest.approx(1.0 if i == j else 0.0, abs=1e-13)


class TestTransforms:
    def test_constant_coefficients_give_constant_grid(self):
        spec = BasisSpec(40.0, 4)
        u = 3.5 * unit_field(spec, 0)
        g = synthesize(u, 32)
        assert np.allclose(g.values, 3.5 * np.sqrt(1 / 80), atol=1e-15)

    def test_zero_round_trip(self):
        spec = BasisSpec(2.5, 3)
        g = synthesize(zero_field(spec), 16)
        assert np.all(g.values == 0.0)
        assert np.all(analyze(g).coeffs == 0.0)

    @pytest.mark.parametrize("N,l,M", [(1, 2.5, 16), (8, 40.0, 36), (16, 10.0, 68)])
    def test_round_trip(self, N, l, M, rng):
        spec = BasisSpec(l, N)
        u = random_field(spec, rng)
        back = analyze(synthesize(u, M))
        tol = 1e-12 * (1 + np.max(np.abs(u.coeffs)))
        assert np.max(np.abs(back.coeffs - u.coeffs)) <= tol

    def test_analyze_single_sine(self):
        spec = BasisSpec(2.5, 1)
        x = spec.nodes(16)
        g = GridField(spec, basis_eval(spec, 1, x))
        c = analyze(g).coeffs
        expected = np.zeros(3)
        expected[1] = 1.0
        assert np.max(np.abs(c - expected)) <= 1e-13

    def test_analyze_constant_one(self):
        # 1 = sqrt(2l) * w_0
        spec = BasisSpec(40.0, 2)
        g = GridField(spec, np.ones(16))
        c = analyze(g).coeffs
        assert c[0] == pytest.approx(np.sqrt(80.0), abs=1e-13)
        assert np.max(np.abs(c[1:])) <= 1e-13

    def test_synthesize_rejects_small_grids(self):
        spec = BasisSpec(40.0, 8)
        with pytest.raises(ValueError, match="too small"):
            synthesize(unit_field(spec, 0), 3 * 8 + 1)


class TestDerivative:
    def test_constant_mode_annihilated(self):
        spec = BasisSpec(40.0, 4)
        for k in (1, 2, 3):
            out = apply_derivative(unit_field(spec, 0), k)
            assert np.all(out.coeffs == 0.0)

    def test_first_pair_block(self):
        # d/dx of the first sine is +(pi/l) times the first cosine; the
        # sign is pinned below by finite differences of basis_eval
        spec = BasisSpec(40.0, 4)
        out = apply_derivative(unit_field(spec, 1))
        expected = np.zeros(spec.dim)
        expected[2] = np.pi / 40.0
        assert np.allclose(out.coeffs, expected, atol=1e-15)

        eps = 1e-6
        fd = (basis_eval(spec, 1, 3.0 + eps) - basis_eval(spec, 1, 3.0 - eps)) / (2 * eps)
        assert fd == pytest.approx((np.pi / 40.0) * basis_eval(spec, 2, 3.0), rel=1e-8)

    def test_second_derivative_matches_finite_differences(self, rng):
        spec = BasisSpec(10.0, 8)
        u = random_field(spec, rng)
        d2 = apply_derivative(u, 2)
        x = np.linspace(-9.0, 9.0, 41)
        eps = 1e-4

        def eval_at(field, pts):
            pts = np.asarray(pts)
            return sum(
                field.coeffs[j] * basis_eval(spec, j, pts) for j in range(spec.dim)
            )

        fd = (eval_at(u, x + eps) - 2 * eval_at(u, x) + eval_at(u, x - eps)) / eps**2
        exact = eval_at(d2, x)
        assert np.max(np.abs(fd - exact)) <= 1e-6 * (1 + np.max(np.abs(exact)))

    @pytest.mark.parametrize("N,l", [(4, 2.5), (8, 40.0)])
    def test_first_derivative_consistency(self, N, l, rng):
        # synthesized derivative against the analytic derivative of the sum
        spec = BasisSpec(l, N)
        u = random_field(spec, rng)
        M = default_node_count(N)
        x = spec.nodes(M)
        d = np.pi / l * np.arange(1, N + 1)
        theta = np.outer(x + l, d)
        analytic = np.sqrt(1 / l) * (
            np.cos(theta) * (d * u.coeffs[1::2]) - np.sin(theta) * (d * u.coeffs[2::2])
        ).sum(axis=1)
        got = synthesize(apply_derivative(u), M).values
        assert np.max(np.abs(got - analytic)) <= 1e-10

    def test_skew_symmetry_dense(self):
        spec = BasisSpec(7.0, 5)
        D = derivative_matrix(spec)
        assert np.array_equal(D.T, -D)
        assert np.all(D[0, :] == 0.0)
        assert np.all(D[:, 0] == 0.0)

    def test_skew_symmetry_via_unit_vectors(self):
        spec = BasisSpec(7.0, 5)
        Dt = derivative_matrix(spec, transpose=True)
        for i in range(spec.dim):
            ei = unit_field(spec, i)
            col = apply_derivative(ei).coeffs
            assert np.array_equal(col, Dt @ ei.coeffs)
        # e_i . (D e_j) == -e_j . (D e_i)
        D = derivative_matrix(spec)
        for i in range(spec.dim):
            for j in range(spec.dim):
                assert D[i, j] == -D[j, i]

    def test_negative_order_rejected(self):
        spec = BasisSpec(7.0, 5)
        with pytest.raises(ValueError):
            apply_derivative(unit_field(spec, 0), -1)


class TestInnerProduct:
    def test_zero(self, spec_small, rng):
        u = random_field(spec_small, rng)
        f = synthesize(u, 16)
        z = GridField(spec_small, np.zeros(16))
        assert inner_product(f, z) == 0.0

    def test_parseval(self, rng):
        spec = BasisSpec(40.0, 8)
        u = random_field(spec, rng)
        v = random_field(spec, rng)
        lhs = inner_product(synthesize(u), synthesize(v))
        rhs = float(u.coeffs @ v.coeffs)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)

    def test_self_inner_product_is_squared_norm(self, rng):
        spec = BasisSpec(2.5, 3)
        u = random_field(spec, rng)
        g = synthesize(u, 24)
        assert inner_product(g, g) == pytest.approx(u.norm() ** 2, rel=1e-12)

    def test_mismatched_grids_rejected(self, spec_small, rng):
        u = random_field(spec_small, rng)
        with pytest.raises(ValueError, match="incompatible"):
            inner_product(synthesize(u, 16), synthesize(u, 24))
        other = BasisSpec(2.5, 4)
        with pytest.raises(ValueError, match="incompatible"):
            inner_product(synthesize(u, 16), synthesize(random_field(other, rng), 16))


class TestFieldTypes:
    def test_coefficient_length_enforced(self):
        spec = BasisSpec(1.0, 2)
        with pytest.raises(ValueError, match="coefficients"):
            SpectralField(spec, np.zeros(4))

    def test_nonfinite_rejected(self):
        spec = BasisSpec(1.0, 2)
        with pytest.raises(ValueError, match="finite"):
            SpectralField(spec, [0.0, np.nan, 0.0, 0.0, 0.0])

    def test_immutability(self):
        spec = BasisSpec(1.0, 2)
        u = unit_field(spec, 1)
        with pytest.raises(ValueError):
            u.coeffs[0] = 1.0

    def test_grid_invariant(self):
        spec = BasisSpec(1.0, 4)
        with pytest.raises(ValueError, match="too small"):
            GridField(spec, np.zeros(13))
        GridField(spec, np.zeros(14))  # 3N+2 is allowed

    def test_arithmetic_requires_same_basis(self):
        a = unit_field(BasisSpec(1.0, 2), 0)
        b = unit_field(BasisSpec(2.0, 2), 0)
        with pytest.raises(ValueError, match="different bases"):
            a + b
