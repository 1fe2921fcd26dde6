import csv

import numpy as np
import pytest

from qdivstat.frechet import (
    QuadratureRule,
    ScalarFn,
    build_divided_differences,
    d_power,
    finite_difference_check,
    frechet1,
    frechet1_log_quadrature,
    frechet2,
    frechet2_log_quadrature,
    frechet_power_quadrature,
)
from qdivstat.operator_core import eig_hermitian, moore_penrose_inverse

from conftest import rand_herm


def positive_matrix(rng, dim, spread=10.0):
    """Random Hermitian with spectrum in [1/spread, 1] and Haar-ish eigenbasis."""
    U = eig_hermitian(rand_herm(rng, dim)).eigenvectors
    lam = np.exp(rng.uniform(np.log(1 / spread), 0.0, size=dim))
    return (U * lam) @ U.conj().T


class TestTables:
    def test_log_at_identity_all_ones(self):
        T = build_divided_differences(np.eye(3), "log")
        assert np.allclose(T.first, 1.0)

    def test_log_pair_value(self):
        T = build_divided_differences(np.diag([1.0, np.e]), "log")
        assert T.first[0, 1] == pytest.approx(1 / (np.e - 1))
        assert T.first[1, 0] == pytest.approx(1 / (np.e - 1))

    def test_coalescing_rule(self):
        T = build_divided_differences(np.diag([1.0, 1.0 + 1e-14]), "log", coalesce_tol=1e-8)
        # nearly equal eigenvalues switch to f' at the midpoint
        assert T.first[0, 1] == pytest.approx(1.0, abs=1e-10)

    def test_diagonal_is_derivative(self, rng):
        A = positive_matrix(rng, 4)
        T = build_divided_differences(A, ScalarFn.power(0.7))
        lam = T.eigen.eigenvalues
        assert np.allclose(np.diag(T.first), 0.7 * lam ** (-0.3))

    def test_first_table_symmetric(self, rng):
        T = build_divided_differences(positive_matrix(rng, 5), "log")
        assert np.allclose(T.first, T.first.T)

    def test_second_table_permutation_invariant(self, rng):
        T = build_divided_differences(positive_matrix(rng, 4), ScalarFn.power(0.5))
        S = T.second
        for perm in [(0, 2, 1), (1, 0, 2), (2, 1, 0)]:
            assert np.allclose(S, np.transpose(S, perm))

    def test_domain_error(self):
        with pytest.raises(ValueError, match="domain"):
            build_divided_differences(np.diag([1.0, -1.0]), "log")


class TestFrechet1:
    def test_log_at_identity_is_identity_map(self, rng):
        H = rand_herm(rng, 3)
        T = build_divided_differences(np.eye(3), "log")
        assert np.allclose(frechet1(T, H).mat, H)

    def test_square_commuting(self):
        A = np.diag([1.0, 3.0])
        H = np.diag([0.5, -2.0])
        assert np.allclose(d_power(A, H, 2).mat, 2 * A @ H)

    def test_log_offdiagonal(self):
        T = build_divided_differences(np.diag([1.0, 2.0]), "log")
        H = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(frechet1(T, H).mat, np.log(2.0) * H)

    def test_linearity(self, rng):
        A = positive_matrix(rng, 4)
        T = build_divided_differences(A, "log")
        H1, H2 = rand_herm(rng, 4), rand_herm(rng, 4)
        a, b = 0.7, -1.3
        lhs = frechet1(T, a * H1 + b * H2).mat
        rhs = a * frechet1(T, H1).mat + b * frechet1(T, H2).mat
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_commuting_reduction(self, rng):
        lam = np.array([0.5, 1.0, 2.0])
        A = np.diag(lam)
        H = np.diag(rng.normal(size=3))
        T = build_divided_differences(A, "log")
        assert np.max(np.abs(frechet1(T, H).mat - np.diag(1 / lam) @ H)) < 1e-10

    def test_dimension_mismatch(self):
        T = build_divided_differences(np.eye(2), "log")
        with pytest.raises(ValueError):
            frechet1(T, np.eye(3))

    def test_inverse_power_formula(self, rng):
        # D[A^-1](H) = -A^-1 H A^-1
        A = positive_matrix(rng, 4)
        H = rand_herm(rng, 4)
        inv = moore_penrose_inverse(A).mat
        got = d_power(A, H, -1.0).mat
        assert np.max(np.abs(got + inv @ H @ inv)) < 1e-9

    def test_product_rule_cubic(self, rng):
        # D[A^3](H) = A D[A^2](H) + H A^2, the product rule with f = x, g = x^2
        A = positive_matrix(rng, 3)
        H = rand_herm(rng, 3)
        lhs = d_power(A, H, 3.0).mat
        rhs = A @ d_power(A, H, 2).mat + H @ A @ A
        assert np.max(np.abs(lhs - rhs)) < 1e-9


class TestFrechet2:
    def test_log_at_identity(self, rng):
        H = rand_herm(rng, 3)
        T = build_divided_differences(np.eye(3), "log")
        assert np.max(np.abs(frechet2(T, H, H).mat + H @ H)) < 1e-10

    def test_zero_direction(self, rng):
        T = build_divided_differences(positive_matrix(rng, 3), ScalarFn.power(0.5))
        H = rand_herm(rng, 3)
        assert np.allclose(frechet2(T, H, np.zeros((3, 3))).mat, 0.0)

    def test_square_exact(self, rng):
        A = positive_matrix(rng, 4)
        T = build_divided_differences(A, ScalarFn.power(2))
        H1, H2 = rand_herm(rng, 4), rand_herm(rng, 4)
        assert np.max(np.abs(frechet2(T, H1, H2).mat - (H1 @ H2 + H2 @ H1))) < 1e-10

    def test_symmetric_bilinear(self, rng):
        T = build_divided_differences(positive_matrix(rng, 4), "log")
        H1, H2 = rand_herm(rng, 4), rand_herm(rng, 4)
        assert np.allclose(frechet2(T, H1, H2).mat, frechet2(T, H2, H1).mat)


class TestQuadratureOracle:
    def test_rule_invariants(self):
        rule = QuadratureRule.half_line(50)
        assert rule.node_count == 50
        assert np.all(rule.weights > 0)
        assert np.all(np.diff(rule.nodes) > 0)

    def test_log_identity_case(self):
        got = frechet1_log_quadrature(np.eye(2), np.eye(2)).mat
        assert np.max(np.abs(got - np.eye(2))) < 1e-8

    def test_log_diagonal_case(self):
        A = np.diag([1.0, 2.0])
        H = np.diag([3.0, 5.0])
        got = frechet1_log_quadrature(A, H).mat
        assert np.max(np.abs(got - np.diag([3.0, 2.5]))) < 1e-8

    def test_power_identity_case(self):
        got = frechet_power_quadrature(np.eye(2), np.eye(2), 0.5).mat
        assert np.max(np.abs(got - np.eye(2) / 2)) < 1e-9

    def test_power_commuting_case(self, rng):
        lam = np.array([0.4, 1.3, 2.2])
        h = rng.normal(size=3)
        for alpha in (0.3, 0.5, 1.5, -0.5):
            got = frechet_power_quadrature(np.diag(lam), np.diag(h), alpha).mat
            want = np.diag(alpha * lam ** (alpha - 1) * h)
            assert np.max(np.abs(got - want)) < 1e-9, alpha

    def test_error_estimate_reported(self, rng):
        A = positive_matrix(rng, 3)
        H = rand_herm(rng, 3)
        val, est = frechet1_log_quadrature(A, H, return_error_estimate=True)
        T = build_divided_differences(A, "log")
        true_err = np.max(np.abs(val.mat - frechet1(T, H).mat))
        assert true_err < max(est, 1e-9)

    def test_rejects_invalid_inputs(self, rng):
        A = positive_matrix(rng, 2)
        H = rand_herm(rng, 2)
        with pytest.raises(ValueError):
            frechet1_log_quadrature(np.diag([1.0, -0.5]), H)
        with pytest.raises(ValueError):
            frechet_power_quadrature(A, H, 2.5)
        with pytest.raises(ValueError):
            frechet_power_quadrature(A, H, 0.5, order=2)  # H2 missing
        with pytest.raises(ValueError):
            frechet_power_quadrature(A, H, 0.5, order=3, H2=H)

    def test_oracle_agreement_with_csv_log(self, rng, tmp_path):
        # divided differences vs quadrature on random strictly positive inputs,
        # eigenvalue spread up to 1e3; rows are emitted in the exchange format
        path = tmp_path / "oracle_agreement.csv"
        rows = []
        for seed in range(50):
            local = np.random.default_rng(seed)
            d = int(local.choice([2, 3, 4]))
            A = positive_matrix(local, d, spread=1e3)
            H = rand_herm(local, d)
            T = build_divided_differences(A, "log")
            err = float(np.max(np.abs(frechet1(T, H).mat - frechet1_log_quadrature(A, H).mat)))
            rows.append(("log", d, seed, err))
            err2 = float(np.max(np.abs(frechet2(T, H, H).mat - frechet2_log_quadrature(A, H, H).mat)))
            rows.append(("log_second", d, seed, err2))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("fn", "d", "seed", "max_abs_err"))
            w.writerows(rows)
        with open(path, newline="") as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == 100
        assert all(float(r["max_abs_err"]) <= 1e-6 for r in parsed)
        assert all(float(r["max_abs_err"]) <= 1e-7 for r in parsed if r["fn"] == "log")

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.5, -0.5])
    def test_oracle_agreement_powers(self, alpha):
        for seed in range(12):
            local = np.random.default_rng(1000 + seed)
            A = positive_matrix(local, 3, spread=1e3)
            H = rand_herm(local, 3)
            T = build_divided_differences(A, ScalarFn.power(alpha))
            err = np.max(np.abs(frechet1(T, H).mat - frechet_power_quadrature(A, H, alpha).mat))
            assert err <= 1e-6

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.5, -0.5])
    def test_oracle_agreement_powers_second_order(self, alpha):
        # second-order power integrands reach magnitude ~1/lam_min^(2.5); at
        # spread 1e3 the 1e-6 absolute target would sit below the double
        # precision floor, so the cross-check runs at spread 1e2
        for seed in range(12):
            local = np.random.default_rng(2000 + seed)
            A = positive_matrix(local, 3, spread=1e2)
            H = rand_herm(local, 3)
            T = build_divided_differences(A, ScalarFn.power(alpha))
            err2 = np.max(np.abs(frechet2(T, H, H).mat
                                 - frechet_power_quadrature(A, H, alpha, order=2, H2=H).mat))
            assert err2 <= 1e-6


class TestFiniteDifference:
    def test_log_at_identity(self):
        err = finite_difference_check("log", np.eye(2), np.eye(2), 1e-4)
        assert err <= 1e-7

    def test_h_squared_scaling(self, rng):
        A = positive_matrix(rng, 3, spread=5.0)
        H = rand_herm(rng, 3)
        e1 = finite_difference_check(ScalarFn.power(0.5), A, H, 2e-3)
        e2 = finite_difference_check(ScalarFn.power(0.5), A, H, 1e-3)
        assert e1 / e2 == pytest.approx(4.0, rel=0.2)

    def test_near_singular_reports_error_value(self):
        A = np.diag([1.0, 1e-9])
        H = np.diag([0.0, 1e-10])
        err = finite_difference_check("log", A, H, 1e-12)
        assert np.isfinite(err)

    def test_domain_violation_raises(self):
        with pytest.raises(ValueError):
            finite_difference_check("log", np.diag([1.0, 1e-6]), np.eye(2), 0.1)
