import numpy as np
import pytest
from hypothesis import given, settings

from conftest import algebra, group
from eqr.geometry import (
    AlgebraElement,
    AngleNearPi,
    GroupElement,
    adjoint,
    adjoint_matrix,
    bracket,
    compose,
    distance,
    embed,
    embed_alg,
    exp,
    exp_so3,
    hat,
    inverse,
    left_jacobian_inv_so3,
    left_jacobian_so3,
    log,
    log_so3,
    project_to_so3,
    unembed,
    unembed_alg,
    vee,
)

TOL = 1e-9


def close(X, Y, tol=TOL):
    return np.max(np.abs(embed(X) - embed(Y))) < tol


def expm(M, terms=40):
    out, term = np.eye(len(M)), np.eye(len(M))
    for k in range(1, terms):
        term = term @ M / k
        out = out + term
    return out


class TestSO3:
    def test_hat_vee(self):
        w = np.array([0.3, -1.2, 2.0])
        assert np.allclose(hat(w) @ [1.0, 2.0, 3.0], np.cross(w, [1.0, 2.0, 3.0]))
        assert np.allclose(vee(hat(w)), w)

    def test_exp_matches_series(self):
        w = np.array([0.4, -0.7, 1.1])
        assert np.allclose(exp_so3(w), expm(hat(w)), atol=1e-13)

    @pytest.mark.parametrize("angle", [0.0, 1e-9, 1e-5, 1e-2, 1.0, 3.0])
    def test_log_round_trip(self, angle):
        axis = np.array([1.0, 2.0, -2.0]) / 3.0
        assert np.allclose(log_so3(exp_so3(angle * axis)), angle * axis, atol=1e-12)

    def test_log_rejects_half_turn(self):
        with pytest.raises(AngleNearPi):
            log_so3(exp_so3([np.pi, 0.0, 0.0]))

    @pytest.mark.parametrize("angle", [1e-8, 1e-4, 0.5, 2.5])
    def test_left_jacobian_inverse(self, angle):
        w = angle * np.array([0.6, 0.0, 0.8])
        assert np.allclose(left_jacobian_so3(w) @ left_jacobian_inv_so3(w), np.eye(3), atol=1e-12)

    def test_left_jacobian_integral(self):
        w = np.array([0.3, 1.1, -0.4])
        s = np.linspace(0.0, 1.0, 2001)
        vals = np.array([exp_so3(si * w) for si in s])
        integral = np.trapezoid(vals, s, axis=0)
        assert np.allclose(left_jacobian_so3(w), integral, atol=1e-6)

    def test_project(self):
        R = exp_so3([0.2, 0.3, 0.4]) + 1e-3 * np.arange(9.0).reshape(3, 3)
        P = project_to_so3(R)
        assert np.allclose(P.T @ P, np.eye(3), atol=1e-12)
        assert np.linalg.det(P) > 0


class TestGroupAxioms:
    @settings(max_examples=60, deadline=None)
    @given(group(), group(), group())
    def test_associativity(self, X, Y, Z):
        assert close(compose(compose(X, Y), Z), compose(X, compose(Y, Z)))

    @settings(max_examples=60, deadline=None)
    @given(group())
    def test_identity_and_inverse(self, X):
        Id = GroupElement.identity()
        assert close(compose(X, Id), X) and close(compose(Id, X), X)
        assert close(compose(X, inverse(X)), Id)
        assert close(compose(inverse(X), X), Id)

    @settings(max_examples=60, deadline=None)
    @given(group(), group())
    def test_embedding_is_homomorphism(self, X, Y):
        assert np.allclose(embed(compose(X, Y)), embed(X) @ embed(Y), atol=TOL)
        assert close(unembed(embed(X)), X)


class TestExpLog:
    @settings(max_examples=80, deadline=None)
    @given(algebra())
    def test_round_trip(self, U):
        V = log(exp(U))
        assert np.allclose(V.as_vector(), U.as_vector(), atol=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(algebra(angle=1.5))
    def test_exp_matches_matrix_exponential(self, U):
        assert np.allclose(embed(exp(U)), expm(embed_alg(U)), atol=1e-9)

    def test_small_angle(self):
        U = AlgebraElement(np.array([1e-12, 0.0, 0.0]), np.ones(3), np.arange(3.0))
        assert np.allclose(log(exp(U)).as_vector(), U.as_vector(), atol=1e-14)

    def test_distance(self):
        X = exp(AlgebraElement(np.array([0.1, 0.0, 0.0]), np.zeros(3), np.array([0.0, 2.0, 0.0])))
        assert distance(X, X) == 0.0
        assert distance(X, GroupElement.identity()) > 0.0


class TestAdjoint:
    @settings(max_examples=40, deadline=None)
    @given(group(), algebra())
    def test_conjugation(self, X, U):
        lhs = embed_alg(adjoint(X, U))
        M = embed(X)
        assert np.allclose(lhs, M @ embed_alg(U) @ np.linalg.inv(M), atol=1e-8)
        assert np.allclose(adjoint_matrix(X) @ U.as_vector(), adjoint(X, U).as_vector(), atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(algebra(), algebra())
    def test_bracket_is_commutator(self, U, V):
        A, B = embed_alg(U), embed_alg(V)
        assert np.allclose(embed_alg(bracket(U, V)), A @ B - B @ A, atol=1e-9)

    def test_algebra_arithmetic(self):
        U = AlgebraElement.from_vector(np.arange(9.0))
        assert np.allclose((U + U - U).as_vector(), U.as_vector())
        assert np.allclose((2.0 * U).as_vector(), 2.0 * np.arange(9.0))
        assert np.allclose(unembed_alg(embed_alg(U)).as_vector(), U.as_vector())
