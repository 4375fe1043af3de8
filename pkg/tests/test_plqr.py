import numpy as np
import pytest

from eqr.flatness import Helix, Hover, flat_to_state, sample_trajectory
from eqr.lqr import WeightSet
from eqr.plqr import embedded_error, linearize_plqr, plqr_control, plqr_gains, projector
from eqr.vehicle import Input, Params, State, dynamics

P = Params()


class TestProjector:
    def test_idempotent_symmetric(self):
        eta = np.array([0.0, 0.6, 0.8])
        Pr = projector(eta)
        assert np.allclose(Pr @ Pr, Pr) and np.allclose(Pr, Pr.T)
        assert np.allclose(Pr[0:3, 0:3] @ eta, 0.0)
        assert np.array_equal(Pr[3:, 3:], np.eye(6))


class TestLinearization:
    @pytest.mark.parametrize("t", [0.0, 1.3, 4.0])
    def test_matches_differences_on_tangent_space(self, t):
        pt = flat_to_state(Helix(), t, P)
        A, B = linearize_plqr(pt.state, pt.input, P)
        Pr = projector(pt.state.eta)
        base = pt.state.as_vector()
        h = 1e-6
        for k in range(9):
            d = h * Pr[:, k]
            fd = (dynamics(State.from_vector(base + d), pt.input, P)
                  - dynamics(State.from_vector(base - d), pt.input, P)) / (2 * h)
            assert np.allclose(A @ Pr[:, k], fd, atol=1e-7)
        for k in range(4):
            du = np.zeros(4)
            du[k] = h
            fd = (dynamics(pt.state, Input.from_vector(pt.input.as_vector() + du), P)
                  - dynamics(pt.state, Input.from_vector(pt.input.as_vector() - du), P)) / (2 * h)
            assert np.allclose(B[:, k], fd, atol=1e-7)

    def test_flipped_sign_variant(self):
        pt = flat_to_state(Helix(), 0.0, P)
        A, _ = linearize_plqr(pt.state, pt.input, P)
        A_flip, _ = linearize_plqr(pt.state, pt.input, P, flip_attitude_sign=True)
        assert np.allclose(A_flip[0:3, 0:3], -A[0:3, 0:3]) and np.array_equal(A_flip[3:], A[3:])


class TestGains:
    def test_terminal_and_cost_symmetry(self):
        d = sample_trajectory(Helix(), 0.0, 2.0, 0.01, P)
        W = WeightSet.default()
        s = plqr_gains(d, W, P)
        Pr = projector(d.eta[-1])
        assert np.allclose(s.P[-1], Pr @ W.F @ Pr)
        assert all(np.array_equal(Pk, Pk.T) for Pk in s.P)

    def test_hover_stationary(self):
        d = sample_trajectory(Hover(), 0.0, 60.0, 0.01, P)
        s = plqr_gains(d, WeightSet.default(), P)
        assert np.linalg.norm(s.P[0] - s.P[100]) < 1e-6 * np.linalg.norm(s.P[0])
        A, B = linearize_plqr(d.point(0).state, d.point(0).input, P)
        # closed loop restricted to the tangent space (eta_3 direction removed)
        keep = [0, 1, 3, 4, 5, 6, 7, 8]
        Acl = (A - B @ s.K[0])[np.ix_(keep, keep)]
        assert np.max(np.linalg.eigvals(Acl).real) < -1e-3


class TestControl:
    def test_on_reference(self):
        pt = flat_to_state(Helix(), 0.5, P)
        u = plqr_control(pt.state, pt, np.ones((4, 9)))
        assert np.allclose(u.as_vector(), pt.input.as_vector())
        assert np.array_equal(embedded_error(pt.state, pt.state), np.zeros(9))

    def test_thrust_clamped(self):
        pt = flat_to_state(Hover(), 0.0, P)
        off = State(pt.state.eta, pt.state.vel, pt.state.pos - [0.0, 0.0, 100.0])
        K = np.zeros((4, 9))
        K[3, 8] = -1.0
        assert plqr_control(off, pt, K).thrust == 0.0
