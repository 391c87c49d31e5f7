"""AdamW and schedule behavior against a hand-unrolled oracle."""

import numpy as np
import pytest

from fmrialign.errors import NonFiniteError, ShapeMismatchError
from fmrialign.numerics import Tensor, adamw_init, adamw_step, linear_lr


def make_param(values):
    # copy: adamw_step updates in place and must not move the test baseline
    return {"p": Tensor(np.array(values, dtype=np.float64), requires_grad=True)}


class TestAdamW:
    def test_zero_grad_shrinks_by_exactly_lr_wd(self):
        lr, wd = 5e-5, 0.01
        p0 = np.array([1.5, -2.0, 0.25])
        params = make_param(p0)
        state = adamw_init(params, beta1=0.9, beta2=0.95, eps=1e-8, weight_decay=wd)
        adamw_step(params, {"p": np.zeros(3)}, state, lr)
        expected = p0 - lr * (wd * p0)
        np.testing.assert_array_equal(params["p"].data, expected)
        assert state.t == 1

    def test_zero_grad_zero_decay_is_identity(self):
        p0 = np.array([0.3, -0.7])
        params = make_param(p0)
        state = adamw_init(params, weight_decay=0.0)
        for _ in range(5):
            adamw_step(params, {"p": np.zeros(2)}, state, 1e-3)
        np.testing.assert_array_equal(params["p"].data, p0)

    def test_three_steps_match_hand_unrolled_recurrence(self):
        # Independent oracle: unroll the published recurrence step by step.
        beta1, beta2, eps, wd, lr = 0.9, 0.95, 1e-8, 0.01, 5e-5
        g = 0.37
        theta = 1.2

        m = v = 0.0
        expected = theta
        for t in range(1, 4):
            m = beta1 * m + (1 - beta1) * g
            v = beta2 * v + (1 - beta2) * g * g
            m_hat = m / (1 - beta1**t)
            v_hat = v / (1 - beta2**t)
            expected = expected - lr * (m_hat / (np.sqrt(v_hat) + eps) + wd * expected)

        params = make_param([theta])
        state = adamw_init(params, beta1=beta1, beta2=beta2, eps=eps, weight_decay=wd)
        for _ in range(3):
            adamw_step(params, {"p": np.array([g])}, state, lr)
        np.testing.assert_allclose(params["p"].data, [expected], rtol=1e-14)
        assert state.t == 3

    def test_second_moment_stays_nonnegative(self):
        params = make_param(np.linspace(-1, 1, 7))
        state = adamw_init(params)
        rng = np.random.default_rng(3)
        for _ in range(20):
            adamw_step(params, {"p": rng.normal(size=7)}, state, 1e-3)
        assert (state.v["p"] >= 0).all()

    def test_shape_mismatch_names_parameter(self):
        params = make_param([1.0, 2.0])
        state = adamw_init(params)
        with pytest.raises(ShapeMismatchError, match="'p'"):
            adamw_step(params, {"p": np.zeros(3)}, state, 1e-3)

    def test_nonfinite_gradient_rejected(self):
        params = make_param([1.0])
        state = adamw_init(params)
        with pytest.raises(NonFiniteError):
            adamw_step(params, {"p": np.array([np.nan])}, state, 1e-3)

    def test_nonpositive_lr_rejected(self):
        params = make_param([1.0])
        state = adamw_init(params)
        with pytest.raises(ValueError):
            adamw_step(params, {"p": np.zeros(1)}, state, 0.0)


class TestLinearLr:
    def test_start(self):
        assert linear_lr(0, 100, 5e-5, 0.0) == 5e-5

    def test_end(self):
        assert linear_lr(100, 100, 5e-5, 0.0) == 0.0

    def test_midpoint(self):
        assert linear_lr(50, 100, 4e-5, 2e-5) == pytest.approx(3e-5, rel=1e-12)

    def test_overrun_clamps_with_warning(self):
        with pytest.warns(UserWarning, match="clamping"):
            assert linear_lr(150, 100, 1e-3, 1e-5) == 1e-5

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            linear_lr(0, 100, 1e-5, 1e-3)
