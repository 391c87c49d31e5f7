"""Finite-difference gradient verification harness."""

import numpy as np
import pytest

from fmrialign.errors import NonFiniteError
from fmrialign.numerics import RngStream, Tensor, add, grad_check, mul, scale, tsum


class TestGradCheck:
    def test_quadratic_is_machine_exact(self):
        x = Tensor(RngStream(1).generator().normal(size=8), requires_grad=True)
        err = grad_check(lambda: tsum(mul(x, x)), {"x": x}, eps=1e-5)
        assert err <= 1e-9

    def test_linear_sum_gradient_is_ones(self):
        x = Tensor(RngStream(2).generator().normal(size=6), requires_grad=True)
        err = grad_check(lambda: tsum(x), {"x": x}, eps=1e-4)
        assert err <= 1e-10

    def test_coordinate_sampling_still_bounds_error(self):
        # looser bound: the summed loss is O(200), so FD roundoff is larger here
        x = Tensor(RngStream(3).generator().normal(size=200), requires_grad=True)
        err = grad_check(lambda: tsum(mul(x, x)), {"x": x}, eps=1e-5, max_coords_per_param=10)
        assert err <= 1e-7

    def test_eps_out_of_range_rejected(self):
        x = Tensor(np.ones(2), requires_grad=True)
        with pytest.raises(ValueError):
            grad_check(lambda: tsum(x), {"x": x}, eps=1e-2)

    def test_nonfinite_perturbed_loss_names_parameter(self):
        # sqrt is finite at the evaluation point but NaN one eps to the left
        x = Tensor(np.array([0.0]), requires_grad=True)

        def fn():
            with np.errstate(invalid="ignore"):
                root = np.sqrt(x.data)
            return tsum(add(scale(x, 0.0), Tensor(root)))

        with pytest.raises(NonFiniteError, match="'x'"):
            grad_check(fn, {"x": x}, eps=1e-4)
