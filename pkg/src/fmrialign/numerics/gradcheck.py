"""Central finite-difference verification of taped gradients."""

from __future__ import annotations

import numpy as np

from ..errors import NonFiniteError
from .rng import RngStream
from .tensor import GradTape, Tensor


def grad_check(
    fn,
    params: dict[str, Tensor],
    eps: float = 1e-5,
    max_coords_per_param: int | None = None,
    seed: int = 0,
) -> float:
    """Max relative error between taped and finite-difference gradients.

    `fn` must rebuild and return the scalar loss from `params` on every call
    and must be deterministic. When `max_coords_per_param` is set, only a
    seeded random subset of coordinates of each parameter is perturbed, which
    bounds the cost on large models; the analytic gradient is still the full
    taped gradient.
    """
    if not (1e-7 <= eps <= 1e-3):
        raise ValueError(f"eps must lie in [1e-7, 1e-3], got {eps}")

    with GradTape() as tape:
        tape.watch(params)
        loss = fn()
        if loss.data.size != 1:
            raise ValueError("grad_check needs a scalar-valued function")
        tape.backward(loss)
    analytic = {name: g.copy() for name, g in tape.grads().items()}
    tape.zero_grads()

    rng = RngStream(seed, 0).child("grad_check").generator()
    worst = 0.0
    for name, p in params.items():
        flat = p.data.reshape(-1)
        n = flat.size
        if max_coords_per_param is None or n <= max_coords_per_param:
            coords = np.arange(n)
        else:
            coords = rng.choice(n, size=max_coords_per_param, replace=False)
        ga = analytic[name].reshape(-1)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + eps
            f_plus = float(fn().data)
            flat[i] = orig - eps
            f_minus = float(fn().data)
            flat[i] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise NonFiniteError(
                    f"non-finite loss while perturbing parameter '{name}'", parameter=name
                )
            fd = (f_plus - f_minus) / (2.0 * eps)
            denom = max(abs(ga[i]), abs(fd), 1e-12)
            worst = max(worst, abs(ga[i] - fd) / denom)
    return worst
