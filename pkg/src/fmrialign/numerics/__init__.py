"""Deterministic dense-tensor math: taped autodiff, AdamW, and symmetric linalg."""

from .gradcheck import grad_check
from .linalg import cholesky_solve, sym_eig
from .optim import AdamWState, adamw_init, adamw_step, linear_lr
from .rng import ALGORITHM, RngStream
from .tensor import (
    GradTape,
    Tensor,
    add,
    concat,
    conv1d_same,
    gather_rows,
    gelu,
    layernorm,
    matmul,
    mul,
    narrow,
    reshape,
    scale,
    softmax,
    sub,
    tile_to,
    tmean,
    transpose,
    tsum,
)

__all__ = [
    "ALGORITHM",
    "AdamWState",
    "GradTape",
    "RngStream",
    "Tensor",
    "adamw_init",
    "adamw_step",
    "add",
    "cholesky_solve",
    "concat",
    "conv1d_same",
    "gather_rows",
    "gelu",
    "grad_check",
    "layernorm",
    "linear_lr",
    "matmul",
    "mul",
    "narrow",
    "reshape",
    "scale",
    "softmax",
    "sub",
    "sym_eig",
    "tile_to",
    "tmean",
    "transpose",
    "tsum",
]
