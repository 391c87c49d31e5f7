"""Dense float64 tensors with taped reverse-mode differentiation.

Forward ops run on numpy arrays. When a :class:`GradTape` is active, every
primitive appends a backward closure to the tape; ``GradTape.backward`` replays
the closures once each, in reverse creation order, accumulating gradients on
the participating tensors. With no active tape the same ops run as plain
inference with zero bookkeeping.

Only the ops the rest of the package needs are implemented. Inputs may be
``Tensor`` or plain arrays; plain arrays are constants and never receive
gradients.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import erf

from ..errors import NonFiniteError, ShapeMismatchError

__all__ = [
    "Tensor",
    "GradTape",
    "add",
    "sub",
    "mul",
    "scale",
    "matmul",
    "reshape",
    "transpose",
    "concat",
    "narrow",
    "tile_to",
    "gather_rows",
    "tsum",
    "tmean",
    "gelu",
    "softmax",
    "layernorm",
    "conv1d_same",
]

_TAPE_STACK: list["GradTape"] = []

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


class Tensor:
    """A float64 array plus its accumulated gradient.

    The constructor does not copy float64 input: the tensor takes ownership
    of the array, and in-place updates (e.g. optimizer steps) mutate it.
    """

    __slots__ = ("data", "grad", "requires_grad", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        tag = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.data.shape}{tag}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return scale(self, -1.0)


class GradTape:
    """Records primitive ops and replays them backwards exactly once each.

    Also carries the parameter registry (name -> Tensor) so optimizers and
    gradient checks can walk the trainable state by name.
    """

    def __init__(self):
        self._records: list[tuple[Tensor, object]] = []
        self.params: dict[str, Tensor] = {}

    def watch(self, params: dict[str, Tensor]) -> None:
        for name, p in params.items():
            if not isinstance(p, Tensor):
                raise TypeError(f"parameter '{name}' is not a Tensor")
            self.params[name] = p

    def __enter__(self) -> "GradTape":
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        popped = _TAPE_STACK.pop()
        assert popped is self
        return False

    def __len__(self) -> int:
        return len(self._records)

    def backward(self, loss: Tensor) -> None:
        if loss.data.size != 1:
            raise ValueError(f"backward requires a scalar loss, got shape {loss.data.shape}")
        if not np.isfinite(loss.data):
            raise NonFiniteError("loss is not finite at backward time")
        loss.grad = np.ones_like(loss.data)
        for out, backward_fn in reversed(self._records):
            if out.grad is not None:
                backward_fn(out.grad)

    def grads(self) -> dict[str, np.ndarray]:
        """Gradients for every watched parameter; zeros where untouched."""
        out = {}
        for name, p in self.params.items():
            if p.grad is None:
                out[name] = np.zeros_like(p.data)
            else:
                if p.grad.shape != p.data.shape:
                    raise ShapeMismatchError(name, p.data.shape, p.grad.shape)
                out[name] = p.grad
        return out

    def zero_grads(self) -> None:
        for p in self.params.values():
            p.grad = None


def _active() -> GradTape | None:
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def _as_array(x) -> np.ndarray:
    if isinstance(x, Tensor):
        return x.data
    return np.asarray(x, dtype=np.float64)


def _needs_grad(*xs) -> bool:
    return any(isinstance(x, Tensor) and x.requires_grad for x in xs)


def _accum(x, g: np.ndarray) -> None:
    if not isinstance(x, Tensor) or not x.requires_grad:
        return
    if x.grad is None:
        x.grad = np.zeros_like(x.data)
    x.grad += g


def _make(data: np.ndarray, parents, backward_fn) -> Tensor:
    out = Tensor(data, requires_grad=_needs_grad(*parents))
    tape = _active()
    if tape is not None and out.requires_grad:
        tape._records.append((out, backward_fn))
    return out


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum `g` down to `shape` (reverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, (gs, ss) in enumerate(zip(g.shape, shape)):
        if ss == 1 and gs != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


# ---------------------------------------------------------------------------
# arithmetic

def add(a, b) -> Tensor:
    av, bv = _as_array(a), _as_array(b)
    out_data = av + bv

    def backward(g):
        _accum(a, _unbroadcast(g, av.shape))
        _accum(b, _unbroadcast(g, bv.shape))

    return _make(out_data, (a, b), backward)


def sub(a, b) -> Tensor:
    av, bv = _as_array(a), _as_array(b)
    out_data = av - bv

    def backward(g):
        _accum(a, _unbroadcast(g, av.shape))
        _accum(b, _unbroadcast(-g, bv.shape))

    return _make(out_data, (a, b), backward)


def mul(a, b) -> Tensor:
    av, bv = _as_array(a), _as_array(b)
    out_data = av * bv

    def backward(g):
        if isinstance(a, Tensor) and a.requires_grad:
            _accum(a, _unbroadcast(g * bv, av.shape))
        if isinstance(b, Tensor) and b.requires_grad:
            _accum(b, _unbroadcast(g * av, bv.shape))

    return _make(out_data, (a, b), backward)


def scale(a, c: float) -> Tensor:
    av = _as_array(a)
    c = float(c)

    def backward(g):
        _accum(a, c * g)

    return _make(av * c, (a,), backward)


def matmul(a, b) -> Tensor:
    """Matrix product; both operands must be at least 2-D.

    Batch dimensions broadcast the numpy way; gradients are summed back to
    each operand's shape.
    """
    av, bv = _as_array(a), _as_array(b)
    if av.ndim < 2 or bv.ndim < 2:
        raise ValueError(f"matmul needs >=2-D operands, got {av.shape} @ {bv.shape}")
    out_data = np.matmul(av, bv)

    def backward(g):
        if isinstance(a, Tensor) and a.requires_grad:
            ga = np.matmul(g, np.swapaxes(bv, -1, -2))
            _accum(a, _unbroadcast(ga, av.shape))
        if isinstance(b, Tensor) and b.requires_grad:
            gb = np.matmul(np.swapaxes(av, -1, -2), g)
            _accum(b, _unbroadcast(gb, bv.shape))

    return _make(out_data, (a, b), backward)


# ---------------------------------------------------------------------------
# structure

def reshape(a, shape) -> Tensor:
    av = _as_array(a)
    shape = tuple(shape)

    def backward(g):
        _accum(a, g.reshape(av.shape))

    return _make(av.reshape(shape), (a,), backward)


def transpose(a, axes) -> Tensor:
    av = _as_array(a)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))

    def backward(g):
        _accum(a, g.transpose(inverse))

    return _make(av.transpose(axes), (a,), backward)


def concat(parts, axis: int) -> Tensor:
    arrays = [_as_array(p) for p in parts]
    sizes = [arr.shape[axis] for arr in arrays]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for part, start, stop in zip(parts, offsets[:-1], offsets[1:]):
            idx = [slice(None)] * g.ndim
            idx[axis] = slice(start, stop)
            _accum(part, g[tuple(idx)])

    return _make(np.concatenate(arrays, axis=axis), tuple(parts), backward)


def narrow(a, axis: int, start: int, length: int) -> Tensor:
    av = _as_array(a)
    idx = [slice(None)] * av.ndim
    idx[axis] = slice(start, start + length)
    idx = tuple(idx)

    def backward(g):
        if isinstance(a, Tensor) and a.requires_grad:
            full = np.zeros_like(av)
            full[idx] = g
            _accum(a, full)

    return _make(av[idx].copy(), (a,), backward)


def tile_to(a, shape) -> Tensor:
    """Broadcast `a` to `shape`; the gradient sums back over the new axes."""
    av = _as_array(a)
    shape = tuple(shape)

    def backward(g):
        _accum(a, _unbroadcast(g, av.shape))

    return _make(np.broadcast_to(av, shape).copy(), (a,), backward)


def gather_rows(a, index) -> Tensor:
    """Select rows of a 2-D tensor; duplicate indices sum their gradients."""
    av = _as_array(a)
    index = np.asarray(index, dtype=np.intp)

    def backward(g):
        if isinstance(a, Tensor) and a.requires_grad:
            full = np.zeros_like(av)
            np.add.at(full, index, g)
            _accum(a, full)

    return _make(av[index], (a,), backward)


# ---------------------------------------------------------------------------
# reductions

def tsum(a, axis=None, keepdims: bool = False) -> Tensor:
    av = _as_array(a)

    def backward(g):
        if axis is None:
            _accum(a, np.broadcast_to(g, av.shape).copy())
        else:
            gg = g if keepdims else np.expand_dims(g, axis)
            _accum(a, np.broadcast_to(gg, av.shape).copy())

    return _make(av.sum(axis=axis, keepdims=keepdims), (a,), backward)


def tmean(a, axis=None, keepdims: bool = False) -> Tensor:
    av = _as_array(a)
    if axis is None:
        count = av.size
    else:
        count = av.shape[axis]

    def backward(g):
        if axis is None:
            _accum(a, np.broadcast_to(g / count, av.shape).copy())
        else:
            gg = g if keepdims else np.expand_dims(g, axis)
            _accum(a, np.broadcast_to(gg / count, av.shape).copy())

    return _make(av.mean(axis=axis, keepdims=keepdims), (a,), backward)


# ---------------------------------------------------------------------------
# nonlinearities

def gelu(a) -> Tensor:
    av = _as_array(a)
    cdf = 0.5 * (1.0 + erf(av * _INV_SQRT2))
    out_data = av * cdf

    def backward(g):
        pdf = np.exp(-0.5 * av * av) * _INV_SQRT2PI
        _accum(a, g * (cdf + av * pdf))

    return _make(out_data, (a,), backward)


def softmax(a, axis: int = -1) -> Tensor:
    av = _as_array(a)
    shifted = av - av.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        inner = (g * s).sum(axis=axis, keepdims=True)
        _accum(a, s * (g - inner))

    return _make(s, (a,), backward)


def layernorm(x, gain, bias, eps: float = 1e-5) -> Tensor:
    """Layer normalization over the last axis with learned gain and bias."""
    xv = _as_array(x)
    gv, bv = _as_array(gain), _as_array(bias)
    mu = xv.mean(axis=-1, keepdims=True)
    xc = xv - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out_data = xhat * gv + bv

    def backward(g):
        lead = tuple(range(g.ndim - 1))
        _accum(gain, (g * xhat).sum(axis=lead))
        _accum(bias, g.sum(axis=lead))
        if isinstance(x, Tensor) and x.requires_grad:
            dxhat = g * gv
            m1 = dxhat.mean(axis=-1, keepdims=True)
            m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
            _accum(x, inv * (dxhat - m1 - xhat * m2))

    return _make(out_data, (x, gain, bias), backward)


def conv1d_same(x, w, b) -> Tensor:
    """1-D convolution along the last axis, 1 input channel, same padding.

    x: (B, N) signal slices, w: (C, k) kernels, b: (C,) biases -> (B, C, N).
    """
    xv, wv, bv = _as_array(x), _as_array(w), _as_array(b)
    channels, k = wv.shape
    if k % 2 != 1:
        raise ValueError(f"conv kernel size must be odd, got {k}")
    pad = k // 2
    xp = np.pad(xv, ((0, 0), (pad, pad)))
    windows = sliding_window_view(xp, k, axis=1)  # (B, N, k)
    out_data = np.einsum("bnk,ck->bcn", windows, wv) + bv[None, :, None]

    def backward(g):
        _accum(w, np.einsum("bcn,bnk->ck", g, windows))
        _accum(b, g.sum(axis=(0, 2)))
        if isinstance(x, Tensor) and x.requires_grad:
            n = xv.shape[1]
            gxp = np.zeros_like(xp)
            for j in range(k):
                gxp[:, j:j + n] += np.einsum("bcn,c->bn", g, wv[:, j])
            _accum(x, gxp[:, pad:pad + n])

    return _make(out_data, (x, w, b), backward)
