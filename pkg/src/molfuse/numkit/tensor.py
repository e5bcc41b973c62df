"""Dense float64 tensors with reverse-mode differentiation.

A :class:`Tensor` wraps a numpy array and records, for each derived value,
a closure that routes upstream gradients to its parents. Calling
:func:`backward` on a scalar walks the recorded graph once in reverse
topological order. Graphs are built per forward pass (define-by-run) and
traversal is purely sequential, so gradients are bitwise reproducible for
identical inputs.

Tensors are treated as immutable once created; only `grad` accumulates
(and the optimizer rewrites parameter `data` between graph builds).
"""

from __future__ import annotations

import numpy as np

from molfuse.errors import MaskError, ShapeError


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self):
        self.grad = None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    # Operator sugar. Scalars and arrays are wrapped as constant tensors.
    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __rtruediv__(self, other):
        return div(_wrap(other), self)

    def __matmul__(self, other):
        return matmul(self, _wrap(other))

    def __neg__(self):
        return neg(self)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, axes):
        return transpose(self, axes)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def tensor(data, requires_grad: bool = False) -> Tensor:
    return Tensor(data, requires_grad=requires_grad)


def _make(data: np.ndarray, parents, backward) -> Tensor:
    """Build a derived tensor; drop the tape if nothing upstream needs grads."""
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    shape = tuple(shape)
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def add(a: Tensor, b: Tensor) -> Tensor:
    data = a.data + b.data

    def backward(g, accum):
        accum(a, _unbroadcast(g, a.data.shape))
        accum(b, _unbroadcast(g, b.data.shape))

    return _make(data, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    data = a.data - b.data

    def backward(g, accum):
        accum(a, _unbroadcast(g, a.data.shape))
        accum(b, _unbroadcast(-g, b.data.shape))

    return _make(data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    data = a.data * b.data

    def backward(g, accum):
        accum(a, _unbroadcast(g * b.data, a.data.shape))
        accum(b, _unbroadcast(g * a.data, b.data.shape))

    return _make(data, (a, b), backward)


def div(a: Tensor, b: Tensor) -> Tensor:
    data = a.data / b.data

    def backward(g, accum):
        accum(a, _unbroadcast(g / b.data, a.data.shape))
        accum(b, _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape))

    return _make(data, (a, b), backward)


def neg(a: Tensor) -> Tensor:
    def backward(g, accum):
        accum(a, -g)

    return _make(-a.data, (a,), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product; 2-D or stacked N-D with identical leading dims."""
    ad, bd = a.data, b.data
    if ad.ndim < 2 or bd.ndim < 2:
        raise ShapeError(f"matmul needs >=2-D operands, got {ad.shape} @ {bd.shape}")
    if ad.shape[-1] != bd.shape[-2] or ad.shape[:-2] != bd.shape[:-2]:
        raise ShapeError(f"matmul shape mismatch: {ad.shape} @ {bd.shape}")
    data = ad @ bd

    def backward(g, accum):
        accum(a, g @ bd.swapaxes(-1, -2))
        accum(b, ad.swapaxes(-1, -2) @ g)

    return _make(data, (a, b), backward)


def tanh(a: Tensor) -> Tensor:
    data = np.tanh(a.data)

    def backward(g, accum):
        accum(a, g * (1.0 - data * data))

    return _make(data, (a,), backward)


def sigmoid(a: Tensor) -> Tensor:
    # stable two-branch logistic
    x = a.data
    data = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                    np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward(g, accum):
        accum(a, g * data * (1.0 - data))

    return _make(data, (a,), backward)


def relu(a: Tensor) -> Tensor:
    data = np.maximum(a.data, 0.0)

    def backward(g, accum):
        # derivative at 0 defined as 0
        accum(a, g * (a.data > 0.0))

    return _make(data, (a,), backward)


def exp(a: Tensor) -> Tensor:
    data = np.exp(a.data)

    def backward(g, accum):
        accum(a, g * data)

    return _make(data, (a,), backward)


def log(a: Tensor) -> Tensor:
    data = np.log(a.data)

    def backward(g, accum):
        accum(a, g / a.data)

    return _make(data, (a,), backward)


def sqrt(a: Tensor) -> Tensor:
    data = np.sqrt(a.data)

    def backward(g, accum):
        accum(a, g * 0.5 / data)

    return _make(data, (a,), backward)


def clip(a: Tensor, lo: float, hi: float) -> Tensor:
    """Clamp values; gradient passes through strictly inside (lo, hi)."""
    data = np.clip(a.data, lo, hi)

    def backward(g, accum):
        accum(a, g * ((a.data > lo) & (a.data < hi)))

    return _make(data, (a,), backward)


def tsum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g, accum):
        accum(a, np.broadcast_to(_expand(g, a.data.shape, axis, keepdims), a.data.shape).copy())

    return _make(data, (a,), backward)


def tmean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    data = a.data.mean(axis=axis, keepdims=keepdims)
    count = a.data.size if axis is None else np.prod(
        [a.data.shape[ax] for ax in _normalize_axes(axis, a.data.ndim)])

    def backward(g, accum):
        accum(a, np.broadcast_to(_expand(g, a.data.shape, axis, keepdims),
                                 a.data.shape) / count)

    return _make(data, (a,), backward)


def _normalize_axes(axis, ndim):
    if axis is None:
        return tuple(range(ndim))
    if isinstance(axis, int):
        axis = (axis,)
    return tuple(ax % ndim for ax in axis)


def _expand(g: np.ndarray, shape, axis, keepdims: bool) -> np.ndarray:
    """Reinsert reduced axes so `g` broadcasts against `shape`."""
    if keepdims or axis is None:
        return g.reshape([1] * len(shape)) if axis is None and not keepdims else g
    for ax in sorted(_normalize_axes(axis, len(shape))):
        g = np.expand_dims(g, ax)
    return g


def reshape(a: Tensor, shape) -> Tensor:
    orig = a.data.shape
    data = a.data.reshape(shape)

    def backward(g, accum):
        accum(a, g.reshape(orig))

    return _make(data, (a,), backward)


def transpose(a: Tensor, axes) -> Tensor:
    axes = tuple(axes)
    inv = tuple(np.argsort(axes))
    data = a.data.transpose(axes)

    def backward(g, accum):
        accum(a, g.transpose(inv))

    return _make(data, (a,), backward)


def softmax(x: Tensor, axis: int = -1, mask=None) -> Tensor:
    """Numerically stabilized softmax with an optional boolean keep-mask.

    Masked positions (mask False) get weight exactly 0 and receive no
    gradient; the remaining weights sum to 1 along `axis`. A slice with no
    unmasked entry raises :class:`MaskError` rather than producing NaN.
    """
    xd = x.data
    if mask is not None:
        keep = np.broadcast_to(np.asarray(mask, dtype=bool), xd.shape)
        if not keep.any(axis=axis).all():
            raise MaskError("softmax slice is fully masked")
        shifted = np.where(keep, xd, -np.inf)
        m = shifted.max(axis=axis, keepdims=True)
        e = np.where(keep, np.exp(xd - m), 0.0)
    else:
        m = xd.max(axis=axis, keepdims=True)
        e = np.exp(xd - m)
    denom = e.sum(axis=axis, keepdims=True)
    data = e / denom

    def backward(g, accum):
        dot = (g * data).sum(axis=axis, keepdims=True)
        accum(x, data * (g - dot))

    return _make(data, (x,), backward)


def backward(loss: Tensor) -> None:
    """Populate `.grad` on every requires_grad tensor reachable from `loss`.

    Repeated calls on the same graph accumulate (clear grads in between).
    """
    if loss.data.size != 1:
        raise ShapeError(f"backward expects a scalar loss, got shape {loss.data.shape}")

    # iterative post-order topological sort (graphs can be deep)
    topo = []
    seen = set()
    stack = [(loss, False)]
    while stack:
        node, done = stack.pop()
        if done:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in seen:
                stack.append((p, False))

    flows = {id(loss): np.ones_like(loss.data)}

    def accum(p: Tensor, g: np.ndarray):
        if not p.requires_grad:
            return
        k = id(p)
        if k in flows:
            flows[k] = flows[k] + g
        else:
            flows[k] = g

    for node in reversed(topo):
        g = flows.pop(id(node), None)
        if g is None:
            continue
        if node.requires_grad:
            node.grad = g if node.grad is None else node.grad + g
        if node._backward is not None:
            node._backward(g, accum)


def assert_finite(t: Tensor, what: str = "tensor") -> Tensor:
    from molfuse.errors import NumericError

    if not np.isfinite(t.data).all():
        raise NumericError(f"non-finite values in {what}")
    return t
