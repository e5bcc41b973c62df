"""Central finite-difference oracle for gradient tests.

Independent of the reverse-mode tape: it only re-runs the forward function
with perturbed raw arrays and compares difference quotients against the
recorded gradients.
"""

from __future__ import annotations

import numpy as np

from molfuse import numkit as nk


def numeric_grad(f, arrays: list[np.ndarray], h: float = 1e-5) -> list[np.ndarray]:
    """Central differences of scalar f(arrays) w.r.t. every entry of every array."""
    grads = []
    for a in arrays:
        g = np.zeros_like(a)
        flat = a.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            fp = float(f(arrays))
            flat[i] = orig - h
            fm = float(f(arrays))
            flat[i] = orig
            gflat[i] = (fp - fm) / (2.0 * h)
        grads.append(g)
    return grads


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    num = np.abs(analytic - numeric)
    den = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-8)
    return float((num / den).max())


def check_gradients(build, arrays: list[np.ndarray], h: float = 1e-5) -> float:
    """Compare tape gradients of `build` against central differences.

    `build(tensors) -> scalar Tensor` constructs the computation from leaf
    tensors; the same function evaluated on constants serves as the oracle.
    Returns the worst relative error across all inputs.
    """
    leaves = [nk.tensor(a, requires_grad=True) for a in arrays]
    loss = build(leaves)
    nk.backward(loss)
    analytic = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in leaves]

    def forward_only(arrs):
        consts = [nk.tensor(a) for a in arrs]
        return build(consts).item()

    numeric = numeric_grad(forward_only, [a.copy() for a in arrays], h=h)
    return max(relative_error(a, n) for a, n in zip(analytic, numeric))
