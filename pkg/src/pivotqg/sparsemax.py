"""Sparsemax: Euclidean projection onto the probability simplex.

Unlike softmax, the projection assigns exact zeros to low-scoring
coordinates, which is what makes the attention heat maps sparse. The
forward transform uses the sort-threshold rule; the backward pass is the
piecewise-linear Jacobian restricted to the support set.

Both a plain numpy pair (sparsemax / sparsemax_backward) and a batched
torch autograd.Function are provided; they share the same math.
"""

from __future__ import annotations

import numpy as np
import torch

from .errors import NonFiniteInput


def sparsemax(scores) -> np.ndarray:
    """Project a score vector onto the simplex (sort-threshold rule).

    Support size k is the largest j with j * z_(j) > cumsum(z_(1..j)) - 1;
    tau = (cumsum over the support - 1) / k; output max(z - tau, 0).
    """
    z = np.asarray(scores, dtype=np.float64)
    if z.ndim != 1 or z.size < 1:
        raise ValueError("expected a non-empty 1-D score vector")
    if not np.all(np.isfinite(z)):
        raise NonFiniteInput("scores contain nan/inf")

    z = z - z.max()  # shift invariance; keeps cumsums tame
    z_sorted = np.sort(z)[::-1]
    cumsum = np.cumsum(z_sorted) - 1.0
    ranks = np.arange(1, z.size + 1)
    support = ranks * z_sorted > cumsum
    k = int(np.count_nonzero(support))
    tau = cumsum[k - 1] / k
    return np.maximum(z - tau, 0.0)


def sparsemax_backward(output: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Input gradient given the forward output and an upstream gradient.

    On the support S: g_i - mean(g over S); exactly zero off-support.
    """
    p = np.asarray(output, dtype=np.float64)
    g = np.asarray(grad, dtype=np.float64)
    if p.shape != g.shape:
        raise ValueError("output and gradient shapes differ")
    support = p > 0
    n_support = int(np.count_nonzero(support))
    out = np.zeros_like(g)
    out[support] = g[support] - g[support].sum() / n_support
    return out


class _SparsemaxFunction(torch.autograd.Function):
    """Batched sparsemax along the last dimension."""

    @staticmethod
    def forward(ctx, scores: torch.Tensor) -> torch.Tensor:
        z = scores - scores.max(dim=-1, keepdim=True).values
        z_sorted, _ = torch.sort(z, dim=-1, descending=True)
        cumsum = z_sorted.cumsum(dim=-1) - 1.0
        ranks = torch.arange(1, z.shape[-1] + 1, device=z.device,
                             dtype=z.dtype)
        support = ranks * z_sorted > cumsum
        k = support.sum(dim=-1, keepdim=True)
        tau = cumsum.gather(-1, k - 1) / k.to(z.dtype)
        out = torch.clamp(z - tau, min=0.0)
        ctx.save_for_backward(out)
        return out

    @staticmethod
    def backward(ctx, grad: torch.Tensor) -> torch.Tensor:
        (out,) = ctx.saved_tensors
        support = out > 0
        masked = torch.where(support, grad, torch.zeros_like(grad))
        mean = masked.sum(dim=-1, keepdim=True) / support.sum(dim=-1, keepdim=True)
        return torch.where(support, masked - mean, torch.zeros_like(grad))


def sparsemax_torch(scores: torch.Tensor) -> torch.Tensor:
    """Differentiable sparsemax over the last dimension of a tensor."""
    return _SparsemaxFunction.apply(scores)
