"""Dense double-precision primitives and reverse-mode differentiation helpers.

The tape is torch's autograd graph. This module pins the dtype, names the
primitives the rest of the package relies on, and provides the two entry
points the trainers need: ``grad`` for first-order gradients and
``grad_of_grad_norm`` for the WGAN-GP penalty, which differentiates through
an input gradient.
"""
from __future__ import annotations

import torch

from .errors import CapabilityError, ContractError, StructureError

DTYPE = torch.float64


def tensor(data, requires_grad=False) -> torch.Tensor:
    return torch.as_tensor(data, dtype=DTYPE).clone().requires_grad_(requires_grad)


# primitives

def add(a, b):
    return a + b


def multiply(a, b):
    return a * b


def matmul(a, b):
    if a.shape[-1] != b.shape[-2 if b.dim() > 1 else 0]:
        raise StructureError(f"matmul shape mismatch {tuple(a.shape)} @ {tuple(b.shape)}")
    return a @ b


def transpose(a):
    return a.transpose(-1, -2)


def broadcast(a, shape):
    return a.expand(*shape)


def reduce_sum(a, dim=None):
    return a.sum() if dim is None else a.sum(dim)


def exp(a):
    return torch.exp(a)


def log(a):
    return torch.log(a)


def logsumexp(a, dim=-1):
    """Max-shifted log-sum-exp; finite for any finite input."""
    return torch.logsumexp(a, dim=dim)


def small_logsumexp(a, dim=-1):
    """Log-sum-exp unrolled over a short axis (the support size).

    Much faster than ``torch.logsumexp`` when the reduced axis has 2-4 entries.
    The shift is detached, so the gradient is exactly the softmax.
    """
    parts = a.unbind(dim)
    m = parts[0]
    for p in parts[1:]:
        m = torch.maximum(m, p)
    m = m.detach()
    s = torch.exp(parts[0] - m)
    for p in parts[1:]:
        s = s + torch.exp(p - m)
    return m + torch.log(s)


def leaky_relu(a, slope=0.1):
    return torch.nn.functional.leaky_relu(a, negative_slope=slope)


def sigmoid(a):
    return torch.sigmoid(a)


def maximum(a, b):
    return torch.maximum(a, b)


def gather(a, index, dim=0):
    return a.index_select(dim, torch.as_tensor(index, dtype=torch.long))


def scatter_add(a, index, n, dim=0):
    """Sum slices of ``a`` into ``n`` buckets along ``dim``."""
    index = torch.as_tensor(index, dtype=torch.long)
    shape = list(a.shape)
    shape[dim] = n
    return a.new_zeros(shape).index_add(dim, index, a)


def concatenate(tensors, dim=-1):
    return torch.cat(tensors, dim=dim)


def l2_norm(a, dim=-1):
    return torch.linalg.vector_norm(a, dim=dim)


def grad(f, inputs):
    """Gradients of scalar ``f(*inputs)`` with respect to every input."""
    leaves = [tensor(x, requires_grad=True) for x in inputs]
    out = f(*leaves)
    if out.numel() != 1:
        raise ContractError(f"grad needs a scalar output, got shape {tuple(out.shape)}")
    if not out.requires_grad:
        return [torch.zeros_like(x) for x in leaves]
    grads = torch.autograd.grad(out.reshape(()), leaves, allow_unused=True)
    return [torch.zeros_like(x) if g is None else g for x, g in zip(leaves, grads)]


# Backward nodes allowed under the penalty: linear maps, leaky-relu, masks,
# and the elementwise arithmetic that builds interpolates.
_SECOND_ORDER_OK = {
    "AddmmBackward0", "MmBackward0", "MvBackward0", "DotBackward0", "AddBackward0", "SubBackward0", "MulBackward0",
    "DivBackward0", "LeakyReluBackward0", "TBackward0", "ViewBackward0",
    "ReshapeAliasBackward0", "UnsafeViewBackward0", "ExpandBackward0",
    "SqueezeBackward0", "SqueezeBackward1", "UnsqueezeBackward0", "SumBackward0",
    "SumBackward1", "MeanBackward0", "MeanBackward1", "AccumulateGrad",
    "RsubBackward1", "NegBackward0", "CloneBackward0", "PermuteBackward0",
}


def check_second_order(output: torch.Tensor) -> None:
    seen, stack = set(), [output.grad_fn]
    while stack:
        node = stack.pop()
        if node is None or node in seen:
            continue
        seen.add(node)
        name = type(node).__name__
        if name not in _SECOND_ORDER_OK:
            raise CapabilityError(f"{name} is not supported under the gradient penalty")
        stack.extend(nxt for nxt, _ in node.next_functions)


def gradient_penalty(f, x: torch.Tensor) -> torch.Tensor:
    """Mean over rows of ``(||d f / d x_row||_2 - 1)**2``, differentiable in f's parameters."""
    x = x.detach().requires_grad_(True)
    out = f(x)
    check_second_order(out)
    (gx,) = torch.autograd.grad(out.sum(), x, create_graph=True)
    norms = l2_norm(gx.reshape(gx.shape[0], -1), dim=1)
    return ((norms - 1.0) ** 2).mean()


def grad_of_grad_norm(f, params, x):
    """Penalty value and its gradient with respect to ``params``.

    ``f`` maps an input batch to one output per row and closes over
    ``params`` (leaf tensors with ``requires_grad``).
    """
    penalty = gradient_penalty(f, tensor(x))
    grads = torch.autograd.grad(penalty, list(params), allow_unused=True)
    return penalty.detach(), [torch.zeros_like(p) if g is None else g for p, g in zip(params, grads)]
