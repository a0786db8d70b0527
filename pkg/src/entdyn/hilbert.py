"""Composite Hilbert-space bookkeeping.

Basis labels follow the usual tensor-product order: the leftmost subsystem is
the most significant digit of the flat index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyKeepSet, IndexOutOfRange
from .operators import as_matrix


@dataclass(frozen=True)
class CompositeSpace:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid subsystem dimensions {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n(self) -> int:
        return len(self.dims)

    def flat_index(self, multi: Sequence[int]) -> int:
        if len(multi) != self.n:
            raise IndexOutOfRange(f"expected {self.n} indices, got {len(multi)}")
        flat = 0
        for i, d in zip(multi, self.dims):
            if not 0 <= i < d:
                raise IndexOutOfRange(f"index {i} out of range for dimension {d}")
            flat = flat * d + int(i)
        return flat

    def multi_index(self, flat: int) -> tuple[int, ...]:
        if not 0 <= flat < self.total:
            raise IndexOutOfRange(f"flat index {flat} out of range for total {self.total}")
        out = []
        for d in reversed(self.dims):
            flat, r = divmod(flat, d)
            out.append(r)
        return tuple(reversed(out))

    def subspace(self, slots: Iterable[int]) -> "CompositeSpace":
        return CompositeSpace(tuple(self.dims[s] for s in sorted(slots)))


@dataclass(frozen=True)
class Bipartition:
    """Split of subsystem slots into ``left`` and its complement."""

    left: frozenset
    n: int

    def __post_init__(self):
        left = frozenset(int(s) for s in self.left)
        if not left or not left < frozenset(range(self.n)):
            raise ValueError(f"invalid bipartition {sorted(left)} of {self.n} slots")
        object.__setattr__(self, "left", left)

    @property
    def right(self) -> frozenset:
        return frozenset(range(self.n)) - self.left

    @classmethod
    def first(cls, n: int = 2) -> "Bipartition":
        return cls(frozenset({0}), n)


def flat_index(multi: Sequence[int], space: CompositeSpace) -> int:
    return space.flat_index(multi)


def multi_index(flat: int, space: CompositeSpace) -> tuple[int, ...]:
    return space.multi_index(flat)


def embed(op, slot: int, space: CompositeSpace) -> np.ndarray:
    """I ⊗ ... ⊗ op ⊗ ... ⊗ I with ``op`` acting on ``slot``."""
    op = as_matrix(op)
    if not 0 <= slot < space.n:
        raise IndexOutOfRange(f"slot {slot} out of range for {space.n} subsystems")
    if op.shape[0] != space.dims[slot]:
        raise DimensionMismatch(
            f"operator of dimension {op.shape[0]} does not fit slot {slot} "
            f"of dimension {space.dims[slot]}"
        )
    factors = [np.eye(d, dtype=complex) for d in space.dims]
    factors[slot] = op
    return reduce(np.kron, factors)


def _check_square(m: np.ndarray, space: CompositeSpace) -> None:
    if m.shape[-2:] != (space.total, space.total):
        raise DimensionMismatch(
            f"matrix of shape {m.shape[-2:]} does not act on space {space.dims}"
        )


def partial_trace(rho, space: CompositeSpace, keep: Iterable[int]) -> np.ndarray:
    """Trace out every slot not in ``keep``. Accepts stacks of matrices (..., N, N)."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise EmptyKeepSet("partial_trace needs at least one slot to keep")
    if any(not 0 <= k < space.n for k in keep):
        raise IndexOutOfRange(f"keep slots {keep} out of range for {space.n} subsystems")
    m = np.asarray(rho)
    _check_square(m, space)
    batch = m.shape[:-2]
    n = space.n
    t = m.reshape(batch + space.dims + space.dims)
    nb = len(batch)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = [c if i not in keep else letters[n + i] for i, c in enumerate(rows)]
    pre = "ABCD"[:nb]
    spec = (
        pre + "".join(rows) + "".join(cols) + "->" + pre
        + "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    )
    out = np.einsum(spec, t)
    dk = int(np.prod([space.dims[k] for k in keep]))
    return out.reshape(batch + (dk, dk))


def partial_transpose(m, space: CompositeSpace, part: Bipartition | None = None,
                      side: str = "left") -> np.ndarray:
    """Transpose the indices of one side of ``part``. Pure index permutation.

    Accepts stacks of matrices (..., N, N).
    """
    m = np.asarray(m)
    _check_square(m, space)
    if part is None:
        part = Bipartition.first(space.n)
    if part.n != space.n:
        raise DimensionMismatch(f"bipartition over {part.n} slots, space has {space.n}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    slots = part.left if side == "left" else part.right
    batch = m.shape[:-2]
    nb, n = len(batch), space.n
    t = m.reshape(batch + space.dims + space.dims)
    axes = list(range(nb + 2 * n))
    for s in slots:
        axes[nb + s], axes[nb + n + s] = axes[nb + n + s], axes[nb + s]
    return t.transpose(axes).reshape(m.shape)
