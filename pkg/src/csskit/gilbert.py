"""Gilbert-style upper-bound oracle for the distance to the separable set.

Maintains a separable iterate sigma_k (a convex combination of pure product
states, started at the maximally mixed state). Each iteration asks a
linear-maximization oracle for the pure product state pi most aligned with
rho - sigma_k, then moves toward pi with an exact line search on the
quadratic objective. The squared distance to rho never increases, and it
upper-bounds the true minimum in every dimension.

The oracle is an alternating top-eigenvector (power-style) search on the
bilinear form <a x b| rho - sigma |a x b>, run from several random starts in
a batch, plus a warm start from the previous iteration's optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ShapeMismatch
from .linalg import hs_norm, partial_transpose, permute_subsystems
from .states import Bipartition, DensityMatrix, grouped_bipartite, validate

__all__ = ["GilbertTrace", "gilbert_css", "commutator_norm"]


@dataclass(frozen=True)
class GilbertTrace:
    """Per-iteration upper bounds and commutator norms, plus the final iterate."""

    distance_sq_upper: np.ndarray
    commutator_hs: np.ndarray
    sigma: DensityMatrix

    def __len__(self) -> int:
        return len(self.distance_sq_upper)

    def rows(self) -> Iterator[tuple[int, float, float]]:
        """(iter, distance_sq_upper, commutator_hs), 1-based iteration index."""
        for i, (d, c) in enumerate(zip(self.distance_sq_upper, self.commutator_hs), start=1):
            yield i, float(d), float(c)


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt norm of the commutator ``ab - ba``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"incompatible shapes {a.shape} vs {b.shape}")
    return hs_norm(a @ b - b @ a)


def _best_product_state(
    r4: np.ndarray,
    da: int,
    db: int,
    rng: np.random.Generator,
    restarts: int,
    warm_b: np.ndarray | None,
    rounds: int = 20,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Approximately maximize <a x b|R|a x b> by alternating eigensteps.

    `r4` is R reshaped to (da, db, da, db). All restarts advance as one
    batch; returns the best (a, b, value).
    """
    b = rng.standard_normal((restarts, db)) + 1j * rng.standard_normal((restarts, db))
    if warm_b is not None:
        b[0] = warm_b
    b /= np.linalg.norm(b, axis=1, keepdims=True)

    prev = np.full(restarts, -np.inf)
    a = np.empty((restarts, da), dtype=complex)
    for _ in range(rounds):
        ma = np.einsum("rj,ijkl,rl->rik", b.conj(), r4, b)
        _, vecs = np.linalg.eigh(ma)
        a = vecs[:, :, -1]
        mb = np.einsum("ri,ijkl,rk->rjl", a.conj(), r4, a)
        vals, vecs = np.linalg.eigh(mb)
        b = vecs[:, :, -1]
        top = vals[:, -1]
        if np.all(np.abs(top - prev) <= 1e-13):
            prev = top
            break
        prev = top
    best = int(np.argmax(prev))
    return a[best], b[best], float(prev[best])


def gilbert_css(
    rho: DensityMatrix,
    cut: Bipartition | None = None,
    iters: int = 2000,
    restarts: int = 5,
    seed=0,
) -> GilbertTrace:
    """Run `iters` correction steps toward the separable set across `cut`.

    Records the squared distance upper bound and the Hilbert-Schmidt norm of
    the commutator between the partial transposes of input and iterate after
    every step.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    cut = Bipartition.default(len(rho.dims)) if cut is None else cut
    rho_g, (da, db), perm = grouped_bipartite(rho.mat, rho.dims, cut)
    dim = da * db
    rho_pt = partial_transpose(rho_g, (da, db), 1)
    rng = np.random.default_rng(seed)

    sigma = np.eye(dim, dtype=complex) / dim
    warm_b: np.ndarray | None = None
    dist = np.empty(iters)
    comm = np.empty(iters)
    for k in range(iters):
        r = rho_g - sigma
        a, b, _ = _best_product_state(
            r.reshape(da, db, da, db), da, db, rng, restarts, warm_b
        )
        warm_b = b
        v = np.einsum("i,j->ij", a, b).ravel()
        pi = np.outer(v, v.conj())

        step_dir = pi - sigma
        denom = float(np.real(np.vdot(step_dir, step_dir)))
        t = 0.0
        if denom > 1e-30:
            t = float(np.real(np.vdot(step_dir, r))) / denom
            t = min(max(t, 0.0), 1.0)
        sigma = (1.0 - t) * sigma + t * pi

        diff = rho_g - sigma
        dist[k] = float(np.real(np.vdot(diff, diff)))
        sigma_pt = partial_transpose(sigma, (da, db), 1)
        comm[k] = hs_norm(rho_pt @ sigma_pt - sigma_pt @ rho_pt)

    inverse = np.argsort(perm)
    grouped_dims = tuple(rho.dims[p] for p in perm)
    sigma_orig = permute_subsystems(sigma, grouped_dims, tuple(inverse))
    return GilbertTrace(
        distance_sq_upper=dist,
        commutator_hs=comm,
        sigma=validate(sigma_orig, rho.dims),
    )
