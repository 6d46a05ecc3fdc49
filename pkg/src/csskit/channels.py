"""CPTP maps: dilations, Kraus forms, spectral transition matrices, and the
32-parameter search for a distance-increasing local map.

Channels come in two equivalent representations. A Kraus channel is a list
of operators with ``sum V_i^dag V_i = I``. A dilation channel couples the
bipartite system to a bipartite environment, evolves with a product unitary
``U_AC (x) U_BD``, and traces the environment out; this is the construction
used by the monotonicity experiments.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .config import ATOL, HERM_TOL
from .errors import DegenerateBasisWarning, DimensionMismatch, LengthMismatch, ShapeMismatch
from .linalg import (
    herm_eig,
    hs_norm,
    kron,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    unitary_from_hermitian,
)
from .solver import _min_hsd_spectrum, min_hsd
from .states import DensityMatrix, validate

__all__ = [
    "GellMannBasis",
    "KrausChannel",
    "DilationChannel",
    "ChannelSpec",
    "TransitionMatrix",
    "MajorizationReport",
    "LoccSearchReport",
    "gell_mann",
    "unitary_from_params",
    "apply_channel",
    "apply_dilation",
    "kraus_from_dilation",
    "transition_matrix",
    "majorization_check",
    "random_unital_channel",
    "locc_search",
]


@dataclass(frozen=True)
class GellMannBasis:
    """Orthogonal Hermitian basis of d x d matrix space, identity last.

    Ordering: symmetric pair matrices ``|j><k| + |k><j|`` (j < k, row-major),
    then antisymmetric ``i(|k><j| - |j><k|)``, then the diagonal traceless
    ladder, then ``sqrt(2/d) I``. Every element has ``Tr(L_a L_b) = 2
    delta_ab``.
    """

    dimension: int
    matrices: np.ndarray  # shape (d*d, d, d)

    def __len__(self) -> int:
        return len(self.matrices)


def gell_mann(d: int) -> GellMannBasis:
    """Generalized Gell-Mann matrices of dimension `d` plus scaled identity."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    mats: list[np.ndarray] = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[k, j] = 1.0j
            m[j, k] = -1.0j
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    mats.append(np.sqrt(2.0 / d) * np.eye(d, dtype=complex))
    return GellMannBasis(dimension=d, matrices=np.array(mats))


def unitary_from_params(a: Sequence[float], basis: GellMannBasis) -> np.ndarray:
    """Unitary ``exp(i sum_n a_n L_n)`` from real coefficients on the basis."""
    a = np.asarray(a, dtype=float)
    if a.shape != (len(basis),):
        raise LengthMismatch(f"expected {len(basis)} coefficients, got shape {a.shape}")
    h = np.einsum("n,nij->ij", a, basis.matrices)
    return unitary_from_hermitian(h)


def _check_unitary(u: np.ndarray, name: str) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {u.shape}")
    if hs_norm(u.conj().T @ u - np.eye(u.shape[0])) > HERM_TOL * u.shape[0]:
        raise ValueError(f"{name} is not unitary within tolerance")
    return u


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map given by Kraus operators; completeness checked on build."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ValueError("need at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise ShapeMismatch("all Kraus operators must share one square shape")
        total = sum(k.conj().T @ k for k in ops)
        if hs_norm(total - np.eye(d)) > 1e-9:
            raise ValueError(
                f"Kraus completeness violated: ||sum V^dag V - I|| = {hs_norm(total - np.eye(d)):.3e}"
            )
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]


@dataclass(frozen=True)
class DilationChannel:
    """Environment dilation: ``rho -> Tr_CD[(U_AC x U_BD)(rho x env)(...)^dag]``."""

    env: DensityMatrix
    u_ac: np.ndarray
    u_bd: np.ndarray

    def __post_init__(self) -> None:
        if len(self.env.dims) != 2:
            raise DimensionMismatch(f"environment must be bipartite, got dims {self.env.dims}")
        u_ac = _check_unitary(self.u_ac, "u_ac")
        u_bd = _check_unitary(self.u_bd, "u_bd")
        dc, dd = self.env.dims
        if u_ac.shape[0] % dc or u_bd.shape[0] % dd:
            raise DimensionMismatch(
                f"unitary dims {u_ac.shape[0]}x{u_bd.shape[0]} incompatible with env {self.env.dims}"
            )
        object.__setattr__(self, "u_ac", u_ac)
        object.__setattr__(self, "u_bd", u_bd)

    @property
    def system_dims(self) -> tuple[int, int]:
        return self.u_ac.shape[0] // self.env.dims[0], self.u_bd.shape[0] // self.env.dims[1]


ChannelSpec = KrausChannel | DilationChannel


def apply_dilation(rho_ab: DensityMatrix, spec: DilationChannel) -> DensityMatrix:
    """Apply the dilation to a bipartite state and return a valid state."""
    if len(rho_ab.dims) != 2:
        raise DimensionMismatch(f"system must be bipartite, got dims {rho_ab.dims}")
    da, db = rho_ab.dims
    dc, dd = spec.env.dims
    if spec.system_dims != (da, db):
        raise DimensionMismatch(
            f"dilation expects system dims {spec.system_dims}, got {(da, db)}"
        )
    x = kron(rho_ab.mat, spec.env.mat)  # factor order (A, B, C, D)
    x = permute_subsystems(x, (da, db, dc, dd), (0, 2, 1, 3))  # -> (A, C, B, D)
    w = kron(spec.u_ac, spec.u_bd)
    y = w @ x @ w.conj().T
    out = partial_trace(y, (da, dc, db, dd), keep=(0, 2))
    return validate(out, (da, db))


def kraus_from_dilation(spec: DilationChannel) -> KrausChannel:
    """Kraus operators of a dilation via the environment's spectral ensemble.

    With ``env = sum_m p_m |psi_m><psi_m|`` the operators are
    ``K_(i,m) = sqrt(p_m) (I (x) <i|) U (I (x) |psi_m>)`` over the environment
    basis ``|i>``; zero-probability components are dropped.
    """
    da, db = spec.system_dims
    dc, dd = spec.env.dims
    ds, de = da * db, dc * dd
    w = kron(spec.u_ac, spec.u_bd)  # on (A, C, B, D)
    w = permute_subsystems(w, (da, dc, db, dd), (0, 2, 1, 3))  # -> (A, B, C, D)
    w4 = w.reshape(ds, de, ds, de)
    env_eig = herm_eig(spec.env.mat)
    ops: list[np.ndarray] = []
    for p, psi in zip(env_eig.eigenvalues, env_eig.eigenvectors.T):
        if p <= ATOL:
            continue
        tmp = np.tensordot(w4, psi, axes=([3], [0]))  # (ds, de, ds)
        for i in range(de):
            op = np.sqrt(p) * tmp[:, i, :]
            if hs_norm(op) > 1e-14:
                ops.append(op)
    return KrausChannel(tuple(ops))


def apply_channel(channel: ChannelSpec, x: np.ndarray) -> np.ndarray:
    """Apply a channel to a plain (Hermitian) matrix."""
    if isinstance(channel, DilationChannel):
        channel = kraus_from_dilation(channel)
    x = np.asarray(x, dtype=complex)
    if x.shape != (channel.dim, channel.dim):
        raise ShapeMismatch(f"operator shape {x.shape} vs channel dim {channel.dim}")
    out = np.zeros_like(x)
    for k in channel.kraus:
        out += k @ x @ k.conj().T
    return out


@dataclass(frozen=True)
class TransitionMatrix:
    """Action of a channel on a spectrum: ``spec(out) = c @ spec(in)``.

    ``c[l][j] = sum_i |<f_l| K_i |e_j>|^2`` over the input eigenbasis {e_j}
    and output eigenbasis {f_l}, both sorted by decreasing eigenvalue.
    Entries are nonnegative; columns always sum to 1 (trace preservation);
    row l sums to ``<f_l| Phi(I) |f_l>``, which is 1 for unital channels.
    """

    c: np.ndarray
    input_spectrum: np.ndarray
    output_spectrum: np.ndarray

    @property
    def column_sums(self) -> np.ndarray:
        return self.c.sum(axis=0)

    @property
    def row_sums(self) -> np.ndarray:
        return self.c.sum(axis=1)


def transition_matrix(x: np.ndarray, channel: ChannelSpec) -> TransitionMatrix:
    """Transition matrix of `channel` on the Hermitian operator `x`.

    Emits :class:`DegenerateBasisWarning` when either spectrum has
    eigenvalue gaps below 1e-8 (the bases are then ambiguous, but the
    spectral identity itself is basis-free and still verified).
    """
    if isinstance(channel, DilationChannel):
        channel = kraus_from_dilation(channel)
    in_eig = herm_eig(x)
    y = apply_channel(channel, np.asarray(x, dtype=complex))
    out_eig = herm_eig(0.5 * (y + y.conj().T))

    for name, w in (("input", in_eig.eigenvalues), ("output", out_eig.eigenvalues)):
        gaps = np.abs(np.diff(w))
        if len(gaps) and gaps.min() < 1e-8:
            warnings.warn(
                f"{name} spectrum has eigenvalue gap {gaps.min():.2e} < 1e-8; "
                "eigenbasis is ambiguous",
                DegenerateBasisWarning,
                stacklevel=2,
            )

    vf = out_eig.eigenvectors
    ve = in_eig.eigenvectors
    c = np.zeros((len(out_eig.eigenvalues), len(in_eig.eigenvalues)))
    for k in channel.kraus:
        m = vf.conj().T @ k @ ve
        c += np.abs(m) ** 2

    cols = c.sum(axis=0)
    if np.max(np.abs(cols - 1.0)) > 1e-9:
        raise ValueError(f"column sums deviate from 1 by {np.max(np.abs(cols - 1.0)):.3e}")
    resid = np.max(np.abs(out_eig.eigenvalues - c @ in_eig.eigenvalues))
    if resid > 1e-8:
        raise ValueError(f"spectral identity violated: max residual {resid:.3e}")
    return TransitionMatrix(
        c=c, input_spectrum=in_eig.eigenvalues, output_spectrum=out_eig.eigenvalues
    )


@dataclass(frozen=True)
class MajorizationReport:
    """Prefix and tail partial-sum comparisons of two sorted spectra."""

    majorized: bool
    prefix_margins: np.ndarray  # cumsum(lambda) - cumsum(sigma), descending order
    tail_margins: np.ndarray  # cumsum(sigma) - cumsum(lambda), ascending order
    total_gap: float

    def __bool__(self) -> bool:
        return self.majorized


def majorization_check(
    sigma_spec: Sequence[float], lambda_spec: Sequence[float], tol: float = ATOL
) -> MajorizationReport:
    """Check ``sigma <= lambda`` in the majorization order.

    True when every prefix sum of the descending-sorted sigma is bounded by
    the matching prefix sum of lambda (within `tol`) and the totals agree.
    The report also carries the equivalent tail-sum margins (ascending
    order), which must all be nonnegative.
    """
    s = np.sort(np.asarray(sigma_spec, dtype=float))[::-1]
    lam = np.sort(np.asarray(lambda_spec, dtype=float))[::-1]
    if s.shape != lam.shape:
        raise ShapeMismatch(f"spectra lengths differ: {len(s)} vs {len(lam)}")
    total_gap = float(abs(s.sum() - lam.sum()))
    if total_gap > tol:
        raise ValueError(f"spectra totals differ by {total_gap:.3e}")
    prefix = np.cumsum(lam) - np.cumsum(s)
    tail = np.cumsum(s[::-1]) - np.cumsum(lam[::-1])
    ok = bool(np.all(prefix >= -tol))
    return MajorizationReport(
        majorized=ok, prefix_margins=prefix, tail_margins=tail, total_gap=total_gap
    )


def random_unital_channel(d: int, k: int, seed) -> KrausChannel:
    """Mixture of `k` Haar-ish random unitaries with a random weight vector.

    Unitaries are ``exp(i H)`` with Gaussian coefficients on the Gell-Mann
    basis; weights are uniform on the simplex. The map fixes the identity.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rng = np.random.default_rng(seed)
    basis = gell_mann(d)
    p = rng.dirichlet(np.ones(k))
    ops = tuple(
        np.sqrt(p[i]) * unitary_from_params(rng.standard_normal(d * d), basis)
        for i in range(k)
    )
    return KrausChannel(ops)


@dataclass(frozen=True)
class LoccSearchReport:
    """Outcome of the 32-parameter dilation search.

    `violation` is True when the best found value exceeds the input's own
    minimum distance by more than 1e-8, i.e. when the search found a local
    map that increases the distance. The partial-transpose spectrum of the
    best output is kept for the eigenvalue-preservation diagnosis.
    """

    seed: int
    restarts: int
    evals: int
    baseline_min_hsd: float
    best_value: float
    best_params: np.ndarray
    best_output_spectrum: np.ndarray
    violation: bool

    def to_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "restarts": int(self.restarts),
            "evals": int(self.evals),
            "baseline_min_hsd": float(self.baseline_min_hsd),
            "best_value": float(self.best_value),
            "best_params": [float(v) for v in self.best_params],
            "best_output_spectrum": [float(v) for v in self.best_output_spectrum],
            "violation": bool(self.violation),
        }


def _dilation_objective(rho: DensityMatrix, env: DensityMatrix, basis: GellMannBasis):
    """Closure mapping 32 parameters to min_hsd of the channel output.

    Works on the fixed permuted product ``rho (x) env`` in (A, C, B, D)
    order and evaluates the distance through the spectral form of the
    solver loop.
    """
    x = kron(rho.mat, env.mat)
    x = permute_subsystems(x, (2, 2, 2, 2), (0, 2, 1, 3))
    mats = basis.matrices

    def objective(a: np.ndarray) -> float:
        u_ac = unitary_from_hermitian(np.einsum("n,nij->ij", a[:16], mats))
        u_bd = unitary_from_hermitian(np.einsum("n,nij->ij", a[16:], mats))
        w = np.kron(u_ac, u_bd)
        y = (w @ x @ w.conj().T).reshape((2,) * 8)
        out = np.einsum("icjdkcld->ijkl", y)  # trace out C and D
        pt = out.transpose(0, 3, 2, 1).reshape(4, 4)  # transpose side B
        return _min_hsd_spectrum(np.linalg.eigvalsh(pt))

    def output_state(a: np.ndarray) -> DensityMatrix:
        u_ac = unitary_from_params(a[:16], basis)
        u_bd = unitary_from_params(a[16:], basis)
        return apply_dilation(rho, DilationChannel(env=env, u_ac=u_ac, u_bd=u_bd))

    return objective, output_state


def locc_search(
    rho: DensityMatrix,
    env: DensityMatrix,
    restarts: int = 20,
    evals: int = 2000,
    seed: int = 0,
    jobs: int = 1,
) -> LoccSearchReport:
    """Maximize the output's minimum distance over the 32 dilation parameters.

    Derivative-free (Nelder-Mead) search, restarted from the origin (the
    identity map) and from `restarts - 1` Gaussian starting points with
    per-restart spawned RNG streams; results are merged by restart index, so
    reports are byte-identical for a fixed seed regardless of `jobs`.
    """
    if restarts < 1 or evals < 1:
        raise ValueError("restarts and evals must both be >= 1")
    if tuple(rho.dims) != (2, 2) or tuple(env.dims) != (2, 2):
        raise DimensionMismatch(
            f"search needs a 2x2 system and 2x2 environment, got {rho.dims} and {env.dims}"
        )
    basis = gell_mann(4)
    objective, output_state = _dilation_objective(rho, env, basis)
    baseline = min_hsd(rho)

    streams = np.random.SeedSequence(seed).spawn(restarts)

    def run(index: int) -> tuple[float, np.ndarray]:
        if index == 0:
            x0 = np.zeros(32)
        else:
            x0 = np.random.default_rng(streams[index]).standard_normal(32)
        res = minimize(
            lambda a: -objective(a),
            x0,
            method="Nelder-Mead",
            options={"maxfev": evals, "maxiter": 10 * evals, "xatol": 1e-8, "fatol": 1e-12},
        )
        # res.fun is the best simplex vertex even on budget exhaustion.
        return -float(res.fun), np.asarray(res.x, dtype=float)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(i) for i in range(restarts)]

    best_index = int(np.argmax([v for v, _ in results]))
    best_value, best_params = results[best_index]
    out = output_state(best_params)
    pt = partial_transpose(out.mat, (2, 2), 1)
    spectrum = herm_eig(pt).eigenvalues
    return LoccSearchReport(
        seed=seed,
        restarts=restarts,
        evals=evals,
        baseline_min_hsd=baseline,
        best_value=best_value,
        best_params=best_params,
        best_output_spectrum=spectrum,
        violation=bool(best_value > baseline + 1e-8),
    )
