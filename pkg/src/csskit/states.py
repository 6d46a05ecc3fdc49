"""Density-matrix construction, validation, named states, and sampling.

Random sampling uses numpy's ``default_rng`` (PCG64). Every sampler takes an
explicit seed or ``numpy.random.Generator``; reproducibility is by seed plus
the algorithm name, and parallel corpora should split streams with
``numpy.random.SeedSequence.spawn``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .config import ATOL, HERM_TOL
from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    StateFileError,
    StateValidationError,
    TraceNotOne,
    UnknownName,
)
from .linalg import hs_norm, is_hermitian, kron, partial_transpose, permute_subsystems

__all__ = [
    "DensityMatrix",
    "Bipartition",
    "validate",
    "named_state",
    "bell_state",
    "ghz_state",
    "w_state",
    "werner_state",
    "max_mixed",
    "random_state",
    "random_product_pure",
    "partial_transpose_cut",
    "grouped_bipartite",
    "state_to_dict",
    "state_from_dict",
    "save_state",
    "load_state",
]


@dataclass(frozen=True)
class DensityMatrix:
    """A quantum state: complex matrix plus subsystem dimension list.

    Use :func:`validate` to build one from untrusted data; the constructor
    itself trusts the caller. The matrix is stored read-only.
    """

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        mat = np.array(self.mat, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class Bipartition:
    """A two-sided split of the subsystem indices.

    `side_a` and `side_b` are disjoint, nonempty, and together cover every
    subsystem of the state they are applied to. By convention the partial
    transpose acts on side B; both choices give identical spectra because the
    two partial transposes are transposes of each other.
    """

    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __post_init__(self) -> None:
        a = tuple(sorted(int(i) for i in self.side_a))
        b = tuple(sorted(int(i) for i in self.side_b))
        if not a or not b:
            raise DimensionMismatch("both sides of a bipartition must be nonempty")
        if set(a) & set(b):
            raise DimensionMismatch(f"bipartition sides overlap: {a} vs {b}")
        if len(set(a)) != len(a) or len(set(b)) != len(b):
            raise DimensionMismatch("bipartition sides contain duplicates")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @classmethod
    def from_cut(cls, side_a: Sequence[int], n_subsystems: int) -> "Bipartition":
        """Build a bipartition from the side-A index list."""
        a = set(int(i) for i in side_a)
        if any(i < 0 or i >= n_subsystems for i in a):
            raise DimensionMismatch(f"cut {sorted(a)} out of range for {n_subsystems} subsystems")
        b = tuple(i for i in range(n_subsystems) if i not in a)
        return cls(side_a=tuple(sorted(a)), side_b=b)

    @classmethod
    def default(cls, n_subsystems: int) -> "Bipartition":
        """Subsystem 0 versus the rest."""
        return cls.from_cut((0,), n_subsystems)

    def check_against(self, dims: Sequence[int]) -> None:
        if set(self.side_a) | set(self.side_b) != set(range(len(dims))):
            raise DimensionMismatch(
                f"bipartition {self.side_a}|{self.side_b} does not cover {len(dims)} subsystems"
            )

    def bipartite_dims(self, dims: Sequence[int]) -> tuple[int, int]:
        """Effective (dim A, dim B) after grouping each side."""
        self.check_against(dims)
        return prod(dims[i] for i in self.side_a), prod(dims[i] for i in self.side_b)


def validate(m: np.ndarray, dims: Sequence[int]) -> DensityMatrix:
    """Check all density-matrix invariants and return the typed state.

    Raises the first violated invariant in priority order
    (DimensionMismatch, NotHermitian, TraceNotOne, NotPSD); the message lists
    every violation found.
    """
    m = np.asarray(m, dtype=complex)
    dims = tuple(int(d) for d in dims)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if prod(dims) != m.shape[0]:
        raise DimensionMismatch(f"prod({dims}) != matrix dimension {m.shape[0]}")

    violations: list[tuple[type[StateValidationError], str]] = []
    if not is_hermitian(m, HERM_TOL):
        violations.append(
            (NotHermitian, f"not Hermitian: ||m - m^dag||_HS = {hs_norm(m - m.conj().T):.3e}")
        )
    trace = complex(np.trace(m))
    if abs(trace - 1.0) > HERM_TOL:
        violations.append((TraceNotOne, f"trace = {trace:.12g}, expected 1"))
    herm = 0.5 * (m + m.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    if min_eig < -ATOL:
        violations.append((NotPSD, f"minimum eigenvalue = {min_eig:.3e} < -{ATOL:g}"))

    if violations:
        cls = violations[0][0]
        raise cls("; ".join(msg for _, msg in violations))
    return DensityMatrix(mat=m, dims=dims)


def bell_state() -> DensityMatrix:
    """The two-qubit state with 1/2 at the four corner entries."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[0, 3] = m[3, 0] = m[3, 3] = 0.5
    return DensityMatrix(m, (2, 2))


def ghz_state() -> DensityMatrix:
    """The three-qubit state with 1/2 at the four corner entries."""
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = m[0, 7] = m[7, 0] = m[7, 7] = 0.5
    return DensityMatrix(m, (2, 2, 2))


def w_state() -> DensityMatrix:
    """The three-qubit state with 1/3 on the single-excitation block."""
    m = np.zeros((8, 8), dtype=complex)
    for i in (1, 2, 4):
        for j in (1, 2, 4):
            m[i, j] = 1.0 / 3.0
    return DensityMatrix(m, (2, 2, 2))


def werner_state(p: float) -> DensityMatrix:
    """Mixture ``p * bell + (1 - p) * I/4`` for ``p`` in [0, 1]."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"werner parameter must be in [0, 1], got {p}")
    m = p * bell_state().mat + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(m, (2, 2))


def max_mixed(dims: Sequence[int]) -> DensityMatrix:
    """The maximally mixed state ``I / prod(dims)``."""
    d = prod(int(x) for x in dims)
    return DensityMatrix(np.eye(d) / d, tuple(dims))


def named_state(
    name: str, p: float | None = None, dims: Sequence[int] | None = None
) -> DensityMatrix:
    """Named reference states: bell, ghz, w, werner(p), max_mixed(dims)."""
    name = name.lower()
    if name == "bell":
        return bell_state()
    if name == "ghz":
        return ghz_state()
    if name == "w":
        return w_state()
    if name == "werner":
        if p is None:
            raise UnknownName("werner requires the mixing parameter p")
        return werner_state(p)
    if name == "max_mixed":
        if dims is None:
            raise UnknownName("max_mixed requires a dimension list")
        return max_mixed(dims)
    raise UnknownName(f"unknown state name {name!r}")


def random_state(dims: Sequence[int], seed) -> DensityMatrix:
    """Sample from the Ginibre (Hilbert-Schmidt) ensemble.

    ``rho = G G^dag / Tr(G G^dag)`` with G filled by independent standard
    complex Gaussians (real part drawn first, then imaginary part).
    `seed` may be an int or a ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(seed)
    d = prod(int(x) for x in dims)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return validate(m, dims)


def random_product_pure(dims: Sequence[int], seed) -> DensityMatrix:
    """Haar-random pure product state, one rank-1 factor per subsystem."""
    rng = np.random.default_rng(seed)
    m = np.ones((1, 1), dtype=complex)
    for d in dims:
        v = rng.standard_normal(int(d)) + 1j * rng.standard_normal(int(d))
        v /= np.linalg.norm(v)
        m = kron(m, np.outer(v, v.conj()))
    return DensityMatrix(m, tuple(dims))


def partial_transpose_cut(m: np.ndarray, dims: Sequence[int], cut: Bipartition) -> np.ndarray:
    """Partial transpose over every subsystem on side B of the cut."""
    cut.check_against(dims)
    out = np.asarray(m)
    for i in cut.side_b:
        out = partial_transpose(out, dims, i)
    return out


def grouped_bipartite(
    m: np.ndarray, dims: Sequence[int], cut: Bipartition
) -> tuple[np.ndarray, tuple[int, int], tuple[int, ...]]:
    """Reorder tensor factors to (side A..., side B...) and group each side.

    Returns the permuted matrix, the grouped (dim A, dim B), and the
    permutation used (apply :func:`permute_subsystems` with its inverse to go
    back).
    """
    cut.check_against(dims)
    perm = cut.side_a + cut.side_b
    grouped = permute_subsystems(m, dims, perm)
    return grouped, cut.bipartite_dims(dims), perm


def state_to_dict(state: DensityMatrix) -> dict:
    """JSON-ready form: ``{"dims": [...], "matrix": [[[re, im], ...], ...]}``."""
    matrix = [
        [[float(z.real), float(z.imag)] for z in row]
        for row in state.mat
    ]
    return {"dims": list(state.dims), "matrix": matrix}


def state_from_dict(data: dict) -> DensityMatrix:
    """Parse and validate the JSON state schema, naming offending fields."""
    if not isinstance(data, dict):
        raise StateFileError("state file must be a JSON object")
    for field in ("dims", "matrix"):
        if field not in data:
            raise StateFileError(f"state file missing field {field!r}")
    dims = data["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise StateFileError("field 'dims' must be a list of positive integers")
    try:
        rows = [
            [complex(float(entry[0]), float(entry[1])) for entry in row]
            for row in data["matrix"]
        ]
        m = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise StateFileError(f"field 'matrix' must be nested [re, im] pairs: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateFileError(f"field 'matrix' must be square, got shape {m.shape}")
    return validate(m, dims)


def save_state(state: DensityMatrix, path) -> None:
    """Write the JSON state schema with full round-trip precision."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh)
        fh.write("\n")


def load_state(path) -> DensityMatrix:
    """Read a JSON state file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StateFileError(f"malformed JSON in {path}: {exc}") from exc
    return state_from_dict(data)
