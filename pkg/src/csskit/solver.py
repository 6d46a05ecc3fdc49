"""Closest separable / closest PPT state via the three-step spectral loop.

The loop works on the partial transpose of the input. Each pass clips the
negative part of the spectrum, measures the trace deficit N and the surviving
rank r, and either stops (N = 0) or shifts the whole spectrum by N/r using
the full-dimension identity. Every iterate is diagonal in the eigenbasis of
the input's partial transpose, so the minimum squared distance is a function
of that spectrum alone; the closed-form case expressions below exploit this
and serve as an independent check on the matrix pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .config import ATOL, SOLVER_TOL
from .errors import InvalidCss, MaxIterationsExceeded, StateValidationError
from .linalg import herm_eig, hs_distance_sq, hs_norm, rank_with_tol
from .states import (
    Bipartition,
    DensityMatrix,
    grouped_bipartite,
    partial_transpose_cut,
    random_product_pure,
    validate,
)

__all__ = [
    "IterationRecord",
    "CssResult",
    "CaseFormulaResult",
    "VerifyReport",
    "closest_separable",
    "min_hsd",
    "case_formula",
    "verify_result",
]

# Bipartite shapes where PPT certifies separability.
_SEPARABLE_CERTIFIED_DIMS = {(2, 2), (2, 3)}

LABEL_SEPARABLE = "separable-certified"
LABEL_PPT_ONLY = "ppt-only"


@dataclass(frozen=True)
class IterationRecord:
    """One pass of the loop: input spectrum, trace deficit, rank, shift."""

    spectrum_in: np.ndarray
    n_i: float
    r_i: int
    shift: float


@dataclass(frozen=True)
class CssResult:
    """Solver output: the closest state, its distance, and the full trace."""

    css: DensityMatrix
    distance_sq: float
    iterations: tuple[IterationRecord, ...]
    label: str
    cut: Bipartition


@dataclass(frozen=True)
class CaseFormulaResult:
    """Closed-form classification of a partial-transpose spectrum.

    `distance_sq` is present (not None) exactly when `case_id` is not
    ``"other"``; all-nonnegative spectra are classified ``"separable"`` with
    distance 0.
    """

    case_id: str
    distance_sq: float | None


def _resolve_cut(rho: DensityMatrix, cut: Bipartition | None) -> Bipartition:
    resolved = Bipartition.default(len(rho.dims)) if cut is None else cut
    resolved.check_against(rho.dims)
    return resolved


def _label_for(rho: DensityMatrix, cut: Bipartition) -> str:
    da, db = cut.bipartite_dims(rho.dims)
    if tuple(sorted((da, db))) in _SEPARABLE_CERTIFIED_DIMS:
        return LABEL_SEPARABLE
    return LABEL_PPT_ONLY


def closest_separable(
    rho: DensityMatrix, cut: Bipartition | None = None, tol: float = SOLVER_TOL
) -> CssResult:
    """Closest separable (2x2, 2x3) or closest PPT state across `cut`.

    Starting from the partial transpose of `rho`, each iteration averages the
    matrix with its operator absolute value (clipping negative eigenvalues),
    then redistributes the clipped weight N over the surviving rank r by
    adding ``(N/r) * I`` with the full-dimension identity. The loop stops
    when ``|N| <= tol`` and undoes the partial transpose.

    The result is labelled ``separable-certified`` only for effective 2x2 or
    2x3 bipartitions; elsewhere PPT does not imply separability and the
    label is ``ppt-only``.

    Raises
    ------
    MaxIterationsExceeded
        If more than ``dim`` passes would be needed.
    InvalidCss
        If the converged candidate fails density-matrix validation. It is
        reported, never silently repaired.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    cut = _resolve_cut(rho, cut)
    dim = rho.dim
    current = partial_transpose_cut(rho.mat, rho.dims, cut)

    records: list[IterationRecord] = []
    css_pt: np.ndarray | None = None
    for _ in range(dim):
        eig = herm_eig(current)
        clipped = np.maximum(eig.eigenvalues, 0.0)
        r = rank_with_tol(clipped, ATOL)
        n = 1.0 - float(clipped.sum())
        records.append(
            IterationRecord(
                spectrum_in=eig.eigenvalues,
                n_i=n,
                r_i=r,
                shift=n / r if r else float("nan"),
            )
        )
        if abs(n) <= tol:
            css_pt = eig.reconstruct(clipped)
            break
        if r < 1:
            raise InvalidCss("positive part vanished before convergence")
        current = eig.reconstruct(clipped) + (n / r) * np.eye(dim)
    if css_pt is None:
        raise MaxIterationsExceeded(f"no convergence within {dim} iterations")

    css_pt = 0.5 * (css_pt + css_pt.conj().T)
    css_mat = partial_transpose_cut(css_pt, rho.dims, cut)
    try:
        css = validate(css_mat, rho.dims)
    except StateValidationError as exc:
        raise InvalidCss(f"converged candidate is not a valid density matrix: {exc}") from exc

    return CssResult(
        css=css,
        distance_sq=hs_distance_sq(rho.mat, css.mat),
        iterations=tuple(records),
        label=_label_for(rho, cut),
        cut=cut,
    )


def min_hsd(rho: DensityMatrix, cut: Bipartition | None = None, tol: float = SOLVER_TOL) -> float:
    """Minimum squared Hilbert-Schmidt distance to the separable (PPT) set."""
    return closest_separable(rho, cut, tol).distance_sq


def _min_hsd_spectrum(spectrum: Sequence[float], tol: float = SOLVER_TOL) -> float:
    """Distance from the loop run purely on the spectrum (shared eigenbasis).

    Every iterate of the matrix loop is diagonal in the eigenbasis of the
    starting partial transpose, so the final distance is the plain Euclidean
    distance between the initial and final eigenvalue vectors. Used as a
    fast objective inside the channel search; equality with :func:`min_hsd`
    is property-tested.
    """
    w0, final, _ = _run_spectral(spectrum, tol)
    return float(np.sum((w0 - final) ** 2))


def _run_spectral(
    spectrum: Sequence[float], tol: float = SOLVER_TOL
) -> tuple[np.ndarray, np.ndarray, list[tuple[int, int, float]]]:
    """Spectral form of the loop; see :func:`_min_hsd_spectrum`."""
    w0 = np.sort(np.asarray(spectrum, dtype=float))[::-1]
    w = w0.copy()
    trace: list[tuple[int, int, float]] = []
    for _ in range(len(w0)):
        clipped = np.maximum(w, 0.0)
        zeroed = int(np.sum(w < -ATOL))
        r = int(np.sum(clipped > ATOL))
        n = 1.0 - float(clipped.sum())
        trace.append((zeroed, r, n))
        if abs(n) <= tol:
            return w0, clipped, trace
        if r < 1:
            raise MaxIterationsExceeded("positive part vanished")
        w = clipped + n / r
    raise MaxIterationsExceeded(f"no convergence within {len(w0)} iterations")


def case_formula(spectrum: Sequence[float], dims: Sequence[int]) -> CaseFormulaResult:
    """Classify a partial-transpose spectrum and evaluate its closed form.

    Covers the six closed-form cases for 2x2 (one negative eigenvalue) and
    2x3 (one or two negative eigenvalues). Case A converges right after the
    first redistribution; case B needs one more pass because the smallest
    surviving eigenvalue is pushed negative. The classification is read off
    a numerical run of the spectral loop, so deeper cascades and spectra
    with rank-deficient positive part fall through to ``"other"``.
    """
    w = np.sort(np.asarray(spectrum, dtype=float))[::-1]
    total = float(w.sum())
    if abs(total - 1.0) > ATOL:
        raise ValueError(f"spectrum must sum to 1 within {ATOL:g}, got {total!r}")
    d = len(w)
    if prod(int(x) for x in dims) != d:
        raise ValueError(f"prod({tuple(dims)}) != spectrum length {d}")

    n_neg = int(np.sum(w < -ATOL))
    if n_neg == 0:
        return CaseFormulaResult(case_id="separable", distance_sq=0.0)

    shape = tuple(sorted(int(x) for x in dims))
    if shape not in ((2, 2), (2, 3)):
        return CaseFormulaResult(case_id="other", distance_sq=None)

    try:
        _, _, trace = _run_spectral(w)
    except MaxIterationsExceeded:
        return CaseFormulaResult(case_id="other", distance_sq=None)

    r1 = trace[0][1]
    full_rank = d - n_neg
    is_case_a = len(trace) == 2 and r1 == full_rank and trace[1][0] == n_neg
    is_case_b = (
        len(trace) == 3
        and r1 == full_rank
        and trace[1][0] == n_neg + 1
        and trace[2][0] == n_neg + 1
    )

    negs = np.abs(w[d - n_neg:])
    if shape == (2, 2) and n_neg == 1:
        lam4 = float(negs[0])
        lam3 = float(w[2])
        if is_case_a:
            return CaseFormulaResult("2x2-A", lam4**2 / 3.0 + lam4**2)
        if is_case_b:
            return CaseFormulaResult("2x2-B", (lam4 - lam3) ** 2 / 2.0 + lam3**2 + lam4**2)
    elif shape == (2, 3) and n_neg == 1:
        lam6 = float(negs[0])
        lam5 = float(w[4])
        if is_case_a:
            return CaseFormulaResult("2x3-1neg-A", lam6**2 / 5.0 + lam6**2)
        if is_case_b:
            return CaseFormulaResult("2x3-1neg-B", (lam6 - lam5) ** 2 / 4.0 + lam5**2 + lam6**2)
    elif shape == (2, 3) and n_neg == 2:
        lam5, lam6 = float(negs[0]), float(negs[1])
        lam4 = float(w[3])
        if is_case_a:
            return CaseFormulaResult("2x3-2neg-A", (lam5 + lam6) ** 2 / 4.0 + lam5**2 + lam6**2)
        if is_case_b:
            return CaseFormulaResult(
                "2x3-2neg-B", (lam5 + lam6 - lam4) ** 2 / 3.0 + lam4**2 + lam5**2 + lam6**2
            )
    return CaseFormulaResult(case_id="other", distance_sq=None)


@dataclass(frozen=True)
class VerifyReport:
    """Post-hoc consistency checks for a solver result; lists failures."""

    commutator_hs: float
    commutator_ok: bool
    css_psd_ok: bool
    css_ppt_ok: bool
    case: CaseFormulaResult
    formula_ok: bool | None
    perturbation_min: float
    perturbation_ok: bool

    @property
    def passed(self) -> bool:
        checks = [self.commutator_ok, self.css_psd_ok, self.css_ppt_ok, self.perturbation_ok]
        if self.formula_ok is not None:
            checks.append(self.formula_ok)
        return all(checks)

    def failures(self) -> list[str]:
        out = []
        if not self.commutator_ok:
            out.append(f"commutator ||[rho^G, css^G]|| = {self.commutator_hs:.3e} > 1e-8")
        if not self.css_psd_ok:
            out.append("css is not PSD")
        if not self.css_ppt_ok:
            out.append("css is not PPT")
        if self.formula_ok is False:
            out.append(f"distance disagrees with case formula ({self.case.case_id})")
        if not self.perturbation_ok:
            out.append(
                f"first-order descent direction found (min = {self.perturbation_min:.3e})"
            )
        return out


def verify_result(
    rho: DensityMatrix,
    result: CssResult,
    probes: int = 100,
    seed: int = 0,
    formula_tol: float = 1e-9,
) -> VerifyReport:
    """Independent checks on a solver result.

    (a) the input's partial transpose commutes with the output's,
    (b) the output is PSD and PPT,
    (c) the distance matches the closed-form case expression when one
        applies, and
    (d) no random separable perturbation direction decreases the distance to
        first order (supporting-hyperplane property of the projection).
    """
    cut = result.cut
    rho_pt = partial_transpose_cut(rho.mat, rho.dims, cut)
    css_pt = partial_transpose_cut(result.css.mat, rho.dims, cut)

    comm = hs_norm(rho_pt @ css_pt - css_pt @ rho_pt)
    psd_ok = float(np.linalg.eigvalsh(result.css.mat)[0]) >= -ATOL
    ppt_ok = float(np.linalg.eigvalsh(css_pt)[0]) >= -ATOL

    case = case_formula(np.linalg.eigvalsh(rho_pt), rho.dims)
    if case.distance_sq is None:
        formula_ok: bool | None = None
    else:
        formula_ok = abs(result.distance_sq - case.distance_sq) <= formula_tol

    # First-order change along sigma - css for separable probes sigma.
    rho_g, (da, db), _ = grouped_bipartite(rho.mat, rho.dims, cut)
    css_g, _, _ = grouped_bipartite(result.css.mat, rho.dims, cut)
    grad = css_g - rho_g
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(probes):
        sigma = random_product_pure((da, db), rng).mat
        slope = 2.0 * float(np.real(np.trace(grad @ (sigma - css_g))))
        worst = min(worst, slope)

    return VerifyReport(
        commutator_hs=float(comm),
        commutator_ok=comm <= 1e-8,
        css_psd_ok=psd_ok,
        css_ppt_ok=ppt_ok,
        case=case,
        formula_ok=formula_ok,
        perturbation_min=float(worst),
        perturbation_ok=worst >= -1e-8,
    )
