"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from csskit import (
    DensityMatrix,
    DilationChannel,
    InvalidCss,
    closest_separable,
    max_mixed,
    negativity,
    random_state,
)
from csskit.channels import gell_mann, unitary_from_params

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def random_entangled(dims, rng, floor: float = 1e-3) -> DensityMatrix:
    """Rejection-sample a state with negativity above `floor`."""
    while True:
        s = random_state(dims, rng)
        if negativity(s) > floor:
            return s


def random_entangled_solvable(dims, rng, floor: float = 1e-3) -> DensityMatrix:
    """Entangled state on which the solver yields a valid closest state.

    A small fraction of states (about 1e-4 of 2x2, a few percent of 2x3
    Ginibre draws) make the three-step candidate fail reverse-PT positivity
    and raise InvalidCss; those are rejected here.
    """
    while True:
        s = random_entangled(dims, rng, floor)
        try:
            closest_separable(s)
        except InvalidCss:
            continue
        return s


_G4 = gell_mann(4)


def random_local_unital_dilation(rng) -> DilationChannel:
    """Local unital channel: random product dilation over a maximally mixed env."""
    u_ac = unitary_from_params(rng.standard_normal(16), _G4)
    u_bd = unitary_from_params(rng.standard_normal(16), _G4)
    return DilationChannel(env=max_mixed((2, 2)), u_ac=u_ac, u_bd=u_bd)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
