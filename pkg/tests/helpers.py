"""Shared randomized-construction helpers for the test suite."""

import numpy as np

from qsc import DensityMatrix, PureState


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Full-rank (or fixed-rank) random density matrix from a Ginibre factor."""
    k = rank if rank is not None else d
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fixing."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure(d: int, rng: np.random.Generator) -> PureState:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z / np.linalg.norm(z))
