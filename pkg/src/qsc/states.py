"""Quantum state value types, distance measures, and seeded Haar sampling.

States are immutable values. A :class:`PureState` is a unit complex vector
whose global phase carries no meaning; equality of states is therefore a
question for :func:`trace_distance`, never for component-wise comparison.
All randomness flows through :class:`SeededSampler` so that every experiment
is replayable from a (seed, stream_id) pair.
"""

from __future__ import annotations

import numpy as np

# Default validation tolerances; constructors accept overrides.
ATOL_NORM = 1e-12
ATOL_HERMITIAN = 1e-12
ATOL_EIGENVALUE = 1e-10
ATOL_TRACE = 1e-10
ATOL_BLOCH = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_MASK64 = (1 << 64) - 1


class SeededSampler:
    """Deterministic random source with parallel sub-streams.

    Identical ``(seed, stream_id)`` pairs replay the identical sample
    sequence. :meth:`worker_rng` derives independent generators for a
    fixed-size partition of work without consuming the main stream, so
    Monte Carlo results are reproducible per (seed, stream_id, workers).
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if stream_id < 0:
            raise ValueError(f"stream_id must be >= 0, got {stream_id}")
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id)
        self._rng: np.random.Generator | None = None

    @property
    def rng(self) -> np.random.Generator:
        """The sampler's own generator, created lazily and then consumed."""
        if self._rng is None:
            self._rng = np.random.default_rng(
                np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
            )
        return self._rng

    def worker_rng(self, worker: int, num_workers: int) -> np.random.Generator:
        """Independent generator for ``worker`` out of ``num_workers``."""
        if num_workers < 1:
            raise ValueError(f"num_workers must be >= 1, got {num_workers}")
        if not 0 <= worker < num_workers:
            raise ValueError(f"worker {worker} outside [0, {num_workers})")
        return np.random.default_rng(
            np.random.SeedSequence(
                self.seed, spawn_key=(self.stream_id, num_workers, worker)
            )
        )

    def __repr__(self) -> str:
        return f"SeededSampler(seed={self.seed}, stream_id={self.stream_id})"


class PureState:
    """A pure state of a d-dimensional system as a unit complex vector."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, *, atol: float = ATOL_NORM):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size < 1:
            raise ValueError("state dimension must be >= 1")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > atol:
            raise ValueError(f"amplitudes must have unit norm, got {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    @classmethod
    def normalized(cls, vector) -> "PureState":
        """Build a state from any nonzero vector by normalizing it."""
        vec = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, dim: int, index: int = 0) -> "PureState":
        """The computational basis state |index> in dimension dim."""
        if not 0 <= index < dim:
            raise ValueError(f"index {index} outside [0, {dim})")
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: "PureState") -> complex:
        """The inner product <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        """The rank-one projector onto this state."""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PureState":
        amps = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        if amps.size != obj["dim"]:
            raise ValueError("dim field inconsistent with amplitude length")
        return cls(amps)

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


class DensityMatrix:
    """A d x d positive semidefinite, unit-trace Hermitian matrix."""

    __slots__ = ("matrix",)

    def __init__(
        self,
        matrix,
        *,
        atol_hermitian: float = ATOL_HERMITIAN,
        atol_eigenvalue: float = ATOL_EIGENVALUE,
        atol_trace: float = ATOL_TRACE,
    ):
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > atol_hermitian:
            raise ValueError("matrix is not Hermitian within tolerance")
        eigmin = float(np.linalg.eigvalsh(mat)[0])
        if eigmin < -atol_eigenvalue:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {eigmin})")
        tr = complex(np.trace(mat)).real
        if abs(tr - 1.0) > atol_trace:
            raise ValueError(f"trace must equal 1, got {tr!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        if dim < 1:
            raise ValueError("dim must be >= 1")
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, populations) -> "DensityMatrix":
        """Diagonal state with the given populations on the computational basis."""
        return cls(np.diag(np.asarray(populations, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DensityMatrix":
        mat = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        if mat.shape != (obj["dim"], obj["dim"]):
            raise ValueError("dim field inconsistent with matrix shape")
        return cls(mat)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


class BlochVector:
    """A point in the radius-1/2 Bloch ball.

    In this scaling the trace distance between two qubit states equals the
    Euclidean distance between their Bloch vectors.
    """

    __slots__ = ("coords",)

    def __init__(self, coords, *, atol: float = ATOL_BLOCH):
        c = np.array(coords, dtype=float).reshape(-1)
        if c.size != 3:
            raise ValueError("Bloch vector needs exactly 3 coordinates")
        if np.linalg.norm(c) > 0.5 + atol:
            raise ValueError(f"Bloch vector outside the radius-1/2 ball: {c}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __setattr__(self, name, value):
        raise AttributeError("BlochVector is immutable")

    def __repr__(self) -> str:
        x, y, z = self.coords
        return f"BlochVector(({x:.6g}, {y:.6g}, {z:.6g}))"


def _as_matrix(state: PureState | DensityMatrix) -> np.ndarray:
    if isinstance(state, PureState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, DensityMatrix):
        return state.matrix
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def _check_dims(a: PureState | DensityMatrix, b: PureState | DensityMatrix) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def sample_amplitudes(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n Haar-random pure states as an (n, d) complex array.

    Each row is a vector of d complex standard Gaussians normalized to unit
    length, the standard realization of the unitarily invariant measure.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    z = rng.standard_normal((n, 2 * d))
    vecs = z[:, :d] + 1j * z[:, d:]
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return vecs


def haar_sample(d: int, sampler: SeededSampler) -> PureState:
    """One Haar-random pure state in dimension d, advancing the sampler."""
    return PureState(sample_amplitudes(d, 1, sampler.rng)[0])


def trace_distance(a: PureState | DensityMatrix, b: PureState | DensityMatrix) -> float:
    """Trace distance: half the sum of absolute eigenvalues of a - b."""
    _check_dims(a, b)
    eigs = np.linalg.eigvalsh(_as_matrix(a) - _as_matrix(b))
    return float(0.5 * np.abs(eigs).sum())


def fidelity(a: PureState | DensityMatrix, b: PureState | DensityMatrix) -> float:
    """Uhlmann fidelity, computed spectrally.

    The inner matrix sqrt(a) b sqrt(a) is formed on the positive-spectrum
    subspace of a only, so noise eigenvalues (clamped at the PSD validation
    tolerance) cannot inflate the square roots. For rank-one a this reduces
    exactly to <phi|b|phi>.
    """
    _check_dims(a, b)
    am, bm = _as_matrix(a), _as_matrix(b)
    evals, evecs = np.linalg.eigh(am)
    keep = evals > 1e-14
    if not keep.any():
        return 0.0
    scaled = evecs[:, keep] * np.sqrt(evals[keep])
    inner_mat = scaled.conj().T @ bm @ scaled
    inner = np.clip(np.linalg.eigvalsh(inner_mat), 0.0, None)
    return float(min(np.sqrt(inner).sum() ** 2, 1.0))


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    """Bloch vector of a qubit state in the radius-1/2 convention."""
    if rho.dim != 2:
        raise ValueError(f"Bloch representation requires dim 2, got {rho.dim}")
    m = rho.matrix
    coords = 0.5 * np.array(
        [
            np.trace(m @ PAULI_X).real,
            np.trace(m @ PAULI_Y).real,
            np.trace(m @ PAULI_Z).real,
        ]
    )
    return BlochVector(coords)


def bloch_to_density(v: BlochVector) -> DensityMatrix:
    """Inverse of :func:`density_to_bloch`."""
    x, y, z = v.coords
    mat = 0.5 * np.eye(2, dtype=complex) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z
    return DensityMatrix(mat)


def pure_to_bloch(psi: PureState) -> BlochVector:
    """Bloch vector of a pure qubit state (lands on the radius-1/2 sphere)."""
    if psi.dim != 2:
        raise ValueError(f"Bloch representation requires dim 2, got {psi.dim}")
    a, b = psi.amplitudes
    cross = (a.conjugate() * b)
    return BlochVector(
        np.array([cross.real, cross.imag, 0.5 * (abs(a) ** 2 - abs(b) ** 2)])
    )


def bloch_to_pure(v: BlochVector, *, atol: float = 1e-9) -> PureState:
    """Pure qubit state for a point on the radius-1/2 Bloch sphere."""
    r = np.linalg.norm(v.coords)
    if abs(r - 0.5) > atol:
        raise ValueError(f"point is not on the Bloch sphere (norm {r}), no pure state")
    nx, ny, nz = v.coords / r
    theta = np.arccos(np.clip(nz, -1.0, 1.0))
    phi = np.arctan2(ny, nx)
    return PureState(
        np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])
    )
