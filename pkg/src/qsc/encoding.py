"""Deterministic and probabilistic encoders over a pure-state code book.

A deterministic encoder stores the label of the nearest code-book element.
A probabilistic encoder stores a distribution over labels; the decoder then
reproduces the corresponding mixture, which can sit strictly closer to the
target than any single element. For qubits the optimal mixture is found by
exact Euclidean projection onto the convex hull of the book in the Bloch
ball; in higher dimensions a projected subgradient method minimizes the
trace distance directly, certifying its answer with a measurement-based
duality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .covering import Covering
from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    SeededSampler,
    bloch_to_pure,
    pure_to_bloch,
    sample_amplitudes,
)

#: Worst-case trace distance from the Pauli-eigenstate octahedron's hull to
#: the Bloch sphere: (sqrt(3)-1)/(2 sqrt(3)).
OCTAHEDRON_EPSILON = (math.sqrt(3.0) - 1.0) / (2.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class LabelDistribution:
    """A probability distribution over code-book labels."""

    probs: dict

    def __post_init__(self):
        total = 0.0
        for label, p in self.probs.items():
            if not isinstance(label, int) or label < 0:
                raise ValueError(f"labels must be non-negative ints, got {label!r}")
            if p < 0.0:
                raise ValueError(f"probability for label {label} is negative: {p}")
            total += p
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")

    @classmethod
    def point_mass(cls, label: int) -> "LabelDistribution":
        return cls({label: 1.0})

    @classmethod
    def from_weights(cls, weights, *, cutoff: float = 1e-12) -> "LabelDistribution":
        """Distribution from a dense weight vector, dropping negligible entries."""
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        total = w.sum()
        if total <= 0.0:
            raise ValueError("weights must have positive total mass")
        w = w / total
        return cls({int(i): float(p) for i, p in enumerate(w) if p > cutoff})

    def as_array(self, num_labels: int) -> np.ndarray:
        out = np.zeros(num_labels)
        for label, p in self.probs.items():
            if label >= num_labels:
                raise ValueError(f"label {label} outside the book of size {num_labels}")
            out[label] = p
        return out

    def to_json(self) -> dict:
        return {str(label): p for label, p in sorted(self.probs.items())}


@dataclass(frozen=True)
class EncodingResult:
    """Outcome of a probabilistic encoding."""

    distribution: LabelDistribution
    achieved_distance: float
    duality_gap: float
    iterations: int

    def __post_init__(self):
        if not 0.0 <= self.achieved_distance <= 1.0 + 1e-12:
            raise ValueError(f"achieved_distance outside [0,1]: {self.achieved_distance}")
        if self.duality_gap < -1e-9:
            raise ValueError(f"duality gap must be >= -1e-9, got {self.duality_gap}")

    def to_json(self) -> dict:
        return {
            "distribution": self.distribution.to_json(),
            "achieved_distance": self.achieved_distance,
            "duality_gap": self.duality_gap,
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class BitLengthBounds:
    """Bounds on log2 of the label-set size, plus the rate value they share."""

    lower_bits: float
    upper_bits: float
    rate_bits: float
    dim: int
    epsilon: float

    def __post_init__(self):
        if self.lower_bits > self.upper_bits + 1e-12:
            raise ValueError("lower_bits must not exceed upper_bits")


class DetEncoding(NamedTuple):
    label: int
    distance: float


class MinimaxCheck(NamedTuple):
    lhs: float
    rhs: float


def rate_bits(d: int, epsilon: float) -> float:
    """The rate (d-1) log2(1/epsilon) shared by all bit-length bounds."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0,1], got {epsilon}")
    return (d - 1) * math.log2(1.0 / epsilon)


def deterministic_encode(phi: PureState, book: Covering) -> DetEncoding:
    """Nearest-element encoding; ties break toward the smallest label."""
    if len(book) == 0:
        raise ValueError("cannot encode with an empty code book")
    if phi.dim != book.dim:
        raise ValueError(f"dimension mismatch: {phi.dim} vs {book.dim}")
    overlap_sq = np.abs(book.amplitude_matrix.conj() @ phi.amplitudes) ** 2
    dists = np.sqrt(np.clip(1.0 - overlap_sq, 0.0, None))
    label = int(np.argmin(dists))
    return DetEncoding(label=label, distance=float(dists[label]))


def decode(dist: LabelDistribution, book: Covering) -> DensityMatrix:
    """The decoder channel: the mixture of book elements weighted by dist."""
    mat = np.zeros((book.dim, book.dim), dtype=complex)
    for label, p in dist.probs.items():
        if label >= len(book):
            raise ValueError(f"label {label} outside the book of size {len(book)}")
        amp = book.elements[label].amplitudes
        mat += p * np.outer(amp, amp.conj())
    return DensityMatrix(mat)


# ---------------------------------------------------------------------------
# Exact qubit path: Euclidean projection onto the book's hull in the Bloch
# ball via Wolfe's min-norm-point active-set iteration.
# ---------------------------------------------------------------------------


def _min_norm_point(points: np.ndarray, tol: float = 1e-12, max_iter: int = 200):
    """Min-norm point of conv(rows of points); returns (point, weights, iters)."""
    num = points.shape[0]
    norms = np.einsum("ij,ij->i", points, points)
    corral = [int(np.argmin(norms))]
    w = np.array([1.0])
    x = points[corral[0]].copy()
    iters = 0
    for iters in range(1, max_iter + 1):
        xx = float(x @ x)
        dots = points @ x
        j = int(np.argmin(dots))
        if dots[j] >= xx - tol * max(1.0, xx) or j in corral:
            break
        corral.append(j)
        w = np.append(w, 0.0)
        while True:
            sub = points[corral]
            gram = sub @ sub.T + 1.0
            try:
                u = np.linalg.solve(gram, np.ones(len(corral)))
            except np.linalg.LinAlgError:
                u = np.linalg.lstsq(gram, np.ones(len(corral)), rcond=None)[0]
            total = u.sum()
            if total <= 0.0:
                u = np.linalg.lstsq(gram, np.ones(len(corral)), rcond=None)[0]
                total = u.sum()
            v = u / total
            if np.all(v > 1e-12):
                w = v
                x = sub.T @ v
                break
            # walk toward the affine minimizer until a weight hits zero
            diff = w - v
            mask = diff > 1e-12
            theta = min(1.0, float(np.min(w[mask] / diff[mask])))
            w = w + theta * (v - w)
            keep = w > 1e-12
            if keep.all():
                keep[int(np.argmin(w))] = False
            corral = [c for c, k in zip(corral, keep) if k]
            w = w[keep]
            w = w / w.sum()
    weights = np.zeros(num)
    for c, wi in zip(corral, w):
        weights[c] = wi
    return x, weights, iters


def _project_onto_hull(vertices: np.ndarray, target: np.ndarray):
    """Distance from target to conv(vertices) plus optimal hull weights."""
    z, weights, iters = _min_norm_point(vertices - target)
    return float(np.linalg.norm(z)), weights, iters


# ---------------------------------------------------------------------------
# General-dimension path: projected subgradient on the trace-distance
# objective with a duality-gap certificate from the optimal measurement.
# ---------------------------------------------------------------------------


def _simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort method)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    cond = u + (1.0 - css) / idx > 0
    k = int(idx[cond][-1])
    shift = (1.0 - css[k - 1]) / k
    return np.maximum(v + shift, 0.0)


def _gap_certificate(phi_mat: np.ndarray, mixture: np.ndarray, rhos: np.ndarray):
    """Primal value and dual lower bound at one iterate.

    The measurement projector onto the positive eigenspace of
    (phi - mixture) yields both: the primal trace distance
    tr(M (phi - mixture)) and the bound tr(M phi) - max_x tr(M rho_x),
    valid for the true minimum over all mixtures.
    """
    lam, vecs = np.linalg.eigh(phi_mat - mixture)
    pos = lam > 0.0
    primal = float(lam[pos].sum())
    vpos = vecs[:, pos]
    proj = vpos @ vpos.conj().T
    per_element = np.einsum("ij,mji->m", proj, rhos).real
    lower = float(np.real(np.trace(proj @ phi_mat))) - float(per_element.max())
    return primal, lower, per_element


def _encode_qubit_exact(phi: PureState, book: Covering, tol: float) -> EncodingResult:
    vertices = np.array([pure_to_bloch(el).coords for el in book.elements])
    target = pure_to_bloch(phi).coords
    dist, weights, iters = _project_onto_hull(vertices, target)
    distribution = LabelDistribution.from_weights(weights)
    amps = book.amplitude_matrix
    rhos = np.einsum("mi,mj->mij", amps, amps.conj())
    phi_mat = np.outer(phi.amplitudes, phi.amplitudes.conj())
    mixture = np.tensordot(weights / weights.sum(), rhos, axes=1)
    primal, lower, _ = _gap_certificate(phi_mat, mixture, rhos)
    return EncodingResult(
        distribution=distribution,
        achieved_distance=dist,
        duality_gap=max(dist - lower, 0.0),
        iterations=iters,
    )


def _encode_subgradient(
    phi: PureState, book: Covering, tol: float, max_iter: int, step0: float = 0.25
) -> EncodingResult:
    amps = book.amplitude_matrix
    rhos = np.einsum("mi,mj->mij", amps, amps.conj())
    phi_mat = np.outer(phi.amplitudes, phi.amplitudes.conj())
    start = deterministic_encode(phi, book)
    p = np.zeros(len(book))
    p[start.label] = 1.0
    best_h = math.inf
    best_p = p.copy()
    best_lower = -math.inf
    iters = 0
    for k in range(1, max_iter + 1):
        iters = k
        mixture = np.tensordot(p, rhos, axes=1)
        primal, lower, per_element = _gap_certificate(phi_mat, mixture, rhos)
        if primal < best_h:
            best_h = primal
            best_p = p.copy()
        best_lower = max(best_lower, lower)
        if best_h - best_lower <= tol:
            break
        grad = -per_element
        p = _simplex_project(p - (step0 / math.sqrt(k)) * grad)
    return EncodingResult(
        distribution=LabelDistribution.from_weights(best_p),
        achieved_distance=best_h,
        duality_gap=best_h - best_lower,
        iterations=iters,
    )


def probabilistic_encode(
    phi: PureState,
    book: Covering,
    tol: float = 1e-6,
    max_iter: int = 5000,
    *,
    method: str = "auto",
) -> EncodingResult:
    """Distribution over book labels whose decoded mixture is nearest to phi.

    method "auto" uses the exact Bloch-hull projection for qubits and the
    projected subgradient solver otherwise; "bloch" and "subgradient" force
    a path. If the subgradient solver cannot certify ``tol`` within
    ``max_iter`` iterations, the best iterate is returned with its (larger)
    duality gap; achieved_distance - duality_gap is always a valid lower
    bound on the true minimum.
    """
    if len(book) == 0:
        raise ValueError("cannot encode with an empty code book")
    if phi.dim != book.dim:
        raise ValueError(f"dimension mismatch: {phi.dim} vs {book.dim}")
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if method == "auto":
        method = "bloch" if book.dim == 2 else "subgradient"
    if method == "bloch":
        if book.dim != 2:
            raise ValueError("the exact Bloch projection only applies to qubits")
        return _encode_qubit_exact(phi, book, tol)
    if method == "subgradient":
        return _encode_subgradient(phi, book, tol, max_iter)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Minimax check and bit-length bounds.
# ---------------------------------------------------------------------------


def _refine_extremum(
    score,
    start: np.ndarray,
    rng: np.random.Generator,
    steps: int,
    *,
    maximize: bool,
    init_scale: float = 0.2,
    shrink: float = 0.92,
) -> tuple[np.ndarray, float]:
    """Random perturbation descent on the pure-state sphere."""
    best = start
    best_val = score(start)
    scale = init_scale
    d = start.size
    for _ in range(steps):
        cand = best + scale * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
        cand = cand / np.linalg.norm(cand)
        val = score(cand)
        if (val > best_val) if maximize else (val < best_val):
            best, best_val = cand, val
        else:
            scale *= shrink
    return best, best_val


def verify_minimax(
    book: Covering,
    num_phi_samples: int,
    sampler: SeededSampler,
    *,
    restarts: int = 100,
    refine_steps: int = 60,
) -> MinimaxCheck:
    """Sampled two-sided check of the distance/fidelity minimax identity.

    lhs estimates the worst-case probabilistic-encoding distance over pure
    targets; rhs estimates 1 minus the worst-case best single-element
    fidelity. Both extrema are taken over one shared Haar sample pool plus
    local refinements of the most extreme candidates, so for an exact inner
    solver the two values agree up to sampling resolution.
    """
    if len(book) == 0:
        raise ValueError("cannot verify an empty code book")
    if num_phi_samples < 1:
        raise ValueError("num_phi_samples must be >= 1")
    rng = sampler.rng
    amps = sample_amplitudes(book.dim, num_phi_samples, rng)
    book_amps = book.amplitude_matrix

    def prob_distance(vec: np.ndarray) -> float:
        return probabilistic_encode(PureState(vec), book).achieved_distance

    def best_fidelity(vec: np.ndarray) -> float:
        return float((np.abs(book_amps.conj() @ vec) ** 2).max())

    dist_vals = np.array([prob_distance(a) for a in amps])
    fid_vals = np.array([best_fidelity(a) for a in amps])

    lhs = float(dist_vals.max())
    rhs_fid = float(fid_vals.min())

    n_start = min(restarts, num_phi_samples)
    for idx in np.argsort(dist_vals)[-n_start:]:
        _, val = _refine_extremum(prob_distance, amps[idx], rng, refine_steps, maximize=True)
        lhs = max(lhs, val)
    for idx in np.argsort(fid_vals)[:n_start]:
        _, val = _refine_extremum(best_fidelity, amps[idx], rng, refine_steps, maximize=False)
        rhs_fid = min(rhs_fid, val)

    return MinimaxCheck(lhs=lhs, rhs=1.0 - rhs_fid)


def bit_length_bounds_deterministic(d: int, epsilon: float) -> BitLengthBounds:
    """Bit-length bounds for the most compact deterministic encoding."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    rate = rate_bits(d, epsilon)
    lower = 2.0 * rate if d >= 4 else 2.0 * rate_bits(d, 2.0 * epsilon)
    upper = 2.0 * rate + math.log2(5.0 * d * math.log(d))
    return BitLengthBounds(
        lower_bits=lower, upper_bits=upper, rate_bits=rate, dim=d, epsilon=epsilon
    )


def bit_length_bounds_probabilistic(d: int, epsilon: float) -> BitLengthBounds:
    """Bit-length bounds for the most compact probabilistic encoding.

    The lower bound can be negative for small d and large epsilon; callers
    presenting it as a bit count may clamp at zero.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    rate = rate_bits(d, epsilon)
    return BitLengthBounds(
        lower_bits=rate - math.log2(d),
        upper_bits=rate + math.log2(5.0 * d * math.log(d)),
        rate_bits=rate,
        dim=d,
        epsilon=epsilon,
    )


# ---------------------------------------------------------------------------
# The Pauli-eigenstate octahedron demonstration.
# ---------------------------------------------------------------------------

_SQRT_HALF = 1.0 / math.sqrt(2.0)


def octahedron_book() -> Covering:
    """The six Pauli eigenstates as a code book.

    Label order: +x, -x, +y, -y, +z, -z. Its covering radius is
    sqrt(OCTAHEDRON_EPSILON): the farthest sphere point from the vertex set
    sits over a face center, at hull distance OCTAHEDRON_EPSILON.
    """
    vectors = [
        [_SQRT_HALF, _SQRT_HALF],
        [_SQRT_HALF, -_SQRT_HALF],
        [_SQRT_HALF, 1j * _SQRT_HALF],
        [_SQRT_HALF, -1j * _SQRT_HALF],
        [1.0, 0.0],
        [0.0, 1.0],
    ]
    elements = [PureState(np.array(v, dtype=complex)) for v in vectors]
    return Covering(2, math.sqrt(OCTAHEDRON_EPSILON), elements)


def farthest_from_octahedron() -> PureState:
    """A pure state over a face center, farthest from the octahedron's hull."""
    direction = np.ones(3) / (2.0 * math.sqrt(3.0))
    return bloch_to_pure(BlochVector(direction))


def octahedron_demo() -> dict:
    """Worst-case encoder distances for the octahedron book.

    Returns the probabilistic (hull) distance epsilon, the deterministic
    (vertex) distance delta at the same farthest target, and delta^2 -
    epsilon, which vanishes for sphere geometry.
    """
    book = octahedron_book()
    far = farthest_from_octahedron()
    eps = probabilistic_encode(far, book).achieved_distance
    delta = deterministic_encode(far, book).distance
    return {
        "epsilon": eps,
        "delta": delta,
        "delta_squared_minus_epsilon": delta**2 - eps,
    }
