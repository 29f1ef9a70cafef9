"""Volumes of epsilon-balls on the pure-state manifold.

Covers the exact volume law for pure centers, Monte Carlo estimation for
arbitrary centers, the trace-distance lower bound f for mixed centers, and
the integral upper bound g on the mixed-center ball volume together with
its dimension-4 closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .states import DensityMatrix, PureState, SeededSampler, sample_amplitudes

_MC_CHUNK = 200_000


@dataclass(frozen=True)
class VolumeEstimate:
    """Monte Carlo estimate of an epsilon-ball volume with its Bernoulli error."""

    point_estimate: float
    std_error: float
    num_samples: int
    epsilon: float
    dim: int

    def __post_init__(self):
        if not 0.0 <= self.point_estimate <= 1.0:
            raise ValueError(f"point_estimate outside [0,1]: {self.point_estimate}")
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if not (self.std_error >= 0.0 and self.std_error <= 0.5 / math.sqrt(self.num_samples) + 1e-15):
            raise ValueError(f"std_error {self.std_error} violates the Bernoulli bound")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in (0,1], got {self.epsilon}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def to_row(self, p0: float | None = None, seed: int | None = None) -> dict:
        """Flat record for CSV/JSON reporting."""
        return {
            "dim": self.dim,
            "epsilon": self.epsilon,
            "p0": p0,
            "estimate": self.point_estimate,
            "std_error": self.std_error,
            "num_samples": self.num_samples,
            "seed": seed,
        }


@dataclass(frozen=True)
class BallSpec:
    """An epsilon-ball around a (possibly mixed) center state."""

    center: DensityMatrix
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in (0,1], got {self.epsilon}")


def ball_volume_exact(epsilon: float, d: int) -> float:
    """Exact measure of an epsilon-ball with a pure center: epsilon^(2(d-1))."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0,1], got {epsilon}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return float(epsilon ** (2 * (d - 1)))


def _distances_to_center(psis: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Trace distances from a batch of pure states (rows) to a fixed center."""
    deltas = np.einsum("ni,nj->nij", psis, psis.conj()) - center
    eigs = np.linalg.eigvalsh(deltas)
    return 0.5 * np.abs(eigs).sum(axis=1)


def ball_volume_mc(
    spec: BallSpec,
    num_samples: int,
    sampler: SeededSampler,
    *,
    workers: int = 1,
) -> VolumeEstimate:
    """Estimate the ball volume as the hit fraction of Haar samples.

    Samples are partitioned across ``workers`` deterministic sub-streams, so
    the estimate is reproducible for a fixed (sampler, workers) pair.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    d = spec.center.dim
    center = spec.center.matrix
    hits = 0
    per_worker = [num_samples // workers] * workers
    for w in range(num_samples % workers):
        per_worker[w] += 1
    for w, n_w in enumerate(per_worker):
        rng = sampler.worker_rng(w, workers)
        done = 0
        while done < n_w:
            m = min(_MC_CHUNK, n_w - done)
            psis = sample_amplitudes(d, m, rng)
            dist = _distances_to_center(psis, center)
            hits += int((dist < spec.epsilon).sum())
            done += m
    p_hat = hits / num_samples
    std_error = math.sqrt(p_hat * (1.0 - p_hat) / num_samples)
    return VolumeEstimate(
        point_estimate=p_hat,
        std_error=std_error,
        num_samples=num_samples,
        epsilon=spec.epsilon,
        dim=d,
    )


def f_lower_bound(rho: DensityMatrix, psi: PureState) -> float:
    """Two-dimensional compression lower bound on the trace distance T(psi, rho).

    Uses the plane spanned by psi and a top eigenvector |0> of rho, with
    q the weight of rho on the component of psi orthogonal to |0>:

        f = 1/2 sqrt((1 + p0 - q)^2 - 4 (p0 - q) |<0|psi>|^2) + (1 - p0 - q)/2

    Equals the trace distance exactly when rho is pure. When psi is
    numerically parallel to |0> the continuous limit 1 - p0 is returned.
    """
    if rho.dim != psi.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {psi.dim}")
    evals, evecs = np.linalg.eigh(rho.matrix)
    p0 = float(evals[-1])
    top = evecs[:, -1]
    c = np.vdot(top, psi.amplitudes)
    overlap = min(abs(c) ** 2, 1.0)
    if overlap > 1.0 - 1e-12:
        return 1.0 - p0
    residual = psi.amplitudes - c * top
    perp = residual / np.linalg.norm(residual)
    q = float(np.real(np.vdot(perp, rho.matrix @ perp)))
    disc = (1.0 + p0 - q) ** 2 - 4.0 * (p0 - q) * overlap
    return 0.5 * math.sqrt(max(disc, 0.0)) + 0.5 * (1.0 - p0 - q)


def _check_g_domain(d: int, epsilon: float) -> None:
    if d < 4 or int(d) != d:
        raise ValueError(f"the volume bound needs integer dimension >= 4, got {d}")
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")


def g_integral(d: int, epsilon: float, p0: float) -> float:
    """Upper bound on the mixed-center ball volume, by adaptive quadrature.

    The integrand is (d-2)(1-x)^(d-3) delta((1-p0)x)^(2(d-1)) on [0, 1]
    with delta(q)^2 = (eps+q)(p0+eps-1)/(p0-q). Returns 0 when p0 <= 1-eps
    (the ball then contains no pure states at all).
    """
    _check_g_domain(d, epsilon)
    if not 0.0 < p0 <= 1.0:
        raise ValueError(f"p0 must be in (0, 1], got {p0}")
    if p0 <= 1.0 - epsilon:
        return 0.0

    def integrand(x: float) -> float:
        q = (1.0 - p0) * x
        delta_sq = (epsilon + q) * (p0 + epsilon - 1.0) / (p0 - q)
        return (d - 2) * (1.0 - x) ** (d - 3) * delta_sq ** (d - 1)

    value, abserr = quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-13, limit=200)
    if abserr > 1e-10:
        raise RuntimeError(f"quadrature error estimate {abserr} above 1e-10")
    return float(value)


def _one_minus_log1p_ratio(w: float) -> float:
    # (1 - log1p(w)/w)/w; series below the cancellation threshold
    if abs(w) < 1e-4:
        return 0.5 - w / 3.0 + w * w / 4.0 - w**3 / 5.0 + w**4 / 6.0
    return (1.0 - math.log1p(w) / w) / w


def g4_coefficients(epsilon: float, p0: float) -> tuple[float, float]:
    """The (a, b) pair entering the d=4 closed form."""
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    if not 1.0 - epsilon < p0 < 1.0:
        raise ValueError(f"p0 must lie strictly inside (1-epsilon, 1), got {p0}")
    return (2.0 * p0 - 1.0) / (epsilon + p0), p0 / (epsilon + p0)


def g4_closed_form(epsilon: float, p0: float) -> float:
    """Closed form of the d=4 volume bound, for p0 strictly inside (1-eps, 1).

    With a = (2 p0 - 1)/(eps + p0) and b = p0/(eps + p0):

        g = 2 (p0+eps-1)^3 [ (1 - 6b - a b^2)/(2 a b^2)
                             + 3(a+1)/(a(b-a)) (1 - a/(b-a) ln(b/a)) ]

    The logarithmic term is rearranged around log1p so the evaluation stays
    accurate in the p0 -> 1 limit, where b - a vanishes.
    """
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    if not 1.0 - epsilon < p0 < 1.0:
        raise ValueError(
            f"p0 must lie strictly inside (1-epsilon, 1), got {p0}; "
            "use g_integral at the endpoints"
        )
    a, b = g4_coefficients(epsilon, p0)
    term1 = (1.0 - 6.0 * b - a * b * b) / (2.0 * a * b * b)
    # 3(a+1)/(a(b-a)) * (1 - a/(b-a) * ln(b/a)) == 3(a+1)/a^2 * phi((b-a)/a)
    term2 = 3.0 * (a + 1.0) / (a * a) * _one_minus_log1p_ratio((b - a) / a)
    return 2.0 * (p0 + epsilon - 1.0) ** 3 * (term1 + term2)


def external_ball_bound(epsilon: float, d: int) -> float:
    """Upper bound on the ball volume valid for any (mixed) center.

    (2 eps)^(2(d-1)) in low dimensions; the tight eps^(2(d-1)) once d >= 4.
    Only valid for epsilon <= 1/2.
    """
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if d < 4:
        return float((2.0 * epsilon) ** (2 * (d - 1)))
    return float(epsilon ** (2 * (d - 1)))
