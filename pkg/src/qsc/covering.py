"""Internal epsilon-coverings of the pure-state manifold.

A covering is a finite code book of pure states whose epsilon-balls blanket
the manifold. The builder follows a two-phase randomized scheme: phase 1
throws Haar-random ball centers, phase 2 packs additional disjoint balls
into whatever the first phase left uncovered. Coverage is then certified
empirically by Monte Carlo sampling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .states import PureState, SeededSampler, sample_amplitudes

_VERIFY_CHUNK = 100_000


class CoveringBounds(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True)
class CoveringSchedule:
    """Parameters of the two-phase construction for a target radius."""

    j_r: int
    epsilon_r: float
    epsilon_p: float


def default_packing_ratio(d: int) -> float:
    """Default ratio x = epsilon_R / epsilon_P, clamped to the x >= 1 domain."""
    big_d = 2 * (d - 1)
    return max(1.0, big_d * math.log(big_d))


def covering_schedule(d: int, epsilon: float, x: float | None = None) -> CoveringSchedule:
    """Split a target radius into phase radii and a phase-1 sample count.

    epsilon_R = x/(1+x) epsilon, epsilon_P = epsilon/(1+x), and
    J_R = ceil(D/epsilon_R^D ln x) with D = 2(d-1), so that phase 1 leaves
    an uncovered region of expected measure at most exp(-J_R epsilon_R^D).
    """
    if d < 2:
        raise ValueError(f"covering construction needs dimension >= 2, got {d}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0,1], got {epsilon}")
    if x is None:
        x = default_packing_ratio(d)
    if x < 1.0:
        raise ValueError(f"packing ratio x must be >= 1, got {x}")
    big_d = 2 * (d - 1)
    eps_r = x / (1.0 + x) * epsilon
    eps_p = eps_r / x
    j_r = math.ceil(big_d / eps_r**big_d * math.log(x))
    return CoveringSchedule(j_r=j_r, epsilon_r=eps_r, epsilon_p=eps_p)


class Covering:
    """An ordered code book of pure states with a declared covering radius.

    Element labels are the positions 0..len-1. ``construction_meta`` records
    how the two-phase builder produced the book; it is None for handcrafted
    books (e.g. the octahedron).
    """

    def __init__(
        self,
        dim: int,
        radius: float,
        elements: list[PureState],
        construction_meta: dict | None = None,
    ):
        if not 0.0 < radius <= 1.0:
            raise ValueError(f"radius must be in (0,1], got {radius}")
        for el in elements:
            if el.dim != dim:
                raise ValueError(f"element dimension {el.dim} != covering dimension {dim}")
        if construction_meta is not None:
            meta = dict(construction_meta)
            if len(elements) != meta["J_R"] + meta["J_P"]:
                raise ValueError("element count inconsistent with J_R + J_P")
            if abs(radius - (meta["epsilon_R"] + meta["epsilon_P"])) > 1e-12:
                raise ValueError("radius must equal epsilon_R + epsilon_P")
            construction_meta = meta
        self.dim = dim
        self.radius = float(radius)
        self.elements = tuple(elements)
        self.construction_meta = construction_meta

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def amplitude_matrix(self) -> np.ndarray:
        """All element amplitudes stacked as a (size, dim) array."""
        return np.array([el.amplitudes for el in self.elements])

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "radius": self.radius,
            "meta": self.construction_meta,
            "elements": [
                {"label": i, **el.to_json()} for i, el in enumerate(self.elements)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Covering":
        entries = sorted(obj["elements"], key=lambda e: e["label"])
        if [e["label"] for e in entries] != list(range(len(entries))):
            raise ValueError("element labels must be exactly 0..len-1")
        elements = [PureState.from_json(e) for e in entries]
        return cls(obj["dim"], obj["radius"], elements, obj.get("meta"))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "Covering":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self) -> str:
        return f"Covering(dim={self.dim}, radius={self.radius:.6g}, size={len(self)})"


@dataclass(frozen=True)
class CoverageReport:
    """Sampled coverage of a code book at a query radius."""

    covered_fraction: float
    worst_gap: float
    num_samples: int
    std_error: float

    def __post_init__(self):
        if not 0.0 <= self.covered_fraction <= 1.0:
            raise ValueError("covered_fraction outside [0,1]")
        if self.worst_gap < 0.0:
            raise ValueError("worst_gap must be >= 0")


def _pure_distances(psis: np.ndarray, book: np.ndarray) -> np.ndarray:
    """Pairwise trace distances between sample rows and book rows."""
    overlap_sq = np.abs(psis @ book.conj().T) ** 2
    return np.sqrt(np.clip(1.0 - overlap_sq, 0.0, None))


def build_internal_covering(
    d: int,
    epsilon: float,
    x: float | None = None,
    fail_streak_limit: int | None = None,
    sampler: SeededSampler | None = None,
) -> Covering:
    """Construct an internal covering of radius epsilon_R + epsilon_P <= epsilon.

    Phase 1 draws J_R Haar-random states. Phase 2 rejection-samples packing
    states whose epsilon_P-balls are disjoint from each other and from every
    phase-1 ball, stopping after ``fail_streak_limit`` consecutive rejections.
    Maximality of the packing is not certifiable; coverage is checked after
    the fact with :func:`coverage_verify`.
    """
    if sampler is None:
        raise ValueError("a SeededSampler is required")
    sched = covering_schedule(d, epsilon, x)
    if x is None:
        x = default_packing_ratio(d)
    if fail_streak_limit is None:
        fail_streak_limit = max(1000, 10 * sched.j_r)
    if fail_streak_limit < 1:
        raise ValueError("fail_streak_limit must be >= 1")
    rng = sampler.rng

    phase1 = sample_amplitudes(d, sched.j_r, rng)
    separation = sched.epsilon_r + sched.epsilon_p
    packing_gap = 2.0 * sched.epsilon_p

    packed: list[np.ndarray] = []
    fails = 0
    while fails < fail_streak_limit:
        cand = sample_amplitudes(d, 1, rng)[0]
        ok = True
        if sched.j_r > 0:
            if _pure_distances(cand[None, :], phase1).min() < separation:
                ok = False
        if ok and packed:
            if _pure_distances(cand[None, :], np.array(packed)).min() < packing_gap:
                ok = False
        if ok:
            packed.append(cand)
            fails = 0
        else:
            fails += 1

    elements = [PureState(a) for a in phase1] + [PureState(a) for a in packed]
    meta = {
        "J_R": sched.j_r,
        "J_P": len(packed),
        "epsilon_R": sched.epsilon_r,
        "epsilon_P": sched.epsilon_p,
        "x": x,
        "seed": sampler.seed,
        "fail_streak_limit": fail_streak_limit,
    }
    return Covering(d, sched.epsilon_r + sched.epsilon_p, elements, meta)


def coverage_verify(
    c: Covering,
    epsilon: float,
    num_samples: int,
    sampler: SeededSampler,
    *,
    workers: int = 1,
) -> CoverageReport:
    """Sampled check of the covering condition at radius epsilon.

    covered_fraction is the fraction of Haar samples whose nearest code-book
    element lies strictly within epsilon; worst_gap is the largest nearest-
    element distance seen. An empty covering covers nothing (worst_gap 1).
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if len(c) == 0:
        return CoverageReport(
            covered_fraction=0.0, worst_gap=1.0, num_samples=num_samples, std_error=0.0
        )
    book = c.amplitude_matrix
    hits = 0
    worst = 0.0
    per_worker = [num_samples // workers] * workers
    for w in range(num_samples % workers):
        per_worker[w] += 1
    for w, n_w in enumerate(per_worker):
        rng = sampler.worker_rng(w, workers)
        done = 0
        while done < n_w:
            m = min(_VERIFY_CHUNK, n_w - done)
            psis = sample_amplitudes(c.dim, m, rng)
            nearest = _pure_distances(psis, book).min(axis=1)
            hits += int((nearest < epsilon).sum())
            worst = max(worst, float(nearest.max()))
            done += m
    frac = hits / num_samples
    return CoverageReport(
        covered_fraction=frac,
        worst_gap=worst,
        num_samples=num_samples,
        std_error=math.sqrt(frac * (1.0 - frac) / num_samples),
    )


def internal_covering_bounds(d: int, epsilon: float) -> CoveringBounds:
    """Bounds on the minimum internal covering number.

    Lower bound (1/eps)^(2(d-1)) by the volume law; upper bound
    5 d ln d (1/eps)^(2(d-1)), the two-phase construction guarantee valid
    from dimension 2 up.
    """
    if d < 2:
        raise ValueError(f"upper bound holds for dimension >= 2, got {d}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0,1], got {epsilon}")
    lower = (1.0 / epsilon) ** (2 * (d - 1))
    upper = 5.0 * d * math.log(d) * lower
    return CoveringBounds(lower=float(lower), upper=float(upper))


def external_covering_lower_bound(d: int, epsilon: float) -> float:
    """Lower bound on the covering number when mixed centers are allowed."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    if d < 4:
        return float((1.0 / (2.0 * epsilon)) ** (2 * (d - 1)))
    return float((1.0 / epsilon) ** (2 * (d - 1)))
