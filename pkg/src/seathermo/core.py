"""Domain types and the per-particle energy/entropy functionals.

A dilute Boltzmann gas state is a probability vector over single-particle
energy eigenstates. Zero entries are structurally zero: the support set is
fixed at construction and carried with the state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: probabilities below this are snapped to exactly zero at construction
SUPPORT_EPS = 1e-14
#: slack allowed on normalization and on the [0, 1] bounds
NORM_TOL = 1e-12
#: Boltzmann constant in J/K, for callers who want SI entropy units
BOLTZMANN_SI = 1.380649e-23


class StateError(ValueError):
    """Raised for malformed spectra, states, or constants."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EnergySpectrum:
    """Single-particle energy eigenvalues, degenerate values repeated."""

    levels: np.ndarray

    def __post_init__(self):
        lv = np.array(self.levels, dtype=float).ravel()
        if lv.size < 1:
            raise StateError("spectrum needs at least one level")
        if not np.all(np.isfinite(lv)):
            raise StateError("spectrum levels must be finite")
        object.__setattr__(self, "levels", _readonly(lv))

    def __len__(self) -> int:
        return self.levels.size

    @property
    def n(self) -> int:
        return self.levels.size

    @property
    def min(self) -> float:
        return float(self.levels.min())

    @property
    def max(self) -> float:
        return float(self.levels.max())

    @property
    def mean(self) -> float:
        return float(np.mean(self.levels))

    @property
    def span(self) -> float:
        return self.max - self.min

    def distinct(self) -> np.ndarray:
        return np.unique(self.levels)


@dataclass(frozen=True, eq=False)
class StateDistribution:
    """Probability vector over energy eigenstates with an explicit support.

    Build through :func:`validate_state` unless the vector is already clean.
    """

    probs: np.ndarray
    support: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size < 1:
            raise StateError("probabilities must be a non-empty vector")
        # NaN fails every comparison, so these also reject non-finite input
        if not (p.min() >= 0.0 and p.max() <= 1.0 + NORM_TOL):
            raise StateError("probabilities must be finite and lie in [0, 1]")
        total = np.add.reduce(p)
        if not abs(total - 1.0) <= NORM_TOL:
            raise StateError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", _readonly(p))
        object.__setattr__(self, "support", tuple(np.flatnonzero(p > 0.0).tolist()))

    @classmethod
    def _trusted(cls, p: np.ndarray) -> "StateDistribution":
        """Wrap an already-validated vector without re-checking it."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "probs", _readonly(p))
        object.__setattr__(obj, "support", tuple(np.flatnonzero(p > 0.0).tolist()))
        return obj

    def __len__(self) -> int:
        return self.probs.size

    @property
    def is_pure(self) -> bool:
        return len(self.support) == 1

    def support_mask(self) -> np.ndarray:
        return self.probs > 0.0


@dataclass(frozen=True)
class ModelConstants:
    """Entropy unit ``k`` (1 means nats) and relaxation time ``tau``."""

    k: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise StateError("k must be positive and finite")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise StateError("tau must be positive and finite")

    @classmethod
    def si(cls, tau: float = 1.0) -> "ModelConstants":
        return cls(k=BOLTZMANN_SI, tau=tau)


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    state: StateDistribution
    energy: float
    entropy: float
    entropy_rate: float


@dataclass(frozen=True)
class Trajectory:
    points: tuple[TrajectoryPoint, ...]
    spectrum: EnergySpectrum
    constants: ModelConstants

    def __post_init__(self):
        ts = [pt.t for pt in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise StateError("trajectory times must be strictly increasing")
        if any(len(pt.state) != len(self.spectrum) for pt in self.points):
            raise StateError("trajectory states must match the spectrum length")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def times(self) -> np.ndarray:
        return np.array([pt.t for pt in self.points])

    @property
    def probs(self) -> np.ndarray:
        """Samples stacked as a ``(len(self), N)`` array."""
        return np.array([pt.state.probs for pt in self.points])

    @property
    def energies(self) -> np.ndarray:
        return np.array([pt.energy for pt in self.points])

    @property
    def entropies(self) -> np.ndarray:
        return np.array([pt.entropy for pt in self.points])

    @property
    def entropy_rates(self) -> np.ndarray:
        return np.array([pt.entropy_rate for pt in self.points])

    @property
    def final(self) -> TrajectoryPoint:
        return self.points[-1]


def as_spectrum(levels) -> EnergySpectrum:
    return levels if isinstance(levels, EnergySpectrum) else EnergySpectrum(levels)


def xlogx(p: float) -> float:
    """``p ln p`` with the convention ``0 ln 0 = 0``."""
    if not math.isfinite(p) or p < -NORM_TOL or p > 1.0 + NORM_TOL:
        raise StateError(f"xlogx domain is [0, 1], got {p!r}")
    if p <= 0.0:
        return 0.0
    return p * math.log(p)


def xlogx_array(p: np.ndarray) -> np.ndarray:
    """Vectorized :func:`xlogx` without domain checks."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0.0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def stable_sum(x: np.ndarray) -> float:
    # compensated summation only pays off for long vectors
    if x.size > 64:
        return math.fsum(x)
    return float(np.dot(x, np.ones_like(x)))


def stable_dot(a: np.ndarray, b: np.ndarray) -> float:
    if a.size > 64:
        return math.fsum(a * b)
    return float(np.dot(a, b))


def entropy(state: StateDistribution, constants: ModelConstants | None = None) -> float:
    """Entropy ``-k sum p ln p`` of a state."""
    k = 1.0 if constants is None else constants.k
    # adding 0.0 turns -0.0 (pure states) into 0.0
    return -k * stable_sum(xlogx_array(state.probs)) + 0.0


def energy(state: StateDistribution, spectrum) -> float:
    """Mean energy ``sum e_i p_i``."""
    spectrum = as_spectrum(spectrum)
    if len(state) != len(spectrum):
        raise StateError(f"state has {len(state)} entries, spectrum has {len(spectrum)}")
    return stable_sum(spectrum.levels * state.probs)


def validate_state(probs, *, strict: bool = True) -> StateDistribution:
    """Clean a raw probability vector into a :class:`StateDistribution`.

    Entries below ``SUPPORT_EPS`` become exactly zero and the rest is
    renormalized. In strict mode a vector whose sum is off by more than
    ``NORM_TOL`` is rejected; otherwise it is rescaled.
    """
    p = np.array(probs, dtype=float).ravel()
    if p.size == 0:
        raise StateError("empty probability vector")
    if not np.all(np.isfinite(p)):
        raise StateError("probabilities must be finite")
    if p.min() < -NORM_TOL:
        raise StateError(f"negative probability {p.min()!r}")
    total = p.sum()
    if total <= 0.0:
        raise StateError("probability vector is all zero")
    if strict and abs(total - 1.0) > NORM_TOL:
        raise StateError(f"probabilities sum to {total!r}; pass strict=False to normalize")
    p = p / total
    p[p < SUPPORT_EPS] = 0.0
    p /= p.sum()
    return StateDistribution(p)


def pure_state(n: int, j: int) -> StateDistribution:
    p = np.zeros(n)
    p[j] = 1.0
    return StateDistribution(p)


def uniform_state(n: int, support=None) -> StateDistribution:
    p = np.zeros(n)
    idx = list(range(n)) if support is None else sorted(support)
    if not idx:
        raise StateError("uniform state needs a non-empty support")
    p[idx] = 1.0 / len(idx)
    return StateDistribution(p)


def product_distribution(p: StateDistribution, q: StateDistribution) -> StateDistribution:
    """Joint distribution of two independent subsystems (row-major flatten)."""
    return validate_state(np.outer(p.probs, q.probs).ravel(), strict=False)
