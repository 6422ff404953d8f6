"""Canonical and partially canonical equilibrium states of a finite spectrum.

Exponentials are always evaluated relative to a reference level so that
``|beta| * span`` can be arbitrarily large: the lowest in-support level for
``beta >= 0`` and the highest one for ``beta < 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    EnergySpectrum,
    ModelConstants,
    StateDistribution,
    StateError,
    as_spectrum,
    energy,
    entropy,
)


class PartitionFunction(NamedTuple):
    """Shifted partition sum ``sum exp(-beta (e_i - shift))`` and its shift."""

    shifted: float
    shift: float
    beta: float

    @property
    def log_value(self) -> float:
        """``ln Z`` of the unshifted sum."""
        return math.log(self.shifted) - self.beta * self.shift

    @property
    def value(self) -> float:
        """Unshifted ``Z``; may overflow to ``inf`` for extreme ``beta``."""
        with np.errstate(over="ignore"):
            return float(self.shifted * np.exp(-self.beta * self.shift))


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    beta: float
    temperature: float
    partition_function: PartitionFunction
    distribution: StateDistribution
    support: tuple[int, ...]
    energy: float
    entropy: float

    @property
    def infinite_temperature(self) -> bool:
        return self.beta == 0.0

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)


class Verdict(str, enum.Enum):
    STABLE = "stable"
    PARTIAL = "partial"
    NONE = "none"


def _support_index(spectrum: EnergySpectrum, support) -> np.ndarray:
    if support is None:
        return np.arange(len(spectrum))
    idx = np.unique(np.asarray(list(support), dtype=int))
    if idx.size == 0:
        raise StateError("support must be non-empty")
    if idx[0] < 0 or idx[-1] >= len(spectrum):
        raise StateError("support index out of range")
    return idx


def _reference(sub: np.ndarray, beta: float) -> float:
    return float(sub.min() if beta >= 0 else sub.max())


def partition_function(beta: float, spectrum, support=None) -> PartitionFunction:
    """Partition sum over ``support`` (all levels by default)."""
    spectrum = as_spectrum(spectrum)
    sub = spectrum.levels[_support_index(spectrum, support)]
    beta = float(beta)
    ref = _reference(sub, beta)
    if math.isinf(beta):
        # only the extremal (possibly degenerate) levels survive
        return PartitionFunction(float(np.count_nonzero(sub == ref)), ref, beta)
    return PartitionFunction(float(np.sum(np.exp(-beta * (sub - ref)))), ref, beta)


def _weights(beta: float, sub: np.ndarray) -> np.ndarray:
    ref = _reference(sub, beta)
    if math.isinf(beta):
        w = (sub == ref).astype(float)
    else:
        w = np.exp(-beta * (sub - ref))
    return w / w.sum()


def canonical_distribution(beta: float, spectrum, support=None) -> StateDistribution:
    """``p_j ∝ exp(-beta e_j)`` on ``support``, exactly zero elsewhere."""
    spectrum = as_spectrum(spectrum)
    idx = _support_index(spectrum, support)
    p = np.zeros(len(spectrum))
    p[idx] = _weights(float(beta), spectrum.levels[idx])
    return StateDistribution(p / p.sum())


def _relative_energy(beta: float, sub: np.ndarray, ref: float) -> tuple[float, float]:
    """``E(beta) - ref`` and ``Var(e)`` for the canonical state on ``sub``."""
    w = _weights(beta, sub)
    d = sub - ref
    m = float(np.dot(w, d))
    var = float(np.dot(w, (d - m) ** 2))
    return m, var


def _solve_beta(target: float, sub: np.ndarray, mean: float) -> float:
    lo, hi = float(sub.min()), float(sub.max())
    span = hi - lo
    # measure energies from the near end so tails keep relative precision
    ref = lo if target < mean else hi
    goal = target - ref

    def f(b):
        m, var = _relative_energy(b, sub, ref)
        return m - goal, var

    # f is strictly decreasing in beta
    a, b = -1.0 / span, 1.0 / span
    while f(a)[0] < 0:
        a *= 2.0
    while f(b)[0] > 0:
        b *= 2.0
    x = 0.5 * (a + b)
    fx, var = f(x)
    for _ in range(400):
        if fx == 0.0:
            return x
        if fx > 0:
            a = x
        else:
            b = x
        step = fx / var if var > 0 else math.inf
        xn = x + step
        if not (a < xn < b) or abs(step) > 0.5 * (b - a):
            xn = 0.5 * (a + b)
        if xn == x or b - a <= 4 * np.spacing(max(abs(a), abs(b))):
            return xn
        x = xn
        fx, var = f(x)
    return x


def _solution(beta: float, spectrum: EnergySpectrum, idx: np.ndarray, k: float) -> EquilibriumSolution:
    dist = canonical_distribution(beta, spectrum, idx)
    if beta == 0.0:
        temperature = math.inf
    elif math.isinf(beta):
        temperature = math.copysign(0.0, beta)
    else:
        temperature = 1.0 / (k * beta)
    return EquilibriumSolution(
        beta=beta,
        temperature=temperature,
        partition_function=partition_function(beta, spectrum, idx),
        distribution=dist,
        support=tuple(int(i) for i in idx),
        energy=energy(dist, spectrum),
        entropy=entropy(dist, ModelConstants(k=k)),
    )


def beta_from_energy(E: float, spectrum, support=None, *, k: float = 1.0) -> EquilibriumSolution:
    """Canonical state over ``support`` whose mean energy is ``E``.

    Energies at the extremal in-support levels give the zero-temperature
    states with ``beta = +inf`` (bottom) or ``-inf`` (top).
    """
    spectrum = as_spectrum(spectrum)
    idx = _support_index(spectrum, support)
    sub = spectrum.levels[idx]
    lo, hi = float(sub.min()), float(sub.max())
    E = float(E)
    if not math.isfinite(E) or E < lo or E > hi:
        raise StateError(f"energy {E!r} outside [{lo!r}, {hi!r}]")
    if lo == hi:
        return _solution(0.0, spectrum, idx, k)
    if E == lo:
        return _solution(math.inf, spectrum, idx, k)
    if E == hi:
        return _solution(-math.inf, spectrum, idx, k)
    mean = float(np.mean(sub))
    if E == mean:
        return _solution(0.0, spectrum, idx, k)
    return _solution(_solve_beta(E, sub, mean), spectrum, idx, k)


def temperature_of_stable_state(E: float, spectrum, constants: ModelConstants | None = None) -> float:
    """Temperature ``1/(k beta)`` of the stable state at energy ``E``.

    Returns ``math.inf`` at the spectral mean, where ``beta = 0``.
    """
    spectrum = as_spectrum(spectrum)
    k = 1.0 if constants is None else constants.k
    if not spectrum.min < E < spectrum.max:
        raise StateError("temperature is defined strictly inside the spectrum range")
    return beta_from_energy(E, spectrum, k=k).temperature


def canonical_entropy_identity(beta: float, spectrum, support=None, *, k: float = 1.0) -> float:
    """``k (ln Z + beta E)``, which equals the canonical entropy."""
    spectrum = as_spectrum(spectrum)
    pf = partition_function(beta, spectrum, support)
    E = energy(canonical_distribution(beta, spectrum, support), spectrum)
    return k * (pf.log_value + beta * E)


def is_equilibrium(state: StateDistribution, spectrum, tol: float = 1e-8) -> Verdict:
    """Classify a state as stable, partial (canonical on a proper subset), or neither."""
    spectrum = as_spectrum(spectrum)
    E = energy(state, spectrum)
    E = min(max(E, spectrum.min), spectrum.max)
    full = beta_from_energy(E, spectrum)
    if np.max(np.abs(full.distribution.probs - state.probs)) <= tol:
        return Verdict.STABLE
    if len(state.support) < len(spectrum):
        sub = spectrum.levels[list(state.support)]
        E = min(max(E, float(sub.min())), float(sub.max()))
        part = beta_from_energy(E, spectrum, state.support)
        if np.max(np.abs(part.distribution.probs - state.probs)) <= tol:
            return Verdict.PARTIAL
    return Verdict.NONE
