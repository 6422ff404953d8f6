"""Energy-entropy diagram of a finite spectrum.

The feasible region is bounded below by ``S = 0`` and above by the entropy
of the stable (canonical) state, ``S_max(E)``. For a bounded spectrum the
boundary has a rising ``beta > 0`` branch and a falling ``beta < 0`` branch
that meet at the spectral mean. Queries against the boundary bracket
``beta(E)`` from the sampled curve and then polish it with a safeguarded
Newton iteration, so they are exact to rounding rather than to the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

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
from .equilibrium import beta_from_energy, canonical_distribution

#: boundary tail depth: the outermost samples sit exp(-TAIL_DEPTH) from the ends
TAIL_DEPTH = 20.0


@dataclass(frozen=True)
class ReservoirSpec:
    temperature_R: float

    def __post_init__(self):
        if not (self.temperature_R > 0 and math.isfinite(self.temperature_R)):
            raise StateError("reservoir temperature must be positive and finite")


@dataclass(frozen=True, eq=False)
class FeasibilityVerdict:
    feasible: bool
    branch: str
    witness: StateDistribution | None = None
    witness_energy: float | None = None
    witness_entropy: float | None = None


@dataclass(frozen=True, eq=False)
class DiagramCurve:
    """Sampled stable-equilibrium boundary, columns ``(E, S, beta)``, ``E`` increasing."""

    samples: np.ndarray
    spectrum: EnergySpectrum
    k: float = 1.0

    @property
    def energies(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def entropies(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def betas(self) -> np.ndarray:
        return self.samples[:, 2]

    @property
    def peak(self) -> tuple[float, float]:
        """``(E, S)`` of the infinite-temperature state."""
        i = int(np.argmax(self.entropies))
        return float(self.samples[i, 0]), float(self.samples[i, 1])

    @property
    def degenerate(self) -> bool:
        return len(self.samples) == 1

    def smax(self, E):
        """Boundary entropy ``S_max(E)``; ``nan`` outside the spectrum range."""
        E_arr = np.atleast_1d(np.asarray(E, dtype=float))
        out = np.full(E_arr.shape, np.nan)
        lv = self.spectrum.levels
        lo, hi = float(lv.min()), float(lv.max())
        inside = (E_arr >= lo) & (E_arr <= hi)
        if self.degenerate:
            out[inside] = self.samples[0, 1]
        else:
            betas = _beta_of_energy(E_arr[inside], self)
            out[inside] = _canonical_entropy(betas, lv, self.k)
        return out if np.ndim(E) else float(out[0])


def _weights(betas: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Row-normalized canonical weights for a vector of betas, overflow safe."""
    b = betas[:, None]
    ref = np.where(b >= 0, levels.min(), levels.max())
    finite = np.isfinite(b)
    with np.errstate(invalid="ignore", over="ignore"):
        x = np.where(finite, -b * (levels[None, :] - ref), 0.0)
    w = np.exp(x)
    # zero-temperature rows: mass on the extremal levels only
    w = np.where(finite, w, (levels[None, :] == ref).astype(float))
    return w / w.sum(axis=1, keepdims=True)


def _canonical_entropy(betas: np.ndarray, levels: np.ndarray, k: float) -> np.ndarray:
    w = _weights(betas, levels)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log(w), 0.0)
    return -k * terms.sum(axis=1)


def _beta_of_energy(E: np.ndarray, curve: DiagramCurve) -> np.ndarray:
    """Vectorized inverse of ``E(beta)`` bracketed by the curve samples."""
    lv = curve.spectrum.levels
    lo, hi = float(lv.min()), float(lv.max())
    Es, bs = curve.energies, curve.betas
    beta = np.empty_like(E)
    for i, x in enumerate(E):
        if x <= lo:
            beta[i] = math.inf
        elif x >= hi:
            beta[i] = -math.inf
        elif x < Es[0] or x > Es[-1]:
            # deep tail, beyond the sampled range
            beta[i] = beta_from_energy(x, curve.spectrum).beta
        else:
            beta[i] = np.nan
    todo = np.isnan(beta)
    if not todo.any():
        return beta
    x = E[todo]
    j = np.clip(np.searchsorted(Es, x), 1, len(Es) - 1)
    b_hi, b_lo = bs[j - 1], bs[j]  # E increasing means beta decreasing
    ref = np.where(x < curve.peak[0], lo, hi)
    goal = x - ref
    b = 0.5 * (b_hi + b_lo)
    a_lo, a_hi = b_lo.copy(), b_hi.copy()
    for _ in range(200):
        w = _weights(b, lv)
        d = lv[None, :] - ref[:, None]
        m = (w * d).sum(axis=1)
        var = (w * (d - m[:, None]) ** 2).sum(axis=1)
        f = m - goal
        # f decreasing in beta: f > 0 means the root lies at larger beta
        a_lo = np.where(f > 0, b, a_lo)
        a_hi = np.where(f <= 0, b, a_hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            nb = b + f / var
        bad = ~((nb > a_lo) & (nb < a_hi)) | ~np.isfinite(nb)
        nb = np.where(bad, 0.5 * (a_lo + a_hi), nb)
        done = (nb == b) | (a_hi - a_lo <= 4 * np.spacing(np.maximum(abs(a_lo), abs(a_hi))))
        b = nb
        if done.all():
            break
    beta[todo] = b
    return beta


def _beta_grid(spectrum: EnergySpectrum, n: int) -> np.ndarray:
    d = spectrum.distinct()
    gap = min(d[1] - d[0], d[-1] - d[-2])
    beta_max = TAIL_DEPTH / gap
    u_max = 1.0 - 1.0 / n
    u = np.linspace(-u_max, u_max, n)
    beta = beta_max * np.arctanh(u) / np.arctanh(u_max)
    # pin the peak exactly on the grid
    beta[np.argmin(np.abs(beta))] = 0.0
    return np.sort(beta)[::-1]


def smax_curve(spectrum, n_samples: int = 512, constants: ModelConstants | None = None) -> DiagramCurve:
    """Sample the stable-equilibrium boundary on a grid uniform in ``artanh``-compressed beta."""
    spectrum = as_spectrum(spectrum)
    k = 1.0 if constants is None else constants.k
    if n_samples < 3:
        raise StateError("need at least three samples")
    if spectrum.distinct().size < 2:
        S = k * math.log(len(spectrum))
        return DiagramCurve(np.array([[spectrum.min, S, 0.0]]), spectrum, k)
    beta = _beta_grid(spectrum, int(n_samples))
    w = _weights(beta, spectrum.levels)
    E = w @ spectrum.levels
    S = _canonical_entropy(beta, spectrum.levels, k)
    samples = np.column_stack([E, S, beta])
    if np.any(np.diff(E) <= 0):
        raise StateError("boundary energies not strictly increasing; spectrum too wide for the grid")
    return DiagramCurve(samples, spectrum, k)


def concavity_violation(curve: DiagramCurve) -> float:
    """Largest amount by which a sample falls below the chord of its neighbours.

    Zero or negative for a concave sampled curve.
    """
    if len(curve.samples) < 3:
        return 0.0
    E, S = curve.energies, curve.entropies
    w = (E[2:] - E[1:-1]) / (E[2:] - E[:-2])
    chord = w * S[:-2] + (1 - w) * S[2:]
    return float(np.max(chord - S[1:-1]))


def state_point(state: StateDistribution, spectrum, constants: ModelConstants | None = None) -> tuple[float, float]:
    """``(E, S)`` coordinates of a state."""
    return energy(state, as_spectrum(spectrum)), entropy(state, constants)


def is_feasible_point(E: float, S: float, curve: DiagramCurve, tol: float = 1e-12) -> bool:
    """Whether ``(E, S)`` lies in the closed feasible region."""
    lv = curve.spectrum.levels
    if not (lv.min() <= E <= lv.max()):
        return False
    if S < -tol:
        return False
    return S <= curve.smax(E) + tol * max(1.0, curve.peak[1])


def _entropy_at_beta(beta: float, curve: DiagramCurve) -> float:
    return float(_canonical_entropy(np.array([beta]), curve.spectrum.levels, curve.k)[0])


def min_energy_at_entropy(S: float, curve: DiagramCurve) -> float:
    """Lowest energy on the ``beta >= 0`` branch whose boundary entropy is ``S``."""
    lv = curve.spectrum.levels
    E_peak, S_peak = curve.peak
    if S > S_peak:
        raise StateError(f"entropy {S!r} exceeds the boundary maximum {S_peak!r}")
    if S <= _entropy_at_beta(math.inf, curve):
        return float(lv.min())
    if curve.degenerate:
        return float(lv.min())
    # S(beta) decreases for beta > 0: bisect between the bracketing samples
    pos = curve.betas >= 0
    bs, Ss = curve.betas[pos], curve.entropies[pos]
    # bs descending, Ss ascending on this branch
    j = int(np.searchsorted(Ss, S))
    b_hi = bs[j - 1] if j > 0 else max(2 * bs[0], 1.0)
    while j == 0 and _entropy_at_beta(b_hi, curve) > S:
        b_hi *= 2.0
    b_lo = bs[j] if j < len(bs) else 0.0
    for _ in range(200):
        mid = 0.5 * (b_lo + b_hi)
        if mid in (b_lo, b_hi):
            break
        if _entropy_at_beta(mid, curve) >= S:
            b_lo = mid
        else:
            b_hi = mid
    d = canonical_distribution(b_lo, curve.spectrum)
    return energy(d, curve.spectrum)


def adiabatic_availability(E: float, S: float, curve: DiagramCurve) -> float:
    """Largest energy extractable without changing the entropy: ``E - E_min(S)``."""
    return max(0.0, E - min_energy_at_entropy(S, curve))


def available_energy(
    E: float,
    S: float,
    reservoir: ReservoirSpec,
    spectrum,
    constants: ModelConstants | None = None,
) -> float:
    """Available energy with respect to a reservoir at ``temperature_R``.

    The reference is the system's own canonical state at the reservoir
    temperature, so the result is ``(E - E_R) - T_R (S - S_R)``.
    """
    spectrum = as_spectrum(spectrum)
    k = 1.0 if constants is None else constants.k
    T = reservoir.temperature_R
    ref = canonical_distribution(1.0 / (k * T), spectrum)
    E_ref = energy(ref, spectrum)
    S_ref = entropy(ref, ModelConstants(k=k))
    return (E - E_ref) - T * (S - S_ref)


def entropy_from_available_energy(
    E: float,
    omega: float,
    reservoir: ReservoirSpec,
    spectrum,
    constants: ModelConstants | None = None,
) -> float:
    """Invert :func:`available_energy` for the entropy, given a reservoir."""
    spectrum = as_spectrum(spectrum)
    k = 1.0 if constants is None else constants.k
    T = reservoir.temperature_R
    ref = canonical_distribution(1.0 / (k * T), spectrum)
    E_ref = energy(ref, spectrum)
    S_ref = entropy(ref, ModelConstants(k=k))
    return S_ref + ((E - E_ref) - omega) / T


def demon_check(E: float, S: float, curve: DiagramCurve) -> FeasibilityVerdict:
    """Can energy alone be extracted, reaching lower ``E`` at no lower ``S``?

    On the falling (``beta < 0``) branch of a bounded spectrum this is always
    possible: the uniform state has lower energy and maximal entropy.
    """
    if not is_feasible_point(E, S, curve):
        raise StateError(f"({E!r}, {S!r}) is not a feasible point")
    spectrum = curve.spectrum
    E_peak, _ = curve.peak
    scale = max(1.0, spectrum.span)
    tol = 1e-9 * scale
    if curve.degenerate:
        return FeasibilityVerdict(False, "degenerate")
    if E > E_peak + tol:
        branch = "negative"
        target = E_peak
    else:
        branch = "peak" if abs(E - E_peak) <= tol else "positive"
        E_min = min_energy_at_entropy(min(S, curve.peak[1]), curve)
        if E - E_min <= tol:
            return FeasibilityVerdict(False, branch)
        target = 0.5 * (E_min + E)
    sol = beta_from_energy(target, spectrum, k=curve.k)
    W_E, W_S = sol.energy, sol.entropy
    if not (W_E < E and W_S >= S):
        return FeasibilityVerdict(False, branch)
    return FeasibilityVerdict(True, branch, sol.distribution, W_E, W_S)


def random_states(n_levels: int, count: int, rng: np.random.Generator) -> list[StateDistribution]:
    """Flat-Dirichlet samples from the simplex."""
    return [StateDistribution(p / p.sum()) for p in rng.dirichlet(np.ones(n_levels), size=count)]


def random_states_at_energy(
    E: float, spectrum, count: int, rng: np.random.Generator, spread: float = 0.9
) -> list[StateDistribution]:
    """Interior states with mean energy exactly ``E``.

    Each is the canonical state at ``E`` moved along a random direction that
    keeps normalization and energy fixed, by a random fraction of the
    distance to the simplex boundary.
    """
    spectrum = as_spectrum(spectrum)
    center = beta_from_energy(E, spectrum).distribution.probs
    A = np.vstack([np.ones(len(spectrum)), spectrum.levels])
    # orthonormal basis of the null space of A
    _, sv, vt = np.linalg.svd(A)
    null = vt[int(np.sum(sv > 1e-12 * sv[0])):]
    if null.shape[0] == 0:
        # energy and normalization pin the state completely
        return [StateDistribution(center.copy()) for _ in range(count)]
    out = []
    while len(out) < count:
        v = rng.standard_normal(null.shape[0]) @ null
        neg = v < 0
        if not neg.any():
            continue
        t_max = float(np.min(-center[neg] / v[neg]))
        p = center + spread * rng.uniform(0.05, 1.0) * t_max * v
        p = np.maximum(p, 0.0)
        out.append(StateDistribution(p / p.sum()))
    return out


def maximize_entropy(
    start: StateDistribution, spectrum, tol: float = 1e-14, max_iter: int = 200
) -> StateDistribution:
    """Maximize ``-sum p ln p`` over states sharing ``start``'s energy.

    Newton iteration on the constraint manifold with step halving to stay
    in the simplex interior. Only the support of ``start`` is varied.
    """
    spectrum = as_spectrum(spectrum)
    mask = start.support_mask()
    p = start.probs[mask].copy()
    e = spectrum.levels[mask]
    A = np.vstack([np.ones_like(e), e])
    for _ in range(max_iter):
        g = -(np.log(p) + 1.0)
        # d = diag(p) (g - A^T lam) with A d = 0
        M = (A * p) @ A.T
        lam = np.linalg.lstsq(M, (A * p) @ g, rcond=None)[0]
        d = p * (g - A.T @ lam)
        if np.max(np.abs(d)) <= tol:
            break
        t = 1.0
        while np.any(p + t * d <= 0):
            t *= 0.5
        p = p + t * d
        p /= p.sum()
    full = np.zeros(len(spectrum))
    full[mask] = p
    return StateDistribution(full / full.sum())
