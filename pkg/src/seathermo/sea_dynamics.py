"""Steepest-entropy-ascent rate law for a dilute Boltzmann gas.

The rate of each in-support probability is a ratio of a 3x3 determinant
to the 2x2 energy-variance Gram determinant; out-of-support entries are
frozen at zero. The same vector field is available in Lagrange-multiplier
form (:func:`sea_rate_oracle`) as an independent cross-check.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    SUPPORT_EPS,
    EnergySpectrum,
    ModelConstants,
    StateDistribution,
    StateError,
    Trajectory,
    TrajectoryPoint,
    as_spectrum,
    stable_dot,
    stable_sum,
)

#: relative energy-variance cutoff below which a state counts as degenerate
VAR_EPS = 1e-13
#: integration aborts once energy or trace drift exceeds this
DRIFT_LIMIT = 1e-6
#: step undershoots below zero up to this size are clamped, larger ones abort
UNDERSHOOT_TOL = 1e-12


class IntegrationError(RuntimeError):
    """Numerical abort during trajectory integration."""


class Method(str, enum.Enum):
    RK4 = "rk4"
    RK45 = "rk45"


@dataclass(frozen=True)
class IntegratorConfig:
    """``step`` is the RK4 step in units of tau; ``tolerance`` is the RK45 local error target."""

    method: Method = Method.RK4
    t_end: float = 50.0
    step: float = 0.01
    tolerance: float = 1e-9
    sample_stride: int = 1

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.t_end == 0 or not math.isfinite(self.t_end):
            raise StateError("t_end must be finite and non-zero")
        if self.method is Method.RK4 and not self.step > 0:
            raise StateError("step must be positive")
        if self.method is Method.RK45 and not 0 < self.tolerance <= 1e-2:
            raise StateError("tolerance must lie in (0, 1e-2]")
        if int(self.sample_stride) < 1:
            raise StateError("sample_stride must be a positive integer")


def _var_cutoff(e: np.ndarray) -> float:
    return VAR_EPS * float(e.max() - e.min()) ** 2


def _moments(c: np.ndarray) -> np.ndarray:
    return np.vstack((np.ones_like(c), c, c * c))


def _rate_kernel(p: np.ndarray, c: np.ndarray, X: np.ndarray, tau: float, var_eps: float) -> np.ndarray:
    """Determinant-ratio rates for a strictly positive ``p``.

    ``c`` are the in-support levels measured from (approximately) the mean
    energy and ``X = _moments(c)``. Both determinants are invariant under
    that shift, which removes the cancellation in ``<e^2> - <e>^2``.
    """
    lp = np.log(p)
    plp = p * lp
    if p.size > 64:
        s_e, s_ee = math.fsum(c * p), math.fsum(c * c * p)
        s_l, s_el = math.fsum(plp), math.fsum(c * plp)
    else:
        _, s_e, s_ee = np.dot(X, p)
        s_l, s_el = np.dot(X[:2], plp)
    # s_l = sum p ln p, s_el = sum e p ln p, s_e = sum e p (~0), s_ee = sum e^2 p
    d2 = s_ee - s_e * s_e
    if d2 <= var_eps:
        return np.zeros_like(p)
    # first-row cofactor expansion of the numerator determinant, over d2
    m1 = (s_l * s_ee - s_e * s_el) / (d2 * tau)
    m2 = (s_l * s_e - s_el) / (d2 * tau)
    return p * (m1 - lp * (1.0 / tau) - c * m2)


def _check(state: StateDistribution, spectrum: EnergySpectrum) -> None:
    if len(state) != len(spectrum):
        raise StateError(f"state has {len(state)} entries, spectrum has {len(spectrum)}")


def sea_rate(state: StateDistribution, spectrum, constants: ModelConstants | None = None) -> np.ndarray:
    """``dp/dt`` under steepest entropy ascent (determinant form).

    Zero outside the support, and identically zero when the in-support
    energy variance is degenerate (pure states, single-energy supports).
    """
    spectrum = as_spectrum(spectrum)
    constants = constants or ModelConstants()
    _check(state, spectrum)
    mask = state.support_mask()
    out = np.zeros(len(state))
    if mask.sum() < 2:
        return out
    p, e = state.probs[mask], spectrum.levels[mask]
    c = e - stable_dot(e, p)
    out[mask] = _rate_kernel(p, c, _moments(c), constants.tau, _var_cutoff(spectrum.levels))
    return out


def sea_rate_oracle(state: StateDistribution, spectrum, constants: ModelConstants | None = None) -> np.ndarray:
    """``dp/dt`` from the projected-gradient form with explicit multipliers.

    Solves ``[[1, <e>], [<e>, <e^2>]] (a, b) = -(<ln p>, <e ln p>)`` and returns
    ``-(p ln p + a p + b e p) / tau`` on the support.
    """
    spectrum = as_spectrum(spectrum)
    constants = constants or ModelConstants()
    _check(state, spectrum)
    mask = state.support_mask()
    out = np.zeros(len(state))
    p = state.probs[mask]
    e = spectrum.levels[mask]
    m1 = float(np.sum(e * p))
    m2 = float(np.sum(e * e * p))
    if m2 - m1 * m1 <= _var_cutoff(spectrum.levels):
        return out
    plp = p * np.log(p)
    A = np.array([[1.0, m1], [m1, m2]])
    rhs = -np.array([np.sum(plp), np.sum(e * plp)])
    a, b = np.linalg.solve(A, rhs)
    out[mask] = -(plp + a * p + b * e * p) / constants.tau
    return out


def _production_kernel(p: np.ndarray, c: np.ndarray, X: np.ndarray, k: float, tau: float, var_eps: float) -> float:
    lp = np.log(p)
    plp = p * lp
    if p.size > 64:
        g11, g12, g13 = math.fsum(plp * lp), math.fsum(plp), math.fsum(c * plp)
        g23, g33 = math.fsum(c * p), math.fsum(c * c * p)
    else:
        g11 = float(np.dot(plp, lp))
        g12, g13 = np.dot(X[:2], plp)
        _, g23, g33 = np.dot(X, p)
    g2 = g33 - g23 * g23
    if g2 <= var_eps:
        return 0.0
    g3 = g11 * g2 - g12 * (g12 * g33 - g13 * g23) + g13 * (g12 * g23 - g13)
    return float(k * g3 / (tau * g2))


def entropy_production(state: StateDistribution, spectrum, constants: ModelConstants | None = None) -> float:
    """Entropy generation rate ``dS/dt`` as a ratio of Gram determinants.

    Both determinants are Gram determinants of the vectors ``sqrt(p) ln p``,
    ``sqrt(p)`` and ``sqrt(p) e``, so the ratio is non-negative.
    """
    spectrum = as_spectrum(spectrum)
    constants = constants or ModelConstants()
    _check(state, spectrum)
    mask = state.support_mask()
    if mask.sum() < 2:
        return 0.0
    p, e = state.probs[mask], spectrum.levels[mask]
    c = e - stable_dot(e, p)
    return _production_kernel(p, c, _moments(c), constants.k, constants.tau, _var_cutoff(spectrum.levels))


# Dormand-Prince 5(4) tableau
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class _Stepper:
    """Integration state over the support only."""

    def __init__(self, p: np.ndarray, e: np.ndarray, constants: ModelConstants, var_eps: float):
        self.p = p.copy()
        self.e = e
        # energy is conserved, so centring once at E(0) keeps the levels centred
        self.c = e - stable_dot(e, p)
        self.X = _moments(self.c)
        self.k = constants.k
        self.tau = constants.tau
        self.var_eps = var_eps
        self.E0 = float(np.dot(e, p))

    def rate(self, p: np.ndarray) -> np.ndarray:
        if p.min() <= 0.0:
            if p.min() < -UNDERSHOOT_TOL:
                raise IntegrationError("stage value left the simplex; reduce the step")
            p = np.maximum(p, SUPPORT_EPS)
        return _rate_kernel(p, self.c, self.X, self.tau, self.var_eps)

    def rk4(self, h: float) -> np.ndarray:
        p = self.p
        k1 = self.rate(p)
        k2 = self.rate(p + 0.5 * h * k1)
        k3 = self.rate(p + 0.5 * h * k2)
        k4 = self.rate(p + h * k3)
        return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def dopri(self, h: float) -> tuple[np.ndarray, float]:
        p = self.p
        ks = []
        for i in range(7):
            y = p + h * sum(a * kk for a, kk in zip(_DP_A[i], ks)) if i else p
            ks.append(self.rate(y))
        K = np.array(ks)
        new = p + h * (_DP_B @ K)
        err = h * (_DP_E @ K)
        return new, float(np.max(np.abs(err)))

    def accept(self, new: np.ndarray) -> None:
        if new.min() <= 0.0:
            if new.min() < -UNDERSHOOT_TOL:
                raise IntegrationError(f"probability undershoot {new.min()!r} beyond clamp tolerance")
            new = np.maximum(new, SUPPORT_EPS)
            new /= new.sum()
        trace_drift = abs(new.sum() - 1.0)
        energy_drift = abs(float(np.dot(self.e, new)) - self.E0)
        if trace_drift > DRIFT_LIMIT or energy_drift > DRIFT_LIMIT * max(1.0, abs(self.E0)):
            raise IntegrationError(
                f"conservation drift too large (trace {trace_drift:.3e}, energy {energy_drift:.3e})"
            )
        self.p = new

    def sample(self, t: float, mask: np.ndarray, n: int) -> TrajectoryPoint:
        full = np.zeros(n)
        full[mask] = self.p
        # accept() already bounded the trace drift and kept entries positive
        state = StateDistribution._trusted(full)
        S = -self.k * stable_dot(self.p, np.log(self.p)) + 0.0
        return TrajectoryPoint(
            t=t,
            state=state,
            energy=stable_dot(self.e, self.p),
            entropy=S,
            entropy_rate=_production_kernel(self.p, self.c, self.X, self.k, self.tau, self.var_eps),
        )


def integrate(
    initial: StateDistribution,
    spectrum,
    constants: ModelConstants | None = None,
    config: IntegratorConfig | None = None,
) -> Trajectory:
    """Evolve ``initial`` under the SEA rate law from ``t = 0`` to ``config.t_end``.

    The support never changes. Negative ``t_end`` integrates backward in time;
    that direction climbs away from equilibrium and is ill-conditioned near
    the simplex boundary, so a warning is issued.
    """
    spectrum = as_spectrum(spectrum)
    constants = constants or ModelConstants()
    config = config or IntegratorConfig()
    _check(initial, spectrum)
    mask = initial.support_mask()
    n = len(spectrum)
    stepper = _Stepper(initial.probs[mask], spectrum.levels[mask], constants, _var_cutoff(spectrum.levels))
    direction = 1.0 if config.t_end > 0 else -1.0
    if direction < 0:
        warnings.warn("backward-time SEA integration is numerically unstable", RuntimeWarning, stacklevel=2)
    t_end = config.t_end * constants.tau
    stride = int(config.sample_stride)

    points = [stepper.sample(0.0, mask, n)]
    stationary = mask.sum() < 2
    if config.method is Method.RK4:
        h = config.step * constants.tau
        n_steps = max(1, int(math.ceil(abs(t_end) / h - 1e-9)))
        h = direction * abs(t_end) / n_steps
        for i in range(1, n_steps + 1):
            if not stationary:
                stepper.accept(stepper.rk4(h))
            if i % stride == 0 or i == n_steps:
                points.append(stepper.sample(i * h, mask, n))
    else:
        points.extend(_integrate_adaptive(stepper, t_end, direction, config, mask, n, stationary))

    if direction < 0:
        points.reverse()
    return Trajectory(points=tuple(points), spectrum=spectrum, constants=constants)


def _integrate_adaptive(stepper, t_end, direction, config, mask, n, stationary):
    out = []
    t = 0.0
    h = direction * min(abs(t_end), 0.01 * stepper.tau)
    tol = config.tolerance
    stride = int(config.sample_stride)
    accepted = 0
    while direction * (t_end - t) > 0:
        if direction * (t + h - t_end) > 0:
            h = t_end - t
        if stationary:
            new, err = stepper.p, 0.0
        else:
            try:
                new, err = stepper.dopri(h)
            except IntegrationError:
                new, err = None, math.inf
        if err <= tol:
            stepper.accept(new)
            t = t_end if direction * (t + h - t_end) >= 0 else t + h
            accepted += 1
            if accepted % stride == 0 or t == t_end:
                out.append(stepper.sample(t, mask, n))
        factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (tol / err) ** 0.2))
        h *= factor
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t!r}")
    return out
