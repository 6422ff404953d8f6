"""Test harness for candidate entropy functionals.

Each candidate is run through eight operational checks on finite
probability distributions. A failing check carries a counterexample that
:func:`replay_counterexample` re-evaluates from the recorded inputs alone.

Check ids::

    1   finite on every state of every size, boundary states included
    2a  invariant under permutations (reversible adiabatic processes)
    2b  non-decreasing under doubly stochastic mixing
    2c  non-decreasing along SEA trajectories (shannon only)
    3   additive on independent composites
    4   non-negative, zero on pure states
    5   unique maximizer at fixed energy
    6   maximized value concave in energy
    7   equal temperatures of two subsystems at the composite maximum
    8   ln Z + beta E on canonical states (surrogate for empirical relations)
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .core import EnergySpectrum, StateDistribution, StateError, as_spectrum, xlogx_array
from .sea_dynamics import IntegratorConfig, integrate
from .equilibrium import beta_from_energy, canonical_distribution, partition_function
from .statespace import random_states_at_energy

PASS, FAIL, NA = "pass", "fail", "n/a"

TITLES = {
    "1": "well defined for every system and state",
    "2a": "invariant under reversible adiabatic (permutation) processes",
    "2b": "non-decreasing under doubly stochastic mixing",
    "2c": "non-decreasing along steepest-entropy-ascent trajectories",
    "3": "additive over independent subsystems",
    "4": "non-negative, zero on pure states",
    "5": "unique maximizer at fixed energy",
    "6": "maximized value concave in energy",
    "7": "equal subsystem temperatures at the composite maximum",
    "8": "canonical identity S = ln Z + beta E",
}

VALUE_TOL = 1e-12
ADDITIVITY_TOL = 1e-10
DISTINCT_TOL = 1e-4
CONCAVITY_TOL = 1e-7
TEMPERATURE_TOL = 1e-4
IDENTITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EntropyCandidate:
    """A named functional of a probability vector."""

    name: str
    functional: Callable[[np.ndarray], float]
    parameters: dict = field(default_factory=dict)

    def __call__(self, state) -> float:
        p = state.probs if isinstance(state, StateDistribution) else np.asarray(state, dtype=float)
        return float(self.functional(p))


@dataclass
class CheckResult:
    check: str
    verdict: str
    detail: dict = field(default_factory=dict)
    counterexample: dict | None = None

    @property
    def title(self) -> str:
        return TITLES[self.check]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "title": self.title,
            "verdict": self.verdict,
            "detail": self.detail,
            "counterexample": self.counterexample,
        }


@dataclass
class CriteriaReport:
    candidate: str
    parameters: dict
    levels: list
    trials: int
    seed: int
    results: list[CheckResult]

    def __getitem__(self, check: str) -> CheckResult:
        for r in self.results:
            if r.check == check:
                return r
        raise KeyError(check)

    @property
    def verdicts(self) -> dict[str, str]:
        return {r.check: r.verdict for r in self.results}

    @property
    def passed(self) -> bool:
        return all(r.verdict != FAIL for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.verdict == FAIL]

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "parameters": self.parameters,
            "levels": self.levels,
            "trials": self.trials,
            "seed": self.seed,
            "results": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), sort_keys=True, indent=2, allow_nan=True) + "\n"

    def table(self) -> str:
        lines = [f"candidate: {self.candidate} {self.parameters or ''}".rstrip()]
        for r in self.results:
            lines.append(f"  ({r.check:>2}) {r.verdict:<4}  {r.title}")
        return "\n".join(lines) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


# --- candidates -------------------------------------------------------------

def _shannon(p):
    return -float(np.sum(xlogx_array(p)))


def _hartley(p):
    return math.log(int(np.count_nonzero(p > 0)))


def _quadratic(p):
    return 1.0 - float(np.dot(p, p))


def shannon() -> EntropyCandidate:
    return EntropyCandidate("shannon", _shannon)


def tsallis(q: float = 2.0) -> EntropyCandidate:
    if q == 1:
        raise StateError("q = 1 is the Shannon limit")
    return EntropyCandidate("tsallis", lambda p: (1.0 - float(np.sum(p[p > 0] ** q))) / (q - 1.0), {"q": q})


def renyi(alpha: float = 2.0) -> EntropyCandidate:
    if alpha == 1:
        raise StateError("alpha = 1 is the Shannon limit")
    return EntropyCandidate(
        "renyi", lambda p: math.log(float(np.sum(p[p > 0] ** alpha))) / (1.0 - alpha), {"alpha": alpha}
    )


def hartley() -> EntropyCandidate:
    return EntropyCandidate("hartley", _hartley)


def quadratic() -> EntropyCandidate:
    return EntropyCandidate("quadratic", _quadratic)


def builtin_candidates() -> list[EntropyCandidate]:
    return [shannon(), tsallis(2.0), renyi(2.0), hartley(), quadratic()]


def candidate_by_name(name: str, q: float = 2.0, alpha: float = 2.0) -> EntropyCandidate:
    factories = {
        "shannon": shannon,
        "tsallis": lambda: tsallis(q),
        "renyi": lambda: renyi(alpha),
        "hartley": hartley,
        "quadratic": quadratic,
    }
    if name not in factories:
        raise KeyError(f"unknown candidate {name!r}; choose from {sorted(factories)}")
    return factories[name]()


# --- helpers ----------------------------------------------------------------

def random_bistochastic(n: int, rng: np.random.Generator, terms: int = 4) -> np.ndarray:
    """Average of random permutation matrices, hence exactly doubly stochastic."""
    M = np.zeros((n, n))
    for _ in range(terms):
        M[np.arange(n), rng.permutation(n)] += 1.0
    return M / terms


def _random_probs(n: int, rng: np.random.Generator, zeros: bool = False) -> np.ndarray:
    p = rng.dirichlet(np.ones(n))
    if zeros and n > 1:
        k = int(rng.integers(1, n))
        p[rng.choice(n, size=k, replace=False)] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
    return p / p.sum()


def maximize_candidate(candidate: EntropyCandidate, spectrum, start) -> np.ndarray:
    """Numerically maximize ``candidate`` over states with the energy of ``start``."""
    spectrum = as_spectrum(spectrum)
    p0 = start.probs if isinstance(start, StateDistribution) else np.asarray(start, dtype=float)
    e = spectrum.levels
    E = float(e @ p0)
    cons = [
        {"type": "eq", "fun": lambda p: p.sum() - 1.0, "jac": lambda p: np.ones_like(p)},
        {"type": "eq", "fun": lambda p: e @ p - E, "jac": lambda p: e},
    ]
    with warnings.catch_warnings():
        # SLSQP clips its own trial points to the bounds and says so
        warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
        res = minimize(
            lambda p: -candidate(np.clip(p, 0.0, None)),
            p0,
            method="SLSQP",
            bounds=[(0.0, 1.0)] * len(p0),
            constraints=cons,
            options={"ftol": 1e-15, "maxiter": 500},
        )
    x = np.clip(res.x, 0.0, None)
    x = x / x.sum()
    if candidate(x) < candidate(p0):
        return p0.copy()
    return x


def _max_at_energy(candidate, spectrum, E, rng) -> np.ndarray:
    start = random_states_at_energy(E, spectrum, 1, rng)[0]
    return maximize_candidate(candidate, spectrum, start)


def _is_shannon(candidate: EntropyCandidate) -> bool:
    return candidate.name == "shannon"


# --- the checks --------------------------------------------------------------

def _check_totality(c, spectrum, trials, rng):
    tested = 0
    for n in (1, 2, 3, 8, 64):
        states = [np.eye(n)[0], np.eye(n)[-1], np.full(n, 1.0 / n)]
        states += [_random_probs(n, rng, zeros=True) for _ in range(3)]
        states += [_random_probs(n, rng) for _ in range(2)]
        for p in states:
            tested += 1
            try:
                v = c(p)
            except Exception as exc:  # noqa: BLE001 - any failure is the finding
                return CheckResult("1", FAIL, {"tested": tested}, {"probs": p, "error": repr(exc)})
            if not math.isfinite(v):
                return CheckResult("1", FAIL, {"tested": tested}, {"probs": p, "value": v})
    return CheckResult("1", PASS, {"tested": tested, "sizes": [1, 2, 3, 8, 64]})


def _check_permutation(c, spectrum, trials, rng):
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        p = _random_probs(n, rng, zeros=bool(rng.integers(0, 2)))
        perm = rng.permutation(n)
        a, b = c(p), c(p[perm])
        gap = abs(a - b)
        worst = max(worst, gap)
        if gap > VALUE_TOL * max(1.0, abs(a)):
            return CheckResult("2a", FAIL, {"max_gap": worst},
                               {"probs": p, "perm": perm, "value": a, "permuted_value": b})
    return CheckResult("2a", PASS, {"trials": trials, "max_gap": worst})


def _check_mixing(c, spectrum, trials, rng):
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        p = _random_probs(n, rng, zeros=bool(rng.integers(0, 2)))
        M = random_bistochastic(n, rng)
        a, b = c(p), c(M @ p)
        worst = min(worst, b - a)
        if b < a - VALUE_TOL * max(1.0, abs(a)):
            return CheckResult("2b", FAIL, {"min_change": worst},
                               {"probs": p, "matrix": M, "value": a, "mixed_value": b})
    return CheckResult("2b", PASS, {"trials": trials, "min_change": worst})


def _check_sea(c, spectrum, trials, rng):
    if not _is_shannon(c):
        return CheckResult("2c", NA, {"reason": "the SEA law ascends the shannon functional only"})
    if spectrum.distinct().size < 2:
        return CheckResult("2c", NA, {"reason": "spectrum has a single energy"})
    runs = max(1, trials // 100)
    worst = 0.0
    for _ in range(runs):
        p0 = StateDistribution(_random_probs(len(spectrum), rng))
        traj = integrate(p0, spectrum, config=IntegratorConfig(t_end=10.0, step=0.01, sample_stride=10))
        vals = np.array([c(pt.state) for pt in traj.points])
        d = np.diff(vals)
        worst = min(worst, float(d.min()))
        if d.min() < -1e-10:
            i = int(np.argmin(d))
            return CheckResult("2c", FAIL, {"min_step": worst},
                               {"before": traj.points[i].state.probs, "after": traj.points[i + 1].state.probs,
                                "value_before": vals[i], "value_after": vals[i + 1]})
    return CheckResult("2c", PASS, {"trajectories": runs, "min_step": worst})


def _check_additivity(c, spectrum, trials, rng):
    pairs = [(np.array([0.5, 0.5]), np.array([0.5, 0.5]))]
    pairs += [(_random_probs(int(rng.integers(2, 5)), rng), _random_probs(int(rng.integers(2, 5)), rng))
              for _ in range(trials)]
    worst = 0.0
    for p, q in pairs:
        joint = c(np.outer(p, q).ravel())
        parts = c(p) + c(q)
        gap = abs(joint - parts)
        worst = max(worst, gap)
        if gap > ADDITIVITY_TOL * max(1.0, abs(parts)):
            return CheckResult("3", FAIL, {"max_gap": worst},
                               {"p": p, "q": q, "joint_value": joint, "sum_value": parts})
    return CheckResult("3", PASS, {"pairs": len(pairs), "max_gap": worst})


def _check_nonnegative(c, spectrum, trials, rng):
    for n in (1, 2, 3, 8):
        for j in range(n):
            p = np.eye(n)[j]
            v = c(p)
            if abs(v) > VALUE_TOL:
                return CheckResult("4", FAIL, {}, {"probs": p, "value": v, "kind": "pure state not zero"})
    for _ in range(trials):
        p = _random_probs(int(rng.integers(1, 9)), rng, zeros=bool(rng.integers(0, 2)))
        v = c(p)
        if v < -VALUE_TOL:
            return CheckResult("4", FAIL, {}, {"probs": p, "value": v, "kind": "negative value"})
    return CheckResult("4", PASS, {"trials": trials})


def _interior_energy(spectrum, rng) -> float:
    lo, hi, mean = spectrum.min, spectrum.max, spectrum.mean
    return lo + (mean - lo) * float(rng.uniform(0.3, 0.9)) if mean > lo else 0.5 * (lo + hi)


def _check_unique_max(c, spectrum, trials, rng):
    if spectrum.distinct().size < 2 or len(spectrum) < 3:
        return CheckResult("5", NA, {"reason": "fixed energy leaves no freedom in the state"})
    E = _interior_energy(spectrum, rng)
    starts = random_states_at_energy(E, spectrum, 6, rng)
    sols = [maximize_candidate(c, spectrum, s) for s in starts]
    vals = [c(x) for x in sols]
    best = max(vals)
    top = [i for i, v in enumerate(vals) if abs(v - best) <= 1e-9 * max(1.0, abs(best))]
    for a in top:
        for b in top:
            if b > a and np.max(np.abs(sols[a] - sols[b])) > DISTINCT_TOL:
                return CheckResult("5", FAIL, {"energy": E, "starts": len(starts)},
                                   {"energy": E, "state_a": sols[a], "state_b": sols[b],
                                    "value_a": vals[a], "value_b": vals[b], "levels": spectrum.levels})
    spread = max(float(np.max(np.abs(x - sols[top[0]]))) for x in (sols[i] for i in top))
    return CheckResult("5", PASS, {"energy": E, "starts": len(starts), "spread": spread})


def _chord_gap(E, V) -> np.ndarray:
    w = (E[2:] - E[1:-1]) / (E[2:] - E[:-2])
    return w * V[:-2] + (1 - w) * V[2:] - V[1:-1]


def _check_concavity(c, spectrum, trials, rng):
    if spectrum.distinct().size < 2:
        return CheckResult("6", NA, {"reason": "spectrum has a single energy"})
    lo, hi = spectrum.min, spectrum.max
    Es = lo + (hi - lo) * np.linspace(0.05, 0.95, 13)
    sols = [_max_at_energy(c, spectrum, E, rng) for E in Es]
    V = np.array([c(x) for x in sols])
    gap = _chord_gap(Es, V)
    i = int(np.argmax(gap))
    if gap[i] > CONCAVITY_TOL:
        return CheckResult("6", FAIL, {"max_chord_gap": float(gap[i])},
                           {"energies": Es[i:i + 3], "states": sols[i:i + 3], "values": V[i:i + 3],
                            "levels": spectrum.levels})
    return CheckResult("6", PASS, {"energies": len(Es), "max_chord_gap": float(gap.max())})


def _composite_partner(spectrum: EnergySpectrum) -> EnergySpectrum:
    # a two-level partner with half the span keeps the subsystems unlike
    return EnergySpectrum([spectrum.min, spectrum.min + 0.5 * spectrum.span])


def _slope(c, spectrum, E, h, rng):
    xs = [_max_at_energy(c, spectrum, E + s * h, rng) for s in (-1, 1)]
    return (c(xs[1]) - c(xs[0])) / (2 * h), xs


def _check_composite(c, spectrum, trials, rng):
    if spectrum.distinct().size < 2:
        return CheckResult("7", NA, {"reason": "spectrum has a single energy"})
    A, B = spectrum, _composite_partner(spectrum)
    lo, hi = A.min + B.min, A.max + B.max
    E_tot = lo + 0.35 * (hi - lo)
    a_lo, a_hi = max(A.min, E_tot - B.max), min(A.max, E_tot - B.min)
    pad = 0.02 * (a_hi - a_lo)

    def neg_joint(EA):
        xa = _max_at_energy(c, A, EA, np.random.default_rng(0))
        xb = _max_at_energy(c, B, E_tot - EA, np.random.default_rng(1))
        return -c(np.outer(xa, xb).ravel())

    res = minimize_scalar(neg_joint, bounds=(a_lo + pad, a_hi - pad), method="bounded",
                          options={"xatol": 1e-10 * max(1.0, spectrum.span)})
    EA = float(res.x)
    EB = E_tot - EA
    h = 1e-4 * max(1.0, spectrum.span)
    bA, xsA = _slope(c, A, EA, h, np.random.default_rng(2))
    bB, xsB = _slope(c, B, EB, h, np.random.default_rng(3))
    detail = {"E_total": E_tot, "E_A": EA, "E_B": EB, "beta_A": bA, "beta_B": bB}
    if abs(bA - bB) > TEMPERATURE_TOL * max(1.0, abs(bA), abs(bB)):
        return CheckResult("7", FAIL, detail,
                           {**detail, "h": h, "levels_A": A.levels, "levels_B": B.levels,
                            "A_minus": xsA[0], "A_plus": xsA[1], "B_minus": xsB[0], "B_plus": xsB[1]})
    return CheckResult("7", PASS, detail)


def _check_identity(c, spectrum, trials, rng):
    if spectrum.distinct().size < 2:
        return CheckResult("8", NA, {"reason": "spectrum has a single energy"})
    E = _interior_energy(spectrum, rng)
    x = _max_at_energy(c, spectrum, E, rng)
    canon = beta_from_energy(E, spectrum).distribution.probs
    if np.max(np.abs(x - canon)) > DISTINCT_TOL:
        return CheckResult("8", NA, {"reason": "maximizer at fixed energy is not canonical",
                                     "distance": float(np.max(np.abs(x - canon)))})
    worst = 0.0
    for beta in np.linspace(-3.0, 3.0, 13) / max(1e-300, spectrum.span):
        p = canonical_distribution(beta, spectrum).probs
        rhs = partition_function(beta, spectrum).log_value + beta * float(spectrum.levels @ p)
        v = c(p)
        worst = max(worst, abs(v - rhs))
        if abs(v - rhs) > IDENTITY_TOL * max(1.0, abs(rhs)):
            return CheckResult("8", FAIL, {"max_gap": worst},
                               {"beta": float(beta), "probs": p, "value": v, "identity": rhs,
                                "levels": spectrum.levels})
    return CheckResult("8", PASS, {"max_gap": worst, "label": "surrogate: ln Z + beta E"})


_CHECKS = [
    _check_totality, _check_permutation, _check_mixing, _check_sea, _check_additivity,
    _check_nonnegative, _check_unique_max, _check_concavity, _check_composite, _check_identity,
]


def run_criteria(candidate: EntropyCandidate, spectrum=(0.0, 1.0, 2.0), trials: int = 200,
                 seed: int = 0) -> CriteriaReport:
    """Run every check against ``candidate``; failures are data, not exceptions."""
    if trials < 100:
        raise StateError("trials must be at least 100")
    spectrum = as_spectrum(spectrum)
    results = []
    for i, check in enumerate(_CHECKS):
        # one stream per check keeps each result independent of the others
        rng = np.random.default_rng([seed, i])
        results.append(check(candidate, spectrum, trials, rng))
    return CriteriaReport(candidate.name, dict(candidate.parameters), spectrum.levels.tolist(),
                          trials, seed, results)


def replay_counterexample(candidate: EntropyCandidate, result: CheckResult) -> bool:
    """Re-evaluate a recorded failure from its inputs; True if it still fails."""
    cx = result.counterexample
    if cx is None:
        return False
    arr = lambda key: np.asarray(cx[key], dtype=float)  # noqa: E731
    ck = result.check
    if ck == "1":
        try:
            return not math.isfinite(candidate(arr("probs")))
        except Exception:  # noqa: BLE001
            return True
    if ck == "2a":
        p = arr("probs")
        a, b = candidate(p), candidate(p[np.asarray(cx["perm"], dtype=int)])
        return abs(a - b) > VALUE_TOL * max(1.0, abs(a))
    if ck == "2b":
        p = arr("probs")
        a = candidate(p)
        return candidate(arr("matrix") @ p) < a - VALUE_TOL * max(1.0, abs(a))
    if ck == "2c":
        return candidate(arr("after")) < candidate(arr("before")) - 1e-10
    if ck == "3":
        p, q = arr("p"), arr("q")
        parts = candidate(p) + candidate(q)
        return abs(candidate(np.outer(p, q).ravel()) - parts) > ADDITIVITY_TOL * max(1.0, abs(parts))
    if ck == "4":
        p = arr("probs")
        v = candidate(p)
        if np.count_nonzero(p) == 1:
            return abs(v) > VALUE_TOL
        return v < -VALUE_TOL
    if ck == "5":
        a, b, e = arr("state_a"), arr("state_b"), arr("levels")
        same_energy = abs(e @ a - cx["energy"]) <= 1e-9 and abs(e @ b - cx["energy"]) <= 1e-9
        va, vb = candidate(a), candidate(b)
        return (same_energy and abs(va - vb) <= 1e-9 * max(1.0, abs(va))
                and np.max(np.abs(a - b)) > DISTINCT_TOL)
    if ck == "6":
        V = np.array([candidate(x) for x in np.asarray(cx["states"], dtype=float)])
        return float(_chord_gap(arr("energies"), V)[0]) > CONCAVITY_TOL
    if ck == "7":
        h = cx["h"]
        bA = (candidate(arr("A_plus")) - candidate(arr("A_minus"))) / (2 * h)
        bB = (candidate(arr("B_plus")) - candidate(arr("B_minus"))) / (2 * h)
        return abs(bA - bB) > TEMPERATURE_TOL * max(1.0, abs(bA), abs(bB))
    if ck == "8":
        return abs(candidate(arr("probs")) - cx["identity"]) > IDENTITY_TOL * max(1.0, abs(cx["identity"]))
    raise KeyError(ck)


@dataclass(frozen=True)
class CompositeResult:
    E_A: float
    E_B: float
    beta_A: float
    beta_B: float
    T_A: float
    T_B: float
    entropy: float
    matched: bool


def composite_temperature_check(spectrum_A, spectrum_B, E_total: float, tol: float = 1e-6) -> CompositeResult:
    """Split ``E_total`` between two subsystems to maximize the summed boundary entropy.

    Bounded Brent search on ``S_A(E_A) + S_B(E_total - E_A)``, then a root
    solve of ``beta_A = beta_B`` inside the bracket it found.
    """
    A, B = as_spectrum(spectrum_A), as_spectrum(spectrum_B)
    lo, hi = A.min + B.min, A.max + B.max
    if not lo < E_total < hi:
        raise StateError(f"E_total {E_total!r} outside ({lo!r}, {hi!r})")
    a_lo, a_hi = max(A.min, E_total - B.max), min(A.max, E_total - B.min)

    def total(EA):
        return beta_from_energy(EA, A).entropy + beta_from_energy(E_total - EA, B).entropy

    def mismatch(EA):
        return beta_from_energy(EA, A).beta - beta_from_energy(E_total - EA, B).beta

    res = minimize_scalar(lambda x: -total(x), bounds=(a_lo, a_hi), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, a_hi - a_lo)})
    EA = float(res.x)
    # mismatch decreases in E_A (infinite at the ends); bisect from the estimate
    f = mismatch(EA)
    left, right = (EA, a_hi) if f > 0 else (a_lo, EA)
    while f != 0:
        mid = 0.5 * (left + right)
        if mid in (left, right):
            break
        f = mismatch(mid)
        left, right = (mid, right) if f > 0 else (left, mid)
        EA = mid
    sa, sb = beta_from_energy(EA, A), beta_from_energy(E_total - EA, B)
    return CompositeResult(
        E_A=EA, E_B=E_total - EA, beta_A=sa.beta, beta_B=sb.beta,
        T_A=sa.temperature, T_B=sb.temperature, entropy=sa.entropy + sb.entropy,
        matched=abs(sa.beta - sb.beta) <= tol,
    )
