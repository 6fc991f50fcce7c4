"""Minimum-error discrimination of quantum states.

The optimal solver is a fixed-point iteration on the POVM (square-root
measurement warm start, PSD-projected updates renormalized through the
inverse square root of their sum). Correctness does not rest on the
iteration itself: every answer is certified by a feasibilized dual operator
whose trace bounds the optimum from above, so ``dual_gap`` is a rigorous
optimality gap regardless of how the iterate was produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import SUPPORT_CUTOFF, matrix_to_json, trace_norm

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 5000
#: iteration is declared stalled when the relative value change stays below
#: this over STALL_WINDOW consecutive iterations.
STALL_REL_CHANGE = 1e-12
STALL_WINDOW = 50


@dataclass(eq=False)
class StateEnsemble:
    """States with priors; the evolved-state input of the discrimination task."""

    states: list
    priors: np.ndarray

    def __post_init__(self):
        self.states = [np.asarray(s, dtype=complex) for s in self.states]
        self.priors = np.asarray(self.priors, dtype=float).ravel()
        if len(self.states) == 0:
            raise ValueError("ensemble must contain at least one state")
        if self.priors.size != len(self.states):
            raise ValueError("priors count does not match state count")
        if np.any(self.priors <= 0):
            raise ValueError("priors must be positive")
        if abs(self.priors.sum() - 1.0) > 1e-10:
            raise ValueError("priors must sum to 1")
        d = self.states[0].shape
        if any(s.shape != d for s in self.states) or d[0] != d[1]:
            raise ValueError("all states must be square matrices of a common dimension")

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    @property
    def size(self) -> int:
        return len(self.states)

    def weighted(self) -> list:
        return [p * s for p, s in zip(self.priors, self.states)]


@dataclass(eq=False)
class Povm:
    """POVM elements: Hermitian, PSD, summing to the identity."""

    elements: list

    def __post_init__(self):
        self.elements = [np.asarray(e, dtype=complex) for e in self.elements]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def validate(self, herm_tol: float = 1e-9, eig_floor: float = -1e-8, sum_tol: float = 1e-8) -> None:
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for e in self.elements:
            if np.max(np.abs(e - e.conj().T)) > herm_tol:
                raise ValueError("POVM element is not Hermitian within tolerance")
            if np.linalg.eigvalsh((e + e.conj().T) / 2).min() < eig_floor:
                raise ValueError("POVM element has a negative eigenvalue")
            total += e
        if np.max(np.abs(total - np.eye(self.dim))) > sum_tol:
            raise ValueError("POVM elements do not sum to the identity")


@dataclass(eq=False)
class DiscriminationOutcome:
    success_prob: float
    povm: Povm
    dual_gap: float
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "value": float(self.success_prob),
            "dual_gap": float(self.dual_gap),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "povm": [matrix_to_json(e) for e in self.povm.elements],
        }


@dataclass(eq=False)
class Certificate:
    """Dual operator built from a POVM, with its feasibility verdict."""

    dual_operator: np.ndarray
    gap: float
    feasible: bool


def helstrom_two(rho1: np.ndarray, rho2: np.ndarray, p1: float = 0.5, p2: float = 0.5) -> float:
    """Optimal two-state success probability (1 + ||p1 rho1 - p2 rho2||_1) / 2."""
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise ValueError("states must share a dimension")
    if abs(p1 + p2 - 1.0) > 1e-10:
        raise ValueError("priors must sum to 1")
    return 0.5 * (1.0 + trace_norm(p1 * rho1 - p2 * rho2))


def _psd_inv_sqrt(m: np.ndarray, cutoff: float = SUPPORT_CUTOFF):
    """Inverse square root on the support of a PSD matrix.

    Returns (m^{-1/2} restricted to the support, support projector).
    """
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    wmax = max(float(w.max()), 0.0)
    keep = w > cutoff * max(wmax, 1e-300)
    vk = v[:, keep]
    inv_sqrt = (vk * (w[keep] ** -0.5)) @ vk.conj().T
    return inv_sqrt, vk @ vk.conj().T


def _support_basis(weighted: list, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    s = sum(weighted)
    w, v = np.linalg.eigh((s + s.conj().T) / 2)
    keep = w > cutoff * max(float(w.max()), 1e-300)
    return v[:, keep]


def _srm_elements(weighted: list, dim: int) -> list:
    inv_sqrt, proj = _psd_inv_sqrt(sum(weighted))
    elems = [inv_sqrt @ g @ inv_sqrt for g in weighted]
    # residual identity on the kernel goes to element 0
    elems[0] = elems[0] + np.eye(dim) - proj
    return elems


def square_root_measurement(ensemble: StateEnsemble):
    """Square-root (pretty good) measurement and its success probability.

    Always a feasible POVM and never better than the optimum, which makes it
    both a lower-bound heuristic and the solver warm start.
    """
    weighted = ensemble.weighted()
    elems = _srm_elements(weighted, ensemble.dim)
    value = float(sum(np.trace(g @ e).real for g, e in zip(weighted, elems)))
    return Povm(elems), value


def _certified_gap(weighted: list, elems: list, dim: int):
    """Primal value and a rigorous optimality gap from the feasibilized dual.

    Y is the Hermitian part of sum_x G_x N_x; shifting it by the largest
    violation of Y >= G_x makes it dual feasible, so the optimum sits within
    dim * max(0, violation) of the primal value.
    """
    lam_op = sum(g @ e for g, e in zip(weighted, elems))
    value = float(np.trace(lam_op).real)
    y = (lam_op + lam_op.conj().T) / 2
    worst = max(float(np.linalg.eigvalsh(g - y).max()) for g in weighted)
    return value, dim * max(worst, 0.0)


def discriminate_optimal(
    ensemble: StateEnsemble,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> DiscriminationOutcome:
    """Optimal minimum-error discrimination with a certified gap.

    The problem is first restricted to the joint support of the weighted
    states (exact: the kernel contributes nothing to the value, and the
    returned POVM is completed there with a projector on element 0). The
    fixed-point iteration then runs until the certified dual gap drops to
    ``tol``, the value stalls, or ``max_iter`` is reached; the best iterate
    seen is returned with ``converged`` flagging whether the gap was met.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    dim = ensemble.dim
    weighted_full = ensemble.weighted()

    basis = _support_basis(weighted_full)
    reduced = basis.shape[1] < dim
    weighted = [basis.conj().T @ g @ basis for g in weighted_full] if reduced else weighted_full
    r = weighted[0].shape[0]
    eye = np.eye(r)

    elems = _srm_elements(weighted, r)
    best_value = -np.inf
    best_gap = np.inf
    best_elems = elems
    converged = False
    iterations = 0
    stall = 0
    prev_value = None

    for iterations in range(1, max_iter + 1):
        value, gap = _certified_gap(weighted, elems, r)
        if value > best_value:
            best_value, best_gap, best_elems = value, gap, elems
        elif gap < best_gap and value >= best_value - tol:
            best_value, best_gap, best_elems = value, gap, elems
        if gap <= tol:
            converged = True
            break
        if prev_value is not None:
            rel = abs(value - prev_value) / max(abs(value), 1e-300)
            stall = stall + 1 if rel < STALL_REL_CHANGE else 0
            if stall >= STALL_WINDOW:
                break
        prev_value = value

        mu = sum(g @ e @ g for g, e in zip(weighted, elems))
        inv_sqrt, proj = _psd_inv_sqrt(mu)
        elems = [inv_sqrt @ (g @ e @ g) @ inv_sqrt for g, e in zip(weighted, elems)]
        elems[0] = elems[0] + eye - proj

    if reduced:
        lifted = [basis @ e @ basis.conj().T for e in best_elems]
        lifted[0] = lifted[0] + np.eye(dim) - basis @ basis.conj().T
    else:
        lifted = best_elems
    povm = Povm(lifted)
    # recompute on the full space so the reported value matches the POVM
    value = float(sum(np.trace(g @ e).real for g, e in zip(weighted_full, lifted)))
    return DiscriminationOutcome(
        success_prob=value,
        povm=povm,
        dual_gap=float(best_gap),
        iterations=iterations,
        converged=converged,
    )


def verify_certificate(ensemble: StateEnsemble, povm: Povm) -> Certificate:
    """Dual operator of a POVM and whether it satisfies the optimality conditions.

    Y is the symmetrized success operator; the POVM is optimal exactly when
    Y - p_x rho_x is PSD for every x. The reported gap (trace of Y minus the
    success probability) vanishes identically up to rounding and is kept as a
    consistency residual.
    """
    weighted = ensemble.weighted()
    if povm.dim != ensemble.dim:
        raise ValueError("POVM dimension does not match the ensemble")
    y = sum(0.5 * (g @ e + e @ g) for g, e in zip(weighted, povm.elements))
    y = (y + y.conj().T) / 2
    value = float(sum(np.trace(g @ e).real for g, e in zip(weighted, povm.elements)))
    feasible = all(
        float(np.linalg.eigvalsh(y - g).min()) >= -1e-8 for g in weighted
    )
    return Certificate(dual_operator=y, gap=float(np.trace(y).real - value), feasible=feasible)


def sample_trials(
    ensemble: StateEnsemble,
    povm: Povm,
    trials: int,
    rng: np.random.Generator,
):
    """Monte Carlo estimate of the success frequency of a measurement.

    Draws x from the priors, samples the outcome b from the Born distribution
    Tr(rho_x N_b), and counts b == x. Returns (frequency, standard error).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = ensemble.size
    born = np.empty((n, len(povm.elements)))
    for x, rho in enumerate(ensemble.states):
        probs = np.array([np.trace(rho @ e).real for e in povm.elements])
        probs = np.clip(probs, 0.0, None)
        born[x] = probs / probs.sum()
    priors = ensemble.priors / ensemble.priors.sum()
    xs = rng.choice(n, size=trials, p=priors)
    us = rng.random(trials)
    cum = np.cumsum(born, axis=1)
    bs = np.minimum((us[:, None] >= cum[xs]).sum(axis=1), len(povm.elements) - 1)
    freq = float(np.mean(bs == xs))
    stderr = float(np.sqrt(freq * (1.0 - freq) / trials))
    return freq, stderr
