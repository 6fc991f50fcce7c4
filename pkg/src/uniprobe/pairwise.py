"""Closed-form two-unitary distinguishability for each probe class.

Everything here flows from the relative operator U1†U2: its eigenphases set
the best product-probe value through the hull geometry, its normalized trace
sets the maximally-entangled value, and its eigenvectors carry the optimal
entangled probe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hullgeom, qlinalg
from .discrimination import helstrom_two
from .hullgeom import HullResult, min_hull_norm
from .qlinalg import PureState, adjoint, eig_normal

#: |Tr(U1†U2)| below this counts as traceless in the detection predicates.
TRACE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RelativeSpectrum:
    """Eigenphases and orthonormal eigenvectors of U1†U2."""

    phases: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True, eq=False)
class PairReport:
    d_product: float
    d_maxent: float
    hull: HullResult
    trace_over_d: complex
    nme_advantage: bool

    def to_json(self) -> dict:
        return {
            "dProduct": float(self.d_product),
            "dMaxEnt": float(self.d_maxent),
            "hull": self.hull.to_json(),
            "traceOverD": [float(self.trace_over_d.real), float(self.trace_over_d.imag)],
            "nmeAdvantage": bool(self.nme_advantage),
        }


def _relative_operator(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    if u1.shape != u2.shape:
        raise ValueError("unitaries must share a dimension")
    return adjoint(u1) @ u2


def relative_spectrum(u1: np.ndarray, u2: np.ndarray) -> RelativeSpectrum:
    """Spectral decomposition of U1†U2 (a unitary, hence normal)."""
    phases, vectors = eig_normal(_relative_operator(u1, u2))
    return RelativeSpectrum(phases=phases, vectors=vectors)


def d_product(u1: np.ndarray, u2: np.ndarray) -> float:
    """Best success probability over product probes, equal priors.

    Equals (1 + sqrt(1 - r^2))/2 where r is the hull distance of the
    relative eigenphases from the origin; also the optimum over all pure
    probes, product or entangled.
    """
    spec = relative_spectrum(u1, u2)
    r = min_hull_norm(spec.phases).min_norm
    return 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - r * r)))


def d_maxent(u1: np.ndarray, u2: np.ndarray) -> float:
    """Success probability with any maximally entangled probe, equal priors."""
    m = _relative_operator(u1, u2)
    d = m.shape[0]
    t = abs(np.trace(m)) / d
    return 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - t * t)))


def d_with_probe(
    u1: np.ndarray,
    u2: np.ndarray,
    probe: PureState,
    p1: float = 0.5,
    p2: float = 0.5,
) -> float:
    """Two-state value for the evolved states (U_x tensor 1)|probe>."""
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    if u1.shape != u2.shape:
        raise ValueError("unitaries must share a dimension")
    if probe.dim_a != u1.shape[0]:
        raise ValueError("probe A dimension does not match the unitaries")
    eye_b = np.eye(probe.dim_b)
    v1 = qlinalg.tensor(u1, eye_b) @ probe.amplitudes
    v2 = qlinalg.tensor(u2, eye_b) @ probe.amplitudes
    return helstrom_two(np.outer(v1, v1.conj()), np.outer(v2, v2.conj()), p1, p2)


def optimal_entangled_probe(u1: np.ndarray, u2: np.ndarray) -> PureState:
    """Entangled probe matching the best product-probe value.

    Squares of the Schmidt-like coefficients are the hull weights of the
    relative eigenphases; the A-side vectors are the matching eigenvectors
    and the B side sits on the computational basis.
    """
    spec = relative_spectrum(u1, u2)
    d = spec.vectors.shape[0]
    if d < 2:
        raise ValueError("probe construction needs dimension at least 2")
    weights = min_hull_norm(spec.phases).weights
    amp = (spec.vectors * np.sqrt(weights)).ravel()
    amp = amp / np.linalg.norm(amp)
    return PureState(dim_a=d, dim_b=d, amplitudes=amp)


def nme_advantage_check(u1: np.ndarray, u2: np.ndarray) -> bool:
    """True iff some non-maximally entangled probe distinguishes the pair
    perfectly while no maximally entangled probe does.

    Requires a nonzero relative trace together with eigenphases whose hull
    reaches the origin.
    """
    m = _relative_operator(u1, u2)
    if abs(np.trace(m)) <= TRACE_TOL:
        return False
    phases, _ = eig_normal(m)
    return hullgeom.origin_in_hull(phases, tol=TRACE_TOL)


def pair_inner_product(u1: np.ndarray, u2: np.ndarray, probe: PureState) -> complex:
    """Overlap <probe|(U1†U2 tensor 1)|probe> of the evolved pair."""
    m = _relative_operator(u1, u2)
    if probe.dim_a != m.shape[0]:
        raise ValueError("probe A dimension does not match the unitaries")
    big = qlinalg.tensor(m, np.eye(probe.dim_b))
    return complex(probe.amplitudes.conj() @ (big @ probe.amplitudes))


def phase_weights(probe: PureState, vectors: np.ndarray) -> np.ndarray:
    """Convex weights a probe places on a set of orthonormal eigenlines.

    When the relative operators of several pairs share the eigenbasis, these
    weights determine every pair overlap at once; they are the diagonal of
    the probe's reduced A state in that basis.
    """
    rho_a = probe.reduced_a()
    return np.real(np.einsum("ij,jk,ki->i", vectors.conj().T, rho_a, vectors))


def pair_report(u1: np.ndarray, u2: np.ndarray) -> PairReport:
    """All pair diagnostics in one pass over the relative spectrum."""
    m = _relative_operator(u1, u2)
    d = m.shape[0]
    phases, _ = eig_normal(m)
    hull = min_hull_norm(phases)
    r1 = hull.min_norm
    trace_over_d = complex(np.trace(m) / d)
    r2 = abs(trace_over_d)
    dp = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - r1 * r1)))
    dme = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - r2 * r2)))
    advantage = r2 > TRACE_TOL and r1 <= TRACE_TOL
    return PairReport(
        d_product=dp,
        d_maxent=dme,
        hull=hull,
        trace_over_d=trace_over_d,
        nme_advantage=advantage,
    )
