"""Geometry of eigenphase sets on the unit circle.

The distance from the origin to the convex hull of a set of unit-modulus
complex numbers controls the best achievable two-channel discrimination;
this module computes that distance exactly together with convex weights
that attain it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

#: points must sit on the unit circle within this modulus tolerance.
POINT_MODULUS_TOL = 1e-9
#: default tolerance for deciding that the origin lies in the hull.
ORIGIN_TOL = 1e-9
#: norms closer than this are treated as ties when picking the sparsest support.
_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HullResult:
    """Minimum norm over the hull, the convex weights attaining it, and the
    witness point they produce."""

    min_norm: float
    weights: np.ndarray
    witness: complex

    def to_json(self) -> dict:
        return {
            "minNorm": float(self.min_norm),
            "weights": [float(w) for w in self.weights],
            "witness": [float(self.witness.real), float(self.witness.imag)],
        }


def _validate_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("phase point set must be nonempty")
    if np.max(np.abs(np.abs(pts) - 1.0)) > POINT_MODULUS_TOL:
        raise ValueError("phase points must have unit modulus")
    return pts


def _origin_strictly_inside(pts: np.ndarray) -> bool:
    # The origin lies in the hull of unit vectors iff no open half-plane
    # through the origin contains them all, i.e. the largest angular gap
    # between consecutive points is at most pi.
    angles = np.sort(np.angle(pts))
    gaps = np.diff(angles, append=angles[0] + 2 * np.pi)
    return bool(np.max(gaps) < np.pi - 1e-12)


def _zero_triple(pts: np.ndarray):
    # Caratheodory: an interior origin is a convex combination of at most
    # three of the points. Triples are scanned in index order so ties break
    # toward the lowest indices.
    fallback = None
    for tri in itertools.combinations(range(pts.size), 3):
        a = np.array(
            [
                [pts[k].real for k in tri],
                [pts[k].imag for k in tri],
                [1.0, 1.0, 1.0],
            ]
        )
        try:
            lam = np.linalg.solve(a, np.array([0.0, 0.0, 1.0]))
        except np.linalg.LinAlgError:
            continue
        if np.min(lam) >= -1e-12:
            return tri, np.clip(lam, 0.0, None)
        if fallback is None or np.min(lam) > fallback[2]:
            fallback = (tri, lam, float(np.min(lam)))
    if fallback is not None and fallback[2] >= -1e-9:
        return fallback[0], np.clip(fallback[1], 0.0, None)
    return None


def min_hull_norm(points) -> HullResult:
    """Distance from the origin to the convex hull of unit-circle points.

    The minimum over a planar polygon is attained at a vertex or on an edge,
    so vertices and all pairwise segments are enumerated exactly; an origin
    strictly inside the hull is detected separately and expressed through at
    most three points. When several weight vectors achieve the minimum the
    one supported on the fewest points (lowest indices first) is returned.
    """
    pts = _validate_points(points)
    n = pts.size

    # (norm, support size, support indices, weights on the support)
    candidates = [(abs(pts[i]), 1, (i,), (1.0,)) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = pts[i], pts[j]
            d2 = abs(b - a) ** 2
            if d2 < 1e-30:
                continue
            t = -((a.conjugate() * (b - a)).real) / d2
            if 0.0 < t < 1.0:
                candidates.append((abs((1 - t) * a + t * b), 2, (i, j), (1 - t, t)))

    if n >= 3 and _origin_strictly_inside(pts):
        found = _zero_triple(pts)
        if found is not None:
            tri, lam = found
            lam = lam / lam.sum()
            candidates.append((abs(np.dot(lam, pts[list(tri)])), 3, tri, tuple(lam)))

    best_norm = min(c[0] for c in candidates)
    norm, _, support, wts = min(
        (c for c in candidates if c[0] <= best_norm + _TIE_TOL),
        key=lambda c: (c[1], c[2]),
    )

    weights = np.zeros(n)
    for idx, w in zip(support, wts):
        weights[idx] = w
    weights = np.clip(weights, 0.0, None)
    weights = weights / weights.sum()
    witness = complex(np.dot(weights, pts))
    return HullResult(min_norm=abs(witness), weights=weights, witness=witness)


def origin_in_hull(points, tol: float = ORIGIN_TOL) -> bool:
    """True iff the hull of the points reaches the origin within ``tol``."""
    return min_hull_norm(points).min_norm <= tol
