"""Constructors for the unitary families and probe states studied here.

Each constructor validates its own output (unitarity, normalization, class
consistency), so a successfully built ensemble always satisfies the
structural invariants the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qlinalg import (
    PureState,
    SchmidtDecomposition,
    assert_unitary,
    matrix_from_json,
    matrix_to_json,
    schmidt,
)

PRODUCT = "product"
MAX_ENTANGLED = "maxEntangled"
ARBITRARY = "arbitrary"
_CLASS_TAGS = (PRODUCT, MAX_ENTANGLED, ARBITRARY)

#: Schmidt-coefficient tolerance for classifying a probe.
CLASS_TOL = 1e-9


@dataclass(eq=False)
class UnitaryEnsemble:
    """A finite set of unitaries with priors, all acting on dimension ``dim``."""

    unitaries: list
    priors: np.ndarray
    dim: int

    def __post_init__(self):
        self.unitaries = [np.asarray(u, dtype=complex) for u in self.unitaries]
        self.priors = np.asarray(self.priors, dtype=float).ravel()
        if len(self.unitaries) == 0:
            raise ValueError("ensemble must contain at least one unitary")
        if self.priors.size != len(self.unitaries):
            raise ValueError("priors count does not match unitary count")
        if np.any(self.priors <= 0) or abs(self.priors.sum() - 1.0) > 1e-10:
            raise ValueError("priors must be positive and sum to 1")
        for u in self.unitaries:
            if u.shape != (self.dim, self.dim):
                raise ValueError("unitary dimension mismatch")
            assert_unitary(u)

    @property
    def size(self) -> int:
        return len(self.unitaries)

    def to_json(self) -> dict:
        return {
            "dim": int(self.dim),
            "priors": [float(p) for p in self.priors],
            "unitaries": [matrix_to_json(u) for u in self.unitaries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "UnitaryEnsemble":
        for key in ("dim", "priors", "unitaries"):
            if key not in obj:
                raise ValueError(f"ensemble object is missing field '{key}'")
        unitaries = [matrix_from_json(m) for m in obj["unitaries"]]
        return cls(unitaries=unitaries, priors=obj["priors"], dim=int(obj["dim"]))


def classify_probe(state: PureState, decomposition: SchmidtDecomposition | None = None) -> str:
    """Probe class from the Schmidt coefficients."""
    dec = decomposition if decomposition is not None else schmidt(state)
    if dec.rank(CLASS_TOL) == 1:
        return PRODUCT
    d = min(state.dim_a, state.dim_b)
    if dec.coefficients.size == d and np.max(np.abs(dec.coefficients - 1.0 / np.sqrt(d))) <= CLASS_TOL:
        return MAX_ENTANGLED
    return ARBITRARY


@dataclass(eq=False)
class ProbeSpec:
    """A probe state together with its class tag and Schmidt data."""

    state: PureState
    class_tag: str
    schmidt: SchmidtDecomposition

    def __post_init__(self):
        if self.class_tag not in _CLASS_TAGS:
            raise ValueError(f"unknown probe class '{self.class_tag}'")
        if classify_probe(self.state, self.schmidt) != self.class_tag:
            raise ValueError("class tag is inconsistent with the Schmidt data")

    @classmethod
    def from_state(cls, state: PureState) -> "ProbeSpec":
        dec = schmidt(state)
        return cls(state=state, class_tag=classify_probe(state, dec), schmidt=dec)

    def to_json(self) -> dict:
        return {
            "dimA": int(self.state.dim_a),
            "dimB": int(self.state.dim_b),
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.state.amplitudes],
            "class": self.class_tag,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProbeSpec":
        for key in ("dimA", "dimB", "amplitudes"):
            if key not in obj:
                raise ValueError(f"probe object is missing field '{key}'")
        try:
            amp = np.array([complex(re, im) for re, im in obj["amplitudes"]])
        except (TypeError, ValueError) as exc:
            raise ValueError("probe field 'amplitudes' must hold [re, im] pairs") from exc
        state = PureState(dim_a=int(obj["dimA"]), dim_b=int(obj["dimB"]), amplitudes=amp)
        spec = cls.from_state(state)
        declared = obj.get("class")
        if declared is not None and declared != spec.class_tag:
            raise ValueError(
                f"probe field 'class' declares '{declared}' but the state is '{spec.class_tag}'"
            )
        return spec


def transposition(d: int, i: int, j: int) -> np.ndarray:
    """Permutation matrix swapping basis vectors i and j (0-based)."""
    m = np.eye(d, dtype=complex)
    m[[i, j]] = m[[j, i]]
    return m


def _cyclic_shift(d: int, k: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        m[(i + k) % d, i] = 1.0
    return m


def v_family(d: int, basis: np.ndarray | None = None) -> UnitaryEnsemble:
    """The d transposition-built unitaries with uniform priors.

    Member 1 is the identity and member l swaps basis vectors 1 and l, so
    the first columns enumerate the full basis while every other column is
    shared across members. ``basis`` optionally replaces the computational
    column set by an arbitrary orthonormal one (given as a unitary matrix);
    the canonical family is ``basis=None``.
    """
    if d < 3:
        raise ValueError("the family is defined for dimension >= 3")
    members = [transposition(d, 0, l) for l in range(d)]
    if basis is not None:
        basis = np.asarray(basis, dtype=complex)
        assert_unitary(basis)
        members = [basis @ m for m in members]
    return UnitaryEnsemble(unitaries=members, priors=np.full(d, 1.0 / d), dim=d)


def w_family(d: int) -> UnitaryEnsemble:
    """The 2d cyclic-shift unitaries, half of them with a negated first column."""
    if d < 3:
        raise ValueError("the family is defined for dimension >= 3")
    shifts = [_cyclic_shift(d, k) for k in range(d)]
    flipped = []
    for m in shifts:
        f = m.copy()
        f[:, 0] *= -1.0
        flipped.append(f)
    members = shifts + flipped
    return UnitaryEnsemble(unitaries=members, priors=np.full(2 * d, 1.0 / (2 * d)), dim=d)


def t_trio():
    """Two overlapping qutrit pairs that admit no common perfect probe.

    Returns the ensembles ({T1, T2}, {T1, T3}) with uniform priors; all
    three operators are diagonal, so every relative operator shares the
    computational eigenbasis.
    """
    omega = np.exp(2j * np.pi / 3)
    t1 = np.eye(3, dtype=complex)
    t2 = np.diag([1.0, omega, omega**2])
    t3 = np.diag([1.0, 1.0, -1.0]).astype(complex)
    half = np.array([0.5, 0.5])
    return (
        UnitaryEnsemble(unitaries=[t1, t2], priors=half, dim=3),
        UnitaryEnsemble(unitaries=[t1, t3], priors=half, dim=3),
    )


def swapped_pair(d: int) -> UnitaryEnsemble:
    """Canonical pair {1, swap of basis vectors 1 and 2} with uniform priors.

    The simplest pair whose first two columns are exchanged while all others
    coincide; it is perfectly distinguishable by a rank-2 probe but not by
    any maximally entangled one.
    """
    if d < 3:
        raise ValueError("the swapped pair needs dimension >= 3")
    return UnitaryEnsemble(
        unitaries=[np.eye(d, dtype=complex), transposition(d, 0, 1)],
        priors=np.array([0.5, 0.5]),
        dim=d,
    )


def probe_max_entangled(d: int) -> ProbeSpec:
    """Canonical maximally entangled probe (1/sqrt(d)) sum_l |ll>."""
    if d < 2:
        raise ValueError("entangled probe needs dimension >= 2")
    amp = np.zeros(d * d, dtype=complex)
    amp[:: d + 1] = 1.0 / np.sqrt(d)
    return ProbeSpec.from_state(PureState(dim_a=d, dim_b=d, amplitudes=amp))


def probe_v_family(d: int) -> ProbeSpec:
    """Rank-2 probe that renders the transposition family orthogonal.

    A-side column t is a_t|1> + b sum_{s>=2}|s>; every pair overlap equals
    sum_t [2 Re(a_t* b) + (d-2) b^2], so a sparse solution with uniform b,
    a_t = 0 for t >= 2 and a_1 = -d(d-2)b/2 kills all of them at once. b is
    then fixed by normalization.
    """
    if d < 3:
        raise ValueError("the family probe needs dimension >= 3")
    b = 1.0 / np.sqrt(d**2 * (d - 2) ** 2 / 4.0 + d * (d - 1))
    a1 = -d * (d - 2) * b / 2.0
    coeff = np.zeros((d, d), dtype=complex)  # coeff[i, t] multiplies |i>_A |t>_B
    coeff[1:, :] = b
    coeff[0, 0] = a1
    amp = coeff.ravel()
    amp = amp / np.linalg.norm(amp)
    return ProbeSpec.from_state(PureState(dim_a=d, dim_b=d, amplitudes=amp))


def probe_w_family(d: int) -> ProbeSpec:
    """Schmidt-diagonal probe balancing the negated column against the rest.

    Coefficient 1/sqrt(2) on |11> and uniform weight on the remaining |ii>
    makes the first coefficient's square equal the sum of the others, which
    is exactly the condition that orthogonalizes the shifted families.
    """
    if d < 3:
        raise ValueError("the family probe needs dimension >= 3")
    eps = np.full(d, 1.0 / np.sqrt(2.0 * (d - 1)))
    eps[0] = 1.0 / np.sqrt(2.0)
    amp = np.zeros(d * d, dtype=complex)
    amp[:: d + 1] = eps
    return ProbeSpec.from_state(PureState(dim_a=d, dim_b=d, amplitudes=amp))
