import json

import numpy as np
import pytest

from uniprobe.families import (
    ARBITRARY,
    MAX_ENTANGLED,
    PRODUCT,
    ProbeSpec,
    UnitaryEnsemble,
    classify_probe,
    probe_max_entangled,
    probe_v_family,
    probe_w_family,
    swapped_pair,
    t_trio,
    transposition,
    v_family,
    w_family,
)
from uniprobe.pairwise import d_maxent, nme_advantage_check, relative_spectrum
from uniprobe.qlinalg import PureState, haar_unitary, is_unitary, schmidt


def evolved_vectors(ensemble, probe_spec):
    """Brute-force evolution oracle: explicit kron and matvec per member."""
    state = probe_spec.state
    eye = np.eye(state.dim_b)
    return [np.kron(u, eye) @ state.amplitudes for u in ensemble.unitaries]


def gram(vectors):
    return np.array([[np.vdot(a, b) for b in vectors] for a in vectors])


class TestVFamily:
    def test_canonical_d3(self):
        ens = v_family(3)
        np.testing.assert_allclose(ens.unitaries[0], np.eye(3))
        np.testing.assert_allclose(ens.unitaries[1], transposition(3, 0, 1))
        np.testing.assert_allclose(ens.unitaries[2], transposition(3, 0, 2))
        np.testing.assert_allclose(ens.priors, np.full(3, 1 / 3))

    @pytest.mark.parametrize("d", [3, 4, 6])
    def test_members_unitary(self, d):
        assert all(is_unitary(u) for u in v_family(d).unitaries)

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_first_pair_trace(self, d):
        ens = v_family(d)
        tr = np.trace(ens.unitaries[0].conj().T @ ens.unitaries[1])
        assert tr == pytest.approx(d - 2)

    @pytest.mark.parametrize("d", [3, 4, 5, 6, 7])
    def test_column_relations(self, d):
        ens = v_family(d)
        v1 = ens.unitaries[0]
        for l, vl in enumerate(ens.unitaries):
            # column 1 of member l is column l of member 1
            assert np.max(np.abs(vl[:, 0] - v1[:, l])) <= 1e-12
            for j in range(d):
                if j not in (0, l):
                    assert np.max(np.abs(vl[:, j] - v1[:, j])) <= 1e-12

    @pytest.mark.parametrize("d", [3, 4, 5, 6, 7])
    def test_basis_probe_orthogonalizes(self, d):
        # probing with |1> sends member l to basis vector l
        ens = v_family(d)
        evolved = [u[:, 0] for u in ens.unitaries]
        np.testing.assert_allclose(gram(evolved), np.eye(d), atol=1e-12)

    def test_abstract_basis_variant(self):
        rng = np.random.default_rng(3)
        q = haar_unitary(4, rng)
        ens = v_family(4, basis=q)
        v1 = ens.unitaries[0]
        np.testing.assert_allclose(v1, q, atol=1e-12)
        for l, vl in enumerate(ens.unitaries):
            assert np.max(np.abs(vl[:, 0] - v1[:, l])) <= 1e-12
        assert all(is_unitary(u) for u in ens.unitaries)

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            v_family(2)


class TestWFamily:
    def test_canonical_d3_matches_display(self):
        ens = w_family(3)
        w1 = np.eye(3)
        w2 = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float)
        w3 = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
        w4 = np.diag([-1.0, 1.0, 1.0])
        w5 = np.array([[0, 0, 1], [-1, 0, 0], [0, 1, 0]], dtype=float)
        w6 = np.array([[0, 1, 0], [0, 0, 1], [-1, 0, 0]], dtype=float)
        for got, expected in zip(ens.unitaries, [w1, w2, w3, w4, w5, w6]):
            np.testing.assert_allclose(got, expected, atol=1e-15)
        np.testing.assert_allclose(ens.priors, np.full(6, 1 / 6))

    @pytest.mark.parametrize("d", [3, 4, 5, 6])
    def test_all_members_unitary(self, d):
        ens = w_family(d)
        assert ens.size == 2 * d
        assert all(is_unitary(u) for u in ens.unitaries)

    @pytest.mark.parametrize("d", [3, 4, 6])
    def test_negated_partner_trace(self, d):
        ens = w_family(d)
        tr = np.trace(ens.unitaries[0].conj().T @ ens.unitaries[d])
        assert tr == pytest.approx(d - 2)

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            w_family(2)


class TestTTrio:
    def test_members(self):
        first, second = t_trio()
        np.testing.assert_allclose(first.unitaries[0], np.eye(3))
        np.testing.assert_allclose(second.unitaries[0], np.eye(3))
        omega = np.exp(2j * np.pi / 3)
        np.testing.assert_allclose(first.unitaries[1], np.diag([1, omega, omega**2]))
        np.testing.assert_allclose(second.unitaries[1], np.diag([1.0, 1.0, -1.0]))

    def test_relative_spectra(self):
        first, second = t_trio()
        omega = np.exp(2j * np.pi / 3)
        phases1 = relative_spectrum(*first.unitaries).phases
        np.testing.assert_allclose(
            np.sort_complex(np.round(phases1, 9)),
            np.sort_complex(np.round(np.array([1, omega, omega**2]), 9)),
            atol=1e-10,
        )
        phases2 = relative_spectrum(*second.unitaries).phases
        np.testing.assert_allclose(sorted(phases2.real), [-1, 1, 1], atol=1e-10)


class TestSwappedPair:
    def test_canonical_instantiation(self):
        ens = swapped_pair(3)
        np.testing.assert_allclose(ens.unitaries[0], np.eye(3))
        np.testing.assert_allclose(ens.unitaries[1], transposition(3, 0, 1))

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_theorem_conditions(self, d):
        ens = swapped_pair(d)
        assert nme_advantage_check(*ens.unitaries)
        assert d_maxent(*ens.unitaries) == pytest.approx(0.5 + np.sqrt(d - 1) / d, abs=1e-12)

    def test_rejects_small_dimension(self):
        with pytest.raises(ValueError):
            swapped_pair(2)


class TestProbes:
    def test_maxent_d2_amplitudes(self):
        spec = probe_max_entangled(2)
        np.testing.assert_allclose(
            spec.state.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15
        )
        assert spec.class_tag == MAX_ENTANGLED

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_maxent_schmidt(self, d):
        spec = probe_max_entangled(d)
        np.testing.assert_allclose(
            spec.schmidt.coefficients, np.full(d, 1 / np.sqrt(d)), atol=1e-12
        )
        assert np.linalg.norm(spec.state.amplitudes) == pytest.approx(1.0)

    def test_v_probe_d3_coefficients(self):
        # solve the orthogonality and normalization conditions directly:
        # 2 a b + d (d-2) b^2 = 0 and a^2 + d (d-1) b^2 = 1 for d = 3
        b = 2 / np.sqrt(33)
        a1 = -3 / np.sqrt(33)
        assert 2 * a1 * b + 3 * 1 * b * b == pytest.approx(0.0, abs=1e-15)
        assert a1 * a1 + 6 * b * b == pytest.approx(1.0, abs=1e-15)
        spec = probe_v_family(3)
        coeff = spec.state.as_matrix()
        assert coeff[0, 0] == pytest.approx(a1, abs=1e-12)
        np.testing.assert_allclose(coeff[1:, :], np.full((2, 3), b), atol=1e-12)
        np.testing.assert_allclose(coeff[0, 1:], 0.0, atol=1e-15)

    @pytest.mark.parametrize("d", [3, 4, 5, 6, 7])
    def test_v_probe_rank_two_and_gram(self, d):
        spec = probe_v_family(d)
        assert spec.schmidt.rank() == 2
        assert spec.class_tag == ARBITRARY
        vectors = evolved_vectors(v_family(d), spec)
        np.testing.assert_allclose(gram(vectors), np.eye(d), atol=1e-9)

    def test_w_probe_d3_amplitudes(self):
        spec = probe_w_family(3)
        amp = np.zeros(9)
        amp[0] = 1 / np.sqrt(2)
        amp[4] = amp[8] = 0.5
        np.testing.assert_allclose(spec.state.amplitudes, amp, atol=1e-15)

    @pytest.mark.parametrize("d", [3, 4, 5, 6])
    def test_w_probe_balance_and_gram(self, d):
        spec = probe_w_family(d)
        eps = np.diag(spec.state.as_matrix())
        balance = -abs(eps[0]) ** 2 + np.sum(np.abs(eps[1:]) ** 2)
        assert balance == pytest.approx(0.0, abs=1e-12)
        vectors = evolved_vectors(w_family(d), spec)
        np.testing.assert_allclose(gram(vectors), np.eye(2 * d), atol=1e-9)

    def test_probe_constructors_reject_small_dimension(self):
        with pytest.raises(ValueError):
            probe_v_family(2)
        with pytest.raises(ValueError):
            probe_w_family(2)


class TestClassification:
    def test_product_state(self):
        amp = np.zeros(9, dtype=complex)
        amp[0] = 1.0
        assert classify_probe(PureState(3, 3, amp)) == PRODUCT

    def test_rank2_is_arbitrary(self):
        amp = np.zeros(9, dtype=complex)
        amp[0] = np.sqrt(0.8)
        amp[4] = np.sqrt(0.2)
        assert classify_probe(PureState(3, 3, amp)) == ARBITRARY

    def test_tag_consistency_enforced(self):
        state = probe_max_entangled(3).state
        with pytest.raises(ValueError):
            ProbeSpec(state=state, class_tag=PRODUCT, schmidt=schmidt(state))


class TestSerialization:
    def test_ensemble_roundtrip(self):
        ens = v_family(3)
        obj = json.loads(json.dumps(ens.to_json()))
        back = UnitaryEnsemble.from_json(obj)
        assert back.dim == 3 and back.size == 3
        for a, b in zip(back.unitaries, ens.unitaries):
            np.testing.assert_allclose(a, b, atol=1e-15)

    def test_probe_roundtrip(self):
        spec = probe_v_family(3)
        obj = json.loads(json.dumps(spec.to_json()))
        back = ProbeSpec.from_json(obj)
        assert back.class_tag == spec.class_tag
        np.testing.assert_allclose(back.state.amplitudes, spec.state.amplitudes, atol=1e-12)

    def test_probe_class_mismatch_rejected(self):
        obj = probe_max_entangled(2).to_json()
        obj["class"] = PRODUCT
        with pytest.raises(ValueError):
            ProbeSpec.from_json(obj)

    def test_ensemble_missing_field(self):
        with pytest.raises(ValueError):
            UnitaryEnsemble.from_json({"dim": 2, "priors": [1.0]})

    def test_non_unitary_rejected(self):
        obj = v_family(3).to_json()
        obj["unitaries"][0]["entries"][0] = [2.0, 0.0]
        with pytest.raises(ValueError):
            UnitaryEnsemble.from_json(obj)
