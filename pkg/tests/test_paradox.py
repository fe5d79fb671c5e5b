import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from homlab import paradox, qcore
from homlab.paradox import HardyState
from homlab.qcore import QuantumStateError

THIRD = math.sqrt(1 / 3)
phases = st.floats(-math.pi, math.pi, allow_nan=False)


@st.composite
def hardy_states(draw, with_phase=True):
    v = np.array([draw(st.floats(0.01, 1.0)) for _ in range(3)])
    v /= np.linalg.norm(v)
    ph = [draw(phases) for _ in range(3)] if with_phase else [0.0] * 3
    return HardyState(*(x * cmath.exp(1j * p) for x, p in zip(v, ph)))


def dm_distribution(ops, n, qubits=None):
    rho = qcore.StateVector.basis("0" * n).to_density()
    rho = paradox.run_ops(rho, ops)
    return paradox.bitstring_distribution(rho, qubits)


class TestHardyMetrics:
    def test_symmetric_point(self):
        m = paradox.hardy_metrics(HardyState(THIRD, THIRD, THIRD))
        assert m.p_hardy == pytest.approx(1 / 12, abs=1e-12)
        assert m.p_paradox == pytest.approx(1 / 27, abs=1e-12)
        assert m.I1 == pytest.approx(2 * math.log(2), abs=1e-12)
        assert m.I2 == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_product_state(self):
        m = paradox.hardy_metrics(HardyState(math.sqrt(0.5), 0.0, math.sqrt(0.5)))
        assert m.p_hardy == 0.0 and m.s_tot == pytest.approx(0.0, abs=1e-12)

    def test_maximally_entangled(self):
        m = paradox.hardy_metrics(HardyState(0.0, math.sqrt(0.5), math.sqrt(0.5)))
        assert m.p_hardy == 0.0 and m.s_tot == pytest.approx(2.0, abs=1e-12)

    def test_amplitude_placement(self):
        amps = HardyState(0.6, 0.8, 0.0).vector().amps
        assert amps[0b00] == 0.6 and amps[0b10] == 0.8

    def test_normalization_checked(self):
        with pytest.raises(QuantumStateError):
            HardyState(1.0, 1.0, 0.0)

    def test_s_tot_is_twice_reduced_entropy(self):
        h = HardyState(THIRD, THIRD, THIRD)
        red = qcore.partial_trace(h.vector().to_density(), [0])
        assert paradox.hardy_metrics(h).s_tot == pytest.approx(2 * qcore.von_neumann_entropy(red), abs=1e-12)

    @given(hardy_states())
    def test_projection_oracle(self, h):
        assert paradox.hardy_metrics(h).p_hardy == pytest.approx(paradox.hardy_projection_probability(h), abs=1e-10)

    @given(hardy_states())
    def test_paradox_is_product_of_postselections(self, h):
        m = paradox.hardy_metrics(h)
        b2, c2 = abs(h.b) ** 2, abs(h.c) ** 2
        assert m.p_paradox == pytest.approx((1 - b2) * (1 - c2) * m.p_hardy, abs=1e-12)

    @given(hardy_states(with_phase=False), phases, phases, phases)
    def test_incompatibility_phase_invariant(self, h, p, q, r):
        g = HardyState(h.a * cmath.exp(1j * p), h.b * cmath.exp(1j * q), h.c * cmath.exp(1j * r))
        assert paradox.hardy_metrics(g).I1 == pytest.approx(paradox.hardy_metrics(h).I1, abs=1e-12)

    @given(hardy_states())
    def test_reduced_entropy_oracle(self, h):
        red = qcore.partial_trace(h.vector().to_density(), [1])
        assert paradox.hardy_metrics(h).s_tot / 2 == pytest.approx(qcore.von_neumann_entropy(red), abs=1e-9)


@pytest.fixture(scope="module")
def scan():
    return paradox.scan_hardy(1000)


class TestHardyScan:
    def test_columns(self, scan):
        assert scan.columns == ("a", "S_tot", "P_paradox", "P_Hardy", "I1", "I12")
        assert scan.rows.shape == (1000, 6)

    def test_paradox_argmax(self, scan):
        a, v = scan.argmax["P_paradox"]
        assert a * a == pytest.approx(1 / 3, abs=1e-6)
        assert v == pytest.approx(1 / 27, abs=1e-9)

    def test_hardy_argmax(self, scan):
        a, v = scan.argmax["P_Hardy"]
        assert a * a == pytest.approx(math.sqrt(5) - 2, abs=1e-6)
        assert v == pytest.approx((5 * math.sqrt(5) - 11) / 2, abs=1e-6)

    def test_incompatibility_max(self, scan):
        assert scan.argmax["I1"][1] == pytest.approx(2 * math.log(2), abs=1e-9)

    def test_endpoints(self, scan):
        assert scan.rows[0, 2] == 0.0 and scan.rows[-1, 2] == pytest.approx(0.0, abs=1e-15)

    def test_small_grid_rejected(self):
        with pytest.raises(QuantumStateError):
            paradox.scan_hardy(10)


class TestPenrose:
    def test_hardy_distribution(self):
        out = paradox.penrose_circuit(THIRD, math.sqrt(2 / 3))
        want = {"00": 0.75, "01": 1 / 12, "10": 1 / 12, "11": 1 / 12}
        for k, v in want.items():
            assert out.distribution[k] == pytest.approx(v, abs=1e-10)
        assert out.forbidden == "11"

    def test_beta_zero_uniform(self):
        out = paradox.penrose_circuit(1.0, 0.0)
        assert all(v == pytest.approx(0.25, abs=1e-12) for v in out.distribution.values())

    @given(st.floats(0.0, 1.0))
    def test_density_matrix_oracle(self, alpha):
        beta = math.sqrt(1 - alpha * alpha)
        prep, meas = paradox.penrose_ops(alpha, beta)
        dm = dm_distribution(prep + meas, 2)
        sv = paradox.penrose_circuit(alpha, beta).distribution
        assert all(abs(dm[k] - sv[k]) < 1e-10 for k in sv)

    def test_overlap_value(self):
        # Exact <--|psi> for the Hardy parameters, from the explicit amplitudes.
        psi = np.array([THIRD, 0.0, THIRD, THIRD])
        minus = np.array([1, -1]) / math.sqrt(2)
        want = np.vdot(np.kron(minus, minus), psi)
        assert paradox.penrose_overlap(THIRD, math.sqrt(2 / 3)) == pytest.approx(want, abs=1e-12)

    def test_bad_amplitudes(self):
        with pytest.raises(QuantumStateError):
            paradox.penrose_circuit(0.5, 0.5)


class TestFR:
    def test_original(self):
        d = paradox.fr_circuit(paradox.FR_ORIGINAL).distribution
        assert d["phi-phi-"] == pytest.approx(1 / 12, abs=1e-12)
        assert d["phi+phi+"] == pytest.approx(3 / 4, abs=1e-12)

    def test_observer_removes_outcome(self):
        d = paradox.fr_circuit(paradox.FR_OBSERVER).distribution
        assert d.get("E=1,phi-phi-", 0.0) < 1e-12

    @pytest.mark.parametrize("variant", [paradox.FR_ORIGINAL, paradox.FR_OBSERVER])
    def test_density_matrix_oracle(self, variant):
        ops, n = paradox.fr_ops(variant)
        dm = dm_distribution(ops, n)
        out = paradox.fr_circuit(variant)
        for label, p in out.distribution.items():
            assert dm[out.bits[label]] == pytest.approx(p, abs=1e-10)

    def test_unknown_variant(self):
        with pytest.raises(QuantumStateError):
            paradox.fr_ops("other")


class TestPigeonhole:
    def test_no_check(self):
        out = paradox.pigeonhole_circuit((1, 2), False)
        assert out.success_probability == pytest.approx(1 / 8, abs=1e-12)

    @pytest.mark.parametrize("pair", paradox.PIGEON_PAIRS)
    def test_with_check(self, pair):
        out = paradox.pigeonhole_circuit(pair, True)
        same = lambda k: k[3] == "0"
        assert out.probability(same) == pytest.approx(0.5, abs=1e-12)
        assert out.conditional(lambda k: k[:3] == "000", same) < 1e-12

    def test_ry_readout_maps_plus_i_to_zero(self):
        plus_i = qcore.StateVector(np.array([1, 1j]) / math.sqrt(2))
        out = qcore.apply_gate(plus_i, qcore.standard_gate("Rx", [math.pi / 2]), [0])
        assert abs(out.amps[0]) ** 2 == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("check", [False, True])
    def test_density_matrix_oracle(self, check):
        ops, n = paradox.pigeonhole_ops((1, 3), check)
        dm = dm_distribution(ops, n)
        sv = paradox.pigeonhole_circuit((1, 3), check).distribution
        assert all(abs(dm[k] - sv[k]) < 1e-10 for k in sv)

    def test_zero_probability_condition(self):
        out = paradox.pigeonhole_circuit((1, 2), True)
        with pytest.raises(QuantumStateError):
            out.conditional(lambda k: True, lambda k: False)

    def test_bad_pair(self):
        with pytest.raises(QuantumStateError):
            paradox.pigeonhole_ops((1, 1))
