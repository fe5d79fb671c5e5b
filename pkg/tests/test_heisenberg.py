import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from homlab import heisenberg as hb
from homlab import qcore
from homlab.heisenberg import NoSharpestObservable, ZeroProbabilityCondition

from .conftest import random_unitary

seeds = st.integers(0, 2**32 - 1)


def random_ops(rng, n, depth):
    ops = []
    for _ in range(depth):
        k = int(rng.integers(1, 3)) if n > 1 else 1
        t = tuple(int(x) for x in rng.choice(n, size=k, replace=False))
        ops.append((qcore.standard_gate("custom", matrix=random_unitary(rng, 1 << k)), t))
    return ops


def all_words(n):
    for combo in itertools.product(range(4), repeat=n):
        if any(combo):
            yield [(a, "xyz"[c - 1]) for a, c in enumerate(combo) if c]


class TestInitialNetwork:
    def test_single_qubit(self):
        assert np.allclose(hb.bloch(hb.init_network(1), 0), [0, 0, 1])

    def test_commutation(self):
        assert hb.algebra_residual(hb.init_network(2)) < 1e-15

    def test_zz(self):
        assert hb.expectation(hb.init_network(2), [(0, "z"), (1, "z")]) == 1.0

    @pytest.mark.parametrize("n", [0, 11])
    def test_size_limits(self, n):
        with pytest.raises(qcore.QuantumStateError):
            hb.init_network(n)


class TestEvolution:
    def test_x_gate_map(self):
        net0 = hb.init_network(2)
        net = hb.evolve(net0, qcore.standard_gate("X"), [0])
        assert np.allclose(net.q[0, 0], net0.q[0, 0])
        assert np.allclose(net.q[0, 1], -net0.q[0, 1])
        assert np.allclose(net.q[0, 2], -net0.q[0, 2])

    def test_bell_descriptor_structure(self):
        net0 = hb.init_network(2)
        net = hb.run_circuit(net0, hb.bell_ops())
        x1, y1, z1 = net0.q[0]
        x2 = net0.q[1, 0]
        assert np.allclose(net.q[0, 0], z1 @ x2)
        assert np.allclose(net.q[0, 1], -y1 @ x2)
        assert np.allclose(net.q[0, 2], x1)

    def test_bell_all_words_match_oracle(self):
        net = hb.run_circuit(hb.init_network(2), hb.bell_ops())
        for w in all_words(2):
            assert hb.expectation(net, w) == pytest.approx(hb.schrodinger_expectation(hb.bell_ops(), 2, w), abs=1e-10)

    def test_bell_signatures(self):
        net = hb.run_circuit(hb.init_network(2), hb.bell_ops())
        assert hb.expectation(net, [(0, "z"), (1, "z")]) == pytest.approx(1.0, abs=1e-12)
        assert hb.expectation(net, [(0, "x"), (1, "x")]) == pytest.approx(1.0, abs=1e-12)
        assert hb.expectation(net, [(0, "y"), (1, "y")]) == pytest.approx(-1.0, abs=1e-12)
        assert np.allclose(hb.bloch(net, 0), 0.0, atol=1e-12)

    @pytest.mark.parametrize("theta", [1, -1])
    def test_utheta_after_bell(self, theta):
        ops = hb.bell_ops() + [(qcore.standard_gate("Utheta", [theta]), (0,))]
        net = hb.run_circuit(hb.init_network(2), ops)
        assert hb.expectation(net, [(0, "z"), (1, "z")]) == pytest.approx(theta, abs=1e-12)

    @given(seeds)
    def test_locality_bitwise(self, seed):
        rng = np.random.default_rng(seed)
        net = hb.run_circuit(hb.init_network(3), random_ops(rng, 3, 4))
        g = qcore.standard_gate("custom", matrix=random_unitary(rng, 4))
        after = hb.evolve(net, g, [0, 2])
        assert np.array_equal(after.q[1], net.q[1])

    @given(seeds)
    def test_algebra_preserved(self, seed):
        net = hb.run_circuit(hb.init_network(3), random_ops(np.random.default_rng(seed), 3, 20))
        assert hb.algebra_residual(net) < 1e-10

    @given(seeds)
    def test_cross_picture(self, seed):
        rng = np.random.default_rng(seed)
        ops = random_ops(rng, 3, 8)
        net = hb.run_circuit(hb.init_network(3), ops)
        for w in all_words(3):
            assert hb.expectation(net, w) == pytest.approx(hb.schrodinger_expectation(ops, 3, w), abs=1e-10)

    def test_time_counter(self):
        assert hb.run_circuit(hb.init_network(2), hb.bell_ops()).t == 2


class TestSharpest:
    def test_pure_zero(self):
        s = hb.sharpest_observable(hb.init_network(1), 0)
        assert s.gamma == pytest.approx(1.0)
        assert np.allclose(s.op, qcore.SZ)
        assert hb.variance(hb.init_network(1), s.op) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("A", [0.0, 0.3, 0.9])
    def test_variance_formula(self, A):
        # Qubit 0 entangled with qubit 1 so that <q_0> = (0, 0, A).
        th = math.acos(A)
        ops = [(qcore.standard_gate("custom", matrix=np.array([[math.cos(th / 2), -math.sin(th / 2)], [math.sin(th / 2), math.cos(th / 2)]])), (1,)),
               (qcore.standard_gate("CNOT"), (1, 0))]
        net = hb.run_circuit(hb.init_network(2), ops)
        assert np.allclose(hb.bloch(net, 0), [0, 0, A], atol=1e-12)
        assert hb.variance(net, net.q[0, 2]) == pytest.approx(1 - A * A, abs=1e-12)

    def test_bell_has_none(self):
        with pytest.raises(NoSharpestObservable):
            hb.sharpest_observable(hb.run_circuit(hb.init_network(2), hb.bell_ops()), 0)

    def test_density_from_sharpest_pure(self):
        s = hb.sharpest_observable(hb.init_network(1), 0)
        assert np.allclose(hb.density_from_sharpest(s).mat, np.diag([1, 0]))

    @given(seeds)
    def test_minimal_and_sign(self, seed):
        rng = np.random.default_rng(seed)
        net = hb.run_circuit(hb.init_network(2), random_ops(rng, 2, 4))
        s = hb.sharpest_observable(net, 0)
        assert hb.expectation(net, s.op) == pytest.approx(s.gamma, abs=1e-12)
        v0 = hb.variance(net, s.op)
        for _ in range(100):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            op = sum(d[i] * net.q[0, i] for i in range(3))
            assert hb.variance(net, op) >= v0 - 1e-12

    @given(seeds)
    def test_eigen_weights_and_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        ops = random_ops(rng, 2, 4)
        net = hb.run_circuit(hb.init_network(2), ops)
        s = hb.sharpest_observable(net, 1)
        rho = hb.density_from_sharpest(s)
        psi = qcore.StateVector.basis("00")
        for g, t in ops:
            psi = qcore.apply_gate(psi, g, t)
        red = qcore.partial_trace(psi.to_density(), [1])
        assert np.allclose(rho.mat, red.mat, atol=1e-10)
        ev = np.sort(np.linalg.eigvalsh(rho.mat))
        assert np.allclose(ev, [(1 - s.gamma) / 2, (1 + s.gamma) / 2], atol=1e-12)

    @given(seeds)
    def test_variance_invariant_under_local_gate(self, seed):
        rng = np.random.default_rng(seed)
        net = hb.run_circuit(hb.init_network(2), random_ops(rng, 2, 4))
        v0 = hb.variance(net, hb.sharpest_observable(net, 0).op)
        net2 = hb.evolve(net, qcore.standard_gate("custom", matrix=random_unitary(rng)), [0])
        assert hb.variance(net2, hb.sharpest_observable(net2, 0).op) == pytest.approx(v0, abs=1e-10)


class TestInformation:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_product_pure(self, n):
        rep = hb.info_report(hb.init_network(n))
        assert np.allclose(rep.acc_per_qubit, 1.0) and rep.inacc == pytest.approx(0.0, abs=1e-12)

    def test_bell(self):
        rep = hb.info_report(hb.run_circuit(hb.init_network(2), hb.bell_ops()))
        assert np.allclose(rep.acc_per_qubit, 0.0, atol=1e-12) and rep.inacc == pytest.approx(2.0, abs=1e-12)

    def test_hardy_state(self):
        rep = hb.info_report(hb.run_circuit(hb.init_network(2), hb.hardy_ops()))
        lam = 0.5 + math.sqrt(5) / 6
        acc = 1 + lam * math.log2(lam) + (1 - lam) * math.log2(1 - lam)
        assert np.allclose(rep.acc_per_qubit, acc, atol=1e-10)
        assert rep.acc_per_qubit[0] == pytest.approx(0.4500, abs=1e-4)
        assert rep.inacc == pytest.approx(2 - 2 * acc, abs=1e-10)

    @given(seeds)
    def test_accessible_matches_schrodinger_entropy(self, seed):
        rng = np.random.default_rng(seed)
        ops = random_ops(rng, 3, 6)
        rep = hb.info_report(hb.run_circuit(hb.init_network(3), ops))
        psi = qcore.StateVector.basis("000")
        for g, t in ops:
            psi = qcore.apply_gate(psi, g, t)
        for a in range(3):
            s = qcore.von_neumann_entropy(qcore.partial_trace(psi.to_density(), [a]))
            assert rep.acc_per_qubit[a] == pytest.approx(1 - s, abs=1e-9)
        assert rep.inacc + sum(rep.acc_per_qubit) == pytest.approx(3, abs=1e-9)


class TestRelativeDescriptor:
    def test_hardy(self):
        net = hb.run_circuit(hb.init_network(2), hb.hardy_ops())
        assert hb.relative_descriptor_expectation(net, [(1, "x")], [(0, "z")]) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("theta", [1, -1])
    def test_hardy_theta(self, theta):
        net = hb.run_circuit(hb.init_network(2), hb.hardy_ops(theta))
        assert hb.relative_descriptor_expectation(net, [(1, "x")], [(0, "z")]) == pytest.approx(theta, abs=1e-10)

    @given(seeds)
    def test_unentangled_condition(self, seed):
        rng = np.random.default_rng(seed)
        ops = [(g, (t[0] + 1,) if len(t) == 1 else tuple(x + 1 for x in t)) for g, t in random_ops(rng, 2, 4)]
        net = hb.run_circuit(hb.init_network(3), ops)
        for i in "xyz":
            plain = hb.expectation(net, [(1, i)])
            cond = hb.relative_descriptor_expectation(net, [(1, i)], [(0, "z")])
            assert cond == pytest.approx(plain, abs=1e-10)

    def test_zero_probability(self):
        with pytest.raises(ZeroProbabilityCondition):
            hb.relative_descriptor_expectation(hb.init_network(2), [(1, "x")], [(0, "z")], sign=-1)

    def test_bad_sign(self):
        with pytest.raises(qcore.QuantumStateError):
            hb.projector(hb.init_network(1), [(0, "z")], 0)


class TestFunctionalGate:
    @given(seeds)
    def test_matches_frame_conjugation(self, seed):
        rng = np.random.default_rng(seed)
        net = hb.run_circuit(hb.init_network(3), random_ops(rng, 3, 5))
        g = qcore.standard_gate("custom", matrix=random_unitary(rng, 4))
        want = net.frame.conj().T @ qcore.embed(g.mat, [2, 0], 3) @ net.frame
        assert np.allclose(hb.functional_gate(net, g, [2, 0]), want, atol=1e-12)

    @given(seeds)
    def test_frameless_path_agrees(self, seed):
        rng = np.random.default_rng(seed)
        ops = random_ops(rng, 3, 6)
        net = hb.run_circuit(hb.init_network(3), ops)
        bare = hb.init_network(3)
        bare = hb.DescriptorNetwork(bare.q, 0, None)
        bare = hb.run_circuit(bare, ops)
        assert np.allclose(bare.q, net.q, atol=1e-10)


class TestGlobalDensity:
    @given(seeds)
    def test_matches_schrodinger_state(self, seed):
        rng = np.random.default_rng(seed)
        ops = random_ops(rng, 3, 6)
        psi = qcore.StateVector.basis("000")
        for g, t in ops:
            psi = qcore.apply_gate(psi, g, t)
        rho = hb.global_density(hb.run_circuit(hb.init_network(3), ops))
        assert np.allclose(rho.mat, psi.to_density().mat, atol=1e-10)

    def test_network_total_is_n(self):
        rep = hb.info_report(hb.run_circuit(hb.init_network(3), [(qcore.standard_gate("H"), (0,)), (qcore.standard_gate("CNOT"), (0, 2))]))
        assert rep.acc_network == pytest.approx(3.0, abs=1e-9)

    def test_size_limit(self):
        with pytest.raises(qcore.QuantumStateError):
            hb.global_density(hb.init_network(7))
