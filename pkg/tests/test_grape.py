import numpy as np
import pytest

from lgrape import schemes
from lgrape.dynamics import NoiseModel
from lgrape.grape import ControlPulse, control_generators, gradient, optimize
from lgrape.qcore import SIGMA_X, SIGMA_Y, SIGMA_Z, dag
from lgrape.schemes import OptimizerSettings

FAST_OPT = OptimizerSettings(max_iters=60, restarts=2)


class TestControlGenerators:
    def test_single_qubit_set(self):
        gens = control_generators("UE")
        assert len(gens) == 3
        for got, want in zip(gens, (SIGMA_X, SIGMA_Y, SIGMA_Z)):
            assert np.array_equal(got, want)

    def test_two_qubit_set_is_lexicographic(self):
        gens = control_generators("CNLA")
        assert len(gens) == 15
        eye = np.eye(2)
        assert np.array_equal(gens[0], np.kron(eye, SIGMA_X))
        assert np.array_equal(gens[1], np.kron(eye, SIGMA_Y))
        assert np.array_equal(gens[2], np.kron(eye, SIGMA_Z))
        assert np.array_equal(gens[3], np.kron(SIGMA_X, eye))

    def test_generators_hermitian_traceless(self):
        for kind in ("UE", "CNA"):
            for g in control_generators(kind):
                assert np.linalg.norm(g - dag(g)) == 0.0
                assert np.trace(g) == 0.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            control_generators("XYZ")


class TestControlPulse:
    def test_zero_constructor(self):
        pulse = ControlPulse.zero(10, 3, 0.01)
        assert pulse.m == 10 and pulse.n_controls == 3 and pulse.is_zero()

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            ControlPulse(0.01, np.array([[np.inf, 0.0, 0.0]]))

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            ControlPulse(0.01, np.zeros(5))


def _finite_difference(scheme, amps, picks, eps=1e-6):
    from lgrape._engine import SchemeEngine

    engine = SchemeEngine(scheme)
    tables = []
    for k, c in picks:
        up = amps.copy()
        up[k, c] += eps
        dn = amps.copy()
        dn[k, c] -= eps
        tables.extend([up, dn])
    values = engine.qfi_values(np.array(tables))
    return {
        pick: (values[2 * i] - values[2 * i + 1]) / (2 * eps)
        for i, pick in enumerate(picks)
    }


class TestGradient:
    def test_noiseless_zero_pulse_z_direction_vanishes(self):
        # sigma_z controls commute with the encoding; F_Q is flat there
        s = schemes.make_scheme("UE", T=2.0)
        g = gradient(s, s.zero_pulse())
        assert np.max(np.abs(g[:, 2])) <= 1e-8

    def test_noiseless_zero_pulse_final_segment_stationary(self):
        s = schemes.make_scheme("UE", T=2.0)
        g = gradient(s, s.zero_pulse())
        assert abs(g[-1, 0]) <= 1e-8 and abs(g[-1, 1]) <= 1e-8

    @pytest.mark.parametrize(
        "kind,noise",
        [
            ("CUE", NoiseModel("spontaneous_emission", (0.1,))),
            ("CUE", NoiseModel("pauli_xy", (0.1,), asymmetry=0.5)),
            ("CNLA", NoiseModel("generalized_pauli_dephasing", (0.05,), axis_theta=np.pi / 4)),
            ("CNLA", NoiseModel("spin_boson_pc", (0.05,), coupling_theta=0.4)),
        ],
    )
    def test_matches_finite_differences(self, kind, noise):
        rng = np.random.default_rng(sum(map(ord, kind + noise.kind)))
        s = schemes.make_scheme(kind, noise, T=1.0)
        n_ctrl = len(s.control_generators())
        amps = rng.uniform(-1.0, 1.0, size=(100, n_ctrl))
        g = gradient(s, ControlPulse(0.01, amps))
        picks = [
            (int(k), int(c))
            for k, c in zip(rng.integers(0, 100, 5), rng.integers(0, n_ctrl, 5))
        ]
        fd = _finite_difference(s, amps, picks)
        for pick, fd_val in fd.items():
            assert g[pick] == pytest.approx(fd_val, rel=1e-4, abs=1e-7)


class TestOptimize:
    def test_noiseless_optimum_is_preserved(self):
        s = schemes.make_scheme("UE", T=5.0, optimizer=FAST_OPT)
        result = optimize(s)
        assert result.best_qfi >= 25.0 - 1e-3

    def test_controlled_beats_uncontrolled_under_emission(self):
        noise = NoiseModel("spontaneous_emission", (0.1,))
        s = schemes.make_scheme(
            "CUE", noise, T=5.0, optimizer=OptimizerSettings(max_iters=150, restarts=1)
        )
        baseline, _ = schemes.evaluate(schemes.make_scheme("UE", noise, T=5.0))
        result = optimize(s)
        assert result.best_qfi > baseline

    def test_trace_invariants(self):
        s = schemes.make_scheme(
            "CUE",
            NoiseModel("spontaneous_emission", (0.1,)),
            T=2.0,
            optimizer=FAST_OPT,
        )
        result = optimize(s)
        assert result.best_qfi == pytest.approx(np.max(result.qfi_trace))
        assert result.best_qfi >= result.qfi_trace[0]

    def test_deterministic_given_seed(self):
        s = schemes.make_scheme(
            "CUE",
            NoiseModel("spontaneous_emission", (0.1,)),
            T=1.0,
            optimizer=OptimizerSettings(max_iters=40, restarts=3, seed=7),
        )
        a = optimize(s)
        b = optimize(s)
        assert a.best_qfi == b.best_qfi
        assert np.array_equal(a.best_pulse.amplitudes, b.best_pulse.amplitudes)
        assert a.iterations_run == b.iterations_run
        assert a.restart_index == b.restart_index

    def test_adaptive_mode_runs(self):
        s = schemes.make_scheme(
            "CUE",
            NoiseModel("spontaneous_emission", (0.1,)),
            T=1.0,
            optimizer=OptimizerSettings(max_iters=30, restarts=1, adaptive=True),
        )
        result = optimize(s)
        assert result.best_qfi >= result.qfi_trace[0]

    def test_amplitude_clamp(self):
        s = schemes.make_scheme(
            "CUE",
            NoiseModel("spontaneous_emission", (0.1,)),
            T=1.0,
            optimizer=OptimizerSettings(max_iters=30, restarts=2, u_max=0.05),
        )
        result = optimize(s)
        assert np.max(np.abs(result.best_pulse.amplitudes)) <= 0.05 + 1e-15
