import numpy as np
import pytest

from lgrape.dynamics import NoiseModel
from lgrape.grape import ControlPulse
from lgrape.schemes import bell_state, evaluate, make_scheme, plus_state


class TestMakeScheme:
    def test_single_qubit_kinds(self):
        for kind in ("UE", "CUE"):
            s = make_scheme(kind, NoiseModel("spontaneous_emission", (0.1,)))
            assert s.n_particles == 1
            assert np.allclose(s.initial_state, plus_state())
            assert s.controlled == (kind == "CUE")

    def test_entangled_kinds(self):
        for kind in ("NLA", "NA", "CNLA", "CNA"):
            k = 2 if kind in ("NA", "CNA") else 1
            s = make_scheme(kind, NoiseModel("spontaneous_emission", (0.1, 0.05)[:k]))
            assert s.n_particles == 2
            assert np.allclose(s.initial_state, bell_state())
            assert s.controlled == kind.startswith("C")

    def test_noisy_ancilla_needs_two_rates(self):
        with pytest.raises(ValueError):
            make_scheme("CNA", NoiseModel("spontaneous_emission", (0.1,)))

    def test_noiseless_ancilla_needs_one_rate(self):
        with pytest.raises(ValueError):
            make_scheme("CNLA", NoiseModel("spontaneous_emission", (0.1, 0.05)))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_scheme("QEC")

    def test_generator_counts(self):
        assert len(make_scheme("UE").control_generators()) == 3
        assert len(make_scheme("CNA", NoiseModel("pauli_xy", (0.1, 0.05))).control_generators()) == 15

    def test_horizon_must_fit_segments(self):
        with pytest.raises(ValueError):
            make_scheme("UE", T=1.005, dt=0.01)


class TestEvaluate:
    def test_noiseless_normalized_qfi(self):
        for kind in ("UE", "NLA"):
            f, f_norm = evaluate(make_scheme(kind, T=20.0))
            assert f_norm == pytest.approx(20.0, rel=1e-6)

    def test_noiseless_equivalence(self):
        for T in (2.0, 8.0):
            f_ue, _ = evaluate(make_scheme("UE", T=T))
            f_nla, _ = evaluate(make_scheme("NLA", T=T))
            assert f_ue == pytest.approx(T * T, rel=1e-6)
            assert f_nla == pytest.approx(T * T, rel=1e-6)

    def test_z_dephasing_normalized(self):
        noise = NoiseModel("generalized_pauli_dephasing", (0.05,), axis_theta=0.0)
        f, f_norm = evaluate(make_scheme("UE", noise, T=10.0))
        assert f_norm == pytest.approx(10.0 * np.exp(-1.0), rel=1e-6)

    def test_normalization_is_exact_division(self):
        s = make_scheme("UE", T=7.0)
        f, f_norm = evaluate(s)
        assert f_norm == f / 7.0

    @pytest.mark.parametrize(
        "noise1,noise2",
        [
            (
                NoiseModel("spontaneous_emission", (0.1,)),
                NoiseModel("spontaneous_emission", (0.1, 0.05)),
            ),
            (
                NoiseModel("generalized_pauli_dephasing", (0.1,), axis_theta=np.pi / 4),
                NoiseModel("generalized_pauli_dephasing", (0.1, 0.05), axis_theta=np.pi / 4),
            ),
            (
                NoiseModel("pauli_xy", (0.1,), asymmetry=0.5),
                NoiseModel("pauli_xy", (0.1, 0.05), asymmetry=0.5),
            ),
        ],
    )
    def test_noisy_ancilla_never_helps_uncontrolled(self, noise1, noise2):
        T = 8.0
        f_nla, _ = evaluate(make_scheme("NLA", noise1, T=T))
        f_na, _ = evaluate(make_scheme("NA", noise2, T=T))
        assert f_nla >= f_na

    def test_uncontrolled_rejects_nonzero_pulse(self):
        s = make_scheme("UE", T=1.0)
        pulse = ControlPulse(0.01, np.full((100, 3), 0.1))
        with pytest.raises(ValueError):
            evaluate(s, pulse)
