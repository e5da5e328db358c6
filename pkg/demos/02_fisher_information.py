"""Quantum and classical Fisher information for frequency estimation.

Shows the SLD construction, the QFI against its closed form under
dephasing, a measurement that saturates the quantum bound and one that is
blind to the parameter, and the resulting precision bounds.

Run: python3 demos/02_fisher_information.py
"""

import numpy as np

from lgrape import NoiseModel, dynamics, make_scheme, qfi

omega0, T = 3.0, 10.0

print("== noiseless phase estimation from |+> ==")
s = make_scheme("UE", omega0=omega0, T=T)
pair = dynamics.propagate(s, s.zero_pulse())
f_q = qfi.qfi(pair)
print(f"F_Q = {f_q:.6f} (expect T^2 = {T * T:.0f})")
print(f"QCRB for 100 repetitions: {qfi.qcrb(f_q, 100):.6f} rad/time\n")

print("== SLD under z dephasing ==")
gamma = 0.05
s = make_scheme("UE", NoiseModel("generalized_pauli_dephasing", (gamma,)), T=T)
pair = dynamics.propagate(s, s.zero_pulse())
l_op = qfi.sld(pair)
residual = pair.drho - 0.5 * (pair.rho @ l_op + l_op @ pair.rho)
print(f"SLD residual ||drho - (rho L + L rho)/2|| = {np.linalg.norm(residual):.2e}")
f_q = qfi.qfi(pair)
print(f"F_Q = {f_q:.6f}, closed form T^2 e^(-2 gamma T) = {T * T * np.exp(-2 * gamma * T):.6f}\n")

print("== measurements: saturating vs blind ==")
s = make_scheme("UE", omega0=omega0, T=T)
pair = dynamics.propagate(s, s.zero_pulse())
plus = np.full((2, 2), 0.5, dtype=complex)
x_basis = qfi.Povm([plus, np.eye(2) - plus])
z_basis = qfi.Povm([np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)])
print(f"QFI                     = {qfi.qfi(pair):.4f}")
print(f"CFI, sigma_x projectors = {qfi.cfi(pair, x_basis):.4f} (saturates)")
print(f"CFI, sigma_z projectors = {qfi.cfi(pair, z_basis):.4f} (populations carry no signal)")
