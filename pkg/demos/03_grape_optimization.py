"""Optimize control pulses for a noisy probe and compare schemes.

A short-horizon example so it finishes in about a minute; the stock
figure-scale runs use T = 20 and the default 2000-iteration cap.

Run: python3 demos/03_grape_optimization.py
"""

import numpy as np

from lgrape import NoiseModel, grape, make_scheme, schemes
from lgrape.schemes import OptimizerSettings

noise1 = NoiseModel("spontaneous_emission", (0.1,))
T = 5.0
settings = OptimizerSettings(max_iters=300, restarts=2)

print("== baselines (zero pulse) ==")
f_ue, _ = schemes.evaluate(make_scheme("UE", noise1, T=T))
f_nla, _ = schemes.evaluate(make_scheme("NLA", noise1, T=T))
print(f"UE  F_Q = {f_ue:.4f}")
print(f"NLA F_Q = {f_nla:.4f} (entanglement already helps)\n")

print("== gradient sanity at the zero pulse ==")
cue = make_scheme("CUE", noise1, T=T, optimizer=settings)
g = grape.gradient(cue, cue.zero_pulse())
print(f"gradient table shape {g.shape}, largest component {np.abs(g).max():.4f}\n")

print("== gradient ascent, CUE ==")
result = grape.optimize(cue)
print(f"start F_Q = {result.qfi_trace[0]:.4f}, best F_Q = {result.best_qfi:.4f} "
      f"after {result.iterations_run} iterations (restart {result.restart_index})")
print(f"improvement over UE: {result.best_qfi / f_ue:.2f}x\n")

print("== gradient ascent, CNLA (15 two-qubit controls) ==")
cnla = make_scheme("CNLA", noise1, T=T, optimizer=settings)
result2 = grape.optimize(cnla)
print(f"start F_Q = {result2.qfi_trace[0]:.4f}, best F_Q = {result2.best_qfi:.4f}")
print(f"largest optimized amplitude: {np.abs(result2.best_pulse.amplitudes).max():.4f}")
print("\nnormalized comparison (F_Q / T):")
for name, val in [("UE", f_ue), ("NLA", f_nla), ("CUE", result.best_qfi), ("CNLA", result2.best_qfi)]:
    print(f"  {name:5s} {val / T:7.4f}")
