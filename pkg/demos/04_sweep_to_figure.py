"""Drive a small time sweep through the experiment pipeline and, when the
plotkit companion package is installed, render the comparison figure.

Run: python3 demos/04_sweep_to_figure.py
Writes demo_sweep.csv (and demo_sweep.svg if plotkit is available).
"""

from lgrape.expcli import NoiseParams, SweepSpec, cmd_sweep
from lgrape.schemes import OptimizerSettings

spec = SweepSpec(
    experiment="time",
    scheme_kinds=("UE", "NLA", "CUE"),
    noise_params=NoiseParams(kind="spontaneous_emission"),
    grid=(1.0, 2.0, 3.0, 4.0),
    out_path="demo_sweep.csv",
    seed=42,
    optimizer=OptimizerSettings(max_iters=150, restarts=2),
)
rows = cmd_sweep(spec)
print(f"wrote {len(rows)} rows to demo_sweep.csv")
for row in rows:
    print(f"  {row.scheme:4s} T={row.T:4.1f}  F_Q/T = {row.fq_over_t:8.4f}")

try:
    from plotkit import FigureSpec, render
except ImportError:
    print("plotkit not installed; skipping the figure (pip install -e plotkit)")
else:
    out = render(FigureSpec(("demo_sweep.csv",), "T", "demo_sweep.svg",
                            title="spontaneous emission, normalized QFI"))
    print(f"rendered {out}")
