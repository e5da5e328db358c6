"""Render normalized-QFI comparison figures from sweep CSV files.

One line per scheme: uncontrolled schemes (UE, NLA, NA) are drawn dotted,
their controlled counterparts solid. Output is a static vector image whose
bytes are stable across re-renders of the same input.
"""

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["FigureSpec", "SchemaError", "render", "read_rows", "SCHEME_STYLES"]

# color-blind-safe palette; dotted marks the uncontrolled schemes
SCHEME_STYLES = {
    "UE": dict(color="#0072B2", linestyle=":"),
    "NLA": dict(color="#009E73", linestyle=":"),
    "NA": dict(color="#D55E00", linestyle=":"),
    "CUE": dict(color="#0072B2", linestyle="-"),
    "CNLA": dict(color="#009E73", linestyle="-"),
    "CNA": dict(color="#D55E00", linestyle="-"),
}

AXIS_LABELS = {
    "T": "T",
    "gamma1": r"$\gamma_1$",
    "omega0": r"$\omega_0$",
    "theta": r"$\theta$",
}


class SchemaError(ValueError):
    """The CSV does not match the sweep schema this tool consumes."""


@dataclass(frozen=True)
class FigureSpec:
    csv_paths: tuple
    x_column: str
    out_path: str
    y_column: str = "fq_over_t"
    series_column: str = "scheme"
    title: str = ""

    def __post_init__(self):
        if isinstance(self.csv_paths, str):
            object.__setattr__(self, "csv_paths", (self.csv_paths,))
        else:
            object.__setattr__(self, "csv_paths", tuple(self.csv_paths))
        if not self.csv_paths:
            raise SchemaError("at least one CSV path is required")


def read_rows(spec):
    """Load and validate rows from every CSV named by the spec."""
    rows = []
    for path in spec.csv_paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for col in (spec.x_column, spec.y_column, spec.series_column):
                if col not in header:
                    raise SchemaError(f"{path}: missing column {col!r}")
            rows.extend(reader)
    return rows


def _series(spec, rows):
    series = {}
    for row in rows:
        label = row[spec.series_column]
        if label not in SCHEME_STYLES:
            raise SchemaError(
                f"unknown scheme label {label!r} in column {spec.series_column!r}"
            )
        try:
            x = float(row[spec.x_column])
            y = float(row[spec.y_column])
        except ValueError as exc:
            raise SchemaError(
                f"non-numeric value in column {spec.x_column!r}/{spec.y_column!r}: {exc}"
            ) from exc
        series.setdefault(label, []).append((x, y))
    if not series:
        raise SchemaError(f"no rows found for series column {spec.series_column!r}")
    for label, points in series.items():
        if not points:
            raise SchemaError(f"series {label!r} has no rows")
        points.sort(key=lambda p: p[0])
    return series


def render(spec):
    """Draw the figure described by the spec and write a vector image."""
    series = _series(spec, read_rows(spec))

    plt.rcParams["svg.hashsalt"] = "plotkit"
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label in sorted(series, key=list(SCHEME_STYLES).index):
        xs, ys = zip(*series[label])
        ax.plot(xs, ys, label=label, linewidth=1.6, **SCHEME_STYLES[label])
    ax.set_xlabel(AXIS_LABELS.get(spec.x_column, spec.x_column))
    ax.set_ylabel(r"$F_Q/T$")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(frameon=False, fontsize=9)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    fig.savefig(spec.out_path, metadata={"Date": None})
    plt.close(fig)
    return spec.out_path
