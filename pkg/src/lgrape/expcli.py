"""Command-line experiment driver: parameter sweeps, pulse persistence, CSV.

Exit codes: 0 ok, 1 verification or data-consistency failure, 2 usage error,
3 I/O error. Sweep CSVs are byte-reproducible for a fixed spec and seed; all
floats are serialized with 17 significant digits.
"""

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from multiprocessing import get_context
from dataclasses import dataclass, field, replace

import numpy as np

from . import grape, schemes
from .dynamics import NOISE_KINDS, NoiseModel
from .errors import ContractViolationError, PulseFormatError

__all__ = [
    "SweepSpec",
    "ResultRow",
    "build_noise",
    "cmd_sweep",
    "cmd_optimize",
    "cmd_evaluate",
    "cmd_verify",
    "save_pulse",
    "load_pulse",
    "parse_grid",
    "main",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "scheme",
    "noise",
    "T",
    "dt",
    "gamma1",
    "gamma2",
    "eta1",
    "eta2",
    "omega0",
    "theta",
    "p",
    "fq",
    "fq_over_t",
    "qcrb",
    "iterations",
    "seed",
    "wall_time_s",
)

EXPERIMENTS = ("time", "gamma", "omega", "theta", "single")

DEFAULT_GRIDS = {
    "time": tuple(float(t) for t in range(1, 21)),
    "gamma": tuple(0.05 * i for i in range(11)),
    "omega": tuple(1.0 + 0.2 * i for i in range(21)),
    "theta": tuple(np.pi / 16 * i for i in range(9)),
}

OMEGA_SWEEP_ANCHOR = 3.0  # controlled pulses are optimized here, then swept


@dataclass(frozen=True)
class NoiseParams:
    """Raw noise parameters as given on the command line (None = default)."""

    kind: str = "none"
    gamma1: float = None
    gamma2: float = None
    eta1: float = None
    eta2: float = None
    p: float = None
    axis_theta: float = None
    axis_phi: float = None
    coupling_theta: float = None
    omega_c: float = 1.0


@dataclass(frozen=True)
class SweepSpec:
    experiment: str
    scheme_kinds: tuple
    noise_params: NoiseParams
    grid: tuple
    out_path: str
    seed: int = 42
    omega0: float = schemes.DEFAULT_OMEGA0
    T: float = 20.0
    dt: float = schemes.DEFAULT_DT
    optimizer: schemes.OptimizerSettings = field(default_factory=schemes.OptimizerSettings)
    jobs: int = 1
    timing: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.scheme_kinds:
            raise ValueError("at least one scheme is required")
        grid = tuple(float(g) for g in self.grid)
        if not grid:
            raise ValueError("sweep grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)


@dataclass
class ResultRow:
    scheme: str
    noise: str
    T: float
    dt: float
    gamma1: float = None
    gamma2: float = None
    eta1: float = None
    eta2: float = None
    omega0: float = None
    theta: float = None
    p: float = None
    fq: float = None
    fq_over_t: float = None
    qcrb: float = None
    iterations: int = 0
    seed: int = 0
    wall_time_s: float = None


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def write_csv(path, rows, append=False):
    mode = "a" if append and os.path.exists(path) else "w"
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        if mode == "w":
            fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(getattr(row, col)) for col in CSV_COLUMNS) + "\n")


def build_noise(params, scheme_kind):
    """NoiseModel for a scheme, filling unspecified rates with the defaults
    used throughout the reference experiments (single noisy particle for
    UE/NLA-type kinds, both particles for the noisy-ancilla kinds)."""
    kind = params.kind
    if kind not in NOISE_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}")
    if kind == "none":
        return NoiseModel()
    k = 2 if scheme_kind in schemes.NOISY_ANCILLA_KINDS else 1

    if kind == "spontaneous_emission":
        g1 = 0.1 if params.gamma1 is None else params.gamma1
        g2 = 0.05 if params.gamma2 is None else params.gamma2
        return NoiseModel(kind, (g1,) if k == 1 else (g1, g2))
    if kind == "generalized_pauli_dephasing":
        default_g1 = 0.05 if k == 1 else 0.1
        g1 = default_g1 if params.gamma1 is None else params.gamma1
        g2 = 0.05 if params.gamma2 is None else params.gamma2
        return NoiseModel(
            kind,
            (g1,) if k == 1 else (g1, g2),
            axis_theta=np.pi / 4 if params.axis_theta is None else params.axis_theta,
            axis_phi=0.0 if params.axis_phi is None else params.axis_phi,
        )
    if kind == "pauli_xy":
        g1 = 0.1 if params.gamma1 is None else params.gamma1
        g2 = 0.05 if params.gamma2 is None else params.gamma2
        return NoiseModel(
            kind,
            (g1,) if k == 1 else (g1, g2),
            asymmetry=0.5 if params.p is None else params.p,
        )
    # spin_boson_pc; the dissipative-regime rates are the defaults, a
    # dephasing run passes --eta1/--eta2 explicitly
    e1 = 0.05 if params.eta1 is None else params.eta1
    e2 = 0.025 if params.eta2 is None else params.eta2
    return NoiseModel(
        kind,
        (e1,) if k == 1 else (e1, e2),
        coupling_theta=0.0 if params.coupling_theta is None else params.coupling_theta,
        cutoff_freq=params.omega_c,
    )


def _noise_columns(noise):
    cols = {}
    if noise.kind in ("spontaneous_emission", "generalized_pauli_dephasing", "pauli_xy"):
        cols["gamma1"] = noise.rates[0]
        if noise.n_noisy > 1:
            cols["gamma2"] = noise.rates[1]
    elif noise.kind == "spin_boson_pc":
        cols["eta1"] = noise.rates[0]
        if noise.n_noisy > 1:
            cols["eta2"] = noise.rates[1]
        cols["theta"] = noise.coupling_theta
    if noise.kind == "pauli_xy":
        cols["p"] = noise.asymmetry
    return cols


def _make_row(scheme, fq, iterations, seed, wall_time=None):
    return ResultRow(
        scheme=scheme.kind,
        noise=scheme.noise.kind,
        T=scheme.T,
        dt=scheme.dt,
        omega0=scheme.omega0,
        fq=fq,
        fq_over_t=fq / scheme.T,
        qcrb=(1.0 / np.sqrt(fq)) if fq > 0 else None,
        iterations=iterations,
        seed=seed,
        wall_time_s=wall_time,
        **_noise_columns(scheme.noise),
    )


def _run_point(scheme):
    """Evaluate one scheme point, optimizing first when it is controlled."""
    t0 = time.monotonic()
    if scheme.controlled:
        result = grape.optimize(scheme)
        fq = result.best_qfi
        iterations = result.iterations_run
        pulse = result.best_pulse
    else:
        fq, _ = schemes.evaluate(scheme)
        iterations = 0
        pulse = None
    return fq, iterations, pulse, time.monotonic() - t0


def _scheme_for(spec, kind, noise, omega0=None, T=None):
    return schemes.make_scheme(
        kind,
        noise,
        omega0=spec.omega0 if omega0 is None else omega0,
        T=spec.T if T is None else T,
        dt=spec.dt,
        optimizer=replace(spec.optimizer, seed=spec.seed),
    )


def _sweep_tasks(spec):
    """Expand a sweep spec into ordered (kind, scheme) evaluation tasks.

    The omega experiment is special-cased in cmd_sweep because its
    controlled schemes reuse one pulse across the grid.
    """
    tasks = []
    for kind in spec.scheme_kinds:
        for value in spec.grid if spec.experiment != "single" else (None,):
            params = spec.noise_params
            if spec.experiment == "time":
                scheme = _scheme_for(spec, kind, build_noise(params, kind), T=value)
            elif spec.experiment == "gamma":
                g2 = 0.5 if params.gamma2 is None else params.gamma2
                scheme = _scheme_for(
                    spec, kind, build_noise(replace(params, gamma1=value, gamma2=g2), kind)
                )
            elif spec.experiment == "theta":
                if params.kind != "spin_boson_pc":
                    raise ValueError("the theta experiment sweeps the spin-boson coupling angle")
                scheme = _scheme_for(
                    spec, kind, build_noise(replace(params, coupling_theta=value), kind)
                )
            else:  # single
                scheme = _scheme_for(spec, kind, build_noise(params, kind))
            tasks.append((kind, scheme))
    return tasks


def _worker(task):
    kind, scheme = task
    fq, iterations, _, wall = _run_point(scheme)
    return fq, iterations, wall


def cmd_sweep(spec):
    """Run a sweep and write one CSV row per (scheme, grid point)."""
    rows = []
    if spec.experiment == "omega":
        for kind in spec.scheme_kinds:
            noise = build_noise(spec.noise_params, kind)
            pulse = None
            iterations = 0
            if kind in schemes.CONTROLLED_KINDS:
                anchor = _scheme_for(spec, kind, noise, omega0=OMEGA_SWEEP_ANCHOR)
                result = grape.optimize(anchor)
                pulse = result.best_pulse
                iterations = result.iterations_run
            for value in spec.grid:
                t0 = time.monotonic()
                scheme = _scheme_for(spec, kind, noise, omega0=value)
                fq, _ = schemes.evaluate(scheme, pulse)
                wall = time.monotonic() - t0
                rows.append(
                    _make_row(scheme, fq, iterations, spec.seed, wall if spec.timing else None)
                )
    else:
        tasks = _sweep_tasks(spec)
        if spec.jobs > 1:
            with ProcessPoolExecutor(max_workers=spec.jobs, mp_context=get_context("spawn")) as pool:
                outcomes = list(pool.map(_worker, tasks))
        else:
            outcomes = [_worker(t) for t in tasks]
        for (kind, scheme), (fq, iterations, wall) in zip(tasks, outcomes):
            rows.append(
                _make_row(scheme, fq, iterations, spec.seed, wall if spec.timing else None)
            )
    write_csv(spec.out_path, rows)
    return rows


def save_pulse(path, pulse, scheme_kind, seed):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"pulse-v1 m={pulse.m} K={pulse.n_controls} "
            f"dt={format(pulse.dt, '.17g')} scheme={scheme_kind} seed={seed}\n"
        )
        for row in pulse.amplitudes:
            fh.write(" ".join(format(v, ".17g") for v in row) + "\n")


def load_pulse(path):
    """Read a pulse file, returning (ControlPulse, scheme_kind, seed)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("pulse-v1 "):
        raise PulseFormatError(f"{path}: missing 'pulse-v1' header line")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        m = int(fields["m"])
        n_controls = int(fields["K"])
        dt = float(fields["dt"])
        kind = fields["scheme"]
        seed = int(fields["seed"])
    except (KeyError, ValueError) as exc:
        raise PulseFormatError(f"{path}: malformed header: {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise PulseFormatError(f"{path}: expected {m} x {n_controls} amplitudes, found {len(body)} rows")
    amps = np.empty((m, n_controls))
    for i, ln in enumerate(body):
        vals = ln.split()
        if len(vals) != n_controls:
            raise PulseFormatError(
                f"{path}: expected {m} x {n_controls} amplitudes, row {i} has {len(vals)} values"
            )
        amps[i] = [float(v) for v in vals]
    return grape.ControlPulse(dt, amps), kind, seed


def cmd_optimize(scheme, pulse_path, out_path=None):
    """Optimize a controlled scheme; persist the pulse and append a CSV row."""
    if not scheme.controlled:
        raise UsageError(f"scheme {scheme.kind} is uncontrolled; nothing to optimize")
    t0 = time.monotonic()
    result = grape.optimize(scheme)
    wall = time.monotonic() - t0
    save_pulse(pulse_path, result.best_pulse, scheme.kind, scheme.optimizer.seed)
    row = _make_row(scheme, result.best_qfi, result.iterations_run, scheme.optimizer.seed, wall)
    if out_path:
        write_csv(out_path, [row], append=True)
    return result, row


def cmd_evaluate(scheme, pulse_path, out_path=None):
    """Evaluate a scheme under a stored pulse without optimizing."""
    t0 = time.monotonic()
    pulse, kind, seed = load_pulse(pulse_path)
    expected = (scheme.n_segments, len(scheme.control_generators()))
    if (pulse.m, pulse.n_controls) != expected:
        raise PulseFormatError(
            f"{pulse_path}: pulse is {pulse.m} x {pulse.n_controls}, scheme "
            f"{scheme.kind} needs {expected[0]} x {expected[1]}"
        )
    fq, _ = schemes.evaluate(scheme, pulse)
    row = _make_row(scheme, fq, 0, seed, time.monotonic() - t0)
    if out_path:
        write_csv(out_path, [row], append=True)
    return fq, row


def cmd_verify(dt=schemes.DEFAULT_DT, inject_dissipator_sign_error=False, out=sys.stdout):
    from .verify import run_verification

    return run_verification(dt=dt, inject_dissipator_sign_error=inject_dissipator_sign_error, out=out)


class UsageError(Exception):
    pass


def parse_grid(text):
    """Parse 'start:step:stop' into an inclusive, strictly increasing grid."""
    try:
        start, step, stop = (float(tok) for tok in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}; expected start:step:stop") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"bad grid {text!r}; need step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def _read_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}: config lines must be key=value, got {line!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lgrape",
        description="Noisy quantum metrology experiments: sweeps, pulse optimization, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--scheme", help="scheme kind(s), comma separated")
        p.add_argument("--noise", help=f"noise kind, one of {', '.join(NOISE_KINDS)}")
        p.add_argument("--t", type=float, help="evolution horizon T")
        p.add_argument("--dt", type=float, help="segment width")
        p.add_argument("--gamma1", type=float)
        p.add_argument("--gamma2", type=float)
        p.add_argument("--eta1", type=float)
        p.add_argument("--eta2", type=float)
        p.add_argument("--omega0", type=float)
        p.add_argument("--theta", type=float, help="spin-boson coupling angle")
        p.add_argument("--p", type=float, help="Pauli-XY asymmetry")
        p.add_argument("--axis-theta", type=float, help="dephasing axis polar angle")
        p.add_argument("--axis-phi", type=float, help="dephasing axis azimuth")
        p.add_argument("--seed", type=int)
        p.add_argument("--max-iters", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--lr", type=float, help="gradient-ascent learning rate")
        p.add_argument("--out", help="CSV output path")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    add_common(p_sweep)
    p_sweep.add_argument("--experiment", choices=EXPERIMENTS, default="time")
    p_sweep.add_argument("--grid", help="swept grid start:step:stop")
    p_sweep.add_argument("--jobs", type=int, help="worker processes (env LGRAPE_JOBS)")
    p_sweep.add_argument(
        "--timing", action="store_true", help="record wall times (breaks byte reproducibility)"
    )

    p_opt = sub.add_parser("optimize", help="optimize one controlled scheme")
    add_common(p_opt)
    p_opt.add_argument("--pulse", required=True, help="pulse file to write")

    p_eval = sub.add_parser("evaluate", help="evaluate a scheme under a stored pulse")
    add_common(p_eval)
    p_eval.add_argument("--pulse", required=True, help="pulse file to read")

    p_verify = sub.add_parser("verify", help="run the invariant verification suite")
    p_verify.add_argument("--dt", type=float, default=schemes.DEFAULT_DT)
    p_verify.add_argument(
        "--inject-dissipator-sign-error",
        action="store_true",
        help=argparse.SUPPRESS,  # test hook
    )
    return parser


def _merged(args, key, default=None, cast=None):
    val = getattr(args, key, None)
    if val is None and getattr(args, "_config", None):
        val = args._config.get(key)
        if val is not None and cast is not None:
            val = cast(val)
    return default if val is None else val


def _noise_params_from(args):
    return NoiseParams(
        kind=_merged(args, "noise", "none"),
        gamma1=_merged(args, "gamma1", cast=float),
        gamma2=_merged(args, "gamma2", cast=float),
        eta1=_merged(args, "eta1", cast=float),
        eta2=_merged(args, "eta2", cast=float),
        p=_merged(args, "p", cast=float),
        axis_theta=_merged(args, "axis_theta", cast=float),
        axis_phi=_merged(args, "axis_phi", cast=float),
        coupling_theta=_merged(args, "theta", cast=float),
    )


def _optimizer_from(args, seed):
    return schemes.OptimizerSettings(
        learning_rate=_merged(args, "lr", 0.001, float),
        max_iters=_merged(args, "max_iters", 2000, int),
        restarts=_merged(args, "restarts", 5, int),
        seed=seed,
    )


def _single_scheme_from(args):
    kinds = _merged(args, "scheme")
    if not kinds:
        raise UsageError("--scheme is required")
    kinds = kinds.split(",")
    if len(kinds) != 1:
        raise UsageError("optimize/evaluate take exactly one --scheme")
    kind = kinds[0].strip()
    seed = int(_merged(args, "seed", 42, int))
    params = _noise_params_from(args)
    return schemes.make_scheme(
        kind,
        build_noise(params, kind),
        omega0=_merged(args, "omega0", schemes.DEFAULT_OMEGA0, float),
        T=_merged(args, "t", 20.0, float),
        dt=_merged(args, "dt", schemes.DEFAULT_DT, float),
        optimizer=_optimizer_from(args, seed),
    )


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            args._config = _read_config(args.config)
        else:
            args._config = {}

        if args.command == "verify":
            failures = cmd_verify(
                dt=args.dt, inject_dissipator_sign_error=args.inject_dissipator_sign_error
            )
            return 1 if failures else 0

        if args.command == "sweep":
            kinds = _merged(args, "scheme")
            if not kinds:
                raise UsageError("--scheme is required")
            out = _merged(args, "out")
            if not out:
                raise UsageError("--out is required for sweep")
            experiment = args.experiment
            grid_text = _merged(args, "grid")
            if grid_text:
                grid = parse_grid(grid_text)
            elif experiment == "single":
                grid = (0.0,)
            else:
                grid = DEFAULT_GRIDS[experiment]
            seed = int(_merged(args, "seed", 42, int))
            jobs = _merged(args, "jobs", cast=int)
            if jobs is None:
                jobs = int(os.environ.get("LGRAPE_JOBS", os.cpu_count() or 1))
            spec = SweepSpec(
                experiment=experiment,
                scheme_kinds=tuple(k.strip() for k in kinds.split(",")),
                noise_params=_noise_params_from(args),
                grid=grid,
                out_path=out,
                seed=seed,
                omega0=_merged(args, "omega0", schemes.DEFAULT_OMEGA0, float),
                T=_merged(args, "t", 20.0, float),
                dt=_merged(args, "dt", schemes.DEFAULT_DT, float),
                optimizer=_optimizer_from(args, seed),
                jobs=jobs,
                timing=args.timing,
            )
            cmd_sweep(spec)
            return 0

        if args.command == "optimize":
            scheme = _single_scheme_from(args)
            cmd_optimize(scheme, args.pulse, _merged(args, "out"))
            return 0

        if args.command == "evaluate":
            scheme = _single_scheme_from(args)
            cmd_evaluate(scheme, args.pulse, _merged(args, "out"))
            return 0
    except (UsageError, ValueError) as exc:
        if isinstance(exc, (PulseFormatError, ContractViolationError)):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
