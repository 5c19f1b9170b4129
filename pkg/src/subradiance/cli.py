"""Command-line front end.

Subcommands ``spectrum``, ``evolve``, ``scan`` and ``sweep`` read a flat
``key = value`` config file, run the pipeline and write CSV files plus, for
figure-style outputs, a standalone matplotlib script that plots them.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import analysis, dynamics
from .coupling import assemble
from .errors import NumericalError, SubradianceError
from .geometry import build_lattice
from .hilbert import HilbertSpace
from .spectral import diagonalize

OUT_DIR_ENV = "SUBRADIANCE_OUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

EVOLUTION_PATHS = ("eigen", "ode", "krylov")


class ConfigError(SubradianceError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class RunConfig:
    dims: tuple[int, int, int] = (1, 1, 16)
    spacing_lambda: float = 0.25
    M: int = 2
    n: int | None = None
    d_hat: tuple[float, float, float] = (1.0, 0.0, 0.0)
    k_hat: tuple[float, float, float] = (0.0, 0.0, 1.0)
    t_max_gamma: float = 60.0
    n_time_points: int = 2000
    fit_window: tuple[float, float] | None = None
    fit_mode: str = "free"
    evolution_path: str = "eigen"
    krylov_dim: int = 30
    output_dir: str = "out"

    @property
    def N(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max_gamma, self.n_time_points)

    def space(self) -> HilbertSpace:
        return HilbertSpace(self.N, self.M)

    def lattice(self):
        return build_lattice(self.dims, self.spacing_lambda, self.d_hat, self.k_hat)

    def validate(self) -> "RunConfig":
        problems = []
        if len(self.dims) != 3 or min(self.dims) < 1:
            problems.append(f"dims: need three positive integers, got {self.dims}")
        if not self.spacing_lambda > 0:
            problems.append(f"spacing_lambda: must be positive, got {self.spacing_lambda}")
        if not 1 <= self.M <= max(self.N, 1):
            problems.append(f"M: must lie in [1, N={self.N}], got {self.M}")
        else:
            try:
                space = self.space()
            except SubradianceError as exc:
                problems.append(f"M: {exc}")
            else:
                if self.n is not None and not 1 <= self.n <= space.dim:
                    problems.append(f"n: must lie in [1, {space.dim}], got {self.n}")
        for name in ("d_hat", "k_hat"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)) or not np.any(vec):
                problems.append(f"{name}: need a nonzero 3-vector, got {getattr(self, name)}")
        if not self.t_max_gamma >= 0:
            problems.append(f"t_max_gamma: must be nonnegative, got {self.t_max_gamma}")
        if self.n_time_points < 1:
            problems.append(f"n_time_points: must be at least 1, got {self.n_time_points}")
        if self.fit_window is not None and not (len(self.fit_window) == 2 and self.fit_window[1] > self.fit_window[0] >= 0):
            problems.append(f"fit_window: need 0 <= start < end, got {self.fit_window}")
        if self.fit_mode not in analysis.FIT_MODES:
            problems.append(f"fit_mode: must be one of {analysis.FIT_MODES}, got {self.fit_mode!r}")
        if self.evolution_path not in EVOLUTION_PATHS:
            problems.append(f"evolution_path: must be one of {EVOLUTION_PATHS}, got {self.evolution_path!r}")
        if self.krylov_dim < 2:
            problems.append(f"krylov_dim: must be at least 2, got {self.krylov_dim}")
        if problems:
            raise ConfigError(problems)
        return self


def _ints(text: str, count: int | None = None) -> tuple[int, ...]:
    parts = [p for p in text.replace("x", ",").split(",") if p.strip()]
    vals = tuple(int(p) for p in parts)
    if count is not None and len(vals) != count:
        raise ValueError(f"expected {count} integers")
    return vals


def _floats(text: str, count: int) -> tuple[float, ...]:
    vals = tuple(float(p) for p in text.split(","))
    if len(vals) != count:
        raise ValueError(f"expected {count} comma-separated numbers")
    return vals


def _optional_int(text: str):
    return None if text.strip().lower() in ("", "none") else int(text)


def _optional_window(text: str):
    return None if text.strip().lower() in ("", "none") else _floats(text, 2)


_PARSERS = {
    "dims": lambda s: _ints(s, 3),
    "spacing_lambda": float,
    "M": int,
    "n": _optional_int,
    "d_hat": lambda s: _floats(s, 3),
    "k_hat": lambda s: _floats(s, 3),
    "t_max_gamma": float,
    "n_time_points": int,
    "fit_window": _optional_window,
    "fit_mode": str.strip,
    "evolution_path": str.strip,
    "krylov_dim": int,
    "output_dir": str.strip,
}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) into a validated config."""
    values, problems = {}, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            problems.append(f"{key}: unknown key (line {lineno})")
            continue
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            problems.append(f"{key}: cannot parse {val!r} ({exc})")
    if problems:
        raise ConfigError(problems)
    return RunConfig(**values).validate()


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"config: cannot read {path}: {exc}"]) from exc
    return parse_config(text)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.12g}"
    return str(x)


def _summary(pairs) -> str:
    return "\n".join(f"{k}={_fmt(v)}" for k, v in pairs)


# ---- plot scripts -----------------------------------------------------------

_SPECTRUM_PLOT = '''\
"""Plot decay constants from spectrum.csv (ascending), log scale."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent

with open(HERE / "spectrum.csv") as fh:
    rows = list(csv.DictReader(fh))
mode = [int(r["mode_index"]) for r in rows]
decay = [float(r["decay_const"]) for r in rows]
shift = [float(r["im_2lambda_over_gamma"]) for r in rows]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.semilogy(mode, decay, ".")
ax1.axhline(1.0, ls="--", c="k", lw=0.8)
ax1.set_xlabel("mode")
ax1.set_ylabel("-Re[2 lambda]/Gamma")
ax2.plot(mode, sorted(shift), ".")
ax2.set_xlabel("mode")
ax2.set_ylabel("Im[2 lambda]/Gamma (ascending)")
fig.tight_layout()
fig.savefig(HERE / "spectrum.png", dpi=150)
'''

_EVOLUTION_PLOT = '''\
"""Plot the imprinted-state population against e^(-M Gamma t) and the top weightings."""
import csv
import math
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
M = {M}

with open(HERE / "evolution.csv") as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t_gamma"]) for r in rows]
pop = [float(r["population"]) for r in rows]
with open(HERE / "weights.csv") as fh:
    wts = sorted(csv.DictReader(fh), key=lambda r: -float(r["wt"]))[:5]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.semilogy(t, pop, label="n = {n}")
ax1.semilogy(t, [math.exp(-M * x) for x in t], "k-.", label="exp(-%d Gamma t)" % M)
ax1.set_ylim(max(min(pop), 1e-12), 1.5)
ax1.set_xlabel("Gamma t")
ax1.set_ylabel("population")
ax1.legend()
ax2.bar([r["mode_index"] for r in wts], [float(r["wt"]) for r in wts])
ax2.set_xlabel("mode")
ax2.set_ylabel("wt")
fig.tight_layout()
fig.savefig(HERE / "evolution.png", dpi=150)
'''


# ---- commands ---------------------------------------------------------------

def cmd_spectrum(config: RunConfig, out_dir: Path) -> str:
    space = config.space()
    A = assemble(space, config.lattice())
    spec = diagonalize(A, vectors=False)
    spec.to_csv(out_dir / "spectrum.csv")
    (out_dir / "plot_spectrum.py").write_text(_SPECTRUM_PLOT)
    mode, dmin = analysis.min_decay(spec)
    trace = complex(np.sum(spec.eigenvalues))
    expected = -space.dim * space.M / 2.0
    return _summary([
        ("dim", space.dim),
        ("min_decay_mode", mode),
        ("min_decay_gamma", dmin),
        ("max_decay_gamma", float(spec.decay_constants.max())),
        ("trace_re", trace.real),
        ("trace_expected", expected),
        ("trace_rel_err", abs(trace - expected) / abs(expected)),
    ])


def cmd_evolve(config: RunConfig, out_dir: Path) -> str:
    if config.n is None:
        raise ConfigError(["n: the evolve command needs an imprint index"])
    space = config.space()
    A = assemble(space, config.lattice())
    spec = diagonalize(A)
    times = config.times()
    if config.evolution_path == "eigen":
        series = dynamics.evolve_imprinted(spec, space, config.n, times)
    else:
        c0 = dynamics.initial_phase_imprinted(space, config.n)
        if config.evolution_path == "ode":
            full = dynamics.evolve_ode(A, c0, times)
        else:
            full = dynamics.evolve_krylov(A, c0, times, config.krylov_dim)
        series = dynamics.project_imprinted(full, space, config.n)
    weights = dynamics.mode_weights(spec, space, config.n)

    dynamics.write_evolution_csv(out_dir / "evolution.csv", series)
    dynamics.write_weights_csv(out_dir / "weights.csv", weights)
    (out_dir / "plot_evolution.py").write_text(_EVOLUTION_PLOT.format(M=space.M, n=config.n))

    fits = []
    for mode in analysis.FIT_MODES:
        try:
            fits.append(analysis.fit_decay(series, config.fit_window, mode))
        except SubradianceError:
            pass
    analysis.write_fit_report(out_dir / "fits.csv", fits, space.M)

    period = analysis.beat_period(weights)
    pairs = [
        ("dim", space.dim),
        ("n", config.n),
        ("final_population", float(series.population[-1])),
        ("beat_period_gamma", "none" if period is None else period),
    ]
    for fit in fits:
        if fit.mode == config.fit_mode:
            pairs += [("fit_rate_gamma", fit.rate), ("lifetime_x_intrinsic", fit.lifetime_ratio(space.M))]
    return _summary(pairs)


def cmd_scan(config: RunConfig, out_dir: Path, target_mode: int = 1) -> str:
    space = config.space()
    spec = diagonalize(assemble(space, config.lattice()))
    ranking = analysis.scan_imprint_index(spec, space, target_mode)
    with (out_dir / "scan.csv").open("w") as fh:
        fh.write("rank,n,wt_target\n")
        for r, (n, wt) in enumerate(ranking, start=1):
            fh.write(f"{r},{n},{wt:.12g}\n")
    best_n, best_wt = ranking[0]
    return _summary([
        ("dim", space.dim),
        ("target_mode", target_mode),
        ("target_decay_gamma", float(spec.decay_constants[target_mode - 1])),
        ("best_n", best_n),
        ("best_wt", best_wt),
    ])


def _sweep_point(config: RunConfig) -> tuple[float, float]:
    spec = diagonalize(assemble(config.space(), config.lattice()), vectors=False)
    dc = spec.decay_constants
    return float(dc.min()), float(dc.max())


def sweep_configs(config: RunConfig, param: str, values: list[str]) -> list[RunConfig]:
    if not values:
        raise ConfigError(["values: the sweep needs at least one value"])
    out = []
    for v in values:
        try:
            if param == "spacing":
                cfg = replace(config, spacing_lambda=float(v))
            elif param == "geometry":
                cfg = replace(config, dims=_ints(v, 3))
            else:
                raise ConfigError([f"param: must be 'spacing' or 'geometry', got {param!r}"])
        except ValueError as exc:
            raise ConfigError([f"values: cannot parse {v!r} for {param} ({exc})"]) from exc
        out.append(cfg.validate())
    return out


def cmd_sweep(config: RunConfig, out_dir: Path, param: str, values: list[str], jobs: int = 1) -> str:
    configs = sweep_configs(config, param, values)
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, configs))
    else:
        results = [_sweep_point(c) for c in configs]
    with (out_dir / "sweep.csv").open("w") as fh:
        fh.write("value,min_decay_gamma,max_decay_gamma\n")
        for v, (lo, hi) in zip(values, results):
            fh.write(f"{v},{lo:.12g},{hi:.12g}\n")
    return _summary([(f"{param}={v}.min_decay_gamma", lo) for v, (lo, _) in zip(values, results)])


# ---- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subradiance", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to a key = value run config")
        p.add_argument("--out", default=None, help=f"output directory (overrides ${OUT_DIR_ENV} and the config)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    common(sub.add_parser("spectrum", help="eigenvalues and decay constants"))
    common(sub.add_parser("evolve", help="imprinted-state population and mode weightings"))
    p = sub.add_parser("scan", help="rank imprint indices by the weight on one mode")
    common(p)
    p.add_argument("--target-mode", type=int, default=1, help="1-based mode in decay-ascending order")
    p = sub.add_parser("sweep", help="min/max decay constant over a parameter sweep")
    common(p)
    p.add_argument("--param", choices=("spacing", "geometry"), required=True)
    p.add_argument("--values", nargs="*", default=[], help="spacings in wavelengths, or NxXNyXNz geometries")
    return parser


def resolve_out_dir(cli_out: str | None, config: RunConfig) -> Path:
    return Path(cli_out or os.environ.get(OUT_DIR_ENV) or config.output_dir)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.jobs < 1:
            raise ConfigError([f"--jobs: must be at least 1, got {args.jobs}"])
        out_dir = resolve_out_dir(args.out, config)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError([f"output: cannot create {out_dir}: {exc}"]) from exc

        if args.command == "spectrum":
            summary = cmd_spectrum(config, out_dir)
        elif args.command == "evolve":
            summary = cmd_evolve(config, out_dir)
        elif args.command == "scan":
            summary = cmd_scan(config, out_dir, args.target_mode)
        else:
            summary = cmd_sweep(config, out_dir, args.param, args.values, args.jobs)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SubradianceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
