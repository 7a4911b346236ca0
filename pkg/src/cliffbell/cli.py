"""Command-line harness: ``cliffbell {verify,correlate,chsh,report}``.

Settings come from defaults, then an optional flat ``key = value`` config
file, then command-line flags (highest precedence). Exit codes: 0 success,
1 failed check or bound violation, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import kernels
from .chsh import CSV_COLUMNS, chsh_sweep
from .ga_core import DEFAULT_TABLE, ProductTable, UnitVector3
from .models import MODELS, MODES, SamplerConfig, bell_joint_closed, estimate_joint
from .pauli_backend import singlet_expectation_joint
from .verify import run_all

COMMANDS = ("verify", "correlate", "chsh", "report")
CORRELATE_COLUMNS = (
    "theta_deg",
    "E_quantum",
    "E_bell_closed",
    "E_bell_mc",
    "E_bell_mc_stderr",
    "E_christian_exact",
    "christian_bivector_norm",
    "dominance_ok",
)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str = "verify"
    models: tuple[str, ...] = MODELS
    grid: tuple[float, float, int] = (0.0, 180.0, 37)
    samples: int = 100_000
    seed: int = 0
    mode: str = "exact"
    out: str | None = None
    format: str = "csv"
    resolution: int = 64
    shards: int = 1
    product_table: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        bad = [m for m in self.models if m not in MODELS]
        if bad or not self.models:
            raise ConfigError(f"unknown model(s) {bad}; choose from {', '.join(MODELS)}")
        if self.grid[2] < 2:
            raise ConfigError("grid needs steps >= 2")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be in [0, 2**64)")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.resolution < 8:
            raise ConfigError("resolution must be >= 8")
        if self.shards < 1:
            raise ConfigError("shards must be >= 1")

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(self.seed, self.samples, self.shards)


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.replace(",", ":").split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:steps, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None


def _parse_models(text: str) -> tuple[str, ...]:
    return tuple(m.strip() for m in text.split(",") if m.strip())


_CONVERTERS = {
    "command": str,
    "models": _parse_models,
    "model": _parse_models,
    "grid": _parse_grid,
    "samples": int,
    "seed": int,
    "mode": str,
    "out": str,
    "format": str,
    "resolution": int,
    "shards": int,
    "product_table": str,
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{source}:{lineno}: unknown field {key!r}")
        try:
            converted = _CONVERTERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
        values["models" if key == "model" else key] = converted
    return values


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--model", dest="models", help="comma-separated models: quantum,bell,christian")
    common.add_argument("--grid", help="angle grid start:stop:steps in degrees")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int, help="root seed")
    common.add_argument("--mode", help="exact | monte_carlo | directed")
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--format", help="csv | json")
    common.add_argument("--resolution", type=int, help="CHSH sweep angles per setting")
    common.add_argument("--shards", type=int, help="worker threads for Monte Carlo blocks")
    common.add_argument("--product-table", dest="product_table", help="JSON product table to verify instead of the built-in one")
    parser = argparse.ArgumentParser(prog="cliffbell", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", action="store_true", help="print the kernel backend and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def load_config(argv: list[str]) -> RunConfig:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise ConfigError("bad command line") from exc
    if ns.backend:
        print(kernels.BACKEND)
        raise SystemExit(0)
    if ns.command is None:
        raise ConfigError(f"missing command; choose from {', '.join(COMMANDS)}")
    values: dict = {}
    if ns.config:
        try:
            text = Path(ns.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from None
        values.update(parse_config_text(text, ns.config))
    values["command"] = ns.command
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is None or f.name == "command":
            continue
        values[f.name] = _CONVERTERS[f.name](v) if isinstance(v, str) and f.name in ("models", "grid") else v
    return RunConfig(**values)


# ------------------------------------------------------------- formatting


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x) + 0.0:.13g}"
    return str(x)


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v + 0.0:.13g}") if math.isfinite(v) else str(v)
    return obj


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(_round(obj), indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _summary_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + ".summary.json"))


# --------------------------------------------------------------- commands


def run_verify(cfg: RunConfig) -> tuple[int, dict]:
    table = DEFAULT_TABLE
    if cfg.product_table:
        try:
            table = ProductTable.from_dict(json.loads(Path(cfg.product_table).read_text()))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot load product table {cfg.product_table}: {exc}") from None
    ok, checks, found = run_all(table)
    report = {"passed": ok, "backend": kernels.BACKEND, "checks": [c.to_dict() for c in checks], "findings": found}
    if cfg.format == "json":
        text = to_json(report)
    else:
        text = to_csv(
            ("check", "status", "max_deviation", "tolerance"),
            [(c.name, "PASS" if c.passed else "FAIL", c.max_deviation, c.tolerance) for c in checks],
        )
    _emit(text, cfg.out)
    for c in checks:
        if not c.passed:
            print(f"FAILED: {c.name} (max deviation {c.max_deviation:.3g} > {c.tolerance:.3g})", file=sys.stderr)
    return (0 if ok else 1), report


def correlate_rows(cfg: RunConfig) -> list[tuple]:
    start, stop, steps = cfg.grid
    u = UnitVector3(1.0, 0.0, 0.0)
    v = UnitVector3(0.0, 1.0, 0.0)
    sampler = cfg.sampler()
    rows = []
    for theta in np.linspace(start, stop, steps):
        theta = float(theta)
        b = UnitVector3.in_plane(u, v, math.radians(theta))
        eq = singlet_expectation_joint(u, b)
        eb = bell_joint_closed(u, b)
        mc = estimate_joint("bell", u, b, sampler, "monte_carlo")
        chris = estimate_joint("christian", u, b, sampler, cfg.mode if cfg.mode != "monte_carlo" else "exact")
        dominance_ok = abs(eq) >= abs(eb) - 1e-12
        rows.append((theta, eq, eb, mc.scalar, mc.standard_error, chris.scalar, chris.value.grade(2).norm(), dominance_ok))
    return rows


def run_correlate(cfg: RunConfig) -> tuple[int, list[tuple]]:
    rows = correlate_rows(cfg)
    cols = list(CORRELATE_COLUMNS)
    if cfg.mode == "directed":
        cols[5] = "E_christian_directed"
    if cfg.format == "json":
        _emit(to_json({"columns": cols, "rows": [list(r) for r in rows], "samples": cfg.samples, "seed": cfg.seed}), cfg.out)
    else:
        _emit(to_csv(cols, rows), cfg.out)
    bad = [r[0] for r in rows if not r[-1]]
    if bad:
        print(f"FAILED: dominance violated at theta = {bad}", file=sys.stderr)
    return (1 if bad else 0), rows


def chsh_reports(cfg: RunConfig):
    mode = "monte_carlo" if cfg.mode == "monte_carlo" else "exact"
    return [chsh_sweep(m, resolution=cfg.resolution, cfg=cfg.sampler(), mode=mode) for m in cfg.models]


def run_chsh(cfg: RunConfig) -> tuple[int, dict]:
    reports = chsh_reports(cfg)
    summary = {"resolution": cfg.resolution, "mode": cfg.mode, "models": [r.summary() for r in reports]}
    rows = [r.csv_row() for r in reports]
    if cfg.format == "json":
        _emit(to_json({**summary, "columns": list(CSV_COLUMNS), "rows": rows}), cfg.out)
    else:
        csv_text = to_csv(CSV_COLUMNS, rows)
        if cfg.out is None:
            sys.stdout.write(csv_text + "\n" + to_json(summary))
        else:
            _emit(csv_text, cfg.out)
            _emit(to_json(summary), _summary_path(cfg.out))
    over = [r.model for r in reports if not r.within_bound]
    if over:
        print(f"FAILED: CHSH bound exceeded by {over}", file=sys.stderr)
    return (1 if over else 0), summary


def run_report(cfg: RunConfig) -> tuple[int, dict]:
    ok, checks, found = run_all()
    reports = chsh_reports(cfg)
    doc = {
        "backend": kernels.BACKEND,
        "verify": {"passed": ok, "checks": [c.to_dict() for c in checks]},
        "findings": found,
        "notes": {
            "christian_joint_average_bivector_max_norm": "zero if the bivector term cancelled between orientations",
            "averaged_cross_commutator_max_norm": "zero if the A/B commutators vanished after averaging",
            "joint_directed_average_pseudoscalar_minus_ab_dev": "directed mode puts -a.b on e123, not on the scalar",
        },
        "chsh": [r.summary() for r in reports],
    }
    _emit(to_json(doc), cfg.out)
    return (0 if ok and all(r.within_bound for r in reports) else 1), doc


_RUNNERS = {"verify": run_verify, "correlate": run_correlate, "chsh": run_chsh, "report": run_report}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = load_config(argv)
        code, _ = _RUNNERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
