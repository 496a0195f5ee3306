"""Command-line driver: ``kss {fit,expand,evolve,slice,check}``.

A run is described by a single JSON document, for example::

    {
      "n_bar": 45, "l3": 30, "delta_l3": 2.5,
      "window": {"preset": "symmetric", "half": 10},
      "times": [0, "1/3 Tcl", "1/2 Tcl", "Tcl"],
      "planes": ["XY", "XZ"],
      "grid": {"extent": 4200, "count": 201},
      "defects": null,
      "output_dir": "out",
      "format": "csv"
    }

Exit codes: 0 success, 1 validation failure, 2 usage or configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .angular import sss_expectations
from .core import InitConditions, classical_period, fit_params, kss_energy, orbit_geometry
from .errors import AccuracyError, BracketError, DomainError, InfeasibleError, KssError, RangeError
from .evolution import GridAxis, Window, density_slice, expand, expectation_r_t
from .qdt import DefectTable, energy_star, fit_params_qdt, n_bar_star, sqdt_expand

log = logging.getLogger("kss")

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

REQUIRED = ("n_bar", "l3", "delta_l3")


class ConfigError(KssError, ValueError):
    """Malformed or incomplete run configuration."""


@dataclass
class RunConfig:
    n_bar: float
    l3: int
    delta_l3: float
    window: dict = field(default_factory=lambda: {"preset": "symmetric", "half": 10})
    times: list = field(default_factory=lambda: [0.0])
    planes: list = field(default_factory=lambda: ["XY"])
    grid: dict = field(default_factory=dict)
    defects: str | None = None
    output_dir: str = "kss_out"
    format: str = "csv"
    workers: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        missing = [k for k in REQUIRED if k not in doc]
        if missing:
            raise ConfigError(f"missing required field(s): {', '.join(missing)}")
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(doc) - known)
        if extra:
            raise ConfigError(f"unknown field(s): {', '.join(extra)}")
        cfg = cls(**doc)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def validate(self):
        for name in REQUIRED:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"field '{name}' must be a positive number, got {v!r}")
        if int(self.l3) != self.l3:
            raise ConfigError(f"field 'l3' must be an integer, got {self.l3!r}")
        self.l3 = int(self.l3)
        if self.format not in ("csv", "json"):
            raise ConfigError(f"field 'format' must be csv or json, got {self.format!r}")
        if not isinstance(self.times, list):
            raise ConfigError("field 'times' must be a list")
        planes = [str(p).upper() for p in self.planes]
        bad = [p for p in planes if p not in ("XY", "XZ")]
        if bad or not planes:
            raise ConfigError(f"field 'planes' must list XY and/or XZ, got {self.planes!r}")
        self.planes = planes
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("field 'workers' must be a positive integer")
        self.window_obj()
        self.grid_axes()

    def conditions(self) -> InitConditions:
        try:
            return InitConditions(self.n_bar, self.l3, self.delta_l3)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def window_obj(self) -> Window:
        w = self.window
        if not isinstance(w, dict):
            raise ConfigError("field 'window' must be an object")
        try:
            preset = w.get("preset")
            if preset == "narrow":
                return Window.narrow(self.n_bar, self.l3)
            if preset == "symmetric":
                h = int(w.get("half", 10))
                return Window.symmetric(self.n_bar, self.l3, h, h, h)
            if preset is None and {"n", "l", "m"} <= set(w):
                return Window(tuple(w["n"]), tuple(w["l"]), tuple(w["m"]))
        except (DomainError, TypeError, ValueError) as exc:
            raise ConfigError(f"field 'window': {exc}") from exc
        raise ConfigError("field 'window' needs preset narrow|symmetric or n, l, m ranges")

    def grid_axes(self):
        g = self.grid or {}
        if not isinstance(g, dict):
            raise ConfigError("field 'grid' must be an object")
        try:
            if "x" in g or "y" in g:
                return GridAxis(*g["x"]), GridAxis(*g["y"])
            if "extent" in g:
                ext, count = float(g["extent"]), int(g.get("count", 201))
                return GridAxis(-ext, ext, count), GridAxis(-ext, ext, count)
        except (DomainError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"field 'grid': {exc}") from exc
        if g:
            raise ConfigError("field 'grid' needs 'extent' or both 'x' and 'y'")
        return None

    def time_values(self, t_cl: float) -> list:
        if not self.times:
            raise ConfigError("field 'times' is empty")
        return [parse_time(t, t_cl) for t in self.times]

    def defect_table(self):
        if self.defects is None:
            return None
        try:
            return DefectTable.load(self.defects)
        except OSError as exc:
            raise ConfigError(f"cannot read defects {self.defects}: {exc.strerror}") from exc
        except (json.JSONDecodeError, DomainError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad defects file {self.defects}: {exc}") from exc


def parse_time(t, t_cl: float) -> float:
    """Atomic-unit time from a number or a string like ``"1/3 Tcl"``."""
    if isinstance(t, (int, float)) and not isinstance(t, bool):
        return float(t)
    if not isinstance(t, str):
        raise ConfigError(f"bad time entry {t!r}")
    s = t.strip()
    scale = 1.0
    if s.lower().endswith("tcl"):
        s, scale = s[:-3].strip(), t_cl
        if not s:
            s = "1"
    try:
        return float(Fraction(s)) * scale
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad time entry {t!r}") from exc


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------

def fit_report(cfg: RunConfig) -> tuple:
    cond = cfg.conditions()
    table = cfg.defect_table()
    state = fit_params_qdt(cond, table) if table is not None else fit_params(cond)
    ang = sss_expectations(state.sss)
    level = n_bar_star(cond, table) if table is not None else cond.n_bar
    geo = orbit_geometry(level, ang.l_sq)
    report = {
        "alpha": state.alpha,
        "beta": state.beta,
        "gamma0": state.gamma0,
        "gamma1": state.gamma1,
        "delta": state.delta,
        "r_out": geo.r_out,
        "r_in": geo.r_in,
        "t_cl_au": classical_period(cond.n_bar),
        "l_sq": ang.l_sq,
        "energy": kss_energy(state),
    }
    if table is not None:
        report["n_star"] = n_bar_star(cond, table)
        report["energy_star"] = energy_star(cond, table)
    return state, report, table


def _expand(cfg, state, table):
    win = cfg.window_obj()
    if table is not None:
        return sqdt_expand(state, win, table, workers=cfg.workers)
    return expand(state, win, workers=cfg.workers)


def _out_dir(cfg) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str):
    path.write_text(text)
    log.info("wrote %s", path)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _g(x) -> str:
    return "%.17g" % x


def cmd_fit(cfg: RunConfig) -> int:
    _, report, _ = fit_report(cfg)
    _write(_out_dir(cfg) / "fit.json", _json(report))
    width = max(len(k) for k in report)
    for k, v in report.items():
        print(f"{k:<{width}}  {v:.10g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
    return EXIT_OK


def cmd_expand(cfg: RunConfig) -> int:
    state, report, table = fit_report(cfg)
    coeffs = _expand(cfg, state, table)
    summary = {
        "window": coeffs.window.to_dict(),
        "size": coeffs.size,
        "parity_zeros": coeffs.parity_zeros,
        "excluded": len(coeffs.excluded),
        "captured_norm": coeffs.captured_norm,
        "mean_energy": coeffs.mean_energy(),
        "closed_form_energy": report["energy"],
    }
    out = _out_dir(cfg)
    keys = sorted(coeffs.entries)
    if cfg.format == "json":
        doc = dict(summary)
        doc["coefficients"] = [
            [n, l, m, coeffs.entries[(n, l, m)].real, coeffs.entries[(n, l, m)].imag] for n, l, m in keys
        ]
        _write(out / "coefficients.json", _json(doc))
    else:
        rows = []
        for n, l, m in keys:
            c = coeffs.entries[(n, l, m)]
            energy = coeffs.energies.get((n, l))
            rows.append([n, l, m, _g(c.real), _g(c.imag), "" if energy is None else _g(energy)])
        _write(out / "coefficients.csv", _csv(rows, ["n", "l", "m", "re", "im", "energy"]))
        _write(out / "expand_summary.json", _json(summary))
    print(f"{summary['size']} coefficients, {summary['parity_zeros']} parity zeros, "
          f"captured norm {summary['captured_norm']:.6f}")
    return EXIT_OK


def cmd_evolve(cfg: RunConfig) -> int:
    state, report, table = fit_report(cfg)
    times = cfg.time_values(report["t_cl_au"])
    coeffs = _expand(cfg, state, table)
    rows = []
    for t in times:
        amps = coeffs.amplitudes(t)
        norm = math.fsum(abs(a) ** 2 for a in amps.values())
        energy = math.fsum(abs(a) ** 2 * coeffs.energies[k[:2]] for k, a in amps.items()) / norm
        rows.append({"t": t, "t_over_tcl": t / report["t_cl_au"], "norm": norm,
                     "energy": energy, "r_mean": expectation_r_t(coeffs, t)})
    out = _out_dir(cfg)
    if cfg.format == "json":
        _write(out / "evolve.json", _json(rows))
    else:
        cols = ["t", "t_over_tcl", "norm", "energy", "r_mean"]
        _write(out / "evolve.csv", _csv([[_g(r[c]) for c in cols] for r in rows], cols))
    for r in rows:
        print(f"t/Tcl={r['t_over_tcl']:.4f}  <r>={r['r_mean']:.2f}")
    return EXIT_OK


def slice_text(grid, fmt: str) -> str:
    ax, ay = grid.axes
    u, v = grid.axis_names
    if fmt == "json":
        return _json({
            "plane": grid.plane,
            "t": grid.time,
            "axes": {u: [ax.min, ax.max, ax.count], v: [ay.min, ay.max, ay.count]},
            "values": grid.values.tolist(),
        })
    head = (f"# plane={grid.plane} t={_g(grid.time)} {u}_min={_g(ax.min)} {u}_max={_g(ax.max)} "
            f"n{u}={ax.count} {v}_min={_g(ay.min)} {v}_max={_g(ay.max)} n{v}={ay.count}\n")
    xs, ys = ax.values(), ay.values()
    lines = [f"{u},{v},value"]
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            lines.append(f"{_g(x)},{_g(y)},{_g(grid.values[i, j])}")
    return head + "\n".join(lines) + "\n"


def cmd_slice(cfg: RunConfig) -> int:
    state, report, table = fit_report(cfg)
    times = cfg.time_values(report["t_cl_au"])
    coeffs = _expand(cfg, state, table)
    axes = cfg.grid_axes()
    out = _out_dir(cfg)
    for plane in cfg.planes:
        for i, t in enumerate(times):
            grid = density_slice(coeffs, plane, axes=axes, t=t, workers=cfg.workers)
            _write(out / f"slice_{plane}_{i:02d}.{cfg.format}", slice_text(grid, cfg.format))
            x, y = grid.argmax()
            print(f"{plane} t/Tcl={t / report['t_cl_au']:.4f}  argmax=({x:.1f}, {y:.1f})")
    return EXIT_OK


def cmd_check(args) -> int:
    from .validation import run_checks

    try:
        results = run_checks(args.only, inject=args.inject or ())
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from exc
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  [{r.group}] {r.name}: {r.measured:.6g} (tol {r.tolerance:.3g}) {r.detail}".rstrip())
    doc = {"passed": all(r.passed for r in results), "results": [r.to_dict() for r in results]}
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "check.json", _json(doc))
    return EXIT_OK if doc["passed"] else EXIT_VALIDATION


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

COMMANDS = {"fit": cmd_fit, "expand": cmd_expand, "evolve": cmd_evolve, "slice": cmd_slice}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kss", description="Keplerian squeezed-state wave packets.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--output", help="output directory (overrides config)")
        sp.add_argument("--format", choices=("csv", "json"), help="file format (overrides config)")
        sp.add_argument("--defects", help="JSON defect table (overrides config)")
        sp.add_argument("--workers", type=int, help="worker threads (overrides config)")
    sp = sub.add_parser("check", help="run the self-check suite")
    sp.add_argument("--only", action="append", metavar="MODULE",
                    help="restrict to one group: specfun, angular, radial, core, qdt")
    sp.add_argument("--output", help="write check.json here")
    sp.add_argument("--inject", action="append", choices=("norm",),
                    help="deliberately corrupt a quantity to exercise failure paths")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "check":
            return cmd_check(args)
        cfg = RunConfig.load(args.config)
        for name in ("output", "format", "defects", "workers"):
            val = getattr(args, name)
            if val is not None:
                setattr(cfg, "output_dir" if name == "output" else name, val)
        cfg.validate()
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"kss: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"kss: infeasible: {exc}", file=sys.stderr)
        for k, v in exc.residuals.items():
            print(f"  residual {k}: {v:.6g}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (AccuracyError, BracketError, RangeError) as exc:
        print(f"kss: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"kss: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kss: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
