"""Command-line front end: observable tables, figure data, validation and sweeps.

Configuration is an INI file with a ``[packet]`` and a ``[run]`` section; any
key can be overridden with ``--set section.key=value`` and the common ones
have their own flags. Output is CSV preceded by ``#`` metadata lines.

Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime
import io
import math
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__, figures, oracle
from . import observables as obs
from .kinematics import ELECTRON, PacketSpec, ParaxialityWarning
from .specfun import BesselDomainError, BesselOverflowError
from .validation import run_criteria

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# key -> (section, parser). Widths may be given in nm or in Compton wavelengths,
# longitudinal motion as kinetic energy in keV or as pbar/m.
PACKET_KEYS = {
    "sigma_perp_nm": float,
    "sigma_perp_lc": float,
    "sigma": float,
    "sigma_z_nm": float,
    "sigma_z_lc": float,
    "kinetic_kev": float,
    "pbar": float,
    "ell": int,
    "n": int,
    "helicity": float,
    "regime": str,
}
RUN_KEYS = {
    "tol": float,
    "quick": lambda v: _parse_bool(v),
    "quadrature": lambda v: _parse_bool(v),
    "t": float,
    "out": str,
    "r_max": float,
    "points": int,
    "ell_max": int,
    "variable": str,
    "values": str,
    "range": str,
    "spacing": str,
}
SECTIONS = {"packet": PACKET_KEYS, "run": RUN_KEYS}


def _parse_bool(v: str) -> bool:
    low = str(v).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


@dataclass
class RunConfig:
    packet: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)

    def set(self, section: str, key: str, raw) -> None:
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        parsers = SECTIONS[section]
        if key not in parsers:
            raise ConfigError(f"unknown key {key!r} in [{section}]; allowed: {', '.join(sorted(parsers))}")
        try:
            value = parsers[key](raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {section}.{key}: {raw!r} ({exc})") from None
        getattr(self, section)[key] = value

    def get(self, key: str, default=None):
        return self.run.get(key, default)

    def spec(self, **overrides) -> PacketSpec:
        """Build the packet in m = 1 units from whatever units the config used."""
        p = dict(self.packet)
        p.update(overrides)
        sigma = _spread(p, "sigma_perp", ("sigma_perp_nm", "sigma_perp_lc", "sigma"))
        sigma_z = _spread(p, "sigma_z", ("sigma_z_nm", "sigma_z_lc"), required=False)
        if "kinetic_kev" in p and "pbar" in p:
            raise ConfigError("give either kinetic_kev or pbar, not both")
        pbar = ELECTRON.momentum_from_kinetic(p["kinetic_kev"]) if "kinetic_kev" in p else p.get("pbar", 0.0)
        try:
            return PacketSpec(
                sigma_perp=sigma,
                pbar=pbar,
                ell=p.get("ell", 0),
                n=p.get("n", 0),
                sigma_z=sigma_z,
                helicity=p.get("helicity"),
                regime=p.get("regime", "nonparaxial"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _spread(p: dict, label: str, keys, required: bool = True):
    given = [k for k in keys if k in p]
    if len(given) > 1:
        raise ConfigError(f"{label} given more than once: {', '.join(given)}")
    if not given:
        if required:
            raise ConfigError(f"missing {label}: set one of {', '.join(keys)}")
        return None
    key = given[0]
    v = p[key]
    if v <= 0:
        raise ConfigError(f"{key} must be positive")
    if key.endswith("_nm"):
        return ELECTRON.sigma_from_width(v)
    if key.endswith("_lc"):
        return 1.0 / v
    return v


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for section in parser.sections():
        for key, raw in parser.items(section):
            cfg.set(section, key, raw)
    return cfg


# --- output -------------------------------------------------------------------


def write_table(out, command: str, header: list[str], rows, meta: dict | None = None, timestamp: bool = True) -> None:
    lines = [f"# vortexwave {__version__}", f"# command: {command}"]
    for k, v in (meta or {}).items():
        lines.append(f"# {k}: {v}")
    if timestamp:
        lines.append(f"# generated: {datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds')}")
    out.write("\n".join(lines) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def read_table(text: str) -> tuple[list[str], list[list[str]]]:
    """Parse a table written by :func:`write_table` (header, rows), skipping metadata."""
    body = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(body))
    return (rows[0], rows[1:]) if rows else ([], [])


# --- observables ----------------------------------------------------------------

_COMPONENTS = {4: ("t", "x", "y", "z"), 3: ("x", "y", "z")}

# closed-form observable -> oracle weights giving its quadrature value
_QUADRATURE = {
    "mean_four_momentum": lambda sp, tol: _four_momentum_quad(sp, tol),
    "mean_pperp": lambda sp, tol: _weights_quad(sp, ["p_perp"], tol),
    "invariant_mass": lambda sp, tol: _mass_quad(sp, tol),
    "mean_inverse_energy": lambda sp, tol: _weights_quad(sp, ["inverse_2energy"], tol),
    "magnetic_moment_orbital": lambda sp, tol: _vector_quad(sp, [None, None, "inverse_2energy"], tol, sp.ell),
    "magnetic_moment_spin": lambda sp, tol: _vector_quad(sp, ["spin_moment_x", None, "spin_moment_z"], tol),
}


def _vector_quad(sp, names, tol, scale=1.0):
    used = [n for n in names if n is not None]
    vals, err = _weights_quad(sp, used, tol)
    vals = iter(np.atleast_1d(vals))
    return np.array([scale * next(vals) if n else 0.0 for n in names]), err * abs(scale)


def _weights_quad(sp, names, tol):
    res = oracle.expectations(sp, ["one", *names], tol=tol)
    vals = res.value[1:] / res.value[0]
    return vals[0] if len(vals) == 1 else vals, float(np.max(res.abs_error))


def _four_momentum_quad(sp, tol):
    (e, pz), err = _weights_quad(sp, ["energy", "p_z"], tol)
    return np.array([e, 0.0, 0.0, pz]), err


def _mass_quad(sp, tol):
    (e, pz), err = _weights_quad(sp, ["energy", "p_z"], tol)
    return math.sqrt(e * e - pz * pz), err


def observable_rows(spec: PacketSpec, t: float = 0.0, quadrature: bool = False, tol: float = 1e-10):
    reports = obs.all_observables(spec, t)
    if spec.regime == "nonparaxial":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", obs.ExpansionWarning)
            reports.insert(3, obs.mean_inverse_energy(spec))
    rows = []
    for rep in reports:
        quad, qerr = (None, None)
        if quadrature and rep.name in _QUADRATURE and spec.regime == "nonparaxial":
            quad, qerr = _QUADRATURE[rep.name](spec, tol)
        value = np.atleast_1d(rep.value)
        exp = None if rep.expansion is None else np.atleast_1d(rep.expansion)
        qv = None if quad is None else np.atleast_1d(quad)
        names = _COMPONENTS.get(value.size, ("",)) if value.size > 1 else ("",)
        for i, comp in enumerate(names):
            closed = value[i] if rep.method == "closed-form" else None
            expansion = value[i] if rep.method == "expansion" else (None if exp is None else exp[i])
            rows.append([
                rep.name,
                comp,
                rep.method,
                closed,
                expansion,
                None if qv is None else qv[i],
                rep.error_estimate,
                qerr,
            ])
    return rows


OBS_HEADER = ["name", "component", "method", "closed_form", "expansion", "quadrature", "error_estimate", "quadrature_error"]


def cmd_observables(cfg: RunConfig, out) -> int:
    spec = cfg.spec()
    rows = observable_rows(spec, cfg.get("t", 0.0), cfg.get("quadrature", False), cfg.get("tol", 1e-10))
    write_table(out, "observables", OBS_HEADER, rows, {"spec": _spec_text(spec)}, cfg.get("timestamp", True))
    return EXIT_OK


def _spec_text(spec: PacketSpec) -> str:
    return (
        f"sigma={spec.sigma_perp!r} sigma_z={spec.sigma_z!r} pbar={spec.pbar!r} ell={spec.ell} n={spec.n} "
        f"helicity={spec.helicity} regime={spec.regime}"
    )


# --- figures ----------------------------------------------------------------------


def cmd_figure(cfg: RunConfig, which: str, out) -> int:
    if which == "fig1":
        curves = figures.falloff_curves(cfg.get("r_max", 40.0), cfg.get("points", 401))
        meta = {"normalisation": "each curve divided by its own peak; natural log of |psi|; r in Compton wavelengths"}
    elif which == "fig2":
        curves = figures.pperp_curve(cfg.get("ell_max", 100))
        meta = {"curve": "paraxial <p_perp>/sigma"}
    elif which == "fig3":
        curves = figures.lg_profile_curves(x_max=cfg.get("r_max", 14.0), points=cfg.get("points", 1401))
        meta = {"normalisation": "each |psi|^2 curve divided by its own peak; t = 0"}
    else:
        raise ConfigError(f"unknown figure {which!r}; choose fig1, fig2 or fig3")
    write_table(out, f"figure {which}", curves.names(), curves.rows(), meta, cfg.get("timestamp", True))
    return EXIT_OK


# --- validation -------------------------------------------------------------------


def cmd_validate(cfg: RunConfig, out, corrupt=()) -> int:
    results = run_criteria(quick=cfg.get("quick", False), tol_scale=cfg.get("tol_scale", 1.0), corrupt=corrupt)
    rows = [[r.number, r.name, "PASS" if r.passed else "FAIL", r.worst, r.threshold, round(r.seconds, 3), r.checks, r.detail] for r in results]
    header = ["criterion", "name", "status", "worst", "threshold", "seconds", "checks", "detail"]
    write_table(out, "validate", header, rows, {"quick": cfg.get("quick", False)}, cfg.get("timestamp", True))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


# --- sweeps -----------------------------------------------------------------------

SWEEP_VARIABLES = {"ell": "ell", "sigma": "sigma_perp", "pbar": "pbar"}


def sweep_values(cfg: RunConfig) -> list[float]:
    if "values" in cfg.run and "range" in cfg.run:
        raise ConfigError("give either values or range for a sweep")
    if "values" in cfg.run:
        text = cfg.run["values"].strip()
        try:
            vals = [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"bad sweep values {text!r}") from None
    elif "range" in cfg.run:
        parts = [p for p in cfg.run["range"].split(",") if p.strip()]
        if len(parts) != 3:
            raise ConfigError("range is 'start, stop, count'")
        start, stop, count = float(parts[0]), float(parts[1]), int(float(parts[2]))
        if count < 0:
            raise ConfigError("range count must be non-negative")
        spacing = cfg.get("spacing", "linear")
        if spacing == "linear":
            vals = list(np.linspace(start, stop, count))
        elif spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log spacing needs positive bounds")
            vals = list(np.geomspace(start, stop, count))
        else:
            raise ConfigError("spacing must be linear or log")
    else:
        vals = []
    diffs = np.diff(vals)
    if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("sweep values must be strictly monotone")
    return [float(v) for v in vals]


def cmd_sweep(cfg: RunConfig, out) -> int:
    variable = cfg.get("variable")
    if variable not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep variable must be one of {', '.join(SWEEP_VARIABLES)}")
    values = sweep_values(cfg)
    if variable == "ell":
        if any(v != int(v) for v in values):
            raise ConfigError("ell values must be integers")
        # integer sweeps may repeat after rounding a linear range
        values = [int(v) for v in values]
    widths = ("sigma_perp_nm", "sigma_perp_lc", "sigma")
    if variable == "sigma" and values and not any(k in cfg.packet for k in widths):
        # the swept width stands in for the missing base width
        base = cfg.spec(sigma=values[0])
    else:
        base = cfg.spec()
    header, rows = [variable], []
    for v in values:
        key = SWEEP_VARIABLES[variable]
        try:
            spec = base.replace(**{key: v, "sigma_z": None}) if key == "sigma_perp" else base.replace(**{key: v})
        except ValueError as exc:
            raise ConfigError(f"{variable}={v}: {exc}") from None
        cols = {}
        for rep in obs.all_observables(spec, cfg.get("t", 0.0)):
            val = np.atleast_1d(rep.value)
            if val.size != 1:
                continue
            cols[rep.name] = float(val[0])
            if rep.expansion is not None:
                cols[f"{rep.name}_expansion"] = float(np.atleast_1d(rep.expansion)[0])
                cols[f"{rep.name}_remainder"] = float(np.atleast_1d(rep.remainder)[0])
        if len(header) == 1:
            header += list(cols)
        rows.append([v, *(cols.get(h) for h in header[1:])])
    if not rows:
        header += [name for name in _sweep_columns(base)]
    write_table(out, f"sweep {variable}", header, rows, {"spec": _spec_text(base)}, cfg.get("timestamp", True))
    return EXIT_OK


def _sweep_columns(spec: PacketSpec) -> list[str]:
    names = []
    for rep in obs.all_observables(spec):
        if np.atleast_1d(rep.value).size != 1:
            continue
        names.append(rep.name)
        if rep.expansion is not None:
            names += [f"{rep.name}_expansion", f"{rep.name}_remainder"]
    return names


# --- argument parsing ---------------------------------------------------------------

_FLAG_KEYS = {
    "sigma_perp_nm": "packet",
    "sigma_perp_lc": "packet",
    "sigma": "packet",
    "kinetic_kev": "packet",
    "pbar": "packet",
    "ell": "packet",
    "n": "packet",
    "helicity": "packet",
    "regime": "packet",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [packet] and [run] sections")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--tol", type=float, help="quadrature tolerance, or threshold scale for validate")
    common.add_argument("--quick", action="store_true", help="validate: run the fast subset only")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override any config key")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generated-at metadata line")
    for key in _FLAG_KEYS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, help=f"packet.{key}")

    parser = argparse.ArgumentParser(prog="vortexwave", description="Relativistic vortex packet observables and checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("observables", parents=[common], help="table of observables for one packet")
    fig = sub.add_parser("figure", parents=[common], help="curve data for fig1, fig2 or fig3")
    fig.add_argument("which", choices=["fig1", "fig2", "fig3"])
    val = sub.add_parser("validate", parents=[common], help="run the acceptance criteria")
    val.add_argument("--corrupt", type=int, action="append", default=[], help=argparse.SUPPRESS)
    sw = sub.add_parser("sweep", parents=[common], help="observables over a range of ell, sigma or pbar")
    sw.add_argument("variable", nargs="?", choices=sorted(SWEEP_VARIABLES))
    return parser


def _apply_overrides(cfg: RunConfig, args) -> None:
    for key, section in _FLAG_KEYS.items():
        raw = getattr(args, key)
        if raw is not None:
            cfg.set(section, key, raw)
    for item in args.set:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        lhs, raw = item.split("=", 1)
        section, key = lhs.split(".", 1)
        cfg.set(section.strip(), key.strip(), raw.strip())
    if args.quick:
        cfg.run["quick"] = True
    if args.tol is not None:
        if args.command == "validate":
            cfg.run["tol_scale"] = args.tol
        else:
            cfg.run["tol"] = args.tol
    if args.no_timestamp:
        cfg.run["timestamp"] = False
    if getattr(args, "variable", None):
        cfg.run["variable"] = args.variable


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        _apply_overrides(cfg, args)
        out_path = args.out or cfg.get("out")
        buf = io.StringIO()
        with warnings.catch_warnings():
            warnings.simplefilter("default", ParaxialityWarning)
            if args.command == "observables":
                code = cmd_observables(cfg, buf)
            elif args.command == "figure":
                code = cmd_figure(cfg, args.which, buf)
            elif args.command == "validate":
                code = cmd_validate(cfg, buf, corrupt=args.corrupt)
            else:
                code = cmd_sweep(cfg, buf)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (oracle.QuadratureError, BesselOverflowError, BesselDomainError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
