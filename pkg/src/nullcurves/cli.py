"""Command line: solve, portrait, classify and verify.

Exit codes: 0 ok, 1 verification failure, 2 usage or config error,
3 numeric failure.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import dynamics as dyn
from . import elliptic as ell
from . import reduce as red
from .e21 import CoalgebraElement, GroupElement, casimirs
from .errors import NullCurveError
from .plots import LinePlot

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

CSV_COLUMNS = ["t", "k", "l4", "l5", "C1", "C2", "alpha1", "alpha2", "alpha3",
               "J_p1", "J_p2", "J_p3", "J_v1", "J_v2", "J_v3"]
METHODS = ("direct", "quadrature", "both")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    m: float
    k: float
    l4: float
    l5: float
    g0: GroupElement = field(default_factory=GroupElement.identity)
    T: float = 10.0
    dt_max: float = 0.01
    tol: float = 1e-10
    method: str = "direct"
    outputs: str = "out"

    @property
    def state(self):
        return dyn.PhaseState(self.m, self.k, self.l4, self.l5)


def _number(d, key, where, default=None):
    if key not in d:
        if default is None:
            raise ConfigError(f"missing field '{where}{key}'")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"field '{where}{key}' must be a finite number, got {v!r}")
    return float(v)


def _group(d):
    if d is None:
        return GroupElement.identity()
    try:
        g = GroupElement(np.asarray(d["q"], dtype=float), np.asarray(d["A"], dtype=float))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"field 'g0' needs 'q' (3 numbers) and 'A' (3x3): {e}") from None
    if not g.is_valid(1e-8):
        raise ConfigError("field 'g0': A is not an orthochronous Lorentz matrix of det 1")
    return g


def load_config(path, overrides=None) -> RunConfig:
    """Read a JSON run configuration; non-None entries of `overrides` win."""
    data = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    data = dict(data)
    init = dict(data.get("initial") or {})
    if not isinstance(init, dict):
        raise ConfigError("field 'initial' must be an object with k, l4, l5")
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key in ("k", "l4", "l5"):
            init[key] = val
        else:
            data[key] = val
    m = _number(data, "m", "")
    if m == 0:
        raise ConfigError("field 'm' must be nonzero")
    cfg = RunConfig(
        m=m,
        k=_number(init, "k", "initial."),
        l4=_number(init, "l4", "initial."),
        l5=_number(init, "l5", "initial."),
        g0=_group(data.get("g0")),
        T=_number(data, "T", "", 10.0),
        dt_max=_number(data, "dt_max", "", 0.01),
        tol=_number(data, "tol", "", 1e-10),
        method=data.get("method", "direct"),
        outputs=data.get("outputs", "out"),
    )
    if cfg.T <= 0:
        raise ConfigError("field 'T' must be positive")
    if cfg.tol <= 0:
        raise ConfigError("field 'tol' must be positive")
    if cfg.dt_max <= 0:
        raise ConfigError("field 'dt_max' must be positive")
    if cfg.method not in METHODS:
        raise ConfigError(f"field 'method' must be one of {', '.join(METHODS)}")
    return cfg


# ---------------------------------------------------------------------------
# output helpers

def clean(x):
    """JSON-ready copy: numpy scalars to Python, non-finite numbers to None."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x) + 0.0  # drops the sign of -0.0
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [clean(x.real), clean(x.imag)]
    return x


def dumps(obj):
    return json.dumps(clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(format(float(v), ".17g") for v in r) + "\n")


def trajectory_rows(tr: dyn.Trajectory):
    a = tr.alpha
    return np.column_stack([tr.t, tr.k, tr.l4, tr.l5, tr.C, a, tr.J])


def invariants_block(inv: ell.WeierstrassInvariants):
    return {"g2": inv.g2, "g3": inv.g3, "D": inv.D, "case": inv.case}


# ---------------------------------------------------------------------------
# commands

def _closed_form_info(s):
    try:
        path = ell.closed_form_from_state(s)
    except NullCurveError as e:
        return None, {"error": f"{type(e).__name__}: {e}"}
    return path, {"branch": path.branch, "kind": path.kind or None, "t0": path.t0,
                  "period": path.period}


def _quadrature_trajectory(cfg: RunConfig, grid):
    """Quadrature reconstruction, left-translated to start at g0."""
    rec = red.reconstruct_from_state(cfg.state, grid, vmu=1.0)
    tr = rec.trajectory
    L = cfg.g0.matrix @ np.linalg.inv(tr.frames[0])
    out = dyn.Trajectory(tr.t, tr.m, tr.k, tr.l4, tr.l5, L @ tr.frames)
    return out, rec


def cmd_solve(cfg: RunConfig, out_dir):
    s0 = cfg.state
    n = max(2, int(round(cfg.T / cfg.dt_max)) + 1)
    grid = np.linspace(0.0, cfg.T, n)
    direct = quad = rec = None
    if cfg.method in ("direct", "both"):
        direct = dyn.integrate_extremal(s0, cfg.g0, T=cfg.T, tol=cfg.tol, t_eval=grid,
                                        dt_max=cfg.dt_max)
    if cfg.method in ("quadrature", "both"):
        quad, rec = _quadrature_trajectory(cfg, grid)
    tr = direct if direct is not None else quad

    C1, C2 = casimirs(dyn.phase_embed(s0))
    cls = red.classify_orbit(dyn.phase_embed(s0), tol=1e-10)
    portrait, true_time = ell.invariants_from_casimirs(s0.m, C1, C2)
    path, closed = _closed_form_info(s0)
    info = {
        "method": cfg.method,
        "config": {"m": cfg.m, "initial": {"k": cfg.k, "l4": cfg.l4, "l5": cfg.l5},
                   "T": cfg.T, "dt_max": cfg.dt_max, "tol": cfg.tol,
                   "g0": {"q": cfg.g0.q, "A": cfg.g0.A}},
        "C1": C1, "C2": C2,
        "orbit_class": cls.kind.value,
        "max_drift": tr.drifts(),
        "invariants": {"true_time": invariants_block(true_time),
                       "portrait": invariants_block(portrait)},
        "D": true_time.D,
        "branch": closed.get("branch"),
        "closed_form": closed,
        "samples": len(tr.t),
    }
    if rec is not None:
        info["quadrature"] = {"isotropy_residual": rec.quadrature.residual,
                              "branch_switches": rec.quadrature.switches,
                              "characteristic_residual": red.characteristic_residual(rec.trajectory)}
    if direct is not None and quad is not None:
        L, dev = red.left_alignment(direct, quad)
        info["deviation_after_left_alignment"] = dev

    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "trajectory.csv"), CSV_COLUMNS, trajectory_rows(tr))
    with open(os.path.join(out_dir, "invariants.json"), "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(info))

    a = tr.alpha
    p = LinePlot("extremal null curve", "alpha2", "(alpha3 - alpha1)/sqrt 2")
    p.line(a[:, 1], (a[:, 2] - a[:, 0]) / np.sqrt(2), "alpha")
    p.note(f"m = {cfg.m:g}, orbit {cls.kind.value}")
    p.save(os.path.join(out_dir, "curve.svg"))

    chi = ell.portrait_chi(s0.m, tr.k)
    q = LinePlot("phase portrait", "chi", "l4")
    _level_set_lines(q, s0.m, C1, C2, chi.min(), chi.max())
    q.line(chi, tr.l4, "trajectory", points=True)
    q.save(os.path.join(out_dir, "portrait.svg"))
    return info


def _level_set_lines(plot, m, C1, C2, lo, hi, n=2001):
    """Dense resubstitution of l4^2 = cubic(chi), as two dashed halves."""
    k_lo = lo / abs(m / 4.0) ** (2.0 / 3.0) + 1 / (3 * m)
    k_hi = hi / abs(m / 4.0) ** (2.0 / 3.0) + 1 / (3 * m)
    span = max(k_hi - k_lo, 1e-6)
    kk = np.linspace(k_lo - 0.05 * span, k_hi + 0.05 * span, n)
    r = ell.level_set_l4_squared(m, C1, C2, kk)
    y = np.where(r >= 0, np.sqrt(np.abs(r)), np.nan)
    chi = ell.portrait_chi(m, kk)
    plot.line(chi, y, "level set", dashed=True)
    plot.line(chi, -y, "", dashed=True)


def cmd_portrait(m, C1, C2, out_dir, n=400):
    inv, comps = ell.portrait_branches(m, C1, C2, n=n)
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for j, c in enumerate(comps):
        for r in zip(c["s"], c["chi"], c["l4"], c["k"], c["l5"]):
            rows.append((j,) + tuple(r))
    write_csv(os.path.join(out_dir, "portrait.csv"), ["component", "s", "chi", "l4", "k", "l5"], rows)
    p = LinePlot("phase portrait", "chi", "l4")
    allchi = np.concatenate([c["chi"] for c in comps])
    lo, hi = float(np.min(allchi)), float(np.max(allchi))
    kk = np.linspace(lo, hi, 4001) / abs(m / 4.0) ** (2.0 / 3.0) + 1 / (3 * m)
    r = ell.level_set_l4_squared(m, C1, C2, kk)
    y = np.where(r >= 0, np.sqrt(np.abs(r)), np.nan)
    chi = ell.portrait_chi(m, kk)
    p.line(chi, y, "level set", dashed=True)
    p.line(chi, -y, "", dashed=True)
    for c in comps:
        p.line(c["chi"], c["l4"], c["name"], points=True)
    case = "degenerate" if inv.degenerate else ("I" if inv.D > 0 else "II")
    p.note(f"g2 = {inv.g2:.6g}, g3 = {inv.g3:.6g}, D = {inv.D:.6g}, case {case}")
    p.note(f"{len(comps)} component(s): " + ", ".join(c["name"] for c in comps))
    p.save(os.path.join(out_dir, "portrait.svg"))
    return {"components": [c["name"] for c in comps], "case": case,
            "g2": inv.g2, "g3": inv.g3, "D": inv.D}


def cmd_classify(p, v):
    eta = CoalgebraElement(np.asarray(p, dtype=float), np.asarray(v, dtype=float))
    cls = red.classify_orbit(eta)
    out = {"kind": cls.kind.value, "C1": cls.C1, "C2": cls.C2,
           "standard_form": None, "section": None}
    if cls.kind != red.OrbitKind.SINGULAR:
        mu = red.standard_form(cls)
        out["standard_form"] = {"p": mu.p, "v": mu.v}
        try:
            g = red.cross_section(eta, cls=cls).g
            out["section"] = {"q": g.q, "A": g.A}
        except NullCurveError as e:
            out["section_error"] = f"{type(e).__name__}: {e}"
    return out


def cmd_verify(suite):
    from .verify import run_suite
    return run_suite(suite)


# ---------------------------------------------------------------------------

def _triple(text):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if len(vals) != 3 or not all(math.isfinite(x) for x in vals):
        raise argparse.ArgumentTypeError(f"expected three finite numbers x,y,z, got {text!r}")
    return vals


def build_parser():
    ap = argparse.ArgumentParser(prog="nullcurves", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="integrate one extremal and write its data")
    s.add_argument("--config", help="JSON run configuration")
    s.add_argument("--method", choices=METHODS)
    s.add_argument("--out", help="output directory (overrides 'outputs')")
    for name in ("m", "k", "l4", "l5", "T", "tol"):
        s.add_argument(f"--{name}", type=float, dest=name)
    s.add_argument("--dt-max", type=float, dest="dt_max")

    p = sub.add_parser("portrait", help="sample the phase portrait of one coadjoint orbit")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=400, help="samples per component")

    c = sub.add_parser("classify", help="orbit type, standard form and section of (p, v)")
    c.add_argument("--p", type=_triple, required=True)
    c.add_argument("--v", type=_triple, required=True)

    v = sub.add_parser("verify", help="run acceptance checks")
    v.add_argument("--suite", choices=["algebra", "dynamics", "elliptic", "reduction", "all"],
                   default="all")
    v.add_argument("--report", help="also write the JSON report here")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            overrides = {k: getattr(args, k) for k in ("m", "k", "l4", "l5", "T", "tol", "dt_max", "method")}
            overrides["outputs"] = args.out
            cfg = load_config(args.config, overrides)
            info = cmd_solve(cfg, cfg.outputs)
            sys.stdout.write(dumps({"out": cfg.outputs, "max_drift": info["max_drift"],
                                    "orbit_class": info["orbit_class"]}))
        elif args.command == "portrait":
            if args.m == 0 or not all(map(math.isfinite, (args.m, args.c1, args.c2))):
                raise ConfigError("--m must be nonzero and all values finite")
            sys.stdout.write(dumps(cmd_portrait(args.m, args.c1, args.c2, args.out, n=args.n)))
        elif args.command == "classify":
            sys.stdout.write(dumps(cmd_classify(args.p, args.v)))
        else:
            report = cmd_verify(args.suite)
            text = dumps(report)
            sys.stdout.write(text)
            if args.report:
                with open(args.report, "w", encoding="utf-8", newline="\n") as f:
                    f.write(text)
            return EXIT_OK if report["passed"] else EXIT_VERIFY
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (NullCurveError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numeric failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK
