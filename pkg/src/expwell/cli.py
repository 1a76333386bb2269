"""``expwell`` command line.

Every subcommand writes one table, as CSV with a ``#`` manifest header or as
JSON with the same content.  Exit status: 0 ok, 1 an invariant check on the
results failed (the table is still written), 2 bad input or evaluation
failure (nothing is written).

Settings are resolved as flag > config file > built-in default.  The config
file holds ``key = value`` lines; keys are flag names (``count``,
``x_max``...) or fields of EvalConfig / QuadratureSpec (``ode_tol``,
``rule``...).  ``$EXPWELL_CONFIG`` names a default config file.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .config import EvalConfig, OracleConfig, QuadratureSpec
from .crum import CrumTower, shape_invariance_residual
from .errors import BracketError, ExpWellError
from .oracle import default_x_max, solve_fd
from .orthogonality import (
    cross_integral_closed_form_scaled,
    cross_integral_scaled,
    gram_matrix,
    normalized_off_diagonal,
)
from .spectrum import build_spectrum, eigenfunction, matching_coefficients
from .zeros import ZeroTable, find_zeros, wkb_predict

SCHEMA_VERSION = 1
CONFIG_ENV = "EXPWELL_CONFIG"

_EVAL_KEYS = {"quad_tol": float, "ode_tol": float, "x_start_factor": float, "nu_quad_max": float}
_QUAD_KEYS = {"rule": str, "rel_tol": float, "abs_tol": float}


class InputError(ExpWellError):
    """Malformed flags, config or input files."""


# ------------------------------------------------------------- settings


def read_config(path):
    """Parse a ``key = value`` file (``#`` comments) into a dict of strings."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


class Settings:
    """Flag / config / default lookup for one invocation."""

    def __init__(self, args, config, config_text):
        self.args = args
        self.config = config
        self.config_text = config_text
        self.used = {}

    def get(self, name, default, typ=float):
        val = getattr(self.args, name, None)
        if val is None and name in self.config:
            try:
                val = typ(self.config[name])
            except ValueError as exc:
                raise InputError(f"config key {name}: {exc}") from None
        if val is None:
            val = default
        self.used[name] = val
        return val

    def eval_config(self):
        kw = {}
        for k, typ in _EVAL_KEYS.items():
            if k in self.config:
                kw[k] = typ(self.config[k])
        cfg = EvalConfig(**kw)
        self.used.update({k: getattr(cfg, k) for k in _EVAL_KEYS})
        return cfg

    def quad_spec(self, rel_tol=None):
        kw = {k: typ(self.config[k]) for k, typ in _QUAD_KEYS.items() if k in self.config}
        if rel_tol is not None:
            kw["rel_tol"] = rel_tol
        q = QuadratureSpec(**kw)
        self.used.update({k: getattr(q, k) for k in _QUAD_KEYS})
        return q

    def checksum(self):
        return hashlib.sha256(self.config_text.encode()).hexdigest()[:16]


def parse_grid(text):
    """``a:b:step`` -> points from a to b inclusive."""
    try:
        a, b, step = (float(s) for s in text.split(":"))
    except ValueError:
        raise InputError(f"grid must be a:b:step, got {text!r}") from None
    if not step > 0 or b < a:
        raise InputError("grid needs step > 0 and b >= a")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(n), 12)


def load_zero_table(path):
    """Zero table from a previous ``zeros`` run (JSON or CSV)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise InputError(f"{path}: unsupported schema_version {doc.get('schema_version')}")
        g = float(doc["manifest"]["params"]["g"])
        rows = doc["rows"]
    else:
        lines = text.splitlines()
        meta = [ln for ln in lines if ln.startswith("#")]
        g = None
        for ln in meta:
            if ln.startswith("# param.g:"):
                g = float(ln.split(":", 1)[1])
        if g is None:
            raise InputError(f"{path}: no g in the CSV manifest")
        rows = list(csv.DictReader(ln for ln in lines if not ln.startswith("#")))
    table = ZeroTable.from_records(g, rows)
    table.check_interlacing()
    return table


def _table(settings, g, count, cfg):
    path = getattr(settings.args, "zeros", None)
    if path:
        table = load_zero_table(path)
        if table.g != g:
            raise InputError(f"zero table is for g={table.g}, not g={g}")
        if len(table) < count:
            raise InputError(f"zero table has {len(table)} entries, need {count}")
        return ZeroTable(table.g, table.entries[:count])
    return find_zeros(g, count, cfg)


# ------------------------------------------------------------- commands
# each returns (columns, rows, summary, ok)


def cmd_zeros(s: Settings):
    g = s.get("g", 1.0)
    count = s.get("count", 10, int)
    tol = s.get("tol", 1e-10)
    cfg = s.eval_config()
    table = find_zeros(g, count, cfg, zero_tol=max(tol, 1e-15))
    rows = table.to_records()
    worst = max(r["residual"] for r in rows)
    cols = ["n", "kind", "j", "nu", "energy", "residual"]
    return cols, rows, {"max_residual": worst}, worst < tol


def cmd_spectrum(s: Settings):
    g = s.get("g", 1.0)
    count = s.get("count", 10, int)
    tol = s.get("tol", 1e-9)
    cfg = s.eval_config()
    lines = build_spectrum(_table(s, g, count, cfg), s.quad_spec(), cfg)
    rows = []
    for ln in lines:
        mc = matching_coefficients(ln.nu, g, cfg)
        defect = mc.even_defect if ln.parity == "even" else mc.odd_defect
        rows.append({"n": ln.n, "parity": ln.parity, "nu": ln.nu, "energy": ln.energy,
                     "norm": ln.norm, "norm_scaled": ln.norm_scaled, "matching_defect": defect})
    ordered = all(a["energy"] < b["energy"] for a, b in zip(rows, rows[1:]))
    worst = max(r["matching_defect"] for r in rows)
    ok = ordered and rows[0]["energy"] > g * g and worst < tol
    cols = ["n", "parity", "nu", "energy", "norm", "norm_scaled", "matching_defect"]
    return cols, rows, {"max_matching_defect": worst, "ordered": ordered}, ok


def cmd_eigenfunction(s: Settings):
    g = s.get("g", 1.0)
    levels = s.args.n if s.args.n else [0]
    s.used["n"] = levels
    grid = parse_grid(s.get("grid", "-3:3:0.05", str))
    normalize = bool(s.args.normalize)
    s.used["normalize"] = normalize
    cfg = s.eval_config()
    table = _table(s, g, max(levels) + 1, cfg)
    lines = build_spectrum(table, s.quad_spec(), cfg)
    cols = ["x"] + [f"psi_{n}" for n in levels]
    data = {"x": grid}
    for n in levels:
        psi = eigenfunction(lines[n], grid, g, cfg)
        if normalize:
            psi = psi / math.sqrt(2.0 * lines[n].norm_scaled)
        data[f"psi_{n}"] = psi
    rows = [{c: float(data[c][i]) for c in cols} for i in range(grid.size)]
    scaling = "unit L2 norm" if normalize else "exp(nu*pi/2) K_{i nu}(g e^|x|)"
    return cols, rows, {"scaling": scaling}, True


def cmd_orthogonality(s: Settings):
    g = s.get("g", 1.0)
    count = s.get("count", 8, int)
    tol = s.get("tol", 1e-8)
    pairs = s.get("random_pairs", 0, int)
    seed = s.get("seed", 0, int)
    cfg = s.eval_config()
    quad = s.quad_spec()
    table = _table(s, g, count, cfg)
    rows = []
    worst = 0.0
    for parity, idx in (("even", range(0, count, 2)), ("odd", range(1, count, 2))):
        idx = list(idx)
        if len(idx) < 1:
            continue
        gram = gram_matrix([table.nus[i] for i in idx], g, quad, cfg)
        norm = normalized_off_diagonal(gram)
        worst = max(worst, float(norm.max()))
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                rows.append({"parity": parity, "n": i, "m": j, "value": float(gram[a, b]),
                             "normalized": float(norm[a, b]) if a != b else 1.0})
    summary = {"max_offdiag": worst}
    ok = worst < tol
    if pairs > 0:
        rng = np.random.default_rng(seed)
        rel = 0.0
        for _ in range(pairs):
            a, b = rng.uniform(g, g + 15.0, size=2)
            q = cross_integral_scaled(a, b, g, quad, cfg)
            c = cross_integral_closed_form_scaled(a, b, g, cfg)
            rel = max(rel, abs(q - c) / abs(q))
        summary["closed_form_max_rel"] = rel
        ok = ok and rel < 1e-9
    return ["parity", "n", "m", "value", "normalized"], rows, summary, ok


def cmd_crum(s: Settings):
    g = s.get("g", 1.0)
    L = s.get("L", 1, int)
    n_psi = s.get("levels", 4, int)
    tol = s.get("tol", 1e-3)
    grid = parse_grid(s.get("grid", "0:3:0.01", str))
    mirror = bool(s.args.mirror)
    s.used["mirror"] = mirror
    cfg = s.eval_config()
    table = _table(s, g, L + n_psi, cfg)
    tower = CrumTower.from_table(table, L, cfg)
    xs = -grid if mirror else grid
    levels = list(range(L, L + n_psi))
    v = tower.potential(xs)
    psis = {n: tower.eigenfunction(n, xs) for n in levels}
    cols = ["x", "V"] + [f"psi_{n}" for n in levels]
    rows = []
    for i, x in enumerate(xs):
        r = {"x": float(x), "V": float(v[i])}
        r.update({f"psi_{n}": float(psis[n][i]) for n in levels})
        rows.append(r)
    # fit over x in [0, 3], independent of the output grid
    res, a, c = shape_invariance_residual(tower, np.linspace(0.0, 3.0, 301))
    flip = tower.potential(-xs)
    sym = float(np.max(np.abs(flip - v) / np.maximum(np.abs(v), 1.0)))
    summary = {"shape_fit_residual": res, "shape_fit_a": a, "shape_fit_c": c,
               "parity_defect": sym}
    # L = 0 is the original, shape-invariant-trivially well; only check L >= 1
    ok = sym < 1e-10 and (L == 0 or res > tol)
    return cols, rows, summary, ok


def cmd_wkb(s: Settings):
    g = s.get("g", 1.0)
    count = s.get("count", 20, int)
    tol = s.get("tol", 1e-2)
    mode = s.get("mode", "combined", str)
    cfg = s.eval_config()
    table = _table(s, g, count, cfg)
    rows = []
    for n, e in enumerate(table.entries):
        if mode == "combined":
            pred = wkb_predict(n, g, mode)
        else:
            # the per-kind rules index the j-th zero of one kind
            want = "derivative_only" if e.kind.parity == "even" else "function_only"
            if want != mode:
                continue
            pred = wkb_predict(e.j, g, mode)
        rows.append({"n": n, "nu_wkb": pred, "nu_exact": e.nu, "rel_err": abs(pred - e.nu) / e.nu})
    late = [r["rel_err"] for r in rows if r["n"] >= 10]
    ok = all(r < tol for r in late)
    return ["n", "nu_wkb", "nu_exact", "rel_err"], rows, {"max_rel_err_n_ge_10": max(late, default=0.0)}, ok


def cmd_oracle(s: Settings):
    g = s.get("g", 1.0)
    levels = s.get("levels", 8, int)
    tol = s.get("tol", 1e-6)
    h = s.get("h", 1e-3)
    cfg = s.eval_config()
    table = _table(s, g, levels, cfg)
    x_max = s.get("x_max", default_x_max(g, table.nus[-1]))
    per = (levels + 1) // 2
    fd = solve_fd(g, OracleConfig(x_max, h, "both", per))[:levels]
    rows = []
    for n, ((parity, e_fd), entry) in enumerate(zip(fd, table.entries)):
        if parity != entry.kind.parity:
            raise BracketError(f"level {n}: oracle parity {parity} vs zero kind {entry.kind.parity}")
        rows.append({"n": n, "parity": parity, "E_fd": e_fd, "E_bessel": entry.energy,
                     "rel_err": abs(e_fd - entry.energy) / entry.energy})
    worst = max(r["rel_err"] for r in rows)
    return ["n", "parity", "E_fd", "E_bessel", "rel_err"], rows, {"max_rel_err": worst}, worst < tol


COMMANDS = {
    "zeros": cmd_zeros,
    "spectrum": cmd_spectrum,
    "eigenfunction": cmd_eigenfunction,
    "orthogonality": cmd_orthogonality,
    "crum": cmd_crum,
    "wkb": cmd_wkb,
    "oracle": cmd_oracle,
}


# ------------------------------------------------------------- output


def _plain(v):
    """numpy scalars to builtins, so CSV and JSON print them the same way."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _fmt(v):
    v = _plain(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(fmt, manifest, summary, cols, rows):
    manifest = {k: ({pk: _plain(pv) for pk, pv in v.items()} if k == "params" else _plain(v))
                for k, v in manifest.items()}
    summary = {k: _plain(v) for k, v in summary.items()}
    rows = [{k: _plain(v) for k, v in r.items()} for r in rows]
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "manifest": manifest, "summary": summary,
               "columns": cols, "rows": rows}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    for k, v in manifest.items():
        if k == "params":
            for pk, pv in v.items():
                buf.write(f"# param.{pk}: {_fmt(pv)}\n")
        else:
            buf.write(f"# {k}: {_fmt(v)}\n")
    for k, v in summary.items():
        buf.write(f"# summary.{k}: {_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def write_atomic(path, text):
    """Write through a temporary file so a failed run leaves nothing behind."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".expwell-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


# ------------------------------------------------------------- parser


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--g", type=float, help="coupling g > 0 (default 1)")
    shared.add_argument("--tol", type=float, help="threshold of the command's invariant check")
    shared.add_argument("--format", choices=("csv", "json"), default=None)
    shared.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    shared.add_argument("--config", metavar="PATH", help=f"key=value file (default ${CONFIG_ENV})")

    p = argparse.ArgumentParser(prog="expwell", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"expwell {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[shared], help=help_)

    def zeros_in(sp):
        sp.add_argument("--zeros", metavar="PATH", help="reuse a zeros table (JSON or CSV)")

    sp = add("zeros", "interlaced zeros of K and K' in the order")
    sp.add_argument("--count", type=int)

    sp = add("spectrum", "energies, norms and matching defects")
    sp.add_argument("--count", type=int)
    zeros_in(sp)

    sp = add("eigenfunction", "tabulate psi_n on an x grid")
    sp.add_argument("--n", type=int, action="append", help="level (repeatable)")
    sp.add_argument("--grid", metavar="A:B:STEP")
    sp.add_argument("--normalize", action="store_true", help="unit norm on the whole line")
    zeros_in(sp)

    sp = add("orthogonality", "Gram matrices of same-parity states")
    sp.add_argument("--count", type=int)
    sp.add_argument("--random-pairs", type=int, dest="random_pairs",
                    help="also compare the closed form with quadrature on N random pairs")
    sp.add_argument("--seed", type=int)
    zeros_in(sp)

    sp = add("crum", "level-L associated potential and eigenfunctions")
    sp.add_argument("--L", type=int, dest="L")
    sp.add_argument("--levels", type=int, help="number of surviving states to tabulate")
    sp.add_argument("--grid", metavar="A:B:STEP")
    sp.add_argument("--mirror", action="store_true", help="evaluate at -x instead of x")
    zeros_in(sp)

    sp = add("wkb", "WKB prediction against the exact zeros")
    sp.add_argument("--count", type=int)
    sp.add_argument("--mode", choices=("combined", "derivative_only", "function_only"))
    zeros_in(sp)

    sp = add("oracle", "finite-difference energies against the Bessel spectrum")
    sp.add_argument("--levels", type=int)
    sp.add_argument("--h", type=float)
    sp.add_argument("--x-max", type=float, dest="x_max")
    zeros_in(sp)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cpath = args.config or os.environ.get(CONFIG_ENV)
        config, text = {}, ""
        if cpath:
            with open(cpath, encoding="utf-8") as fh:
                text = fh.read()
            config = read_config(cpath)
        s = Settings(args, config, text)
        fmt = s.get("format", "csv", str)
        if fmt not in ("csv", "json"):
            raise InputError(f"format must be csv or json, got {fmt!r}")
        g = s.get("g", 1.0)
        if not (math.isfinite(g) and g > 0):
            raise InputError("g must be positive")
        cols, rows, summary, ok = COMMANDS[args.command](s)
    except BracketError as exc:
        print(f"expwell {args.command}: invariant violated: {exc}", file=sys.stderr)
        return 1
    except (ExpWellError, ValueError, OSError, KeyError) as exc:
        print(f"expwell {args.command}: {exc}", file=sys.stderr)
        return 2

    params = {k: v for k, v in sorted(s.used.items()) if k not in ("format",)}
    manifest = {
        "command": args.command,
        "params": params,
        "version": __version__,
        "config_checksum": s.checksum(),
        "wall_time_s": round(time.perf_counter() - t0, 3),
    }
    out = render(fmt, manifest, summary, cols, rows)
    try:
        if args.out:
            write_atomic(args.out, out)
        else:
            sys.stdout.write(out)
    except OSError as exc:
        print(f"expwell {args.command}: {exc}", file=sys.stderr)
        return 2
    if not ok:
        print(f"expwell {args.command}: invariant check failed: {summary}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
