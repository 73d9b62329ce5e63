"""Command-line front end: ``lw generate|analyze|verify|conjugate|worldsheet|gallery``.

Exit codes: 0 success, 1 a verification suite failed, 2 bad usage or input.
Every error is reported as a single ``error: ...`` line on stderr.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import gallery
from .algebra import inner3
from .errors import LorentzError, MissingDecomposition
from .expr import as_expr
from .geometry import (
    GC_CONDITIONING,
    analyze,
    fields_at,
    frame_tangents,
    gauss_codazzi_field,
    gmap_pde_field,
    initial_frame,
    integrate_lax_frame,
    lax_fields_from_data,
    measured_gauss_map,
    umbilic_points,
)
from .grid import NULL, WORLDSHEET
from .quadrature import d11
from .weierstrass import (
    NullCurvePair,
    WeierstrassData,
    conjugate,
    dirac_residual,
    eta,
    extract_data,
    integrate_surface,
    spinors_from_data,
    surface_from_spinors,
    weierstrass_surface,
    xi,
)
from .worldsheet import (
    DEFAULT_TENSION,
    StringState,
    conformal_area,
    dalembert_evolve,
    einstein_hilbert_interior,
    euler_lagrange_residual,
    nambu_goto_action,
    null_tangent_defect,
    regge_slope,
    sample_worldsheet,
    wave_residual,
)

MAX_NODES = 4097
FORMATS = ("obj", "csv", "json")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JobConfig:
    gallery: Optional[str] = None
    q: Optional[str] = None
    f: Optional[str] = None
    r: Optional[str] = None
    g: Optional[str] = None
    domain: Optional[tuple] = None
    nu: int = 129
    nv: int = 129
    out: Optional[str] = None
    report: Optional[str] = None
    format: str = "obj"
    T: float = DEFAULT_TENSION
    tolerances: dict = field(default_factory=dict)

    def validate(self):
        exprs = [self.q, self.f, self.r, self.g]
        if self.gallery is not None and any(e is not None for e in exprs):
            raise UsageError("give either --gallery or --q/--f/--r/--g, not both")
        if self.gallery is None and not all(e is not None for e in exprs):
            raise UsageError("need --gallery NAME or all four of --q --f --r --g")
        for n in (self.nu, self.nv):
            if not 2 <= n <= MAX_NODES:
                raise UsageError(f"nu and nv must lie in [2, {MAX_NODES}]")
        if self.domain is not None:
            if len(self.domain) != 4 or not all(math.isfinite(x) for x in self.domain):
                raise UsageError("domain must be four finite numbers u0 u1 v0 v1")
            if self.domain[1] <= self.domain[0] or self.domain[3] <= self.domain[2]:
                raise UsageError("domain must satisfy u0 < u1 and v0 < v1")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if not self.T > 0:
            raise UsageError("tension T must be positive")
        return self


CONFIG_KEYS = {f for f in JobConfig.__dataclass_fields__}


def load_config(args):
    """File values first, then every flag that was given explicitly."""
    values = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(raw) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values.update(raw)
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if "domain" in values and values["domain"] is not None:
        values["domain"] = tuple(float(x) for x in values["domain"])
    return JobConfig(**values).validate()


# ---------------------------------------------------------------------------
# surface sources
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Source:
    label: str
    data: Optional[WeierstrassData]
    entry: Optional[gallery.GalleryEntry]

    @property
    def minimal(self):
        return self.entry.minimal if self.entry else True

    @property
    def default_domain(self):
        return self.entry.domain if self.entry else (-1.0, 1.0, -1.0, 1.0)

    def grid(self, domain, nu, nv):
        if self.entry is not None:
            return self.entry.grid(domain, nu, nv)
        return integrate_surface(self.data, domain, nu, nv)

    def surface(self, domain):
        if self.entry is not None:
            return self.entry.surface(domain[0], domain[2])
        return weierstrass_surface(self.data, domain[0], domain[2])

    def gauss_map_data(self):
        """Functions (q(u), r(v)) whose inverse stereographic image is the normal."""
        if self.data is not None:
            return self.data.q, self.data.r
        p = self.entry.pseudosphere
        return as_expr(p["q"]), as_expr(p["r"])

    @property
    def orientation(self):
        return -1 if self.entry is not None and self.entry.pseudosphere else 1


def resolve_source(cfg):
    if cfg.gallery is not None:
        entry = gallery.get(cfg.gallery)
        return Source(cfg.gallery, entry.data, entry)
    data = WeierstrassData.from_strings(cfg.q, cfg.f, cfg.r, cfg.g)
    return Source("expressions", data, None)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def fmt(x):
    """Twelve significant digits; integral values keep a trailing '.0'."""
    s = f"{float(x):.12g}"
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _g17(x):
    return "%.17g" % x


def render_obj(grid):
    nu, nv = grid.shape
    lines = [
        "# timelike surface mesh in Minkowski 3-space",
        "# vertex coordinates x1 x2 x3 with signature (-,+,+); x1 is timelike",
        f"# lattice {nu} x {nv}, row-major, chart {grid.chart}",
    ]
    for p in grid.points.reshape(-1, 3):
        lines.append("v " + " ".join(_g17(c) for c in p))
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            b, c, d = a + 1, a + nv, a + nv + 1
            lines.append(f"f {a} {c} {d}")
            lines.append(f"f {a} {d} {b}")
    return "\n".join(lines) + "\n"


def render_csv(grid):
    lines = ["u,v,x1,x2,x3,flag"]
    A, B = grid.mesh()
    for a, b, p, flag in zip(A.ravel(), B.ravel(), grid.points.reshape(-1, 3), grid.flags.ravel()):
        lines.append(",".join([_g17(a), _g17(b), *(_g17(c) for c in p), str(int(flag))]))
    return "\n".join(lines) + "\n"


def render_json(grid):
    doc = {
        "chart": grid.chart,
        "a": grid.a.tolist(),
        "b": grid.b.tolist(),
        "points": grid.points.tolist(),
        "flags": grid.flags.astype(int).tolist(),
    }
    return json.dumps(doc, sort_keys=True) + "\n"


RENDERERS = {"obj": render_obj, "csv": render_csv, "json": render_json}


def metadata(grid, source, cfg, domain):
    meta = {
        "source": source.label,
        "chart": grid.chart,
        "domain": list(domain),
        "nu": int(grid.shape[0]),
        "nv": int(grid.shape[1]),
        "degenerate_nodes": [list(map(int, ij)) for ij in np.argwhere(grid.flags)],
    }
    if source.data is not None:
        meta["data"] = source.data.as_strings()
    return meta


def write_mesh(grid, cfg, meta, stdout):
    text = RENDERERS[cfg.format](grid)
    if cfg.out is None:
        stdout.write(text)
        return
    out = Path(cfg.out)
    out.write_text(text)
    Path(str(out) + ".meta.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def emit(text, path, stdout):
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _grid_for(cfg, source):
    domain = cfg.domain or source.default_domain
    return source.grid(domain, cfg.nu, cfg.nv), domain


def cmd_generate(args, stdout):
    cfg = load_config(args)
    source = resolve_source(cfg)
    grid, domain = _grid_for(cfg, source)
    write_mesh(grid, cfg, metadata(grid, source, cfg, domain), stdout)
    return 0


def cmd_conjugate(args, stdout):
    cfg = load_config(args)
    source = resolve_source(cfg)
    if source.entry is not None and source.entry.pseudosphere is not None:
        raise MissingDecomposition("the pseudosphere grid has no X(u) + Y(v) split")
    grid, domain = _grid_for(cfg, source)
    conj = conjugate(grid)
    write_mesh(conj, cfg, dict(metadata(conj, source, cfg, domain), conjugated=True), stdout)
    return 0


ANALYSIS_COLUMNS = ("u", "v", "H", "K", "Q", "R", "omega", "degenerate")


def _analysis_rows(cfg, source, points):
    domain = cfg.domain or source.default_domain
    if points:
        u = np.array([p[0] for p in points], float)
        v = np.array([p[1] for p in points], float)
        fields = fields_at(source.surface(domain), u, v, source.orientation)
        valid = fields["valid"]
        cols = [fields[k] for k in ("H", "K", "Q", "R", "omega")]
    else:
        grid = source.grid(domain, cfg.nu, cfg.nv)
        a = analyze(grid)
        U, V = grid.null_mesh()
        u, v, valid = U.ravel(), V.ravel(), a.valid.ravel()
        cols = [getattr(a, k).ravel() for k in ("H", "K", "Q", "R", "omega")]
    rows = []
    for k in range(u.size):
        ok = bool(valid[k])
        rows.append([float(u[k]), float(v[k])] + [float(c[k]) if ok else float("nan") for c in cols] + [int(not ok)])
    return rows


def cmd_analyze(args, stdout):
    cfg = load_config(args)
    source = resolve_source(cfg)
    rows = _analysis_rows(cfg, source, args.at)
    if cfg.format == "json":
        text = json.dumps([dict(zip(ANALYSIS_COLUMNS, r[:-1] + [bool(r[-1])])) for r in rows], sort_keys=True) + "\n"
        text = text.replace("NaN", "null")
    else:
        lines = [",".join(ANALYSIS_COLUMNS)]
        lines += [",".join([fmt(x) for x in r[:-1]] + [str(r[-1])]) for r in rows]
        text = "\n".join(lines) + "\n"
    emit(text, cfg.report, stdout)
    return 0


# -- verification suites ------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    measured: Optional[float]
    tol: float
    applies: bool

    @property
    def passed(self):
        return self.measured is not None and self.measured <= self.tol

    def line(self):
        if self.measured is None:
            status, value = "SKIP", "n/a"
        else:
            status, value = ("PASS" if self.passed else "FAIL"), f"{self.measured:.3e}"
        note = "" if self.applies else "  [not applicable]"
        return f"{status}  {self.name:<22} measured={value:<10} tol={self.tol:g}{note}"


DEFAULT_TOLERANCES = {
    "conformality": 1e-10,
    "metric_identity": 1e-9,
    "closed_form": 1e-8,
    "minimality_H": 1e-6,
    "minimality_uv": 1e-7,
    "mean_curvature_formulas": 1e-5,
    "gauss_codazzi": 1e-4,
    "hopf_holomorphy": 1e-10,
    "curvature_oracle": 1e-5,
    "hopf_oracle": 1e-6,
    "gauss_map": 1e-6,
    "gauss_map_pde": 1e-4,
    "umbilicity": 0.0,
    "wave": 1e-6,
    "euler_lagrange": 1e-3,
    "gauge_action": 1e-4,
    "round_trip": 1e-10,
    "spinor_route": 1e-8,
    "dirac": 1e-8,
    "lax_det": 1e-8,
    "lax_tangents": 1e-6,
    "lax_paths": 1e-6,
}


def _max(x):
    x = np.asarray(x, float)
    x = x[np.isfinite(x)]
    return float(np.max(np.abs(x))) if x.size else 0.0


def _positive_spinor_data(data, domain, samples=65):
    if data is None:
        return False
    u = np.linspace(domain[0], domain[1], samples)
    v = np.linspace(domain[2], domain[3], samples)
    f = np.asarray(data.f(u), float) * np.ones_like(u)
    g = np.asarray(data.g(v), float) * np.ones_like(v)
    U, V = np.meshgrid(u, v, indexing="ij")
    return bool(np.all(f > 0) and np.all(g > 0) and np.all(np.abs(data.metric_factor(U, V)) > 1e-10))


def build_suites(source, grid, domain):
    """Callables returning Check records; each isolated so suites run independently."""
    a = analyze(grid)
    U, V = grid.null_mesh()
    entry, data = source.entry, source.data
    minimal = source.minimal
    interior = np.zeros(grid.shape, bool)
    interior[1:-1, 1:-1] = True
    suites = []

    def suite(fn):
        suites.append(fn)
        return fn

    @suite
    def conformality(tol):
        jet = grid.jet()
        return _max(np.where(a.valid, np.maximum(np.abs(inner3(jet.u, jet.u)), np.abs(inner3(jet.v, jet.v))), np.nan)), True

    @suite
    def metric_identity(tol):
        if data is not None:
            expected = data.metric_factor(U, V)
        elif entry is not None and entry.metric is not None:
            expected = entry.metric(U, V)
        else:
            return None, False
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.abs(2 * a.half_metric - expected) / np.abs(expected)
        return _max(np.where(a.valid, rel, np.nan)), True

    @suite
    def closed_form(tol):
        if entry is None or entry.closed_X is None:
            return None, False
        closed = entry.closed_position(U, V)
        return _max(grid.points - closed), True

    @suite
    def minimality_H(tol):
        return _max(np.where(a.valid, a.H, np.nan)), minimal

    @suite
    def minimality_uv(tol):
        return _max(d11(grid.points, grid.ha, grid.hb)[1:-1, 1:-1]), minimal

    @suite
    def mean_curvature_formulas(tol):
        return _max(a.H - a.H_classic), True

    @suite
    def gauss_codazzi(tol):
        res, mask = gauss_codazzi_field(grid, min_metric=GC_CONDITIONING)
        return _max(res[:, mask]), True

    @suite
    def hopf_holomorphy(tol):
        with np.errstate(invalid="ignore"):
            q_var = np.nanvar(np.where(a.valid, a.Q, np.nan), axis=1)
            r_var = np.nanvar(np.where(a.valid, a.R, np.nan), axis=0)
        return max(_max(q_var), _max(r_var)), minimal

    @suite
    def curvature_oracle(tol):
        if entry is None or entry.K is None:
            return None, False
        K = entry.K(U, V)
        well = a.valid & (np.abs(entry.metric(U, V)) > 0.04)
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.abs(a.K - K) / np.maximum(np.abs(K), 1.0)
        return _max(np.where(well, rel, np.nan)), True

    @suite
    def hopf_oracle(tol):
        if entry is None or entry.hopf is None:
            return None, False
        Q, R = entry.hopf(U, V)
        return _max(np.where(a.valid, np.maximum(np.abs(a.Q - Q), np.abs(a.R - R)), np.nan)), True

    @suite
    def gauss_map(tol):
        q, r = source.gauss_map_data()
        qm, rm = measured_gauss_map(grid)
        qe = np.asarray(q(U), float) * np.ones_like(U)
        re = np.asarray(r(V), float) * np.ones_like(V)
        return _max(np.where(a.valid, np.maximum(np.abs(qm - qe), np.abs(rm - re)), np.nan)), True

    @suite
    def gauss_map_pde(tol):
        if data is None:
            return None, False
        return _max(gmap_pde_field(data, grid, H=0.0)), minimal

    @suite
    def umbilicity(tol):
        found = set(umbilic_points(grid, 1e-4))
        expected = {tuple(map(int, ij)) for ij in np.argwhere(a.valid & interior)}
        return float(len(found ^ expected)), not minimal

    @suite
    def wave(tol):
        sheet = entry.worldsheet() if entry is not None else grid
        return wave_residual(sheet), minimal

    @suite
    def euler_lagrange(tol):
        sheet = entry.worldsheet() if entry is not None else grid
        return euler_lagrange_residual(sheet, 1.0), minimal

    @suite
    def gauge_action(tol):
        sheet = entry.worldsheet() if entry is not None else grid
        area = conformal_area(sheet)
        return abs(-nambu_goto_action(sheet, 1.0) - area) / max(abs(area), 1e-300), True

    @suite
    def round_trip(tol):
        if data is None:
            return None, False
        u = np.linspace(domain[0], domain[1], 129)
        v = np.linspace(domain[2], domain[3], 129)
        pair = NullCurvePair(lambda s: xi(data, s), lambda s: eta(data, s))
        back = extract_data(pair, domain[:2], domain[2:], 129)
        worst = 0.0
        for name, t in (("q", u), ("f", u), ("r", v), ("g", v)):
            ref = np.asarray(getattr(data, name)(t), float) * np.ones_like(t)
            worst = max(worst, _max(getattr(back, name)(t) - ref))
        return worst, True

    spinor_ok = _positive_spinor_data(data, domain)

    @suite
    def spinor_route(tol):
        if not spinor_ok:
            return None, False
        other = surface_from_spinors(spinors_from_data(data, domain), domain, *grid.shape)
        return _max(other.points - grid.points), True

    @suite
    def dirac(tol):
        if not spinor_ok:
            return None, False
        return dirac_residual(spinors_from_data(data, domain), domain), True

    lax_cache = {}

    def lax():
        if "frames" not in lax_cache:
            coeffs = lax_fields_from_data(data)
            frame0 = initial_frame(data, grid.a[0], grid.b[0])
            uv = integrate_lax_frame(coeffs, frame0, grid.a, grid.b, "uv")
            vu = integrate_lax_frame(coeffs, frame0, grid.a, grid.b, "vu")
            lax_cache["frames"] = (coeffs, uv, vu)
        return lax_cache["frames"]

    @suite
    def lax_det(tol):
        if not spinor_ok:
            return None, False
        _, uv, _ = lax()
        return _max(np.linalg.det(uv) - 1), True

    @suite
    def lax_tangents(tol):
        if not spinor_ok:
            return None, False
        coeffs, uv, _ = lax()
        pu, pv = frame_tangents(coeffs, uv, grid.a, grid.b)
        xu, xv = xi(data, U), eta(data, V)
        return max(_max(pu - xu), _max(pv - xv)), True

    @suite
    def lax_paths(tol):
        if not spinor_ok:
            return None, False
        _, uv, vu = lax()
        return _max(uv - vu), True

    return suites


def parallel_map(fn, items):
    """Ordered map, spread over ``LW_THREADS`` worker threads (default 1)."""
    try:
        workers = max(1, int(os.environ.get("LW_THREADS", "1")))
    except ValueError:
        raise UsageError("LW_THREADS must be a positive integer") from None
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_verification(source, grid, domain, tolerances=None):
    tols = dict(DEFAULT_TOLERANCES, **(tolerances or {}))
    suites = build_suites(source, grid, domain)
    # the shared analysis cache is filled once before any threads start
    analyze(grid)

    def run(fn):
        tol = tols[fn.__name__]
        measured, applies = fn(tol)
        return Check(fn.__name__, measured, tol, applies)

    return parallel_map(run, suites)


def cmd_verify(args, stdout):
    cfg = load_config(args)
    source = resolve_source(cfg)
    grid, domain = _grid_for(cfg, source)
    checks = run_verification(source, grid, domain, cfg.tolerances)
    failed = [c for c in checks if c.applies and not c.passed and c.measured is not None]
    lines = [f"# verify {source.label} on {' '.join(fmt(x) for x in domain)} ({cfg.nu} x {cfg.nv})"]
    lines += [c.line() for c in checks]
    lines.append(f"# {'FAIL' if failed else 'PASS'}: {len(failed)} applicable suite(s) failed")
    stdout.write("\n".join(lines) + "\n")
    if cfg.report:
        doc = [{"name": c.name, "measured": c.measured, "tol": c.tol, "applies": c.applies,
                "passed": c.passed} for c in checks]
        Path(cfg.report).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return 1 if failed else 0


# -- worldsheet -----------------------------------------------------------------


def _sheet(args, cfg, source):
    if args.chart == NULL:
        return _grid_for(cfg, source)[0]
    domain = cfg.domain or (source.entry.worldsheet_domain if source.entry else (0.0, 1.0, 0.0, 1.0))
    return sample_worldsheet(source.surface(source.default_domain), domain[:2], domain[2:], cfg.nu, cfg.nv)


def _curve(triple):
    if isinstance(triple, list) and len(triple) == 3 and all(isinstance(c, (str, int, float)) for c in triple):
        parts = [as_expr(c) for c in triple]

        def value(s):
            s = np.asarray(s, float)
            return np.stack([np.asarray(p(s), float) * np.ones_like(s) for p in parts], axis=-1)

        def slope(s):
            s = np.asarray(s, float)
            return np.stack([np.asarray(p.derivative()(s), float) * np.ones_like(s) for p in parts], axis=-1)

        return value, slope
    raise UsageError("curve must be a list of three expressions in one variable")


def load_state(path, T):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read initial state {path}: {exc}") from None
    T = doc.get("T", T)
    if "sigma" in doc:
        st = StringState.from_samples(doc["sigma"], doc["position"], doc["velocity"], T, doc.get("sigma_range"))
    else:
        position, tangent = _curve(doc["position"])
        velocity, _ = _curve(doc["velocity"])
        st = StringState(position, tangent, velocity, tuple(doc.get("sigma_range", (0.0, 1.0))), T)
    return st, doc


def cmd_worldsheet(args, stdout):
    if args.action == "evolve":
        return _evolve(args, stdout)
    cfg = load_config(args)
    source = resolve_source(cfg)
    sheet = _sheet(args, cfg, source)
    if args.action == "action":
        value = nambu_goto_action(sheet, cfg.T)
    elif args.action == "wave":
        value = wave_residual(sheet)
    else:
        value = einstein_hilbert_interior(sheet, regge_slope(cfg.T))
    emit(fmt(value) + "\n", cfg.report, stdout)
    return 0


def _evolve(args, stdout):
    if not args.init:
        raise UsageError("worldsheet evolve needs --init STATE.json")
    T = args.T if args.T is not None else DEFAULT_TENSION
    state, doc = load_state(args.init, T)
    tau_max = args.tau_max if args.tau_max is not None else float(doc.get("tau_max", 1.0))
    n_tau = args.nu if args.nu is not None else int(doc.get("n_tau", 65))
    n_sigma = args.nv if args.nv is not None else doc.get("n_sigma")
    if not 2 <= n_tau <= MAX_NODES:
        raise UsageError(f"n_tau must lie in [2, {MAX_NODES}]")
    grid = dalembert_evolve(state, tau_max, n_tau, n_sigma)
    fmt_name = args.format or "obj"
    cfg = JobConfig(out=args.out, format=fmt_name)
    meta = {"source": "evolution", "chart": WORLDSHEET, "tau_max": tau_max, "n_tau": int(grid.shape[0]),
            "n_sigma": int(grid.shape[1]), "degenerate_nodes": [list(map(int, ij)) for ij in np.argwhere(grid.flags)]}
    if args.out is None:
        stdout.write(f"wave_residual={fmt(wave_residual(grid))} null_defect={fmt(null_tangent_defect(grid))}\n")
        return 0
    write_mesh(grid, cfg, meta, stdout)
    stdout.write(f"wave_residual={fmt(wave_residual(grid))} null_defect={fmt(null_tangent_defect(grid))}\n")
    return 0


def cmd_gallery(args, stdout):
    stdout.write("\n".join(gallery.list()) + "\n")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _source_flags(p, with_output=True):
    p.add_argument("--config", help="JSON file with keys named like the flags")
    p.add_argument("--gallery", help="built-in example name")
    for name in "qfrg":
        p.add_argument(f"--{name}", help=f"expression for {name}")
    p.add_argument("--domain", nargs=4, type=float, metavar=("U0", "U1", "V0", "V1"))
    p.add_argument("--nu", type=int)
    p.add_argument("--nv", type=int)
    p.add_argument("--T", type=float, help="string tension")
    if with_output:
        p.add_argument("--out")
        p.add_argument("--report")
        p.add_argument("--format", choices=FORMATS)


def build_parser():
    parser = _Parser(prog="lw", description="Timelike minimal surfaces in Minkowski 3-space.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a surface and write a mesh")
    _source_flags(p)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("analyze", help="tabulate H, K, Q, R and omega")
    _source_flags(p)
    p.add_argument("--at", nargs=2, type=float, action="append", metavar=("U", "V"),
                   help="evaluate at (u, v); repeatable.  Default: every grid node")
    p.add_argument("--grid", action="store_true", help="tabulate every grid node (the default)")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("verify", help="run every applicable invariant suite")
    _source_flags(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("conjugate", help="write the conjugate surface X(u) - Y(v)")
    _source_flags(p)
    p.set_defaults(handler=cmd_conjugate)

    p = sub.add_parser("worldsheet", help="string worldsheet quantities")
    p.add_argument("action", choices=("action", "wave", "evolve", "eh"))
    _source_flags(p)
    p.add_argument("--chart", choices=(WORLDSHEET, NULL), default=WORLDSHEET,
                   help="sample in (tau, sigma) (default) or on the null grid")
    p.add_argument("--init", help="initial string state (JSON) for evolve")
    p.add_argument("--tau-max", type=float, dest="tau_max")
    p.set_defaults(handler=cmd_worldsheet)

    p = sub.add_parser("gallery", help="list built-in examples")
    p.set_defaults(handler=cmd_gallery)
    return parser


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args, stdout)
    except (UsageError, LorentzError, ValueError, ArithmeticError, OSError) as exc:
        message = " ".join(str(exc).split()) or type(exc).__name__
        print(f"error: {message}", file=sys.stderr)
        return 2
