"""Named verification suites, JSON reports and CSV trace export.

Each suite draws ``samples`` random inputs, checks one statement about the
construction and reports per-check maximum residuals. Sample ``i`` draws
all of its randomness from ``default_rng([seed, i])``, so results do not
depend on batching or ordering.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import models
from .algebra import I, J, K, ONE, ZERO, pair
from .bundle import (
    BundlePoint,
    GroupElement,
    act,
    fiber_complement,
    normal_form,
    normal_form_point,
    sigma5_canonical_rep,
    star_orbit_residual,
)
from .config import TOL_EXTERNAL, env_tolerance
from .errors import GMError, PreconditionError
from .geometry import (
    MetricParams,
    clutching_relation,
    join_segment,
    lift_gamma,
    lift_velocity,
    metric_eval,
    star_generator_vector,
    vertical_component,
    wiedersehen_check,
)
from .powermaps import decompose, degree_check, oct_power, rho

TRACE_HEADER = ["t"] + [f"{c}_{a}" for c in ("u1", "u2", "v1", "v2") for a in ("re", "i", "j", "k")]


class UsageError(GMError, ValueError):
    """Bad command-line or suite configuration."""


@dataclass
class SuiteConfig:
    suite: str
    n: int | None = None
    nu: float = 1.0
    samples: int = 100
    seed: int = 0
    tol: float | None = None
    step: float = 1e-3

    def validate(self) -> "SuiteConfig":
        if self.suite not in REGISTRY:
            raise UsageError(f"unknown suite {self.suite!r}; available: {', '.join(sorted(REGISTRY))}")
        if not self.nu > 0:
            raise UsageError("nu must be positive")
        if not self.samples > 0:
            raise UsageError("samples must be positive")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tol must be positive")
        if not self.step > 0:
            raise UsageError("step must be positive")
        return self


@dataclass
class Check:
    name: str
    passed: bool
    max_residual: float
    tol: float
    witness: dict | None = None


@dataclass
class Report:
    suite: str
    params: dict
    checks: list = field(default_factory=list)
    passed: bool = True
    wall_time_ms: float = 0.0

    def as_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "params": self.params,
            "checks": [_check_dict(c) for c in sorted(self.checks, key=lambda c: c.name)],
            "passed": self.passed,
            "wall_time_ms": self.wall_time_ms,
        }
        if not self.checks:
            out["note"] = "no checks ran; passed is vacuously true"
        return out


def _check_dict(c: Check) -> dict:
    d = {"name": c.name, "passed": c.passed, "max_residual": c.max_residual, "tol": c.tol}
    if c.witness is not None:
        d["witness"] = c.witness
    return d


# -- sampling ------------------------------------------------------------------------


def sample_rngs(seed: int, count: int):
    return [np.random.default_rng([seed, i]) for i in range(count)]


def _draw(cfg, fn):
    """Stack ``fn(rng)`` over the per-sample generators."""
    rows = [fn(rng) for rng in sample_rngs(cfg.seed, cfg.samples)]
    if isinstance(rows[0], tuple):
        return tuple(np.stack(col) for col in zip(*rows))
    return np.stack(rows)


def _unit(rng, shape, imaginary=()):
    x = rng.standard_normal(shape)
    for idx in imaginary:
        x[idx] = 0.0
    return x / np.linalg.norm(x)


def _s7(rng):
    return _unit(rng, (2, 4))


def _s6(rng):
    return _unit(rng, (2, 4), imaginary=[(0, 0)])


def _s3(rng):
    return _unit(rng, 4)


# -- helpers ---------------------------------------------------------------------------


class _Ctx:
    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        self.env = env_tolerance()
        self.checks: list[Check] = []

    def tol(self, default):
        if self.cfg.tol is not None:
            return self.cfg.tol
        return self.env if self.env is not None else default

    def add(self, name, residuals, default_tol, witness=None):
        res = np.asarray(residuals, dtype=float)
        worst = float(np.max(res)) if res.size else 0.0
        if res.size and np.isnan(res).any():
            worst = math.nan
        tol = self.tol(default_tol)
        self.checks.append(Check(name, bool(worst <= tol), worst, tol, witness))

    def count(self, name, failures, witness=None):
        """A check whose residual is a number of failed samples (passes only at 0)."""
        self.checks.append(Check(name, int(failures) == 0, float(failures), 0.0, witness))


def _worst_q(q, res):
    i = int(np.argmax(res))
    return {"sample": i, "q": np.asarray(q[i]).tolist()}


def _pair_diff(a, b):
    return np.max(np.abs(a - b), axis=(-2, -1))


def _point_diff(x: BundlePoint, y: BundlePoint):
    return np.maximum(_pair_diff(x.u, y.u), _pair_diff(x.v, y.v))


def _act_signed(q1, q2, q3, e, x: BundlePoint) -> BundlePoint:
    """Batched action with per-sample sign matrices."""
    y = act(GroupElement(q1, q2, q3), x)
    s = e[:, :, None].astype(float)
    return BundlePoint(x.n, s * y.u, s * y.v)


# -- suites --------------------------------------------------------------------------------


def _rho_oracle(ctx, n):
    u = _draw(ctx.cfg, _s7)
    ctx.add("rho-vs-octonion-power", _pair_diff(rho(n, u), oct_power(n, u)), 1e-12)


def _parity(ctx, n):
    x = _draw(ctx.cfg, _s6)
    north = pair(ONE, ZERO)
    odd, even = [], []
    for m in range(-3, 4):
        sign = (-1) ** abs(m)
        odd.append(_pair_diff(rho(2 * m + 1, x), sign * x))
        even.append(_pair_diff(rho(2 * m, x), sign * north))
    ctx.add("even-powers-are-pm-one", even, 1e-12)
    ctx.add("odd-powers-are-pm-identity", odd, 1e-12)


def _bundle_invariance(ctx, n):
    def one(r):
        signs = lambda: r.choice([-1, 1], size=2)
        return (_s7(r), _s7(r), _s3(r), _s3(r), _s3(r), signs(), _s3(r), _s3(r), _s3(r), signs())

    u, v0, q1, q2, q3, e, p1, p2, p3, f = _draw(ctx.cfg, one)
    x = BundlePoint(n, u, fiber_complement(rho(n, u), v0))
    y = _act_signed(q1, q2, q3, e, x)
    ctx.add("membership-after-action", y.residual(), 1e-11)
    # star by q1 against bullet by (signs, q3)
    star = GroupElement(q1, q1, ONE)
    a = act(star, _act_signed(ONE, ONE, q3, e, x))
    b = _act_signed(ONE, ONE, q3, e, act(star, x))
    ctx.add("star-bullet-commute", _point_diff(a, b), 1e-11)
    g = GroupElement(q1, q2, q3) * GroupElement(p1, p2, p3)
    composed = _act_signed(g.q1, g.q2, g.q3, e * f, x)
    stepwise = _act_signed(q1, q2, q3, e, _act_signed(p1, p2, p3, f, x))
    ctx.add("action-composition", _point_diff(composed, stepwise), 1e-11)


def _pullback(ctx, n):
    x = _draw(ctx.cfg, _s6)
    t = np.linspace(0.0, 2 * np.pi, 100)[None, :]
    p, w = x[:, None, 0, :], x[:, None, 1, :]
    lift = lift_gamma(n, p, w, t)
    target = lift_gamma(1, p, w, n * t)
    res = np.maximum(_pair_diff(rho(n, lift.u), target.u), _pair_diff(lift.v, target.v))
    ctx.add("rho-tilde-of-lift", np.max(res, axis=1), 1e-10)


def _horizontality(ctx, n):
    x, t = _draw(ctx.cfg, lambda r: (_s6(r), r.uniform(0, 2 * np.pi)))
    X = lift_velocity(n, x[:, 0], x[:, 1], t, h=1e-6)
    ctx.add("fibre-horizontal", np.linalg.norm(vertical_component(X.at, X.dv), axis=-1), 1e-6)
    m = MetricParams(ctx.cfg.nu)
    star = [np.abs(metric_eval(m, X, star_generator_vector(X.at, e))) for e in (I, J, K)]
    ctx.add("star-orbit-orthogonal", np.max(star, axis=0), 1e-6)


def _wiedersehen(ctx, n):
    x = _draw(ctx.cfg, _s6)
    rep = wiedersehen_check(n, x[:, 0], x[:, 1])
    ctx.add("antipode-orbit", rep.antipode_residual, 1e-9, _worst_q(rep.antipode_q, rep.antipode_residual))
    ctx.add("return-orbit", rep.return_residual, 1e-9, _worst_q(rep.return_q, rep.return_residual))


def _clutching(ctx, n):
    x = _draw(ctx.cfg, _s6)
    q, res = clutching_relation(n, x)
    ctx.add("half-turn-orbit-relation", res, 1e-9, _worst_q(q, res))


def _regular_value(rng):
    while True:
        y = _s7(rng)
        if np.sin(float(decompose(y).t)) > 1e-3:
            return y


def _degree(ctx, n):
    ys = _draw(ctx.cfg, _regular_value)
    degs = [degree_check(n, y) for y in ys]
    wrong = sum(d != n for d in degs)
    ctx.count("signed-preimage-count", wrong, {"expected": n, "degrees": sorted(set(degs))})


def _join(ctx, n):
    t0, y = _draw(ctx.cfg, lambda r: (r.uniform(0, 2 * np.pi), _unit(r, (2, 4), imaginary=[(0, 0), (1, 0)])))
    rep = join_segment(n, t0, y, ctx.cfg.step)
    ctx.add("endpoint-membership", rep.path.membership, 1e-8)
    ctx.add("endpoint-is-target", rep.endpoint_error, 1e-8)
    ctx.add("length-is-quarter-turn", abs(rep.length - np.pi / 2), 1e-12)
    ctx.add("endpoints-orthogonal", rep.orthogonality, 1e-12)
    ctx.count("strata", int(np.sum(~rep.start_in_E1) + np.sum(~rep.end_in_E8)))


def _sigma5(ctx, n):
    if n != 0:
        raise UsageError(f"canonical representatives live on E8_0; --n must be 0, got {n}")
    p, v0, q = _draw(ctx.cfg, lambda r: (_unit(r, (2, 4), imaginary=[(0, 0), (1, 0)]), _s3(r), _s3(r)))
    x = BundlePoint(0, p, pair(np.zeros_like(v0), v0))
    rep = sigma5_canonical_rep(x)
    again = sigma5_canonical_rep(rep)
    moved = sigma5_canonical_rep(act(GroupElement(q, q, ONE), x))
    _, defect, res = star_orbit_residual(x, rep)
    ctx.add("idempotent", _point_diff(again, rep), 1e-12)
    ctx.add("orbit-faithful", res + defect, 1e-12)
    ctx.add("orbit-invariant", _point_diff(moved, rep), 1e-12)
    ctx.add("canonical-v", _pair_diff(rep.v, pair(ZERO, ONE)), 1e-12)


def _normal_form(ctx, n):
    s, t, q1, q2, q3 = _draw(
        ctx.cfg, lambda r: (r.uniform(0.05, np.pi / 2 - 0.05), r.uniform(0.05, np.pi - 0.05), _s3(r), _s3(r), _s3(r))
    )
    x = act(GroupElement(q1, q2, q3), normal_form_point(n, s, t))
    err, resid = [], []
    for i in range(ctx.cfg.samples):
        nf = normal_form(x[i])
        err.append(max(abs(nf.s - s[i]), abs(nf.t - t[i])))
        resid.append(nf.residual)
    ctx.add("recovers-s-t", err, 1e-9)
    ctx.add("witness-residual", resid, 1e-9)


def _odd_d(n):
    if n % 2 == 0:
        raise UsageError(f"these suites take an odd d = k - l as --n, got {n}")
    return n


def _isotropy_tables(d, seed, count):
    """Curve parameters and candidate lists for the three isotropy types plus random elements."""
    rand = models.random_symmetries(seed, count)
    s_mid = 0.3
    return [
        ("K-", 0.0, models.k_minus()),
        ("H", s_mid, models.h_group()),
        ("K+", np.pi / 4, models.k_plus(d)),
        ("random@0", 0.0, rand),
        ("random@mid", s_mid, rand),
        ("random@pi/4", np.pi / 4, rand),
    ]


def _isotropy_side(ctx, d, family):
    tables = _isotropy_tables(d, ctx.cfg.seed, ctx.cfg.samples)
    patterns = {}
    for label, s_alpha, cands in tables:
        s = s_alpha if family == "milnor-alpha" else models.matched_beta_parameter(d, s_alpha)
        disp = models.isotropy_scan(family, s, cands, d)
        patterns[label] = disp <= 1e-11
        if label.startswith("random"):
            # residual: how far the least-moved random element falls short of 1e-3
            ctx.add(f"{label}-moves", max(0.0, 1e-3 - float(np.min(disp))), 0.0)
        else:
            ctx.add(f"{label}-fixes", disp, 1e-11)
    return patterns


def _milnor_isotropy(ctx, n):
    d = _odd_d(n)
    _isotropy_side(ctx, d, "milnor-alpha")
    # H also fixes every interior point of the arc
    k, l = models.exponents(d)
    interior = np.linspace(0.0, np.pi / 4, 9)[1:-1]
    ctx.add("H-fixes-open-arc", [models.isotropy_scan("milnor-alpha", s, models.h_group(), d) for s in interior], 1e-11)
    # fixed points of the involution (-E, i) lie in M^5
    ctx.add("alpha-in-M5", [models.m5_residual(models.milnor_alpha(s, k, l)) for s in interior], 1e-12)


def _brieskorn_isotropy(ctx, n):
    d = _odd_d(n)
    beta = _isotropy_side(ctx, d, "brieskorn-beta")
    tables = _isotropy_tables(d, ctx.cfg.seed, ctx.cfg.samples)
    alpha = {label: models.isotropy_scan("milnor-alpha", s, c, d) <= 1e-11 for label, s, c in tables}
    ctx.count("pattern-matches-milnor", sum(int(np.sum(alpha[key] != beta[key])) for key in beta))
    # fixed set of (-E, i) on W^5 is the slice z1 = 0
    A = models.so3_matrix(I)
    slice_pts = [models.random_w5_point(d, (ctx.cfg.seed, i), on_fixed_set=True) for i in range(ctx.cfg.samples)]
    disp = [np.max(np.abs(models.brieskorn_act5(np.pi, False, A, x).coords() - x.coords())) for x in slice_pts]
    ctx.add("slice-fixed-by-involution", disp, 1e-12)
    lo = models.beta_root(d)
    ctx.add("beta-on-slice", [abs(models.brieskorn_beta(d, s).z[0]) for s in np.linspace(lo, 0.0, 9)], 1e-10)
    member = [max(x.residuals()) for x in slice_pts]
    ctx.add("slice-membership", member, 1e-12)


def _o2_element(rng):
    theta = rng.uniform(0, 2 * np.pi)
    m = models.rotation(theta)
    if rng.integers(2):
        m = m @ models.REFLECTION
    return models.MilnorGroupElement(m, _s3(rng), bool(rng.integers(2)))


def _m5_invariance(ctx, n):
    d = _odd_d(n)
    k, l = models.exponents(d)
    rngs = sample_rngs(ctx.cfg.seed, ctx.cfg.samples)
    on, trans, compat, conj = [], [], [], []
    for i, rng in enumerate(rngs):
        x = models.random_milnor_point(rng.integers(2**63), k, l, chart=1 + i % 2, on_m5=True)
        on.append(models.m5_residual(models.milnor_act(_o2_element(rng), x)))
        trans.append(models.m5_residual(models.milnor_transition(x)))
        y = models.random_milnor_point(rng.integers(2**63), k, l, chart=1 + i % 2)
        g = models.MilnorGroupElement(rng.standard_normal((2, 2)), _s3(rng), bool(rng.integers(2)))
        compat.append(
            models.milnor_distance(models.milnor_act(g, y), models.milnor_act(g, models.milnor_transition(y)))
        )
        a = models.milnor_conjugate(models.milnor_transition(y))
        b = models.milnor_transition(models.milnor_conjugate(y))
        conj.append(models.milnor_distance(a, b))
    ctx.add("M5-preserved-by-action", on, 1e-10)
    ctx.add("M5-preserved-by-transition", trans, 1e-10)
    ctx.add("chart-compatibility", compat, 1e-9)
    ctx.add("conjugation-compatibility", conj, 1e-10)


def _w7_fixed(ctx, n):
    if n < 1:
        raise UsageError(f"W^7_(6n-1,3) needs n >= 1, got {n}")
    A = np.diag([1.0, -1.0, -1.0])
    fixed, w3, mismatch = [], [], 0
    for i in range(ctx.cfg.samples):
        x = models.random_w7_point(n, (ctx.cfg.seed, i), on_fixed_set=True)
        fixed.append(models.w7_fixed_residual(x))
        w3.append(abs(x.w ** (6 * n - 1) + x.z0**3 + x.z[0] ** 2))
        y = models.random_w7_point(n, (ctx.cfg.seed, i, 1))
        for z in (x, y):
            moved = np.max(np.abs(models.w7_so3_act(A, z).coords() - z.coords())) > 1e-12
            mismatch += moved != (models.w7_fixed_residual(z) > 1e-12)
        mismatch += not models.w7_fixed_residual(y) > 1e-12
    ctx.add("W3-points-fixed", fixed, 1e-12)
    ctx.add("W3-equation", w3, 1e-12)
    ctx.count("fixed-iff-residual-zero", mismatch)


REGISTRY = {
    "rho-oracle": (_rho_oracle, 1),
    "parity": (_parity, 1),
    "bundle-invariance": (_bundle_invariance, 1),
    "pullback-identity": (_pullback, 1),
    "horizontality": (_horizontality, 1),
    "wiedersehen": (_wiedersehen, 1),
    "clutching": (_clutching, 1),
    "degree": (_degree, 1),
    "join": (_join, 1),
    "sigma5-rep": (_sigma5, 0),
    "normal-form": (_normal_form, 1),
    "milnor-isotropy": (_milnor_isotropy, 3),
    "brieskorn-isotropy": (_brieskorn_isotropy, 3),
    "m5-invariance": (_m5_invariance, 3),
    "w7-fixed": (_w7_fixed, 1),
}

# the statement each suite checks, for --help and the README
DESCRIPTIONS = {
    "rho-oracle": "power map equals the octonion power u^n",
    "parity": "on S^6, odd powers are +-identity and even powers are +-1",
    "bundle-invariance": "E_n is preserved by the full action; star and bullet actions commute",
    "pullback-identity": "rho_n of the lift at t is the n = 1 lift at n t",
    "horizontality": "the explicit lift is horizontal for both fibrations",
    "wiedersehen": "lifted geodesics reach the antipode orbit at pi and return at 2 pi",
    "clutching": "the sigma^n half-turn orbit relation",
    "degree": "rho_n has degree n",
    "join": "quarter geodesics from the circle reach E8 horizontally",
    "sigma5-rep": "canonical star-orbit representatives on E8_0",
    "normal-form": "every point moves to the (s, t) normal form",
    "milnor-isotropy": "isotropy along alpha in the Milnor model (n is d)",
    "brieskorn-isotropy": "isotropy along beta in the Brieskorn model matches (n is d)",
    "m5-invariance": "M^5 is preserved; the Milnor charts are compatible (n is d)",
    "w7-fixed": "fixed set of diag(1,-1,-1) on W^7 is W^3",
}


def run_suite(cfg: SuiteConfig) -> Report:
    cfg.validate()
    fn, default_n = REGISTRY[cfg.suite]
    if cfg.n is None:
        cfg.n = default_n
    ctx = _Ctx(cfg)
    start = time.perf_counter()
    fn(ctx, int(cfg.n))
    elapsed = (time.perf_counter() - start) * 1000.0
    return Report(
        suite=cfg.suite,
        params=asdict(cfg),
        checks=sorted(ctx.checks, key=lambda c: c.name),
        passed=all(c.passed for c in ctx.checks),
        wall_time_ms=elapsed,
    )


# -- serialization -------------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(x, str):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(x).__name__}")


def to_json(obj, indent=2, level=0) -> str:
    """JSON with insertion-ordered keys and 17 significant digits for floats."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_fmt(str(k))}: {to_json(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        obj = list(obj)
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_fmt(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    return _fmt(obj)


def emit_report(r: Report, out_path=None) -> str:
    text = to_json(r.as_dict()) + "\n"
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# -- geodesic traces -----------------------------------------------------------------------


def trace_geodesic(n: int, p, w, t_max: float, step: float, out_path) -> int:
    """Write ``lift_gamma`` samples on ``[0, t_max]`` as CSV; returns the row count.

    The grid is uniform with spacing at most ``step`` and always ends at ``t_max``.
    """
    p = np.asarray(p, dtype=float)
    w = np.asarray(w, dtype=float)
    if p.shape == (3,):
        p = np.concatenate([[0.0], p])
    if abs(p[0]) > TOL_EXTERNAL:
        raise PreconditionError("p must be imaginary")
    if abs(np.sum(p * p) + np.sum(w * w) - 1.0) > TOL_EXTERNAL:
        raise PreconditionError("need |p|^2 + |w|^2 = 1")
    if t_max < 0 or not step > 0:
        raise PreconditionError("need t_max >= 0 and step > 0")
    rows = int(math.ceil(t_max / step - 1e-9)) + 1 if t_max > 0 else 1
    t = np.linspace(0.0, t_max, rows)
    x = lift_gamma(n, p, w, t)
    data = np.column_stack([t, x.u.reshape(rows, 8), x.v.reshape(rows, 8)])
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for row in data:
            writer.writerow([format(float(v), ".17g") for v in row])
    return rows


def read_trace(path, n: int):
    """Inverse of :func:`trace_geodesic`: returns ``(t, BundlePoint batch)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise PreconditionError("unexpected trace header")
        data = np.array([[float(v) for v in row] for row in reader])
    t = data[:, 0]
    return t, BundlePoint(n, data[:, 1:9].reshape(-1, 2, 4), data[:, 9:17].reshape(-1, 2, 4))
