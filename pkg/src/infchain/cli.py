"""Config-driven experiment runner.

Usage::

    infchain run CONFIG [--threads N] [--output DIR] [--seed S]
    infchain validate CONFIG

A config is a JSON object with keys ``model``, ``phi``, ``plan``, ``tasks``,
``output`` and ``thresholds``; unknown keys anywhere are errors.  Each task
writes ``<task>.csv`` to the output directory and the run ends with
``manifest.json``.

Exit codes: 0 all verdicts pass, 1 some verdict failed, 2 invalid config,
3 numeric failure, 4 resource cap exceeded.
"""

import argparse
import copy
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, bounds, dependence, models, orlicz, rng, samplers, simulate, stats
from . import coefficients as coef
from .errors import CapacityError, ChainError, ConfigError, NumericError
from .report import ExperimentReport, csv_text, to_jsonable, write_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CAPACITY = 0, 1, 2, 3, 4

TOP_KEYS = {"model", "phi", "plan", "tasks", "output", "thresholds"}
PLAN_DEFAULTS = {"p": 1, "burn_in": 100, "horizon": 1000, "replications": 1, "seed": None}
THRESHOLD_DEFAULTS = {
    "p_value": 0.01,
    "lil_band": [0.5, 2.0],
    "lil_quantile": 0.9,
    "kde_delta": 0.15,
    "lipschitz_tol": 0.05,
    "slope_margin": bounds.SLOPE_MARGIN,
    "lrv_rel_tol": 0.1,
}


# ---------------------------------------------------------------------------
# Config validation


def _merge(defaults, given, where):
    given = dict(given or {})
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    out = copy.deepcopy(defaults)
    out.update(given)
    return out


def _require(spec, keys, where):
    missing = [k for k in keys if spec.get(k) is None]
    if missing:
        raise ConfigError(f"{where}: missing required keys {missing}")


def _sampler(spec, where):
    try:
        return samplers.from_dict(spec)
    except (ChainError, TypeError, AttributeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _coeffs(spec, where):
    try:
        return coef.from_dict(spec)
    except (ChainError, TypeError, AttributeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _phi(spec, where):
    try:
        return orlicz.from_dict(spec)
    except (ChainError, TypeError, AttributeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


LINKS = {
    "tanh": (lambda t, s: np.tanh(t) + s, 1.0),
    "identity": (lambda t, s: t + s, 1.0),
}


def _build_iid(p, phi):
    return models.iid(_sampler(p["noise"], "model.noise"), phi=phi)


def _build_linear_ar(p, phi):
    return models.linear_ar(p["weights"], _sampler(p["noise"], "model.noise"), phi=phi)


def _build_sre(p, phi):
    return models.sre_random_affine(_sampler(p["A"], "model.A"), _sampler(p["B"], "model.B"),
                                    phi=phi)


def _build_gw(p, phi):
    return models.galton_watson_immigration(
        _sampler(p["offspring"], "model.offspring"),
        _sampler(p["immigration"], "model.immigration"),
        variant=p["variant"], phi=phi, width=int(p["width"]))


def _build_larch(p, phi):
    return models.larch_inf(float(p["alpha"]), _coeffs(p["c"], "model.c"),
                            _sampler(p["noise"], "model.noise"), phi=phi)


def _build_linear_input(p, phi):
    if p["link"] not in LINKS:
        raise ConfigError(f"model.link: unknown link {p['link']!r}; choose from {sorted(LINKS)}")
    f, L = LINKS[p["link"]]
    return models.linear_input(f, L, _coeffs(p["c"], "model.c"),
                               _sampler(p["noise"], "model.noise"), phi=phi, f_zero_scale=1.0)


def _build_arch(p, phi):
    return models.arch(float(p["omega"]), p["alphas"], _sampler(p["noise"], "model.noise"),
                       phi=phi)


def _build_affine_ar(p, phi):
    w = np.asarray(p["weights"], dtype=float)
    scale = float(p["scale"])
    noise = _sampler(p["noise"], "model.noise")

    def f(past):
        return np.sum(models.lags(past, len(w))[:, :, 0] * w, axis=1)

    known = {}
    if noise.mean() == 0 and noise.var() is not None:
        known["mean"] = 0.0
        known["long_run_variance"] = scale**2 * noise.var() / (1.0 - w.sum()) ** 2
        if len(w) == 1:
            known["stationary_variance"] = scale**2 * noise.var() / (1.0 - w[0] ** 2)
    return models.affine_model(lambda past: np.full(past.shape[0], scale), f,
                               coef.finite([0.0]), coef.finite(np.abs(w)), noise, phi=phi,
                               det_lower=abs(scale), **known)


# name -> (builder, required keys, optional keys with defaults)
MODELS = {
    "iid": (_build_iid, ("noise",), {}),
    "linear_ar": (_build_linear_ar, ("weights", "noise"), {}),
    "sre_affine": (_build_sre, ("A", "B"), {}),
    "galton_watson": (_build_gw, ("offspring", "immigration"),
                      {"variant": "standard", "width": 32}),
    "larch": (_build_larch, ("alpha", "c", "noise"), {}),
    "linear_input": (_build_linear_input, ("link", "c", "noise"), {}),
    "arch": (_build_arch, ("omega", "alphas", "noise"), {}),
    "affine_ar": (_build_affine_ar, ("scale", "weights", "noise"), {}),
}


def build_model(spec, phi=None):
    """Construct a catalogued model from its config entry."""
    if not isinstance(spec, dict) or spec.get("name") not in MODELS:
        name = spec.get("name") if isinstance(spec, dict) else spec
        raise ConfigError(f"model: unknown model {name!r}; choose from {sorted(MODELS)}")
    builder, required, optional = MODELS[spec["name"]]
    params = _merge({"name": None, **{k: None for k in required}, **optional}, spec, "model")
    _require(params, required, "model")
    try:
        return builder(params, phi)
    except ConfigError:
        raise
    except (ChainError, TypeError, ValueError) as exc:
        raise ConfigError(f"model {spec['name']}: {exc}") from None


def _r_range(n=20):
    return list(range(1, n + 1))


TASKS = {
    "simulate": {},
    "tau-bound": {"r": _r_range()},
    "tau-estimate": {"r": _r_range(), "replications": None},
    "check-dp": {"q": 2.0, "c0": 1.0, "terms": 10_000, "c0_grid": False,
                 "coefficients": None, "phi": None, "expect": None,
                 "specialized": None, "b": 0.0},
    "slln": {"q": 1.5, "n_grid": [1000, 10_000, 100_000], "replications": 200, "ratio_band": None},
    "clt": {"n": 2000, "replications": 1000, "sigma2": None, "t_grid": [0.25, 0.5, 1.0]},
    "sip": {"n": 100_000, "replications": 200, "sigma2": None},
    "density": {"n_joint": 1, "samples": 100_000},
    "approx-error": {"r": [5, 10, 20], "replications": 10_000, "c": 0.0, "c_bar": None,
                     "x0_norm": None},
    "lrv": {"n": 100_000, "methods": ["tac", "batch"], "expected": None},
    "phi-tilde": {"phis": None, "q": 2.0, "x": {"logspace": [-3.0, 3.0, 50]}},
    "orlicz-norm": {"phis": None, "sets": 20, "size": 1000},
    "lipschitz": {"n_pairs": 100, "past_len": None},
}
MODEL_FREE = {"phi-tilde", "orlicz-norm", "check-dp"}
SEEDED = {"simulate", "tau-estimate", "slln", "clt", "sip", "density", "approx-error", "lrv",
          "orlicz-norm", "lipschitz"}


def _task_entry(entry, i):
    if isinstance(entry, str):
        entry = {"task": entry}
    if not isinstance(entry, dict) or entry.get("task") not in TASKS:
        name = entry.get("task") if isinstance(entry, dict) else entry
        raise ConfigError(f"tasks[{i}]: unknown task {name!r}; choose from {sorted(TASKS)}")
    params = dict(entry)
    name = params.pop("task")
    return {"task": name, **_merge(TASKS[name], params, f"tasks[{i}] ({name})")}


def resolve_config(raw, seed=None, output=None):
    """Validate ``raw`` and return the fully resolved config (defaults filled in)."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"config: unknown keys {unknown}")
    if not raw.get("tasks"):
        raise ConfigError("config: 'tasks' must be a nonempty list")
    cfg = {
        "model": copy.deepcopy(raw.get("model")),
        "phi": copy.deepcopy(raw.get("phi")),
        "plan": _merge(PLAN_DEFAULTS, raw.get("plan"), "plan"),
        "tasks": [_task_entry(t, i) for i, t in enumerate(raw["tasks"])],
        "output": output or raw.get("output") or "results",
        "thresholds": _merge(THRESHOLD_DEFAULTS, raw.get("thresholds"), "thresholds"),
    }
    if seed is not None:
        cfg["plan"]["seed"] = int(seed)
    if cfg["phi"] is not None:
        _phi(cfg["phi"], "phi")
    needs_model = [t["task"] for t in cfg["tasks"] if t["task"] not in MODEL_FREE
                   or (t["task"] == "check-dp" and t["coefficients"] is None)]
    if needs_model and cfg["model"] is None:
        raise ConfigError(f"tasks {needs_model} need a 'model' entry")
    if any(t["task"] in SEEDED for t in cfg["tasks"]) and cfg["plan"]["seed"] is None:
        raise ConfigError("plan.seed is required for stochastic tasks (or pass --seed)")
    return cfg


def load_config(path, seed=None, output=None):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return resolve_config(raw, seed=seed, output=output)


# ---------------------------------------------------------------------------
# Tasks


class Context:
    def __init__(self, cfg, threads):
        self.cfg = cfg
        self.threads = threads
        self.phi = _phi(cfg["phi"], "phi") if cfg["phi"] else None
        self.model = build_model(cfg["model"], self.phi) if cfg["model"] else None
        if self.model is not None and self.phi is None:
            self.phi = self.model.phi
        self.phi = self.phi or orlicz.power(2)
        self.seed = cfg["plan"]["seed"]
        self.th = cfg["thresholds"]

    def plan(self):
        pl = self.cfg["plan"]
        return simulate.SimulationPlan(pl["p"], pl["burn_in"], pl["horizon"],
                                       pl["replications"], pl["seed"])


def _phi_list(ctx, specs, where):
    if specs is None:
        return [ctx.phi]
    return [_phi(s, where) for s in specs]


def task_simulate(ctx, t):
    path = simulate.simulate_truncated(ctx.model, ctx.plan(), threads=ctx.threads)
    d = ctx.model.state_dim
    reps, horizon = path.values.shape[:2]
    rows = [(i, k + 1, *path.values[i, k]) for i in range(reps) for k in range(horizon)]
    header = ("replication", "t", *(f"x{j}" for j in range(d)))
    return ExperimentReport("simulate", header, rows, True)


def task_tau_bound(ctx, t):
    mu_1 = ctx.model.mu_1
    rows = [(b.r, b.value, b.argmin_p) for b in bounds.tau_bounds(ctx.model.coeffs, mu_1.value,
                                                                   t["r"])]
    return ExperimentReport("tau-bound", ("r", "bound", "argmin_p"), rows, True,
                            {"mu_1": mu_1.value, "mu_1_provenance": mu_1.provenance})


def task_tau_estimate(ctx, t):
    reps = t["replications"] or ctx.cfg["plan"]["replications"]
    plan = dependence.default_coupling_plan(ctx.model, t["r"], reps, ctx.seed)
    est = dependence.estimate_tau(ctx.model, t["r"], plan, threads=ctx.threads)
    mu_1 = ctx.model.mu_1
    comp = dependence.compare_to_bound(est, ctx.model.coeffs, mu_1.value)
    return ExperimentReport("tau-estimate", comp.HEADER, comp.table(), comp.passed,
                            {"p": plan.p, "burn_in": plan.burn_in, "replications": reps,
                             "mu_1_provenance": mu_1.provenance,
                             "note": "estimates are mean coupling gaps E|X_r - X*_r|"})


def task_check_dp(ctx, t):
    cs = _coeffs(t["coefficients"], "check-dp.coefficients") if t["coefficients"] \
        else ctx.model.coeffs
    phi = _phi(t["phi"], "check-dp.phi") if t["phi"] else ctx.phi
    margin = ctx.th["slope_margin"]
    if t["specialized"]:
        rep = bounds.check_condition_specialized(phi, t["q"], t["specialized"], cs, t["c0"],
                                                 b=t["b"], terms=t["terms"],
                                                 c0_grid=t["c0_grid"], margin=margin)
    else:
        rep = bounds.check_condition_Dp(phi, t["q"], cs, t["c0"], terms=t["terms"],
                                        c0_grid=t["c0_grid"], margin=margin)
    ok = t["expect"] is None or rep.verdict == t["expect"]
    k = np.arange(1, rep.terms + 1)
    rows = list(zip(k.tolist(), rep.log_terms.tolist()))
    return ExperimentReport("check-dp", ("k", "log_term"), rows, ok, {
        "condition": rep.condition, "series_verdict": rep.verdict, "slope": rep.slope,
        "log_partial_sum": rep.log_partial_sum, "c0": rep.c0, "expect": t["expect"],
        "note": rep.note + "; verdict from the log-log slope over the last decade"})


def _limit_report(name, rep):
    return ExperimentReport(name, stats.LimitTheoremReport.HEADER, rep.table(), rep.verdict,
                            rep.info)


def task_slln(ctx, t):
    rep = stats.slln_diagnostic(ctx.model, t["q"], t["n_grid"], t["replications"], ctx.seed,
                                threads=ctx.threads)
    if t["ratio_band"] is not None:
        lo, hi = t["ratio_band"]
        ratios = [v for _, s, v, _ in rep.rows if s == "ratio_to_previous"]
        rep.verdict = rep.verdict and all(lo <= r <= hi for r in ratios)
    return _limit_report("slln", rep)


def task_clt(ctx, t):
    rep = stats.clt_test(ctx.model, t["n"], t["replications"], t["sigma2"], t["t_grid"],
                         ctx.seed, p_threshold=ctx.th["p_value"], threads=ctx.threads)
    return _limit_report("clt", rep)


def task_sip(ctx, t):
    rep = stats.sip_lil_diagnostic(ctx.model, t["sigma2"], t["n"], t["replications"], ctx.seed,
                                   band=tuple(ctx.th["lil_band"]),
                                   quantile=ctx.th["lil_quantile"], threads=ctx.threads)
    return _limit_report("sip", rep)


def task_density(ctx, t):
    rep = stats.density_bound_check(ctx.model, t["n_joint"], t["samples"], seed=ctx.seed,
                                    delta=ctx.th["kde_delta"], threads=ctx.threads)
    return _limit_report("density", rep)


def task_approx_error(ctx, t):
    model, phi = ctx.model, ctx.phi
    x0 = t["x0_norm"]
    prov = "supplied"
    if x0 is None:
        closed = models.stationary_norm(model, phi)
        if closed is not None:
            x0, prov = closed.value, closed.provenance
    c_bar = abs(float(t["c"])) if t["c_bar"] is None else float(t["c_bar"])
    bnd = {r: bounds.approx_error_bound(model, phi, c_bar, r, x0_norm=x0) for r in t["r"]}
    gaps = simulate.approximation_gap(model, t["r"], t["replications"], ctx.seed, c=t["c"],
                                      eps={r: b.value / 100.0 for r, b in bnd.items()},
                                      threads=ctx.threads)
    rows = [(g.r, g.mean_abs_gap, g.ci_halfwidth, bnd[g.r].value,
             g.mean_abs_gap <= bnd[g.r].value) for g in gaps]
    return ExperimentReport("approx-error", ("r", "estimate", "ci", "bound", "verdict"), rows,
                            all(r[-1] for r in rows), {
                                "x0_norm": bnd[t["r"][0]].x0_norm,
                                "x0_provenance": prov if x0 is not None else "bound",
                                "reference": {g.r: [g.reference.p, g.reference.burn_in]
                                              for g in gaps}})


def task_lrv(ctx, t):
    rows = []
    ok = True
    for method in t["methods"]:
        value = stats.estimate_long_run_variance(ctx.model, method, t["n"], ctx.seed)
        passed = True
        if t["expected"] is not None:
            passed = abs(value - t["expected"]) <= ctx.th["lrv_rel_tol"] * abs(t["expected"])
        ok = ok and passed
        rows.append((method, t["n"], value, t["expected"] if t["expected"] is not None else "",
                     passed))
    return ExperimentReport("lrv", ("method", "n", "estimate", "expected", "verdict"), rows, ok)


def _x_grid(spec):
    if isinstance(spec, dict):
        if set(spec) != {"logspace"}:
            raise ConfigError("phi-tilde.x: use a list or {'logspace': [lo, hi, n]}")
        lo, hi, n = spec["logspace"]
        return np.logspace(lo, hi, int(n))
    return np.asarray(spec, dtype=float)


def task_phi_tilde(ctx, t):
    rows = []
    for phi in _phi_list(ctx, t["phis"], "phi-tilde.phis"):
        for x in _x_grid(t["x"]):
            num = orlicz.phi_tilde_q(phi, t["q"], float(x))
            bnd = orlicz.phi_tilde_q_bound(phi, t["q"], float(x))
            rows.append((phi.label, t["q"], float(x), num, bnd, num <= bnd * (1 + 1e-9)))
    return ExperimentReport("phi-tilde", ("phi", "q", "x", "numeric", "bound", "verdict"), rows,
                            all(r[-1] for r in rows))


def phix_samples(seed, i, size):
    """Sample set ``i`` for the ``||X||_1 <= ||X||_Phi`` check: scaled normals
    or lognormals, alternating."""
    gen = rng.stream(seed, rng.STATS, i)
    scale = math.exp(gen.uniform(-2.0, 2.0))
    if i % 2:
        return scale * gen.lognormal(0.0, 1.0, size)
    return scale * gen.standard_normal(size)


def task_orlicz_norm(ctx, t):
    rows = []
    phis = _phi_list(ctx, t["phis"], "orlicz-norm.phis")
    for i in range(t["sets"]):
        x = phix_samples(ctx.seed, i, t["size"])
        n1 = orlicz.estimate_orlicz_norm(x, orlicz.power(1))
        for phi in phis:
            nphi = orlicz.estimate_orlicz_norm(x, phi)
            rows.append((i, phi.label, n1, nphi, n1 <= nphi * (1 + 1e-9)))
    return ExperimentReport("orlicz-norm", ("set", "phi", "norm_1", "norm_phi", "verdict"), rows,
                            all(r[-1] for r in rows))


def task_lipschitz(ctx, t):
    rep = models.empirical_lipschitz_check(ctx.model, ctx.phi, t["n_pairs"], t["past_len"],
                                           seed=ctx.seed, tolerance=ctx.th["lipschitz_tol"])
    rows = [(i, float(r)) for i, r in enumerate(rep.ratios)]
    return ExperimentReport("lipschitz", ("pair", "ratio"), rows, rep.passed,
                            {"worst_ratio": rep.worst_ratio})


RUNNERS = {
    "simulate": task_simulate,
    "tau-bound": task_tau_bound,
    "tau-estimate": task_tau_estimate,
    "check-dp": task_check_dp,
    "slln": task_slln,
    "clt": task_clt,
    "sip": task_sip,
    "density": task_density,
    "approx-error": task_approx_error,
    "lrv": task_lrv,
    "phi-tilde": task_phi_tilde,
    "orlicz-norm": task_orlicz_norm,
    "lipschitz": task_lipschitz,
}


# ---------------------------------------------------------------------------
# Runner


def _csv_names(tasks):
    seen = {}
    names = []
    for t in tasks:
        seen[t["task"]] = seen.get(t["task"], 0) + 1
        n = seen[t["task"]]
        names.append(f"{t['task']}.csv" if n == 1 else f"{t['task']}-{n}.csv")
    return names


def run_config(cfg, threads=1, log=print):
    """Run every task of a resolved config; returns ``(exit_code, manifest)``."""
    start = time.perf_counter()
    out_dir = cfg["output"]
    os.makedirs(out_dir, exist_ok=True)
    manifest = {"version": __version__, "config": cfg, "seed": cfg["plan"]["seed"],
                "threads": threads, "tasks": []}
    code = EXIT_OK
    ctx = Context(cfg, threads)
    for t, csv_name in zip(cfg["tasks"], _csv_names(cfg["tasks"])):
        name = t["task"]
        try:
            rep = RUNNERS[name](ctx, t)
        except ConfigError:
            raise
        except NumericError as exc:
            log(f"error: task {name}: numeric failure: {exc}")
            code = EXIT_NUMERIC
            break
        except CapacityError as exc:
            log(f"error: task {name}: capacity exceeded: {exc}")
            code = EXIT_CAPACITY
            break
        except (ChainError, ValueError) as exc:
            raise ConfigError(f"task {name}: {exc}") from None
        with open(os.path.join(out_dir, csv_name), "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text(rep.header, rep.rows))
        entry = rep.to_dict()
        entry["csv"] = csv_name
        manifest["tasks"].append(entry)
        log(f"{name}: {'pass' if rep.verdict else 'fail'} -> {csv_name}")
        if not rep.verdict and code == EXIT_OK:
            code = EXIT_FAIL
    manifest["passed"] = code == EXIT_OK
    manifest["exit_code"] = code
    manifest["wall_time_s"] = time.perf_counter() - start
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return code, manifest


def validate(cfg, log=print):
    """Parse-and-validate only: the model's contraction and moment verdicts."""
    if cfg["model"] is None:
        log("config ok (no model)")
        return EXIT_OK
    ctx = Context(cfg, 1)
    rep = models.validate_contraction(ctx.model, ctx.phi)
    log(json.dumps(to_jsonable({
        "model": ctx.model.describe(), "a": rep.a,
        "mu_1": [rep.mu_1.value, rep.mu_1.provenance],
        "mu_phi": [rep.mu_phi.value, rep.mu_phi.provenance],
        "contraction": rep.contraction_ok, "moment": rep.moment_ok}), sort_keys=True))
    return EXIT_OK if rep.passed else EXIT_FAIL


def parser():
    ap = argparse.ArgumentParser(prog="infchain", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the tasks of a config")
    val = sub.add_parser("validate", help="parse the config and validate the model")
    for p in (run, val):
        p.add_argument("config")
        p.add_argument("--seed", type=int, default=None, help="override plan.seed")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--output", default=None, help="override the output directory")
    return ap


def main(argv=None):
    args = parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, output=getattr(args, "output", None))
        if args.command == "validate":
            return validate(cfg)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        code, _ = run_config(cfg, threads=args.threads)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
