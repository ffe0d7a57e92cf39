"""Experiment orchestration: configs, seeded trials, result emission.

Every run is a pure function of its `ExperimentConfig`: per-trial RNG
streams are derived from (master seed, n, trial index) through counter
seed sequences, so trials are independent and reproducible in isolation,
and the emitted JSON/CSV bytes are stable across runs.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import bethe, bp, channel, exact, loops, polymer, tanner, zoo
from .errors import CapExceeded, InfeasibleParameters

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "RunResult",
    "run_theorem1_sweep",
    "run_theorem2_check",
    "run_identity_suite",
    "run_bounds_report",
    "run_census",
    "activity_dominance",
    "emit_results",
    "render_json",
    "render_csv",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on; validated up front."""

    l: int = 3
    r: int = 6
    n_list: tuple = (8,)
    p: float | None = None
    h: float | None = None
    trials: int = 10
    seed: int = 0
    kappa: float | None = None
    lam: float | None = None
    zeta0: float = 2.0
    high_noise_slack: float = 2.0
    alpha_t: float = 1.1
    alpha_r: float = 0.9
    beta_s: float = 1.1
    brute_cap: int = loops.BRUTE_EDGE_CAP
    kernel_cap: int = exact.KERNEL_DIM_CAP
    output_cap: int = channel.OUTPUT_ENUM_CAP
    subset_cap: int = tanner.EXPANDER_SUBSET_CAP
    workers: int = 1
    out: str | None = None
    fmt: str = "json"
    units: str = "nats"

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.p is None and self.h is None:
            raise InfeasibleParameters("one of p or h is required")
        if self.p is not None and self.h is not None:
            raise InfeasibleParameters("give either p or h, not both")
        if self.p is not None and not (0.0 < self.p < 1.0):
            raise InfeasibleParameters("p must lie in (0, 1)")
        if self.h is not None and self.h < 0.0:
            raise InfeasibleParameters("h must be nonnegative")
        if self.trials < 0:
            raise InfeasibleParameters("trials must be nonnegative")
        for n in self.n_list:
            if (n * self.l) % self.r or self.r > n:
                raise InfeasibleParameters(f"(l={self.l}, r={self.r}) infeasible at n={n}")
        if self.fmt not in ("json", "csv", "both"):
            raise InfeasibleParameters("format must be json, csv, or both")
        if self.units not in ("nats", "bits"):
            raise InfeasibleParameters("units must be nats or bits")
        polymer.BoundConstants(self.alpha_t, self.alpha_r, self.beta_s)  # range check

    @property
    def field_magnitude(self) -> float:
        return channel.half_llr(self.p) if self.p is not None else float(self.h)

    @property
    def flip_probability(self) -> float:
        if self.p is not None:
            return self.p
        return 1.0 / (1.0 + math.exp(2.0 * self.h))

    def resolved_kappa(self) -> float:
        if self.kappa is not None:
            return self.kappa
        lo, hi = tanner.admissible_kappa_interval(self.l, self.r)
        return 0.5 * (lo + hi)

    def resolved_lambda(self) -> float:
        if self.lam is not None:
            return self.lam
        return tanner.expansion_threshold(self.l, self.r, self.resolved_kappa())

    def bound_constants(self) -> polymer.BoundConstants:
        return polymer.BoundConstants(self.alpha_t, self.alpha_r, self.beta_s)

    # -- flat key=value config files (keys mirror the CLI flags) -------

    _FILE_KEY_TO_ATTR = {
        "l": "l", "r": "r", "n": "n_list", "p": "p", "h": "h",
        "trials": "trials", "seed": "seed", "kappa": "kappa", "lambda": "lam",
        "zeta0": "zeta0", "high_noise_slack": "high_noise_slack",
        "alpha_t": "alpha_t", "alpha_r": "alpha_r", "beta_s": "beta_s",
        "brute_cap": "brute_cap", "kernel_cap": "kernel_cap",
        "output_cap": "output_cap", "subset_cap": "subset_cap",
        "workers": "workers", "out": "out", "format": "fmt", "units": "units",
    }
    _INT_KEYS = ("l", "r", "trials", "seed", "brute_cap", "kernel_cap",
                 "output_cap", "subset_cap", "workers")
    _STR_KEYS = ("out", "format", "units")

    def to_text(self) -> str:
        lines = []
        for key, attr in self._FILE_KEY_TO_ATTR.items():
            val = getattr(self, attr)
            if val is None:
                continue
            if attr == "n_list":
                val = ",".join(str(n) for n in val)
            elif isinstance(val, float):
                val = format(val, ".17g")
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        kwargs: dict = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InfeasibleParameters(f"bad config line: {raw!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            attr = cls._FILE_KEY_TO_ATTR.get(key)
            if attr is None:
                raise InfeasibleParameters(f"unknown config key: {key!r}")
            if attr == "n_list":
                kwargs[attr] = tuple(int(tok) for tok in val.split(",") if tok)
            elif key in cls._INT_KEYS:
                kwargs[attr] = int(val)
            elif key in cls._STR_KEYS:
                kwargs[attr] = val
            else:
                kwargs[attr] = float(val)
        return cls(**kwargs)


@dataclass(frozen=True)
class TrialRecord:
    """One (graph, channel) draw and everything measured on it."""

    n: int
    trial: int
    graph_seed: int
    channel_seed: int
    rank: int
    expander: bool | None
    bp_converged: bool
    bp_iterations: int
    f_bethe: float
    ln_z_per_n: float
    gap1: float
    z_small: float | None = None
    gap2: float | None = None
    q: float | None = None
    num_loops: int | None = None
    num_small_polymers: int | None = None
    seconds: float = 0.0


def _trial_seeds(master: int, n: int, trial: int):
    ss = np.random.SeedSequence((master, n, trial))
    g_state, c_state = ss.spawn(2)
    graph_seed = int(g_state.generate_state(1, np.uint64)[0])
    channel_seed = int(c_state.generate_state(1, np.uint64)[0])
    return graph_seed, channel_seed


def _base_trial(cfg: ExperimentConfig, n: int, trial: int, with_loops: bool):
    t0 = time.perf_counter()
    graph_seed, channel_seed = _trial_seeds(cfg.seed, n, trial)
    g = tanner.generate_regular(n, cfg.l, cfg.r, graph_seed)
    real = channel.sample_bsc(n, cfg.flip_probability, channel_seed)
    h_fields = np.where(real.y == 1, -cfg.field_magnitude, cfg.field_magnitude)
    rank = tanner.gf2_rank(tanner.parity_check_matrix(g))
    lam = cfg.resolved_lambda()
    kappa = cfg.resolved_kappa()
    try:
        expander = tanner.is_expander(g, lam, kappa, subset_cap=cfg.subset_cap).is_expander
    except CapExceeded:
        expander = None
    res = bp.bp_solve(g, h_fields)
    f = bethe.bethe_free_energy(g, h_fields, res.messages)
    ln_z = exact.log_partition(g, h_fields, cap=cfg.kernel_cap) / n
    gap1 = abs(ln_z - f)
    extra: dict = {}
    if with_loops:
        split = polymer.small_polymer_partition(g, res.messages, h_fields, lam)
        z_small = split.z_small
        gap2 = abs(ln_z - f - math.log(z_small) / n) if z_small > 0 else float("inf")
        polys = polymer.polymers_below(g, lam)
        q = polymer.brydges_criterion(
            g, res.messages, h_fields, lam, zeta0=cfg.zeta0, polymers=polys
        )
        extra = dict(
            z_small=z_small,
            gap2=gap2,
            q=q,
            num_loops=int(loops.loop_masks(g).shape[0]),
            num_small_polymers=len(polys),
        )
    return TrialRecord(
        n=n,
        trial=trial,
        graph_seed=graph_seed,
        channel_seed=channel_seed,
        rank=rank,
        expander=expander,
        bp_converged=res.converged,
        bp_iterations=res.iterations,
        f_bethe=f,
        ln_z_per_n=ln_z,
        gap1=gap1,
        seconds=time.perf_counter() - t0,
        **extra,
    )


def _theorem1_trial(args):
    cfg, n, trial = args
    return _base_trial(cfg, n, trial, with_loops=False)


def _theorem2_trial(args):
    cfg, n, trial = args
    return _base_trial(cfg, n, trial, with_loops=True)


def _run_trials(cfg: ExperimentConfig, worker, jobs):
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(worker, jobs))
    return [worker(j) for j in jobs]


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    records: list
    aggregates: dict


def run_theorem1_sweep(cfg: ExperimentConfig) -> RunResult:
    """Per-n statistics of gap1 = |ln Z / n - f_bethe| over random trials."""
    jobs = [(cfg, n, t) for n in cfg.n_list for t in range(cfg.trials)]
    records = _run_trials(cfg, _theorem1_trial, jobs)
    rows = []
    for n in cfg.n_list:
        sub = [rec for rec in records if rec.n == n]
        if not sub:
            continue
        gaps = [rec.gap1 for rec in sub]
        rows.append(
            dict(
                n=n,
                trials=len(sub),
                mean_gap1=float(np.mean(gaps)),
                max_gap1=float(np.max(gaps)),
                expander_fraction=float(
                    np.mean([1.0 if rec.expander else 0.0 for rec in sub])
                ),
            )
        )
    return RunResult(cfg, records, {"per_n": rows})


def run_theorem2_check(cfg: ExperimentConfig) -> RunResult:
    """gap2 = |ln Z / n - f_bethe - ln(Z_p)/n| with the loop pipeline.

    Non-expander trials stay in the raw records but are excluded from the
    conditional aggregates.
    """
    jobs = [(cfg, n, t) for n in cfg.n_list for t in range(cfg.trials)]
    records = _run_trials(cfg, _theorem2_trial, jobs)
    rows = []
    for n in cfg.n_list:
        sub = [rec for rec in records if rec.n == n]
        if not sub:
            continue
        cond = [rec for rec in sub if rec.expander]
        used = cond if cond else sub
        rows.append(
            dict(
                n=n,
                trials=len(sub),
                expander_trials=len(cond),
                mean_gap1=float(np.mean([rec.gap1 for rec in used])),
                mean_gap2=float(np.mean([rec.gap2 for rec in used])),
                gap2_le_gap1_fraction=float(
                    np.mean([1.0 if rec.gap2 <= rec.gap1 + 1e-15 else 0.0 for rec in used])
                ),
            )
        )
    return RunResult(cfg, records, {"per_n": rows})


# -- identity suite -----------------------------------------------------------


def identity_suite_cases(cfg: ExperimentConfig, h_values=(0.0, 0.02, 0.05)):
    """Graphs x field patterns for the loop-identity sweep.

    Biregular families from the config get uniform and randomly mixed
    signs; the irregular oracle graphs use their curated sign vectors
    (degree-2 variables chain messages around cycles, so arbitrary signs
    can push BP off any finite fixed point).
    """
    out = []
    case_idx = 0
    for n in cfg.n_list:
        for t in range(cfg.trials):
            seed, _ = _trial_seeds(cfg.seed, n, t)
            g = tanner.generate_regular(n, cfg.l, cfg.r, seed)
            name = f"regular_{cfg.l}_{cfg.r}_n{n}_t{t}"
            for h in h_values:
                out.append((f"{name}_h{h:g}_uniform", g, np.full(g.n, float(h))))
                if h > 0:
                    rng = np.random.default_rng(
                        np.random.SeedSequence((cfg.seed, case_idx, int(h * 1e6)))
                    )
                    signs = np.where(rng.random(g.n) < 0.5, -1.0, 1.0)
                    out.append((f"{name}_h{h:g}_mixed", g, signs * h))
            case_idx += 1
    for name, g, signs in zoo.oracle_identity_cases():
        for h in h_values:
            out.append((f"oracle_{name}_h{h:g}", g, signs * float(h)))
    return out


def run_identity_suite(cfg: ExperimentConfig, h_values=(0.0, 0.02, 0.05)) -> RunResult:
    """Verify the loop-series identity on every case; returns residuals.

    Cases where BP fails to converge (or saturates the tanh clamp) are
    recorded with a null residual rather than asserted.
    """
    recs = []
    mask_cache: dict = {}
    for name, g, h_fields in identity_suite_cases(cfg, h_values):
        if id(g) not in mask_cache:
            mask_cache[id(g)] = loops.loop_masks(g)
        res = bp.bp_solve(g, h_fields)
        usable = res.converged and not res.messages.clamped
        rep = None
        if usable:
            rep = loops.verify_loop_identity(
                g, h_fields, res.messages, brute_cap=cfg.brute_cap, masks=mask_cache[id(g)]
            )
        recs.append(
            dict(
                case=name,
                n=g.n,
                num_edges=g.num_edges,
                bp_converged=res.converged,
                bp_clamped=res.messages.clamped,
                loop_count=rep.loop_count if rep else None,
                loop_sum=rep.loop_sum if rep else None,
                residual=rep.residual if rep else None,
            )
        )
    residuals = [r["residual"] for r in recs if r["residual"] is not None]
    return RunResult(
        cfg,
        recs,
        {
            "cases": len(recs),
            "verified_cases": len(residuals),
            "max_residual": max(residuals) if residuals else 0.0,
        },
    )


# -- bounds / census ----------------------------------------------------------


def run_bounds_report(cfg: ExperimentConfig) -> RunResult:
    """Activity-bound dominance, polymer bounds, and the convergence
    functional Q on config-sized instances."""
    lam = cfg.resolved_lambda()
    kappa = cfg.resolved_kappa()
    h = cfg.field_magnitude
    consts = cfg.bound_constants()
    try:
        c = polymer.exponent_c(cfg.l, cfg.r, kappa)
    except InfeasibleParameters:
        c = None
    recs = []
    for n in cfg.n_list:
        for t in range(cfg.trials):
            seed, _ = _trial_seeds(cfg.seed, n, t)
            g = tanner.generate_regular(n, cfg.l, cfg.r, seed)
            h_fields = np.full(n, h)
            res = bp.bp_solve(g, h_fields)
            try:
                expander = tanner.is_expander(g, lam, kappa, subset_cap=cfg.subset_cap).is_expander
            except CapExceeded:
                expander = None
            rec: dict = dict(n=n, trial=t, expander=expander, bp_converged=res.converged)
            polys = polymer.polymers_below(g, lam)
            rec["num_small_polymers"] = len(polys)
            rec["q_zeta0"] = polymer.brydges_criterion(
                g, res.messages, h_fields, lam, zeta0=cfg.zeta0, polymers=polys
            )
            rec["q_unit"] = polymer.brydges_criterion(
                g, res.messages, h_fields, lam, zeta0=1.0, polymers=polys
            )
            if c is not None:
                checks = [
                    polymer.check_polymer_bound(pg, res.messages, h_fields, h, c, kappa)
                    for pg in polys
                ]
                rec["polymer_bound_ok"] = all(
                    ch.activity_ok and ch.degree_ok for ch in checks
                )
            if g.num_edges <= cfg.brute_cap:
                dom = activity_dominance(g, res.messages, h_fields, h, consts)
                rec["dominance_ok_fraction"] = dom["ok_fraction"]
                rec["dominance_worst_excess"] = dom["worst_excess"]
                census = polymer.type_census(g, lam=lam, h=h, consts=consts)
                rec["markov_rhs"] = census.markov_rhs
            recs.append(rec)
    return RunResult(cfg, recs, {"instances": len(recs)})


def activity_dominance(g, msgs, h_fields, h: float, consts=None) -> dict:
    """Fraction of enumerated loops with |K(g)| within its type bound."""
    from . import _kernels

    consts = consts or polymer.BoundConstants()
    ctx = loops.activity_context(g, h_fields, msgs)
    masks = loops.loop_masks(g)
    w = loops.loop_weight_array(ctx, masks)
    nonempty = masks != 0
    l_eff = g.l if isinstance(g, tanner.TannerGraph) else max(g.max_var_degree, 2)
    r_eff = g.r if isinstance(g, tanner.TannerGraph) else max(g.max_check_degree, 2)
    tc = _kernels.loop_type_counts(
        np.asarray(masks[nonempty], dtype=np.uint64),
        g.edge_var, g.edge_check, g.n, g.m, l_eff, r_eff,
    )
    # bound each distinct type once; loops of one type share the bound
    uniq, inverse = np.unique(tc, axis=0, return_inverse=True)
    bounds = np.empty(uniq.shape[0])
    for u, row in enumerate(uniq):
        pt = polymer.PolymerType(
            l_eff, r_eff,
            tuple(int(x) for x in row[: l_eff - 1]),
            tuple(int(x) for x in row[l_eff - 1 :]),
        )
        bounds[u] = polymer.activity_bound(pt, h, consts)
    per_loop_bound = bounds[inverse]
    absw = np.abs(w[nonempty])
    ok = absw <= per_loop_bound * (1.0 + 1e-12)
    worst = float(np.max(absw - per_loop_bound, initial=-math.inf))
    return {
        "ok_fraction": float(np.mean(ok)) if ok.size else 1.0,
        "worst_excess": worst,
        "loops_checked": int(ok.size),
    }


def run_census(cfg: ExperimentConfig) -> RunResult:
    """Exact per-type loop census of one instance per configured n."""
    lam = cfg.resolved_lambda()
    h = cfg.field_magnitude
    consts = cfg.bound_constants()
    recs = []
    for n in cfg.n_list:
        seed, _ = _trial_seeds(cfg.seed, n, 0)
        g = tanner.generate_regular(n, cfg.l, cfg.r, seed)
        rep = polymer.type_census(g, lam=lam, h=h, consts=consts)
        recs.append(
            dict(
                n=n,
                types={pt.key(): cnt for pt, cnt in sorted(rep.counts.items(), key=lambda kv: kv[0].key())},
                delta_types={pt.key(): cnt for pt, cnt in sorted(rep.delta_counts.items(), key=lambda kv: kv[0].key())},
                markov_rhs=rep.markov_rhs,
                total_nonempty=sum(rep.counts.values()),
            )
        )
    return RunResult(cfg, recs, {"instances": len(recs)})


# -- emission -----------------------------------------------------------------


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _to_jsonable(obj, units: str):
    scale_keys = {"f_bethe", "ln_z_per_n", "gap1", "gap2", "mean_gap1", "max_gap1",
                  "mean_gap2", "max_residual", "residual"}
    if isinstance(obj, TrialRecord):
        obj = asdict(obj)
        obj.pop("seconds", None)  # wall time is diagnostics; emitted bytes stay seed-deterministic
    if isinstance(obj, ExperimentConfig):
        obj = asdict(obj)
        obj["n_list"] = list(obj["n_list"])
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            if units == "bits" and k in scale_keys and isinstance(v, float):
                v = v / LN2
            out[str(k)] = _to_jsonable(v, units)
        return out
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v, units) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(buf, obj, indent=0):
    pad = "  " * indent
    if obj is None:
        buf.write("null")
    elif isinstance(obj, bool):
        buf.write("true" if obj else "false")
    elif isinstance(obj, int):
        buf.write(str(obj))
    elif isinstance(obj, float):
        buf.write(_format_float(obj))
    elif isinstance(obj, str):
        import json as _json

        buf.write(_json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            buf.write("{}")
            return
        buf.write("{\n")
        items = sorted(obj.items())
        for idx, (k, v) in enumerate(items):
            import json as _json

            buf.write("  " * (indent + 1) + _json.dumps(str(k)) + ": ")
            _write_json(buf, v, indent + 1)
            buf.write(",\n" if idx + 1 < len(items) else "\n")
        buf.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            buf.write("[]")
            return
        buf.write("[\n")
        for idx, v in enumerate(obj):
            buf.write("  " * (indent + 1))
            _write_json(buf, v, indent + 1)
            buf.write(",\n" if idx + 1 < len(obj) else "\n")
        buf.write(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def render_json(result: RunResult) -> bytes:
    """Stable JSON bytes: sorted keys, 17-significant-digit decimals."""
    payload = {
        "config": _to_jsonable(result.config, result.config.units),
        "records": _to_jsonable(result.records, result.config.units),
        "aggregates": _to_jsonable(result.aggregates, result.config.units),
    }
    buf = io.StringIO()
    _write_json(buf, payload)
    buf.write("\n")
    return buf.getvalue().encode("ascii")


def render_csv(result: RunResult) -> bytes:
    """Flat per-record CSV; one row per record, stable column order."""
    records = [_to_jsonable(r, result.config.units) for r in result.records]
    if not records:
        return b""
    cols = sorted({k for rec in records for k in rec})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for rec in records:
        row = []
        for c in cols:
            v = rec.get(c)
            if isinstance(v, float):
                v = _format_float(v)
            elif isinstance(v, dict):
                v = ";".join(f"{k}:{val}" for k, val in sorted(v.items()))
            row.append(v)
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def emit_results(result: RunResult, out_path: str, fmt: str | None = None) -> list:
    """Write JSON and/or CSV next to `out_path` (extension appended).

    Raises OSError with path context on I/O failure.
    """
    fmt = fmt or result.config.fmt
    written = []
    try:
        if fmt in ("json", "both"):
            path = out_path + ".json"
            with open(path, "wb") as fh:
                fh.write(render_json(result))
            written.append(path)
        if fmt in ("csv", "both"):
            path = out_path + ".csv"
            with open(path, "wb") as fh:
                fh.write(render_csv(result))
            written.append(path)
    except OSError as exc:
        raise OSError(f"failed writing results near {out_path!r}: {exc}") from exc
    return written
