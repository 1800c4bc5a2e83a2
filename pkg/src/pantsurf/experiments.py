"""Experiment suites behind the command line: each returns plain rows.

Every trial draws its randomness from ``derive_seed(master, ...)`` so that
adding trials never changes the earlier ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .exploration import (badstep_stats, merge_experiment, sqrt_log_quota, subcritical_quota,
                          audit)
from .metric import MetricGraph, PantsComplex, diameter_estimate
from .pants import DEFAULT_WORD_CAP, collar_width
from .surface import WeightLaw, connectivity, random_surface
from .tree import TreeSurface, check_snapshot, estimate_alpha, grow_ball

L_SWEEP = (0.5, 1.0, 2.0, 4.0)


@dataclass
class Table:
    """Column names, rows and a dict of named pass/fail checks."""

    header: list
    rows: list
    checks: dict
    seeds: list
    info: dict = field(default_factory=dict)


def l_sweep_laws(twist: str = "uniform"):
    """Fixed cuff length 2l for each l of the sweep."""
    return [WeightLaw.point_mass(2 * l, twist) for l in L_SWEEP]


# --- growth ------------------------------------------------------------------------

def growth_experiment(law: WeightLaw, R_grid, trials: int, seed: int, m: int = 16,
                      word_cap: int = DEFAULT_WORD_CAP) -> Table:
    """Ball growth per trial tree and radius, with the snapshot identities checked."""
    rows, seeds = [], []
    violations = dict.fromkeys(["sphere_ball", "sphere_subset", "antichain", "U_in_sphere",
                                "ancestor_chain", "deterministic"], 0)
    for t in range(trials):
        s = _rng.derive_seed(seed, t)
        seeds.append(s)
        tree = TreeSurface(law, s)
        for R in R_grid:
            snap = grow_ball(tree, float(R), m=m, word_cap=word_cap)
            flags = check_snapshot(snap, law)
            for k, ok in flags.items():
                violations[k] += not ok
            rows.append((float(R), t, snap.N_R, snap.ball_size, len(snap.U_R),
                         math.log(snap.N_R) / R if snap.N_R > 0 and R > 0 else math.nan))
    checks = {f"no_{k}_violation": v == 0 for k, v in violations.items()}
    header = ["R", "trial", "N_R", "ball_size", "U_R", "log_N_over_R"]
    info = {f"{k}_violations": v for k, v in violations.items()}
    return Table(header, rows, checks, seeds, info)


def concentration_histogram(table: Table, bins: int = 20) -> Table:
    """Histogram of ln N_R / R per radius, on a common bin grid."""
    arr = np.array([(r[0], r[5]) for r in table.rows], dtype=float)
    vals = arr[:, 1][np.isfinite(arr[:, 1])]
    edges = np.linspace(vals.min(), vals.max(), bins + 1) if vals.size else np.linspace(0, 1, bins + 1)
    rows = []
    sds = []
    for R in np.unique(arr[:, 0]):
        v = arr[arr[:, 0] == R, 1]
        v = v[np.isfinite(v)]
        counts, _ = np.histogram(v, bins=edges)
        sds.append(float(np.std(v, ddof=1)) if v.size > 1 else math.nan)
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            rows.append((float(R), float(lo), float(hi), int(c), sds[-1]))
    checks = {"sd_strictly_decreasing": bool(np.all(np.diff(sds) < 0))}
    return Table(["R", "bin_lo", "bin_hi", "count", "sd_log_N_over_R"], rows, checks, [])


# --- alpha --------------------------------------------------------------------------

def alpha_experiment(laws, R_grid, trials: int, seed: int, m: int = 16,
                     word_cap: int = DEFAULT_WORD_CAP) -> Table:
    """Sigma_R grid and alpha_hat per law, with the bracket and trend checks."""
    rows, seeds = [], []
    alphas, in_bracket, truncated = [], True, False
    for i, law in enumerate(laws):
        s = _rng.derive_seed(seed, i)
        seeds.append(s)
        est = estimate_alpha(law, R_grid, trials, s, m=m, word_cap=word_cap)
        lo, hi = est.bracket
        ok = lo <= est.alpha_hat <= hi
        in_bracket &= ok
        truncated |= est.truncated
        alphas.append(est.alpha_hat)
        for R, mean_n, sig, ml in zip(est.R_grid, est.mean_N, est.sigma, est.mean_log):
            rows.append((law.descriptor(), float(R), float(mean_n), float(sig), float(ml),
                         est.alpha_hat, est.band, lo, hi, est.ci_low, est.ci_high,
                         int(ok), int(est.truncated)))
    checks = {"alpha_in_bracket": bool(in_bracket), "complete_grid": not truncated}
    if len(laws) > 1:
        checks["alpha_strictly_increasing"] = bool(np.all(np.diff(alphas) > 0))
    header = ["law", "R", "mean_N_R", "sigma_R", "mean_log_N_over_R", "alpha_hat", "band",
              "bracket_lo", "bracket_hi", "ci_low", "ci_high", "in_bracket", "truncated"]
    info = {f"alpha_hat[{law.descriptor()}]": a for law, a in zip(laws, alphas)}
    return Table(header, rows, checks, seeds, info)


# --- diameter ------------------------------------------------------------------------

def fit_slope(genus, values):
    """Least-squares slope of values against ln g."""
    x = np.log(np.asarray(genus, dtype=float))
    return float(np.polyfit(x, np.asarray(values, dtype=float), 1)[0])


def diameter_trials(genus: int, law: WeightLaw, trials: int, seed: int, m: int = 16,
                    word_cap: int = DEFAULT_WORD_CAP, max_draws: int | None = None):
    """Diameter brackets of ``trials`` connected random surfaces.

    Disconnected draws are skipped and counted.  Returns (rows, disconnected,
    seeds) with rows (genus, trial, seed, lower, upper).
    """
    rows, seeds, disconnected, draw = [], [], 0, 0
    max_draws = max_draws or 10 * trials
    while len(rows) < trials and draw < max_draws:
        s = _rng.derive_seed(seed, genus, draw)
        draw += 1
        surf = random_surface(genus, law, s)
        if not connectivity(surf)[0]:
            disconnected += 1
            continue
        mg = MetricGraph(PantsComplex.from_surface(surf), m=m, word_cap=word_cap)
        lo, up = diameter_estimate(mg)
        seeds.append(s)
        rows.append((genus, len(rows), s, lo, up))
    return rows, disconnected, seeds


def diameter_experiment(genus_list, law: WeightLaw, trials: int, seed: int, m: int = 16,
                        word_cap: int = DEFAULT_WORD_CAP, alpha_hat: float | None = None,
                        tolerance: float = 0.25):
    """Per-genus diameter statistics and the slope against ln g.

    Returns (trial table, summary table, slope info dict).
    """
    genus_list = sorted(genus_list)
    trial_rows, summary, seeds = [], [], []
    means_up, means_lo = [], []
    for g in genus_list:
        rows, disc, s = diameter_trials(g, law, trials, seed, m, word_cap)
        trial_rows += rows
        seeds += s
        lo = np.array([r[3] for r in rows])
        up = np.array([r[4] for r in rows])
        means_up.append(up.mean())
        means_lo.append(lo.mean())
        summary.append((g, len(rows), disc, lo.mean(), up.mean(), lo.min(), up.max(),
                        math.log(g)))
    info = {"slope_upper": fit_slope(genus_list, means_up),
            "slope_lower": fit_slope(genus_list, means_lo)}
    checks = {"mean_diameter_increasing": bool(np.all(np.diff(means_up) > 0))}
    if alpha_hat is not None:
        target = 1.0 / alpha_hat
        info["inverse_alpha"] = target
        mid = 0.5 * (info["slope_upper"] + info["slope_lower"])
        info["slope"] = mid
        info["relative_error"] = abs(mid - target) / target
        checks["slope_within_tolerance"] = bool(info["relative_error"] <= tolerance)
    t1 = Table(["genus", "trial", "seed", "diam_lower", "diam_upper"], trial_rows, checks, seeds)
    t2 = Table(["genus", "trials", "disconnected", "mean_lower", "mean_upper", "min_lower",
                "max_upper", "ln_genus"], summary, checks, [])
    return t1, t2, info


def collar_surface(short: float = 0.01, other: float = 2.0, seed: int = 0):
    """Genus-2 complex whose two pants meet along one separating cuff of length ``short``.

    Each pants has its other two cuffs glued to each other; twists are
    uniform from ``seed``.
    """
    tw = _rng.generator(seed, 0).random(3) * 2 * math.pi
    cx = PantsComplex()
    p = cx.add_pants((short / 2, other / 2, other / 2))
    q = cx.add_pants((short / 2, other / 2, other / 2))
    cx.glue(p, 1, q, 1, short, tw[0])
    cx.glue(p, 2, p, 3, other, tw[1])
    cx.glue(q, 2, q, 3, other, tw[2])
    return cx


def collar_experiment(instances: int, seed: int, short: float = 0.01, m: int = 16,
                      word_cap: int = DEFAULT_WORD_CAP) -> Table:
    bound = 2 * collar_width(short)
    rows, seeds, ok = [], [], True
    for i in range(instances):
        s = _rng.derive_seed(seed, i)
        seeds.append(s)
        lo, up = diameter_estimate(MetricGraph(collar_surface(short, seed=s), m=m, word_cap=word_cap))
        ok &= lo >= bound
        rows.append((i, s, short, lo, up, bound, int(lo >= bound)))
    return Table(["instance", "seed", "short_cuff", "diam_lower", "diam_upper", "collar_bound", "ok"],
                 rows, {"collar_bound_holds": bool(ok)}, seeds)


# --- exploration -------------------------------------------------------------------------

def explore_experiment(genus_list, law: WeightLaw, trials: int, seed: int, beta: float = 0.4,
                       k: int = 11, m: int = 4, merge_trials: int | None = None) -> Table:
    """Bad-step checkpoint table and merge fractions per genus."""
    rows = badstep_stats(genus_list, law, trials, beta, k, seed, m=m)
    out = []
    checks = {}
    for r in rows:
        g = r["genus"]
        mt = merge_trials or trials
        hi = merge_experiment(g, law, sqrt_log_quota(g), mt, _rng.derive_seed(seed, g, 1), m=m)
        lo = merge_experiment(g, law, subcritical_quota(g), mt, _rng.derive_seed(seed, g, 2), m=m)
        out.append((g, trials, beta, k, r["violation_first_steps"], r["violation_before_subcritical"],
                    r["violation_before_sqrt_log"], r["mean_first_steps"],
                    r["mean_before_subcritical"], r["mean_before_sqrt_log"], r["premature"],
                    r["first_step_bad_rate"], r["first_step_bad_expected"],
                    hi["merge_fraction"], lo["merge_fraction"]))
        checks[f"g{g}_violations_at_most_5pct"] = max(
            r["violation_first_steps"], r["violation_before_subcritical"],
            r["violation_before_sqrt_log"]) <= 0.05
        checks[f"g{g}_merge_dichotomy"] = hi["merge_fraction"] >= 0.9 and lo["merge_fraction"] <= 0.3
    header = ["genus", "trials", "beta", "k", "viol_first_steps", "viol_before_subcritical",
              "viol_before_sqrt_log", "mean_bad_first_steps", "mean_bad_before_subcritical",
              "mean_bad_before_sqrt_log", "premature", "first_step_bad_rate",
              "first_step_bad_expected", "merge_fraction_sqrt_log", "merge_fraction_subcritical"]
    return Table(header, out, checks, [_rng.derive_seed(seed, g) for g in genus_list])


def invariant_experiment(genus: int, law: WeightLaw, trials: int, seed: int, m: int = 8) -> Table:
    """Exploration invariants over full explorations."""
    rows, seeds = [], []
    total = 0
    for t in range(trials):
        s = _rng.derive_seed(seed, t)
        seeds.append(s)
        st, viol = audit(genus, law, s, m=m)
        total += sum(viol.values())
        rows.append((t, s, st.n_steps, st.n_bad, viol["monotone"], viol["ledger"],
                     viol["final_below_dplus"], viol["breadth"]))
    header = ["trial", "seed", "steps", "bad_steps", "monotone_viol", "ledger_viol",
              "final_viol", "breadth_viol"]
    return Table(header, rows, {"no_invariant_violation": total == 0}, seeds)


__all__ = ["Table", "L_SWEEP", "l_sweep_laws", "growth_experiment", "concentration_histogram",
           "alpha_experiment", "fit_slope", "diameter_trials", "diameter_experiment",
           "collar_surface", "collar_experiment", "explore_experiment", "invariant_experiment"]
