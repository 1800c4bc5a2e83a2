"""End-to-end acceptance checks, one test per numbered criterion."""

import math

import numpy as np
import pytest

from oracles import doubled_hexagon_distance
from pantsurf import _rng
from pantsurf.exploration import (badstep_stats, merge_experiment, sqrt_log_quota,
                                  subcritical_quota)
from pantsurf.experiments import (alpha_experiment, collar_experiment, diameter_experiment,
                                  invariant_experiment, l_sweep_laws)
from pantsurf.pants import (BoundaryPoint, HexagonChart, PantsShape, certified_cap, pants_bounds,
                            point_distance, seam_length)
from pantsurf.surface import WeightLaw
from pantsurf.systole import systole_probe
from pantsurf.tree import (TreeSurface, check_multiplicativity, check_snapshot, estimate_alpha,
                           good_count, grow_ball, markov_independence_test, sphere_counts)

SEED = 20240601
pytestmark = pytest.mark.acceptance


def test_01_fixed_point(criterion):
    c = math.log(2 + math.sqrt(3))
    err = abs(seam_length(PantsShape((c, c, c)), 1, 2) - c)
    assert criterion(1, "seam fixed point", err < 1e-9, f"error={err:.2e}")


def test_02_bounds_inequalities(criterion):
    rng = _rng.generator(SEED, 2)
    bad = 0
    for a, b in rng.uniform(0.1, 4.0, size=(1000, 2)):
        lo, hi = min(a, b), max(a, b)
        bd = pants_bounds(lo, hi)
        ok = (bd.delta_minus >= math.exp(-2 * hi)
              and bd.delta_plus <= 2 * hi + math.log(4) - 2 * math.log(lo)
              and max(hi, bd.delta_plus) <= bd.Delta_plus <= 8 * max(hi, bd.delta_plus)
              and math.log(bd.Delta_plus / bd.delta_minus + 1) <= 4 * bd.Delta_plus)
        bad += not ok
    assert criterion(2, "pants bound inequalities", bad == 0, f"violations={bad}/1000")


def test_03_intra_pants_oracle(criterion):
    rng = _rng.generator(SEED, 3)
    bad, worst = 0, 0.0
    for _ in range(100):
        h = tuple(rng.uniform(0.4, 2.5, 3))
        shape = PantsShape(h)
        ch = HexagonChart(shape)
        p = BoundaryPoint(int(rng.integers(1, 4)), float(rng.uniform(0, 2 * h[0] + 2 * h[1])))
        q = BoundaryPoint(int(rng.integers(1, 4)), float(rng.uniform(0, 2 * h[0] + 2 * h[1])))
        p, q = p.reduced(shape), q.reduced(shape)
        cap = min(certified_cap(pants_bounds(min(h), max(h)).Delta_plus, shape), 14)
        d, _ = point_distance(shape, p, q, word_cap=cap, chart=ch)
        ref, spacing = doubled_hexagon_distance(ch, p, q, n=200)
        worst = max(worst, abs(d - ref) / spacing)
        bad += abs(d - ref) > 2 * spacing
    assert criterion(3, "point_distance vs doubled-hexagon grid", bad == 0,
                     f"violations={bad}/100 worst={worst:.3f} spacings")


MIXED_LAWS = [WeightLaw.point_mass(2.0), WeightLaw.point_mass(4.0, "zero"),
              WeightLaw("uniform", 1.0, 4.0, "uniform"), WeightLaw("log_uniform", 1.0, 4.0, "uniform")]


@pytest.fixture(scope="module")
def snapshot_checks():
    rng = _rng.generator(SEED, 4)
    out = []
    for i in range(500):
        law = MIXED_LAWS[i % len(MIXED_LAWS)]
        R = float(rng.uniform(0.5, 12.0))
        snap = grow_ball(TreeSurface(law, _rng.derive_seed(SEED, 4, i)), R)
        out.append(check_snapshot(snap, law))
    return out


def test_04_snapshot_identities(criterion, snapshot_checks):
    keys = ["sphere_ball", "sphere_subset", "antichain", "U_in_sphere", "ancestor_chain"]
    bad = {k: sum(not c[k] for c in snapshot_checks) for k in keys}
    assert criterion(4, "combinatorial snapshot identities", sum(bad.values()) == 0,
                     f"violations={bad} over {len(snapshot_checks)} snapshots")


def test_05_deterministic_growth(criterion, snapshot_checks):
    bad = sum(not c["deterministic"] for c in snapshot_checks)
    assert criterion(5, "deterministic growth bounds", bad == 0, f"violations={bad}/500")


def test_06_multiplicativity(criterion):
    rng = _rng.generator(SEED, 6)
    bad = 0
    for i in range(200):
        l = float(rng.uniform(0.5, 2.0))
        R = float(rng.uniform(1.0, 7.0))
        r = float(rng.uniform(0.5, 4.0))
        rep = check_multiplicativity(TreeSurface(WeightLaw.point_mass(2 * l), _rng.derive_seed(SEED, 6, i)),
                                     R, r)
        bad += not (rep.sub_ok and rep.super_ok and rep.chain_ok)
    assert criterion(6, "sub/supermultiplicativity", bad == 0, f"violations={bad}/200")


def test_07_injectivity_radius(criterion):
    bad, worst = 0, math.inf
    for i in range(50):
        l = (1.0, 1.5)[i % 2]
        law = WeightLaw.point_mass(2 * l)
        rep = systole_probe(TreeSurface(law, _rng.derive_seed(SEED, 7, i), "full"),
                            3 * law.bounds().Delta_plus, m=32)
        ok = abs(rep.cuff_loop - 2 * l) <= 2 * rep.h and rep.shortest >= 2 * l - 4 * rep.h
        worst = min(worst, rep.shortest - (2 * l - 4 * rep.h))
        bad += not ok
    assert criterion(7, "cuffs are the shortest loops", bad == 0,
                     f"violations={bad}/50 min margin={worst:.4f}")


def test_08_good_set(criterion):
    l = 4.0
    good, total = [], []
    for t in range(200):
        g, n = good_count(TreeSurface(WeightLaw.point_mass(2 * l), _rng.derive_seed(SEED, 8, t)), 10.0)
        good.append(g)
        total.append(n)
    diff = np.array(good) - np.array(total) / (2 * l)
    se = diff.std(ddof=1) / math.sqrt(len(diff))
    ok = diff.mean() >= -2 * se
    assert criterion(8, "good-set inequality", ok,
                     f"mean Good={np.mean(good):.1f} mean N/(2l)={np.mean(total) / (2 * l):.1f} se={se:.2f}")


def test_09_alpha(criterion):
    t = alpha_experiment(l_sweep_laws(), [4.0, 8.0, 12.0], 30, _rng.derive_seed(SEED, 9))
    a4 = t.info["alpha_hat[point_mass:8.0/uniform]"]
    ok = t.checks["alpha_in_bracket"] and t.checks["alpha_strictly_increasing"] and a4 >= 0.6
    alphas = ", ".join(f"{v:.3f}" for v in t.info.values())
    assert criterion(9, "alpha bracket and trend", ok, f"alpha_hat=({alphas})")


def test_10_concentration(criterion):
    R_grid = [4.0, 8.0, 12.0]
    counts = sphere_counts(WeightLaw.point_mass(4.0), R_grid, 300, _rng.derive_seed(SEED, 10))
    sd = (np.log(counts) / np.array(R_grid)).std(axis=0, ddof=1)
    ok = bool(np.all(np.diff(sd) < 0))
    assert criterion(10, "concentration of ln N_R / R", ok,
                     "sd=(" + ", ".join(f"{s:.4f}" for s in sd) + ")")


def test_11_markov(criterion):
    rep = markov_independence_test(WeightLaw.point_mass(4.0), 6.0, 4.0, 200, _rng.derive_seed(SEED, 11))
    ok = rep.chi2_p > 0.01 and rep.ks_p > 0.01
    assert criterion(11, "Markov independence", ok,
                     f"chi2 p={rep.chi2_p:.3f} ks p={rep.ks_p:.3f} used={rep.trials_used}")


def test_12_exploration_invariants(criterion):
    t = invariant_experiment(22, WeightLaw.point_mass(2.0), 100, _rng.derive_seed(SEED, 12), m=8)
    viol = np.array([r[4:] for r in t.rows]).sum(axis=0)
    assert criterion(12, "exploration invariants", t.checks["no_invariant_violation"],
                     f"monotone/ledger/final/breadth violations={viol.tolist()}")


def test_13_bad_steps(criterion):
    (row,) = badstep_stats([82], WeightLaw.point_mass(2.0), 500, 0.4, 11, _rng.derive_seed(SEED, 13))
    fr = [row["violation_first_steps"], row["violation_before_subcritical"],
          row["violation_before_sqrt_log"]]
    assert criterion(13, "bad-step checkpoints", max(fr) <= 0.05, f"violation fractions={fr}")


def test_14_merge_dichotomy(criterion):
    g, law = 82, WeightLaw.point_mass(2.0)
    hi = merge_experiment(g, law, sqrt_log_quota(g), 200, _rng.derive_seed(SEED, 14, 1))
    lo = merge_experiment(g, law, subcritical_quota(g), 200, _rng.derive_seed(SEED, 14, 2))
    ok = hi["merge_fraction"] >= 0.9 and lo["merge_fraction"] <= 0.3
    assert criterion(14, "merge dichotomy", ok,
                     f"at sqrt(g)ln g: {hi['merge_fraction']:.3f} subcritical: {lo['merge_fraction']:.3f}")


def test_15_diameter_scaling(criterion):
    law = WeightLaw.point_mass(2.0)
    seed = _rng.derive_seed(SEED, 15)
    est = estimate_alpha(law, [4.0, 8.0, 12.0], 30, seed)
    _, _, info = diameter_experiment([12, 22, 42, 82], law, 20, seed, alpha_hat=est.alpha_hat)
    ok = info["relative_error"] <= 0.25
    assert criterion(15, "diameter slope vs 1/alpha_hat", ok,
                     f"slope={info['slope']:.3f} (upper {info['slope_upper']:.3f}, "
                     f"lower {info['slope_lower']:.3f}) 1/alpha_hat={info['inverse_alpha']:.3f} "
                     f"rel.err={info['relative_error']:.3f}")


def test_16_collar(criterion):
    t = collar_experiment(10, _rng.derive_seed(SEED, 16))
    lows = [r[3] for r in t.rows]
    assert criterion(16, "collar diameter bound", t.checks["collar_bound_holds"],
                     f"min lower={min(lows):.3f} bound={t.rows[0][5]:.3f}")
