"""Acceptance gate: one test per headline criterion, each printing a
single PASS/FAIL line (visible with -s; the test outcome mirrors it).

The protocol criteria (1-3) run with an explicit tau=8 rather than the
default walk-count formula: the success target is 90% and the default
formula's walk count exists to push the failure probability far below
that, at ~25x the runtime. tau stays a declared protocol parameter, so
this is a parameter choice, not a protocol change.
"""

import time

import numpy as np

from edsketch import experiments, instances
from edsketch.protocol import (
    ErrorReport,
    ProtocolParams,
    Result,
    default_tau,
    encode_party,
    referee_decode,
)
from edsketch.recovery import (
    FAIL,
    DiffSketch,
    SketchSalts,
    TupleKey,
    sketch_decode,
    sketch_subtract,
)
from edsketch.strings import apply_script, edit_distance

SEED = 0x5EED
N = 2048
SIGMA = 4
DELTA = 0.1
KS = (2, 4, 8)
TRIALS = 200
TAU = 8

# Results collected by criteria 1 and 2 and replayed by criterion 3.
_RESULTS = []


def _line(name, ok, detail):
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def _run(x, y, k, seed):
    params = ProtocolParams(N, k, DELTA, seed, tau=TAU)
    return referee_decode(encode_party(x, params), encode_party(y, params))


def test_criterion_01_end_to_end_exactness():
    t0 = time.time()
    rates = {}
    for k in KS:
        rng = np.random.default_rng(SEED + k)
        good = 0
        for t in range(TRIALS):
            pair = experiments._planted_exact(N, SIGMA, k, rng)
            verdict = _run(pair.x, pair.y, k, SEED + 1000 * k + t)
            if isinstance(verdict, Result):
                _RESULTS.append((pair.x, pair.y, verdict))
                good += (verdict.distance == k
                         and apply_script(pair.x, verdict.script) == pair.y)
        rates[k] = good / TRIALS
    elapsed = time.time() - t0
    ok = all(r >= 0.9 for r in rates.values()) and elapsed <= 600
    _line("criterion 1 end-to-end exactness", ok,
          f"success by k {rates}, {elapsed:.0f}s of 600s budget")


def test_criterion_02_error_soundness():
    rates = {}
    for k in KS:
        rng = np.random.default_rng(SEED + 50 + k)
        reports = 0
        for t in range(TRIALS):
            pair = instances.independent(N, SIGMA, rng)
            verdict = _run(pair.x, pair.y, k, SEED + 2000 * k + t)
            if isinstance(verdict, ErrorReport):
                reports += 1
            else:
                _RESULTS.append((pair.x, pair.y, verdict))
        rates[k] = reports / TRIALS
    ok = all(r >= 0.9 for r in rates.values())
    _line("criterion 2 error soundness", ok, f"error rate by k {rates}")


def test_criterion_03_unconditional_validity():
    pool = _RESULTS
    if not pool:  # standalone run: regenerate a small batch
        rng = np.random.default_rng(SEED)
        pool = []
        for t in range(20):
            pair = experiments._planted_exact(N, SIGMA, 4, rng)
            verdict = _run(pair.x, pair.y, 4, SEED + t)
            if isinstance(verdict, Result):
                pool.append((pair.x, pair.y, verdict))
    bad = 0
    for x, y, res in pool:
        if len(res.script) != res.distance or apply_script(x, res.script) != y:
            bad += 1
    _line("criterion 3 unconditional validity", bad == 0,
          f"{bad} invalid of {len(pool)} Results, zero tolerated")


def _random_key_set(count, rng):
    out = set()
    while len(out) < count:
        out.add(TupleKey(int(rng.integers(0, 256)), int(rng.integers(0, 1 << 32)),
                         int(rng.integers(0, 1 << 62)), int(rng.integers(0, 1 << 32)),
                         int(rng.integers(0, 2)), int(rng.integers(0, 2))))
    return out


def test_criterion_04_sparse_recovery_contract():
    delta = 16
    salts = SketchSalts.for_walk(SEED, 0)

    def sketch_of(keys):
        sk = DiffSketch(delta, salts)
        for key in keys:
            sk.insert(key)
        return sk

    rng = np.random.default_rng(SEED + 4)
    exact = 0
    for t in range(1000):
        diff_size = int(rng.integers(0, delta + 1))
        split = int(rng.integers(0, diff_size + 1))
        keys = list(_random_key_set(diff_size + 30, rng))
        only_a, only_b = set(keys[:split]), set(keys[split:diff_size])
        common = set(keys[diff_size:])
        out = sketch_decode(sketch_subtract(sketch_of(common | only_a),
                                            sketch_of(common | only_b)))
        if out is not FAIL:
            exact += ({k for k, s in out if s == 1} == only_a
                      and {k for k, s in out if s == -1} == only_b)
    fails = 0
    overload_trials = 10_000
    for t in range(overload_trials):
        keys = _random_key_set(4 * delta, rng)
        out = sketch_decode(sketch_subtract(sketch_of(keys), sketch_of(set())))
        fails += out is FAIL
    fail_rate = fails / overload_trials
    ok = exact == 1000 and fail_rate >= 0.99
    _line("criterion 4 sparse recovery contract", ok,
          f"{exact}/1000 exact, overload fail rate {fail_rate:.4f} >= 0.99")


def test_criterion_05_progress_tail():
    rep = experiments.cgk_tail(SEED + 5, n=1024, sigma=SIGMA, ed=4,
                               trials=10_000, thresholds=(2, 4, 8))
    c = rep.details["fitted_c"]
    _line("criterion 5 progress-step tail", c <= 4.0,
          f"fitted c {c:.3f} <= 4, tails {rep.details['tail_by_threshold']}")


def test_criterion_06_gambler_ruin():
    rep = experiments.gambler_ruin(SEED + 6, a=3, b=5, trials=100_000)
    hit = rep.estimate
    mean = rep.details["mean_steps"]
    ok = abs(hit - 0.375) <= 0.02 and abs(mean - 30) <= 0.05 * 30
    _line("criterion 6 gambler's ruin", ok,
          f"hit-b {hit:.4f} in 0.375+-0.02, mean steps {mean:.2f} in 30+-5%")


def test_criterion_07_off_diagonal_zone_entry():
    rep = experiments.claim_3_8(SEED + 7, n_instances=20, trials=10_000)
    worst = min(rep.details["per_instance"])
    _line("criterion 7 off-diagonal zone entry", worst >= 0.63,
          f"minimum per-instance rate {worst:.3f} >= 0.63 over 20 instances")


def test_criterion_08_self_similar_miss_trend():
    rep = experiments.prop_3_9(SEED + 8, big_l=512, period=4, singletons=8,
                               trials=10_000)
    freqs = rep.details["miss_by_offset"]
    rho = rep.details["fitted_rho"]
    monotone = rep.details["monotone"]
    above = rho is not None and all(f > 0.5 for off, f in freqs.items()
                                    if off >= rho)
    _line("criterion 8 self-similar miss trend", monotone and above,
          f"monotone {monotone}, miss > 0.5 for offsets >= {rho}: {freqs}")


def test_criterion_09_size_scaling():
    rep = experiments.size_scaling(SEED + 9, n=4096, delta=DELTA,
                                   ks=(2, 4, 8, 16))
    slope = rep.estimate
    _line("criterion 9 size scaling", abs(slope - 3) <= 0.4,
          f"log-log slope {slope:.3f} in 3+-0.4, bytes {rep.details['bytes_by_k']}")


def test_criterion_10_adversarial_walk_count():
    single = experiments.adversarial_excess(SEED + 10, k=8, tau=1, trials=500)
    # the full walk-count formula, at fewer trials for runtime; the 10%
    # threshold needs far less resolution than 500 trials
    faithful_tau = default_tau(5 * 8, 8, DELTA)
    faithful = experiments.adversarial_excess(SEED + 11, k=8, tau=faithful_tau,
                                              trials=100)
    ok = single.estimate >= 0.20 and faithful.estimate <= 0.10
    _line("criterion 10 adversarial walk count", ok,
          f"excess {single.estimate:.3f} >= 0.20 at tau=1; "
          f"{faithful.estimate:.3f} <= 0.10 at tau={faithful_tau}")
