import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlvca.analytics import logical_fail_prob
from tlvca.ca_core import ChainState, Terminal, classify_evolution
from tlvca.noise_sim import (
    CorrectionMode,
    ExperimentConfig,
    TmaxKind,
    TmaxPolicy,
    TrialClass,
    TrialOutcome,
    _pack,
    binomial_stderr,
    decode_block,
    estimate_pdec,
    estimate_tff,
    exact_pdec,
    ff_block,
    make_rng,
    run_decode_trial,
    run_ff_trial,
    sample_bernoulli,
    sample_mirrored_bernoulli,
    validate_sparse_bound,
)

# ----------------------------------------------------------------- sampling


def test_sample_bernoulli_extremes():
    rng = make_rng(0)
    assert sample_bernoulli(50, 0.0, rng).is_zero()
    assert sample_bernoulli(50, 1.0, rng).is_one()


def test_sample_bernoulli_mean():
    x = sample_bernoulli(10**5, 0.5, make_rng(1))
    assert abs(x.density - 0.5) < 3 * 0.5 / math.sqrt(10**5)


def test_mirrored_sampling():
    rng = make_rng(2)
    assert sample_mirrored_bernoulli(20, 0.0, rng).size == 0
    for _ in range(50):
        s = set(sample_mirrored_bernoulli(20, 0.3, rng).tolist())
        assert all(1 - i in s for i in s)
        assert all(-19 <= i <= 20 for i in s)
    with pytest.raises(ValueError):
        sample_mirrored_bernoulli(0, 0.1, rng)


def test_mirrored_sampling_correlations():
    rng = make_rng(3)
    n, hw = 20000, 4
    X = np.zeros((n, 2 * hw), dtype=float)
    for r in range(n):
        X[r, sample_mirrored_bernoulli(hw, 0.3, rng) + hw - 1] = 1
    c = np.corrcoef(X.T)
    # columns j and 2hw-1-j are mirror partners
    for j in range(2 * hw):
        assert c[j, 2 * hw - 1 - j] == pytest.approx(1.0)
    sigma = 1 / math.sqrt(n)
    for a in range(hw, 2 * hw):
        for b in range(a + 1, 2 * hw):
            assert abs(c[a, b]) < 4 * sigma


def test_rng_streams_are_keyed():
    a = make_rng(5, 1, 2).random(4)
    assert np.array_equal(a, make_rng(5, 1, 2).random(4))
    assert not np.array_equal(a, make_rng(5, 2, 1).random(4))


# ------------------------------------------------------------- t_max policy


@pytest.mark.parametrize(
    "text, L, cap",
    [("linear", 100, 100), ("linear:2", 100, 200), ("pow:0.5", 144, 12), ("const:7", 1000, 7)],
)
def test_tmax_policy(text, L, cap):
    pol = TmaxPolicy.parse(text)
    assert pol.cap(L) == cap
    assert TmaxPolicy.parse(str(pol)) == pol


def test_tmax_policy_errors():
    for bad in ("pow:1.5", "pow:0", "const:-1", "bogus", "linear:x"):
        with pytest.raises(ValueError):
            TmaxPolicy.parse(bad)
    assert TmaxPolicy.parse("unbounded").kind is TmaxKind.UNBOUNDED


def test_trial_outcome_invariant():
    TrialOutcome(TrialClass.DECODED_CLEAN, 3)
    with pytest.raises(ValueError):
        TrialOutcome(TrialClass.LOGICAL_FLIP, 3)
    with pytest.raises(ValueError):
        TrialOutcome(TrialClass.DECODED_CLEAN)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(L_grid=(10,), p0_grid=(0.1,), trials=0)


# ---------------------------------------------------------- decode trials


def test_decode_trial_zero_noise():
    out = run_decode_trial(20, 0.0, None, make_rng(0))
    assert out.klass is TrialClass.DECODED_CLEAN and out.t_dec == 0


def test_single_error_always_clean():
    L = 40
    x = np.zeros((L, 64), dtype=bool)
    for i in range(L):
        x[i, i] = True
    codes, tdec = decode_block(_pack(x), cap=L)
    assert (codes[:L] == 1).all() and (tdec[:L] <= 2).all()


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 30).map(lambda h: 2 * h), st.floats(0.05, 0.6), st.integers(0, 2**31))
def test_decode_block_matches_scalar(L, p, seed):
    rng = np.random.default_rng(seed)
    x = rng.random((L, 128)) < p
    cap = int(rng.integers(1, 4 * L))
    codes, tdec = decode_block(_pack(x), cap)
    want = {Terminal.CLEAN_ZERO: 1, Terminal.CLEAN_ONE: 2, Terminal.CYCLE: 3, Terminal.TIMEOUT: 4}
    for j in range(128):
        ev = classify_evolution(ChainState(x[:, j]), cap=cap)
        assert codes[j] == want[ev.terminal]
        if codes[j] == 1:
            assert tdec[j] == ev.steps_taken


def test_binomial_stderr():
    assert binomial_stderr(0, 10) == 0.0
    assert binomial_stderr(25, 100) == pytest.approx(math.sqrt(0.25 * 0.75 / 100))


# ---------------------------------------------------------------- sweeps


def cfg(**kw):
    base = dict(L_grid=(16, 32), p0_grid=(0.1, 0.3), trials=2000, seed=9)
    base.update(kw)
    return ExperimentConfig(**base)


def test_estimate_pdec_zero_noise():
    st_ = estimate_pdec(cfg(p0_grid=(0.0,), trials=100))
    assert all(p.p_fail == 0.0 and p.p_fail_stderr == 0.0 for p in st_.points)


def test_estimate_pdec_deterministic_and_thread_safe():
    a = estimate_pdec(cfg()).rows()
    b = estimate_pdec(cfg()).rows()
    c = estimate_pdec(cfg(threads=3)).rows()
    assert a == b == c


def test_estimate_pdec_stderr_and_counts():
    for p in estimate_pdec(cfg()).points:
        assert p.n_clean + p.n_flip + p.n_cycle + p.n_timeout == p.trials
        assert p.p_fail_stderr == pytest.approx(math.sqrt(p.p_fail * (1 - p.p_fail) / p.trials))
        assert 0 <= p.p_fail <= 1
        assert p.tdec_hist.sum() == p.n_clean


def test_exact_vs_monte_carlo_L12():
    ex = exact_pdec(12, 0.3)
    assert ex["p_fail"] == pytest.approx(ex["p_flip"] + ex["p_other"])
    mc = estimate_pdec(ExperimentConfig(L_grid=(12,), p0_grid=(0.3,), trials=10**5, seed=12)).points[0]
    assert abs(mc.p_fail - ex["p_fail"]) < 3 * mc.p_fail_stderr


def test_exact_capped_matches_monte_carlo():
    ex = exact_pdec(12, 0.4, t_max=2)
    mc = estimate_pdec(
        ExperimentConfig(L_grid=(12,), p0_grid=(0.4,), trials=10**5, seed=4, tmax=TmaxPolicy.parse("const:2"))
    ).points[0]
    assert abs(mc.p_fail - ex["p_fail"]) < 3 * mc.p_fail_stderr


def test_critical_point_does_not_vanish():
    st_ = estimate_pdec(ExperimentConfig(L_grid=(50, 200), p0_grid=(0.5,), trials=4000, seed=1))
    assert all(p.p_fail > 0.3 for p in st_.points)


def test_const_cap_success_decreases_with_L():
    st_ = estimate_pdec(
        ExperimentConfig(
            L_grid=(16, 144, 784), p0_grid=(0.3,), trials=4000, seed=2, tmax=TmaxPolicy.parse("const:3")
        )
    )
    s = [p.p_success for p in st_.points]
    assert s[0] > s[1] > s[2]
    assert s[2] < 0.05


def test_mean_decoding_time_small():
    p = estimate_pdec(ExperimentConfig(L_grid=(600,), p0_grid=(0.1,), trials=5000, seed=3)).points[0]
    assert 2 <= p.mean_tdec <= 4


# ----------------------------------------------------------- first flips


def test_ff_zero_noise_never_flips():
    for mode in CorrectionMode:
        assert math.isnan(run_ff_trial(10, 0.0, mode, make_rng(0), cap=100))


def test_ff_cap_censors():
    t = ff_block(50, 0.01, CorrectionMode.TLV1D, 64, make_rng(1), cap=5)
    assert np.isnan(t).all()


def test_ff_ranking_and_flat_no_correction():
    c = ExperimentConfig(L_grid=(10, 100), p0_grid=(0.125,), trials=600, seed=8)
    res = {}
    for mode in CorrectionMode:
        c2 = ExperimentConfig(**{**c.__dict__, "mode": mode})
        res[mode] = [(p.mean_tff, p.stderr_tff) for p in estimate_tff(c2).points]
    for i in range(2):
        g, t, n = (res[m][i] for m in (CorrectionMode.GLOBAL, CorrectionMode.TLV1D, CorrectionMode.NONE))
        assert g[0] - 2 * g[1] > t[0] + 2 * t[1]
        assert t[0] - 2 * t[1] > n[0] + 2 * n[1]
    # without correction the first flip time barely moves with L
    n10, n100 = res[CorrectionMode.NONE]
    assert abs(n100[0] - n10[0]) < 0.25 * n10[0]


def test_ff_tlv_grows_subexponentially():
    c = ExperimentConfig(L_grid=(10, 50, 100, 210), p0_grid=(0.125,), trials=400, seed=5)
    m = [p.mean_tff for p in estimate_tff(c).points]
    slopes = [(math.log(m[i + 1]) - math.log(m[i])) / (L1 - L0) for i, (L0, L1) in enumerate([(10, 50), (50, 100), (100, 210)])]
    assert m[0] < m[1] < m[2] < m[3]
    assert slopes[0] > slopes[1] > slopes[2]


def test_ff_tlv_slower_at_lower_noise():
    c = ExperimentConfig(L_grid=(50,), p0_grid=(0.1, 0.15), trials=400, seed=6)
    a, b = estimate_tff(c).points
    assert a.mean_tff > b.mean_tff


def test_ff_global_stepped_vs_skip_vs_model():
    c = ExperimentConfig(L_grid=(10,), p0_grid=(0.125,), trials=2000, seed=7, mode=CorrectionMode.GLOBAL)
    a = estimate_tff(c, sampler="stepped").points[0]
    b = estimate_tff(c, sampler="skip").points[0]
    model = 1 / logical_fail_prob(10, 0.125, ties="half")
    for p in (a, b):
        assert abs(p.mean_tff - model) < 3 * p.stderr_tff
    assert a.sampler == "stepped" and b.sampler == "skip"


def test_ff_deterministic():
    c = ExperimentConfig(L_grid=(20,), p0_grid=(0.1,), trials=100, seed=3)
    assert estimate_tff(c).rows() == estimate_tff(c).rows()


# ------------------------------------------------------------ sparse table


def test_sparse_zero_noise():
    rows = validate_sparse_bound(0.0, windows=20, l_max=5)
    assert all(r.uncovered_frac == 0 for r in rows)


def test_sparse_monotone():
    rows = validate_sparse_bound(0.01, windows=400, l_max=8, seed=1)
    f = [r.uncovered_frac for r in rows]
    assert all(b <= a for a, b in zip(f, f[1:]))
    assert f[4] <= f[0]
    assert all(r.bound_clamped == min(1.0, r.bound_raw) for r in rows)
