import math
import threading

import mpmath as mp
import numpy as np
import pytest

from maxscheme import (BoundedPower, DomainError, Exponential, NormingSequence, Pareto, StandardNormal,
                       UnsupportedError, Uniform01, builtin_models, canonical_constants, limit_check)
from maxscheme.distributions import TailModel, DoaTag

mp.mp.dps = 50


# -- high precision oracle for the canonical constants ---------------------------
def _mp_constants(spec, n):
    n = mp.mpf(n)
    if spec == "exponential":
        return mp.mpf(1), mp.log(n)
    if spec == "normal":
        ln = mp.log(n)
        return 1 / mp.sqrt(2 * ln), mp.sqrt(2 * ln) - (mp.log(ln) + mp.log(4 * mp.pi)) / (2 * mp.sqrt(ln))
    if spec.startswith("pareto"):
        alpha = mp.mpf(spec.split(":")[1])
        return n ** (1 / alpha), mp.mpf(0)
    if spec == "uniform01":
        return 1 / n, mp.mpf(1)
    alpha = mp.mpf(spec.split(":")[1])
    return n ** (-1 / alpha), mp.mpf(1)


def _mp_rho_beta(spec, n):
    a0, b0 = _mp_constants(spec, n - 1)
    a1, b1 = _mp_constants(spec, n)
    g = mp.mpf(1) / n
    return float((a0 - a1) / (a1 * g)), float((b0 - b1) / (a1 * g))


SPECS = ["exponential", "normal", "pareto:3", "uniform01", "boundedpower:2"]
MODELS = {m.spec: m for m in builtin_models()}


def test_theta_examples():
    assert NormingSequence(Exponential()).theta(100) == pytest.approx(math.log(100), rel=1e-14)
    assert NormingSequence(Pareto(3)).theta(8) == pytest.approx(2.0, rel=1e-14)
    assert NormingSequence(Uniform01()).theta(10) == pytest.approx(0.9, rel=1e-14)
    assert NormingSequence(Exponential()).theta(1) == 0.0
    assert NormingSequence(Pareto(3)).theta(1) == 1.0


def test_canonical_constants_examples():
    a, b = canonical_constants(Exponential(), 1000)
    assert a == 1.0 and b == pytest.approx(math.log(1000), rel=1e-15)
    a, b = canonical_constants(Pareto(2), 100)
    assert a == pytest.approx(10.0, rel=1e-14) and b == 0.0
    a, b = canonical_constants(Uniform01(), 50)
    assert a == pytest.approx(0.02, rel=1e-12) and b == 1.0


def test_normal_constants_closed_form():
    for n in (3, 10, 1000, 10 ** 6):
        a, b = canonical_constants(StandardNormal(), n)
        ma, mb = _mp_constants("normal", n)
        assert a == pytest.approx(float(ma), rel=1e-14)
        assert b == pytest.approx(float(mb), rel=1e-14)
    with pytest.raises(DomainError):
        canonical_constants(StandardNormal(), 2)


def test_generic_type1_needs_aux_g():
    class Bare(TailModel):
        doa = DoaTag(1)
        x_lo = 0.0

        def _tail(self, x):
            return np.exp(-np.maximum(x, 0.0))

        def _cdf(self, x):
            return -np.expm1(-np.maximum(x, 0.0))

        def _isf(self, q):
            return -np.log(q)

        def _quantile(self, u):
            return -np.log1p(-u)

        spec = "bare"

    with pytest.raises(UnsupportedError):
        NormingSequence(Bare())
    seq = NormingSequence(Bare(), a=lambda n: np.ones_like(n), b=np.log)
    assert seq.beta(1000) == pytest.approx(1000 * math.log(999 / 1000), rel=1e-9)


@pytest.mark.parametrize("spec", SPECS)
@pytest.mark.parametrize("n", [5, 50, 1001, 10 ** 4, 10 ** 6])
def test_rho_beta_against_high_precision(spec, n):
    seq = NormingSequence(MODELS[spec])
    rho, beta = _mp_rho_beta(spec, n)
    assert seq.rho(n) == pytest.approx(rho, rel=1e-9, abs=1e-12)
    assert seq.beta(n) == pytest.approx(beta, rel=1e-9, abs=1e-12)


def test_rho_beta_examples():
    e = NormingSequence(Exponential())
    assert np.all(e.rho(np.arange(2, 2000)) == 0.0)
    assert e.beta(2) == pytest.approx(2 * math.log(0.5), rel=1e-14)
    assert NormingSequence(Uniform01()).rho(2) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(DomainError):
        e.rho(1)
    with pytest.raises(DomainError):
        e.beta(1)


@pytest.mark.parametrize("spec", SPECS)
def test_gamma_is_one_over_n(spec):
    seq = NormingSequence(MODELS[spec])
    n = np.unique(np.geomspace(1, 10 ** 6, 500).astype(int))
    g = seq.gamma(n)
    assert np.max(np.abs(g - 1.0 / n)) <= 1e-12
    assert np.all(np.abs(g * n - 1) <= 1e-9)
    assert np.all(np.diff(g) <= 0)


@pytest.mark.parametrize("spec", SPECS)
def test_a_positive(spec):
    seq = NormingSequence(MODELS[spec])
    n = np.arange(seq.min_index, 5000)
    assert np.all(seq.a(n) > 0)


def test_gamma_for_atom():
    # F_delta puts mass F(delta) at delta: gamma_n = tail(theta_n) is no longer 1/n
    seq = NormingSequence(Exponential().truncate(1.0))
    f1 = 1 - math.exp(-1)
    n = 2  # 1 - 1/2 < F(1), so theta_2 = 1 and gamma_2 = e^-1
    assert seq.theta(n) == 1.0
    assert seq.gamma(n) == pytest.approx(math.exp(-1), rel=1e-14)
    assert seq.gamma(10) == pytest.approx(0.1, rel=1e-12)
    assert f1 > 0.5


def test_Gamma_prefix_matches_fresh_sum():
    seq = NormingSequence(Exponential())
    rng = np.random.default_rng(0)
    table = seq.Gamma_table(10 ** 6)
    for n in rng.integers(1, 10 ** 6, 100):
        fresh = math.fsum(1.0 / k for k in range(1, int(n) + 1))
        assert seq.Gamma(int(n)) == pytest.approx(fresh, rel=1e-15, abs=1e-15)
        assert table[n] == seq.Gamma(int(n))
    # Gamma_n - Gamma_{n-1} resolves gamma_n only to the spacing of Gamma_n
    d = np.diff(table[1:10 ** 5])
    ulp = np.spacing(table[2:10 ** 5])
    assert np.all(np.abs(d - seq.gamma(np.arange(2, 10 ** 5))) <= 2 * ulp)


def test_Gamma_thread_safe():
    seq = NormingSequence(Pareto(3))
    out = {}

    def work(i):
        out[i] = seq.Gamma(300000 + i)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = NormingSequence(Pareto(3))
    for i, v in out.items():
        assert v == ref.Gamma(300000 + i)


def test_limit_check_examples():
    assert limit_check(NormingSequence(Pareto(3)), 10 ** 4).rho_gap <= 1e-3
    assert limit_check(NormingSequence(Exponential()), 1000).beta_gap <= 1e-3
    assert limit_check(NormingSequence(StandardNormal()), 10 ** 6).beta_gap <= 0.2
    with pytest.raises(DomainError):
        limit_check(NormingSequence(Exponential()), 9)


def test_taylor_bounds():
    # n((1 - 1/n)^{1/a} - 1) + 1/a and n log(1 - 1/n) + 1 are O(1/n)
    for n in (10 ** 3, 10 ** 4, 10 ** 5):
        assert limit_check(NormingSequence(Pareto(3)), n).rho_gap <= 1.0 / n
        assert limit_check(NormingSequence(Exponential()), n).beta_gap <= 1.0 / n
        assert limit_check(NormingSequence(BoundedPower(2)), n).rho_gap <= 1.0 / n


@pytest.mark.parametrize("spec", SPECS)
def test_equivalent_norming_same_limits(spec):
    m = MODELS[spec]
    base = NormingSequence(m)
    alt = NormingSequence(m, a=lambda n: base.a(n) * (1 + 1 / n), b=lambda n: base.b(n) + base.a(n) / n,
                          min_index=base.min_index)
    r0, r1 = limit_check(base, 10 ** 6), limit_check(alt, 10 ** 6)
    tol = 0.2 if spec == "normal" else 1e-2
    assert r1.rho_gap <= tol and r1.beta_gap <= tol
    assert abs(r1.rho_n - r0.rho_n) <= 1e-2 and abs(r1.beta_n - r0.beta_n) <= 1e-2


def test_table_columns():
    tab = NormingSequence(Exponential()).table(1000)
    assert list(tab) == ["n", "theta", "gamma", "a", "b", "rho", "beta"]
    assert np.isnan(tab["rho"][0])
    assert np.all(tab["rho"][1:] == 0.0)
    tab = NormingSequence(StandardNormal()).table(10)
    assert tab["n"][0] == 3 and np.isnan(tab["beta"][0])
