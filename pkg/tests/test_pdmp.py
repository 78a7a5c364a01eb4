import math

import numpy as np
import pytest
from scipy import integrate

from maxscheme import DomainError, FlowUnderflow, QuadConfig, generator_apply, parse_type
from maxscheme import pdmp
from maxscheme.stats import ks_distance
from maxscheme.testfunctions import bump_family, constant, placed_bump

TYPES = ["gumbel", "frechet:3", "weibull:2", "frechet:2", "weibull:1"]


def test_drift_flow_examples():
    assert pdmp.drift_flow(parse_type("gumbel"), 2.0, 1.0) == 1.0
    assert pdmp.drift_flow(parse_type("frechet:2"), 1.0, 2.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert pdmp.drift_flow(parse_type("weibull:4"), 0.0, 5.0) == 0.0


@pytest.mark.parametrize("spec", TYPES)
def test_drift_flow_vs_ode_solver(spec):
    et = parse_type(spec)
    rho, beta = et.rho_beta
    x0 = float(et.g_quantile(0.3))
    sol = integrate.solve_ivp(lambda t, y: rho * y + beta, (0, 3), [x0], method="DOP853",
                              rtol=1e-13, atol=1e-14, dense_output=True)
    t = np.linspace(0, 3, 31)
    np.testing.assert_allclose(pdmp.drift_flow(et, x0, t), sol.sol(t)[0], rtol=1e-10, atol=1e-12)


def test_frechet_underflow():
    with pytest.raises(FlowUnderflow):
        pdmp.drift_flow(parse_type("frechet:1"), 1e-300, 50.0)


@pytest.mark.parametrize("spec", TYPES)
def test_hazard_closed_form_vs_quadrature(spec):
    et = parse_type(spec)
    for u in (0.1, 0.5, 0.9):
        x0 = float(et.g_quantile(u))
        for t in (0.01, 0.5, 2.0, 4.0):
            num = integrate.quad(lambda s: float(et.tau(pdmp.drift_flow(et, x0, s))), 0, t,
                                 epsabs=1e-14, epsrel=1e-13)[0]
            assert abs(num - pdmp.integrated_hazard(et, x0, t)) <= 1e-8 * max(1.0, num)


def test_holding_time_examples():
    g = parse_type("gumbel")
    assert pdmp.hold_from_exponential(g, 0.0, math.log(2)) == pytest.approx(math.log1p(math.log(2)), rel=1e-15)
    assert pdmp.hold_from_exponential(g, 0.0, 0.0) == 0.0
    w = parse_type("weibull:2")
    assert pdmp.hold_from_exponential(w, 0.0, 1.0) == math.inf
    assert pdmp.holding_time(w, 0.0, np.random.default_rng(0)) == math.inf


def test_jump_target_examples():
    g = parse_type("gumbel")
    assert pdmp.target_from_uniform(g, 0.0, math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    assert pdmp.target_from_uniform(parse_type("frechet:2"), 1.0, 0.25) == pytest.approx(2.0, rel=1e-15)
    assert pdmp.target_from_uniform(g, 0.3, 1 - 1e-12) == pytest.approx(0.3, abs=1e-11)
    with pytest.raises(DomainError):
        pdmp.target_from_uniform(parse_type("weibull:2"), 0.0, 0.5)


@pytest.mark.parametrize("spec", TYPES)
def test_jump_target_inverts_target_cdf(spec):
    et = parse_type(spec)
    x = float(et.g_quantile(0.5))
    u = np.linspace(0.01, 0.99, 99)
    z = pdmp.target_from_uniform(et, x, u)
    # P(Z <= z) = 1 - U by construction of tau(z) = U tau(x)
    np.testing.assert_allclose(pdmp.target_cdf(et, x, z), 1 - u, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("spec", ["gumbel", "frechet:3", "weibull:2"])
def test_micro_laws(spec):
    et = parse_type(spec)
    x0 = float(et.g_quantile(0.5))
    rng = np.random.default_rng(21)
    hold = np.array([pdmp.holding_time(et, x0, rng) for _ in range(20000)])
    assert ks_distance(hold, lambda t: pdmp.holding_cdf(et, x0, t)) <= 0.015
    z = np.array([pdmp.jump_target(et, x0, rng) for _ in range(20000)])
    assert ks_distance(z, lambda v: pdmp.target_cdf(et, x0, v)) <= 0.015
    assert np.all(z > x0)


def test_simulate_weibull_absorbing():
    p = pdmp.simulate(parse_type("weibull:2"), 0.0, 10.0, np.random.default_rng(0))
    assert p.n_jumps == 0
    assert np.all(p(np.linspace(0, 10, 11)) == 0.0)


def test_simulate_drift_only_when_first_hold_is_long():
    class Huge:
        def random(self, size=None):
            return 2.0 ** -53  # E = -log U is about 36.7

    g = parse_type("gumbel")
    p = pdmp.simulate(g, 1.0, 3.0, Huge())
    assert p.n_jumps == 0
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(p(t), 1.0 - t)


@pytest.mark.parametrize("spec", TYPES)
def test_simulate_path_invariants(spec):
    et = parse_type(spec)
    rng = np.random.default_rng(4)
    for _ in range(50):
        x0 = float(et.sample_nu(rng))
        p = pdmp.simulate(et, x0, 5.0, rng)
        assert np.all(p.post_jump > p.pre_jump)
        assert np.all(np.diff(p.jump_times) > 0)
        assert np.all(et.in_support(p.post_jump))
        # between jumps the path is the exact flow from the last post-jump state
        starts = np.concatenate([[0.0], p.jump_times])
        states = np.concatenate([[x0], p.post_jump])
        ends = np.concatenate([p.jump_times, [5.0]])
        for s0, x, s1 in zip(starts, states, ends):
            mid = 0.5 * (s0 + s1)
            assert p(mid) == pytest.approx(float(pdmp.drift_flow(et, x, mid - s0)), rel=1e-13)
        if p.n_jumps:
            left = p.jump_times - 1e-12
            np.testing.assert_allclose(p(left), p.pre_jump, rtol=1e-9, atol=1e-9)


def test_simulate_validation():
    with pytest.raises(DomainError):
        pdmp.simulate(parse_type("frechet:2"), -1.0, 1.0, np.random.default_rng(0))
    with pytest.raises(DomainError):
        pdmp.simulate(parse_type("gumbel"), 0.0, 0.0, np.random.default_rng(0))
    p = pdmp.simulate(parse_type("gumbel"), 0.0, 1.0, np.random.default_rng(0))
    with pytest.raises(DomainError):
        p(2.0)


def test_batch_matches_single_path_law():
    # the batch simulator and the single-path simulator draw the same law
    et = parse_type("gumbel")
    batch = pdmp.simulate_paths(et, 0.5, [1.0, 3.0], 20000, seed=3)
    rng = np.random.default_rng(8)
    single = np.array([pdmp.simulate(et, 0.5, 3.0, rng)([1.0, 3.0]) for _ in range(20000)])
    from scipy import stats as sps
    for c in (0, 1):
        assert sps.ks_2samp(batch[:, c + 1], single[:, c]).pvalue > 1e-3


def test_batch_deterministic_across_threads():
    et = parse_type("frechet:3")
    a, ja = pdmp.simulate_paths(et, "stationary", [0.5, 2.0], 3000, 11, threads=1, chunk=3000,
                                return_jumps=True)
    b, jb = pdmp.simulate_paths(et, "stationary", [0.5, 2.0], 3000, 11, threads=4, chunk=257,
                                return_jumps=True)
    assert np.array_equal(a, b) and np.array_equal(ja, jb)


def test_batch_stationarity_small():
    et = parse_type("weibull:2")
    x, jumps = pdmp.simulate_paths(et, "stationary", [1.0, 5.0], 20000, 5, return_jumps=True)
    for c in range(3):
        assert ks_distance(x[:, c], et.g_cdf) <= 0.015
    # tau(X_t) is stationary Exp(1), and jumps arrive at mean rate E[tau(X)] = 1
    assert jumps.mean() == pytest.approx(5.0, rel=0.05)


def test_batch_validation():
    et = parse_type("gumbel")
    with pytest.raises(DomainError):
        pdmp.simulate_paths(et, 0.0, [2.0, 1.0], 10, 0)
    with pytest.raises(DomainError):
        pdmp.simulate_paths(et, "uniform", [1.0], 10, 0)


# -- generator ---------------------------------------------------------------------
def test_generator_dead_zone():
    g = parse_type("gumbel")
    f = bump_family(1.0)
    assert generator_apply(g, f, 5.0) == 0.0
    assert generator_apply(g, constant(3.0), 0.2) == 0.0


def test_generator_forms_agree_random_triples():
    rng = np.random.default_rng(17)
    for _ in range(100):
        spec = TYPES[rng.integers(len(TYPES))]
        et = parse_type(spec)
        t = float(rng.choice([0.0, 0.5, 1.0, 2.0, 5.0]))
        f = placed_bump(et, t)
        lo, hi = f.support
        x = float(rng.uniform(lo - 1.0, hi + 0.5))
        if not et.in_support(x):
            x = float(et.g_quantile(rng.uniform(0.05, 0.95)))
        a = generator_apply(et, f, x, form="tau")
        b = generator_apply(et, f, x, form="phi")
        assert abs(a - b) <= 2e-9


def test_generator_against_direct_difference_quotient():
    # oracle: A f(x) = d/dt E_x f(X_t) at t = 0, estimated from the
    # exact one-jump expansion E_x f(X_h) ~ f(flow_h) + h int (f(z) - f(x)) phi(z) dz
    et = parse_type("gumbel")
    f = bump_family(1.0)
    x = -0.7
    h = 1e-6
    drift = (float(f(pdmp.drift_flow(et, x, h))) - float(f(pdmp.drift_flow(et, x, -h)))) / (2 * h)
    jump = integrate.quad(lambda z: (float(f(z)) - float(f(x))) * float(et.phi(z)), x, 60,
                          points=[0.0, 1.0, 1 + math.pi], limit=200)[0]
    assert generator_apply(et, f, x) == pytest.approx(drift + jump, abs=1e-7)


def test_generator_domain_and_form():
    with pytest.raises(DomainError):
        generator_apply(parse_type("frechet:3"), placed_bump(parse_type("frechet:3"), 1.0), -1.0)
    with pytest.raises(DomainError):
        generator_apply(parse_type("gumbel"), bump_family(0.0), 0.0, form="beta")


def test_quadrature_error_raised():
    from maxscheme.errors import QuadratureError
    cfg = QuadConfig(epsabs=1e-300, epsrel=1e-300, limit=3)
    with pytest.raises(QuadratureError):
        generator_apply(parse_type("gumbel"), bump_family(3.0), -3.0, quad_cfg=cfg)
