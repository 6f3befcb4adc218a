import itertools
import math

import numpy as np
import pytest
from scipy.special import betainc

from pmeans.discrete import AlphaTheta, RandomDiscreteSample, gem_stick_break
from pmeans.partition import Composition, ecpf, ecpf_uniform, eppf
from pmeans.pmean import (
    AtomicDistribution,
    MomentVector,
    alpha0_transform,
    classical_mean_moments,
    cs_transform_rhs,
    darling_lamperti_pdf,
    dirichlet_log_transform,
    exact_pmean_moments,
    lamperti_stieltjes,
    mc_pmean,
    pgf_kn_moment,
    product_moment,
)
from pmeans.sampling import RngStream
from pmeans.specialfn import pochhammer, talzol_cdf
from pmeans.verify import darling_lamperti_mass, ks_statistic


def classical_oracle(values, probs, m, order):
    """Brute-force moments of the arithmetic mean of m i.i.d. atomic draws
    by enumerating all m-tuples."""
    out = np.zeros(order)
    for tup in itertools.product(range(len(values)), repeat=m):
        pr = math.prod(probs[i] for i in tup)
        mean = sum(values[i] for i in tup) / m
        for j in range(1, order + 1):
            out[j - 1] += pr * mean**j
    return out


def dl_expectation(g, alpha, p, n_seg=2000, nodes=16):
    """E g(M) against the occupation density by endpoint-regularized
    composite Gauss-Legendre (left half plus the mirrored right half)."""
    x, w = np.polynomial.legendre.leggauss(nodes)

    def half(pp, transform):
        edges = np.linspace(0.0, 0.5**alpha, n_seg + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half_w = 0.5 * (edges[1:] - edges[:-1])
        pts = mid[:, None] + half_w[:, None] * x[None, :]
        u = pts ** (1.0 / alpha)
        dens = np.vectorize(lambda v: darling_lamperti_pdf(alpha, pp, v))(u)
        vals = np.vectorize(g)(transform(u)) * dens * u / (alpha * pts)
        return ((vals * w).sum(axis=1) * half_w).sum()

    return half(p, lambda u: u) + half(1.0 - p, lambda u: 1.0 - u)


class TestAtomicDistribution:
    def test_bernoulli(self):
        x = AtomicDistribution.bernoulli(0.3)
        assert x.mean() == pytest.approx(0.3)
        assert x.moment(5) == pytest.approx(0.3)

    def test_rejects(self):
        with pytest.raises(ValueError):
            AtomicDistribution((1.0, 1.0), (0.5, 0.5))
        with pytest.raises(ValueError):
            AtomicDistribution((0.0, 1.0), (0.4, 0.4))
        with pytest.raises(ValueError):
            AtomicDistribution((0.0, 1.0), (1.1, -0.1))
        with pytest.raises(ValueError):
            MomentVector((1.0, math.inf))


class TestExactMoments:
    def test_constant_x_recovers_normalization(self):
        mx = MomentVector([1.0] * 8)
        for provider in (
            lambda c: ecpf(AlphaTheta(0.5, 0.5), c),
            lambda c: ecpf_uniform(4, c),
        ):
            out = exact_pmean_moments(provider, mx, 8)
            assert list(out.moments) == pytest.approx([1.0] * 8, abs=1e-12)

    def test_bernoulli_half_second_moment(self):
        out = exact_pmean_moments(
            lambda c: ecpf(AlphaTheta(0.0, 1.0), c), MomentVector([0.5, 0.5]), 2
        )
        assert out[2] == pytest.approx(3.0 / 8.0, abs=1e-14)

    def test_centered_second_moment_uniform_boxes(self):
        # E M^2 = E X^2 / m for centered X
        mx = MomentVector([0.0, 1.0])
        out = exact_pmean_moments(lambda c: ecpf_uniform(4, c), mx, 2)
        assert out[2] == pytest.approx(0.25, abs=1e-14)

    def test_guards(self):
        with pytest.raises(ValueError):
            exact_pmean_moments(lambda c: 0.0, MomentVector([1.0]), 26)
        with pytest.raises(ValueError):
            exact_pmean_moments(lambda c: 0.0, MomentVector([1.0]), 2)


class TestClassicalMoments:
    def test_m_one_identity(self):
        mx = MomentVector([0.3, 0.5, 0.1])
        out = classical_mean_moments(1, mx, 3)
        assert list(out.moments) == pytest.approx(list(mx.moments), abs=1e-14)

    def test_centered_fourth_moment_formula(self):
        # (3 (m-1) s^4 + E X^4) / m^3 for centered X
        values, probs = (-1.0, 0.0, 2.0), (0.5, 0.25, 0.25)
        x = AtomicDistribution(values, probs)
        assert x.mean() == pytest.approx(0.0)
        m = 5
        out = classical_mean_moments(m, x.moment_vector(4), 4)
        s2, m4 = x.moment(2), x.moment(4)
        assert out[4] == pytest.approx((3 * (m - 1) * s2**2 + m4) / m**3, rel=1e-12)

    def test_matches_enumeration_oracle(self):
        values, probs = (0.0, 0.5, 2.0), (0.3, 0.45, 0.25)
        x = AtomicDistribution(values, probs)
        m, order = 3, 6
        oracle = classical_oracle(values, probs, m, order)
        out = classical_mean_moments(m, x.moment_vector(order), order)
        assert list(out.moments) == pytest.approx(list(oracle), rel=1e-12)


class TestPgfIdentity:
    def test_at_one(self):
        for params in (AlphaTheta(0.0, 2.0), AlphaTheta(0.5, 0.5)):
            for n in (1, 3, 7):
                assert pgf_kn_moment(params, 1.0, n) == pytest.approx(1.0, abs=1e-12)

    def test_hand_value(self):
        assert pgf_kn_moment(AlphaTheta(0.0, 1.0), 0.5, 2) == pytest.approx(3 / 8)

    def test_dirichlet_closed_form(self):
        # E v^{K_n} = (v theta)_n / (theta)_n for the alpha = 0 family
        theta, v, n = 2.0, 0.3, 3
        assert pgf_kn_moment(AlphaTheta(0.0, theta), v, n) == pytest.approx(
            pochhammer(v * theta, n) / pochhammer(theta, n), abs=1e-13
        )

    def test_equals_bernoulli_moments(self):
        for params in (AlphaTheta(0.0, 2.0), AlphaTheta(0.5, 0.5), AlphaTheta(-1.0, 3.0)):
            for v in (0.3, 0.7):
                mx = MomentVector([v] * 10)
                mom = exact_pmean_moments(lambda c: ecpf(params, c), mx, 10)
                for n in range(1, 11):
                    assert mom[n] == pytest.approx(
                        pgf_kn_moment(params, v, n), abs=1e-12
                    )


class TestProductMoment:
    def test_exchangeable_collapses_to_moments(self):
        params = AlphaTheta(0.5, 0.5)
        x = AtomicDistribution((0.0, 0.5, 2.0), (0.3, 0.45, 0.25))
        n = 4
        mu = lambda block: x.moment(len(block))  # noqa: E731
        value = product_moment(lambda c: eppf(params, c), mu, n)
        mom = exact_pmean_moments(lambda c: ecpf(params, c), x.moment_vector(n), n)
        assert value == pytest.approx(mom[n], rel=1e-12)

    def test_pair_formula(self):
        # E M_X M_Y = p(2) E(XY) + p(1,1) E X E Y
        params = AlphaTheta(0.0, 2.0)
        exy, ex, ey = 0.7, 0.5, 0.9

        def mu(block):
            if len(block) == 2:
                return exy
            return ex if block[0] == 1 else ey

        value = product_moment(lambda c: eppf(params, c), mu, 2)
        p2 = eppf(params, Composition((2,)))
        p11 = eppf(params, Composition((1, 1)))
        assert value == pytest.approx(p2 * exy + p11 * ex * ey, rel=1e-12)

    def test_guard(self):
        with pytest.raises(ValueError):
            product_moment(lambda c: 0.0, lambda b: 1.0, 13)


class TestMcPmean:
    def test_degenerate_weight(self):
        factory = lambda rng: RandomDiscreteSample(np.array([1.0]))  # noqa: E731
        sampler = lambda n, rng: np.full(n, 7.5)  # noqa: E731
        assert mc_pmean(factory, sampler, 7.5, RngStream(60)) == 7.5

    def test_total_defect_returns_mean(self):
        factory = lambda rng: RandomDiscreteSample(np.array([]), 1.0)  # noqa: E731
        sampler = lambda n, rng: np.zeros(n)  # noqa: E731
        assert mc_pmean(factory, sampler, 0.37, RngStream(61)) == 0.37

    def test_gem_bernoulli_matches_beta_law(self):
        theta, p = 2.0, 0.3
        rng = RngStream(62)
        factory = lambda r: gem_stick_break(AlphaTheta(0.0, theta), 1e-8, r)  # noqa: E731
        sampler = lambda n, r: (r.generator.random(n) < p).astype(float)  # noqa: E731
        vals = np.sort([mc_pmean(factory, sampler, p, rng) for _ in range(20_000)])
        cdf = lambda u: betainc(p * theta, (1 - p) * theta, np.clip(u, 0, 1))  # noqa: E731
        assert ks_statistic(vals, cdf) <= 1.63 / math.sqrt(20_000)

    def test_requires_finite_mean(self):
        with pytest.raises(ValueError):
            mc_pmean(lambda r: RandomDiscreteSample(np.array([1.0])),
                     lambda n, r: np.zeros(n), math.inf, RngStream(0))


class TestDarlingLamperti:
    def test_arcsine_point(self):
        assert darling_lamperti_pdf(0.5, 0.5, 0.5) == pytest.approx(2.0 / math.pi)

    def test_reflection_symmetry(self):
        assert darling_lamperti_pdf(0.3, 0.2, 0.7) == pytest.approx(
            darling_lamperti_pdf(0.3, 0.8, 0.3), rel=1e-12
        )

    def test_mass_one(self):
        assert darling_lamperti_mass(0.6, 0.25) == pytest.approx(1.0, abs=1e-8)

    def test_cdf_matches_conditioned_cauchy_form(self):
        # independent closed form through the log-Cauchy distribution
        # (1e-7 covers the interpolation error of the quadrature CDF)
        from pmeans.verify import darling_lamperti_cdf

        alpha, p = 0.6, 0.3
        cdf = darling_lamperti_cdf(alpha, p)
        for u in (0.1, 0.3, 0.5, 0.7, 0.9):
            s = alpha * math.log((1.0 - u) / u) + math.log(p / (1.0 - p))
            closed = 1.0 - talzol_cdf(alpha, s)
            assert float(cdf(u)) == pytest.approx(closed, abs=1e-7)

    def test_domain(self):
        with pytest.raises(ValueError):
            darling_lamperti_pdf(0.5, 0.5, 0.0)


class TestTransforms:
    def test_lamperti_trivial_points(self):
        assert lamperti_stieltjes(0.5, 0.3, 0.0) == 1.0
        assert lamperti_stieltjes(0.5, 1.0, 3.0) == pytest.approx(0.25)

    def test_lamperti_matches_quadrature(self):
        alpha, p, lam = 0.5, 0.5, 1.0
        num = dl_expectation(lambda u: 1.0 / (1.0 + lam * u), alpha, p)
        assert lamperti_stieltjes(alpha, p, lam) == pytest.approx(num, abs=1e-6)

    def test_cs_degenerate_x(self):
        x = AtomicDistribution((2.0,), (1.0,))
        assert cs_transform_rhs(AlphaTheta(0.5, 1.5), x, 1.0) == pytest.approx(
            3.0**-1.5
        )
        assert cs_transform_rhs(AlphaTheta(0.5, 1.5), x, 0.0) == 1.0

    def test_cs_finite_regime_matches_symmetric_dirichlet_form(self):
        # alpha = -theta/m: the transform is (E (1+lam X)^(-theta/m))^m
        m, theta, p, lam = 2, 2.0, 0.5, 1.0
        x = AtomicDistribution.bernoulli(p)
        val = cs_transform_rhs(AlphaTheta(-theta / m, theta), x, lam)
        inner = (1 - p) + p * (1.0 + lam) ** (-theta / m)
        assert val == pytest.approx(inner**m, rel=1e-12)

    def test_cs_rejects_degenerate_parameters(self):
        x = AtomicDistribution.bernoulli(0.5)
        with pytest.raises(ValueError):
            cs_transform_rhs(AlphaTheta(0.0, 1.0), x, 1.0)
        with pytest.raises(ValueError):
            cs_transform_rhs(AlphaTheta(0.5, 0.0), x, 1.0)

    def test_dirichlet_log_bernoulli(self):
        theta, p, lam = 2.0, 0.5, 1.0
        x = AtomicDistribution.bernoulli(p)
        assert dirichlet_log_transform(theta, x, lam) == pytest.approx(
            (1.0 + lam) ** (-p * theta), rel=1e-12
        )
        assert dirichlet_log_transform(theta, x, 0.0) == 1.0

    def test_dirichlet_log_spot_check_by_mc(self):
        # E (1 + lam M)^-theta with M =d= beta(p theta, q theta)
        theta, p, lam = 2.0, 0.5, 1.0
        rng = RngStream(63)
        m = rng.generator.beta(p * theta, (1 - p) * theta, size=200_000)
        vals = (1.0 + lam * m) ** (-theta)
        se = vals.std() / math.sqrt(vals.size)
        target = dirichlet_log_transform(theta, AtomicDistribution.bernoulli(p), lam)
        assert abs(vals.mean() - target) <= 3 * se

    def test_finite_regime_limit_to_dirichlet_log(self):
        # (E (1+lam X)^(-theta/m))^m converges to the log transform at rate
        # 1/m; differences halve per doubling of m and pass 1e-6 by 2^21
        theta, lam = 2.0, 1.0
        x = AtomicDistribution.bernoulli(0.5)
        target = dirichlet_log_transform(theta, x, lam)
        gaps = []
        for m in (2**k for k in range(1, 22)):
            inner = sum(
                pr * (1.0 + lam * v) ** (-theta / m)
                for v, pr in zip(x.values, x.probs)
            )
            gaps.append(abs(math.exp(m * math.log(inner)) - target))
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        for a, b in zip(gaps[4:12], gaps[5:13]):
            assert a / b == pytest.approx(2.0, rel=0.2)
        assert gaps[-1] <= 1e-6

    def test_alpha0_forms(self):
        x = AtomicDistribution.bernoulli(0.3)
        log_form, st_form = alpha0_transform(0.5, x, 2.0)
        assert st_form == pytest.approx(lamperti_stieltjes(0.5, 0.3, 2.0), rel=1e-14)
        assert alpha0_transform(0.5, x, 0.0) == (0.0, 1.0)
        c = AtomicDistribution((2.0,), (1.0,))
        lf, sf = alpha0_transform(0.4, c, 1.5)
        assert lf == pytest.approx(math.log(4.0), rel=1e-12)
        assert sf == pytest.approx(0.25, rel=1e-12)


class TestTransformMomentDuality:
    @staticmethod
    def _derivative_at_zero(f, order, h0=1e-2, levels=4):
        """Central differences with Richardson extrapolation, step h0
        halved `levels` times.  f must return mpmath values: in double
        precision the rounding floor of a 4th difference at these steps
        sits near 1e-3 relative, far above the 1e-6 comparison target."""
        import mpmath as mp

        stencils = {
            1: ([1, -1], [1, -1], 2),
            2: ([1, 0, -1], [1, -2, 1], 1),
            3: ([2, 1, -1, -2], [1, -2, 2, -1], 2),
            4: ([2, 1, 0, -1, -2], [1, -4, 6, -4, 1], 1),
        }
        offs, coefs, denom = stencils[order]

        def d(h):
            return sum(c * f(o * h) for o, c in zip(offs, coefs)) / (
                denom * h**order
            )

        table = [d(mp.mpf(h0) / 2**i) for i in range(levels + 1)]
        for lvl in range(1, levels + 1):
            factor = mp.mpf(4) ** lvl
            table = [
                (factor * b - a) / (factor - 1)
                for a, b in zip(table, table[1:])
            ]
        return table[0]

    @pytest.mark.parametrize("alpha,theta", [(0.5, 0.5), (0.25, 1.0)])
    def test_series_coefficients_match_moments(self, alpha, theta):
        import mpmath as mp

        params = AlphaTheta(alpha, theta)
        x = AtomicDistribution.bernoulli(0.4)
        mom = exact_pmean_moments(lambda c: ecpf(params, c), x.moment_vector(4), 4)

        def f(lam):
            inner = sum(
                mp.mpf(pr) * (1 + lam * mp.mpf(v)) ** mp.mpf(alpha)
                for v, pr in zip(x.values, x.probs)
            )
            return inner ** (-mp.mpf(theta) / mp.mpf(alpha))

        # double-precision spot check that the high-precision oracle is
        # evaluating the same transform
        assert float(f(mp.mpf("0.25"))) == pytest.approx(
            cs_transform_rhs(params, x, 0.25), rel=1e-14
        )
        with mp.workdps(40):
            for n in range(1, 5):
                deriv = self._derivative_at_zero(f, n)
                series_coef = float(deriv) / math.factorial(n)
                target = (-1.0) ** n * pochhammer(theta, n) * mom[n] / math.factorial(n)
                assert series_coef == pytest.approx(target, rel=1e-6, abs=1e-9)
