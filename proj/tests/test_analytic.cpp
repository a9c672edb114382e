#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <sgd2d/analytic.hpp>

using namespace sgd2d;
using namespace sgd2d::analytic;

namespace {

SystemParams underlay(double mu = 0.1, double k = 10.0)
{
    SystemParams p;
    p.mode = Mode::underlay;
    p.mu = mu;
    p.k_mean = k;
    return p;
}

} // namespace

// Reference values below come from independent mpmath/scipy evaluations of
// the same integrals and series.

TEST(LocalAverageSir, TypicalD2dGeometry)
{
    const SystemParams p; // overlay defaults
    const auto g = typical_geometry(p, Viewpoint::d2d_receiver);
    const double denom = 398.141861657032 + 2.0 * 10.0 / 2.5;
    EXPECT_NEAR(local_avg_sir_d2d(g, p), std::pow(0.1, -4.5) / denom, 1e-9 * std::pow(0.1, -4.5) / denom);
    EXPECT_THROW(local_avg_sir_uplink(g, p), ParamError);
    auto moved = g;
    moved.a0 *= 1.1;
    EXPECT_THROW(local_avg_sir_d2d(moved, p), ParamError);
}

TEST(LocalAverageSir, UplinkInCellModel)
{
    auto p = underlay();
    auto g = typical_geometry(p, Viewpoint::uplink_bs);
    g.a0 = 0.6;
    EXPECT_NEAR(local_avg_sir_uplink(g, p), 0.37249, 1e-5);
    p.a_ex = 0.4;
    g = typical_geometry(p, Viewpoint::uplink_bs);
    g.a0 = 0.6;
    EXPECT_NEAR(local_avg_sir_uplink(g, p), 0.82437, 1e-5);
    // Overlay: no D2D term, only the averaged cellular interference.
    SystemParams o;
    g = typical_geometry(o, Viewpoint::uplink_bs);
    g.a0 = 0.5;
    EXPECT_NEAR(local_avg_sir_uplink(g, o), std::pow(0.5, -3.5) * 1.5 / 2.0, 1e-12);
}

TEST(CdfRho, UnderlayEta4ReferenceAndContinuity)
{
    auto p = underlay();
    p.eta_c = 4.0;
    EXPECT_NEAR(cdf_rho(1.0, p), 0.809603997087037, 1e-12);
    EXPECT_NEAR(cdf_rho(std::nextafter(1.0, 0.0), p), cdf_rho(1.0, p), 1e-9);
    EXPECT_EQ(cdf_rho(0.0, p), 0.0);
    double prev = 0.0;
    for (double x = 1e-4; x < 1e6; x *= 1.3) {
        const double f = cdf_rho(x, p);
        ASSERT_GE(f, prev - 1e-15) << x;
        ASSERT_LE(f, 1.0);
        prev = f;
    }
    EXPECT_GT(prev, 0.999);
    // Large kappa stays finite.
    auto heavy = underlay(1.0, 1000.0);
    heavy.eta_c = 4.0;
    EXPECT_TRUE(std::isfinite(cdf_rho(0.5, heavy)));
    EXPECT_TRUE(std::isfinite(cdf_rho(5.0, heavy)));
}

TEST(CdfRho, RefusesUnsupportedCases)
{
    auto p = underlay();
    p.eta_c = 3.5;
    EXPECT_THROW(cdf_rho(1.0, p), ParamError);
    p.eta_c = 4.0;
    p.a_ex = 0.2;
    EXPECT_THROW(cdf_rho(1.0, p), ParamError);
}

TEST(CdfRho, OverlayClosedForm)
{
    SystemParams p;
    p.eta_c = 4.0;
    EXPECT_DOUBLE_EQ(cdf_rho(4.0, p), 0.5);
    EXPECT_EQ(cdf_rho(0.99, p), 0.0);
    EXPECT_EQ(cdf_rho(1.0, p), 0.0);
}

TEST(CdfVarrho, SeriesMatchesErfFormAtEta4)
{
    for (Mode m : {Mode::underlay, Mode::overlay}) {
        SystemParams p;
        p.mode = m;
        p.eta_d = 4.0;
        p.beta = 0.25;
        for (double x = 0.01; x < 1e5; x *= 1.5) {
            const double erf_form = cdf_varrho_erf(x, p);
            try {
                EXPECT_NEAR(cdf_varrho_series(x, p), erf_form, 1e-8) << x;
            } catch (const quad::QuadError&) {
                EXPECT_NEAR(cdf_varrho_stable_integral(x, p), erf_form, 1e-8) << x;
            }
        }
    }
}

TEST(CdfVarrho, GeneralExponentReferenceValues)
{
    auto p = underlay();
    p.beta = 0.25;
    EXPECT_NEAR(cdf_varrho(1.0, p), 0.0401654119687256906816, 1e-12);
    EXPECT_NEAR(cdf_varrho(100.0, p), 0.293637668711208737125, 1e-12);
    EXPECT_NEAR(cdf_varrho(1e4, p), 0.989598339861651216293, 1e-10);
    SystemParams o;
    o.beta = 0.5;
    EXPECT_NEAR(cdf_varrho(3.0, o), 0.0162543434034485691157, 1e-12);
}

TEST(CdfVarrho, DispatchAndFallback)
{
    SystemParams p;
    p.eta_d = 4.0;
    EXPECT_EQ(cdf_varrho_eval(1.0, p).method, CdfMethod::closed_form);
    p.eta_d = 3.9;
    EXPECT_EQ(cdf_varrho_eval(1.0, p).method, CdfMethod::series);
    // Large argument: the series terms blow up and the integral takes over.
    auto q = underlay();
    q.eta_d = 4.5;
    const auto far = cdf_varrho_eval(1e9, q);
    EXPECT_EQ(far.method, CdfMethod::quadrature);
    EXPECT_GT(far.value, 0.99);
    for (double x : {0.1, 1.0, 10.0}) {
        EXPECT_NEAR(cdf_varrho_stable_integral(x, q), cdf_varrho_series(x, q), 1e-10);
    }
    q.a_ex = 0.3;
    EXPECT_THROW(cdf_varrho(1.0, q), ParamError);
}

TEST(CdfInstSir, Exponential)
{
    EXPECT_NEAR(cdf_inst_sir(2.0, 2.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_EQ(cdf_inst_sir(0.0, 2.0), 0.0);
    EXPECT_THROW(cdf_inst_sir(1.0, 0.0), ParamError);
}

TEST(LinkSe, ReferenceValuesAndInverse)
{
    EXPECT_NEAR(link_se(1.0), 0.860347382270886, 1e-13);
    EXPECT_NEAR(link_se(1000.0), 9.14361949103733, 1e-11);
    EXPECT_THROW(link_se(0.0), ParamError);
    for (double rho : {1e-4, 0.1, 1.0, 37.0, 1e5}) {
        EXPECT_NEAR(inverse_link_se(link_se(rho)), rho, 1e-9 * rho);
    }
    double prev = 0.0;
    for (double rho = 1e-3; rho < 1e6; rho *= 2.0) {
        ASSERT_GT(link_se(rho), prev);
        prev = link_se(rho);
    }
}

TEST(LinkSe, LogApproximationTracksExactCdf)
{
    SystemParams base;
    base.eta_c = 4.0;
    base.eta_d = 4.5;
    auto ul = underlay();
    ul.eta_c = 4.0;
    auto d2d_under = underlay();
    d2d_under.beta = 0.25;
    auto d2d_over = base;
    d2d_over.beta = 0.5;
    for (double nu = 0.05; nu < 15.0; nu += 0.05) {
        EXPECT_NEAR(cdf_link_se_approx(nu, ul, LinkSide::cellular_uplink),
                    cdf_link_se_exact(nu, ul, LinkSide::cellular_uplink), 0.04);
        EXPECT_NEAR(cdf_link_se_approx(nu, base, LinkSide::cellular_uplink),
                    cdf_link_se_exact(nu, base, LinkSide::cellular_uplink), 0.04);
        EXPECT_NEAR(cdf_link_se_approx(nu, d2d_under, LinkSide::d2d), cdf_link_se_exact(nu, d2d_under, LinkSide::d2d),
                    0.04);
        EXPECT_NEAR(cdf_link_se_approx(nu, d2d_over, LinkSide::d2d), cdf_link_se_exact(nu, d2d_over, LinkSide::d2d),
                    0.04);
    }
}

TEST(AvgSeUplink, OverlayReferenceValues)
{
    SystemParams p;
    const double expected[][2] = {{3.5, 2.26671559484947}, {4.0, 2.83432420676311}, {4.5, 3.37470502489066}};
    for (const auto& e : expected) {
        p.eta_c = e[0];
        EXPECT_NEAR(avg_se_uplink(p), e[1], 1e-9) << e[0];
    }
}

TEST(AvgSeUplink, ErfReductionMatchesDoubleIntegral)
{
    auto p = underlay();
    p.eta_c = 4.0;
    EXPECT_NEAR(avg_se_uplink_underlay_eta4(p), 0.689481413382, 1e-10);
    EXPECT_NEAR(avg_se_uplink_iterated(p), avg_se_uplink_underlay_eta4(p), 1e-7);
    p.k_mean = 0.0;
    p.mode = Mode::overlay;
    auto no_d2d = underlay(0.1, 0.0);
    no_d2d.eta_c = 4.0;
    EXPECT_NEAR(avg_se_uplink_underlay_eta4(no_d2d), avg_se_uplink(p), 1e-9);
}

TEST(AvgSeUplink, VanishingPowerRatioRecoversOverlay)
{
    for (double eta : {3.5, 4.0}) {
        // The limit is approached like mu^(2/eta) times a slowly decaying
        // tail, so mu must be far smaller than the tolerance.
        auto p = underlay(1e-20, 10.0);
        p.eta_c = eta;
        SystemParams o;
        o.eta_c = eta;
        EXPECT_NEAR(avg_se_uplink_iterated(p), avg_se_uplink_overlay(o), 1e-6) << eta;
    }
    auto p = underlay(0.1, 10.0);
    p.eta_c = 3.5;
    EXPECT_NEAR(avg_se_uplink(p), 0.642474, 2e-6);
}

TEST(AvgSeD2d, TrigIntegralFormMatchesQuadrature)
{
    SystemParams p;
    p.eta_d = 4.0;
    EXPECT_NEAR(avg_se_d2d_closed_form(p), 4.00614779731601, 1e-9);
    for (Mode m : {Mode::overlay, Mode::underlay}) {
        for (double k : {1.0, 10.0, 200.0}) {
            for (double beta : {0.0, 0.25, 0.75}) {
                SystemParams q;
                q.mode = m;
                q.eta_d = 4.0;
                q.k_mean = k;
                q.beta = beta;
                EXPECT_NEAR(avg_se_d2d_closed_form(q), avg_se_d2d_quadrature(q), 1e-6);
            }
        }
    }
}

TEST(AvgSeD2d, DensityInvariantAtHalfBeta)
{
    SystemParams p;
    p.eta_d = 4.0;
    p.beta = 0.5;
    for (double k : {1.0, 10.0, 100.0}) {
        p.k_mean = k;
        EXPECT_EQ(avg_se_d2d(p), avg_se_d2d_density_invariant(0.1, 4.0));
        EXPECT_NEAR(avg_se_d2d(p), 10.0488076952363, 1e-9);
    }
    p.eta_d = 4.5;
    p.k_mean = 37.0;
    EXPECT_EQ(avg_se_d2d(p), avg_se_d2d_density_invariant(0.1, 4.5));
}

TEST(AvgSeD2d, GeneralExponentReferenceValues)
{
    SystemParams o;
    EXPECT_NEAR(avg_se_d2d(o), 4.72872, 1e-5);
    auto u = underlay();
    u.a = 0.12;
    EXPECT_NEAR(avg_se_d2d(u), 3.21488, 1e-5);
}

TEST(Exclusion, UplinkReferenceValues)
{
    auto p = underlay();
    p.eta_c = 3.5;
    const double expected[][2] = {{0.1, 0.702922}, {0.25, 0.931885}, {0.3, 1.016857}};
    for (const auto& e : expected) {
        p.a_ex = e[0];
        EXPECT_NEAR(avg_se_uplink_exclusion(p), e[1], 2e-6) << e[0];
    }
    // The in-cell field is explicit and the out-of-cell field is at its mean,
    // so a_ex -> 0 is continuous but does not reproduce the full-plane model.
    p.a_ex = 0.0;
    const double no_hole = avg_se_uplink_exclusion(p);
    p.a_ex = 1e-4;
    EXPECT_NEAR(avg_se_uplink_exclusion(p), no_hole, 1e-6);
    EXPECT_NEAR(no_hole, avg_se_uplink_iterated(p), 1e-3);
    SystemParams o;
    o.a_ex = 0.2;
    EXPECT_THROW(avg_se_uplink_exclusion(o), ParamError);
    auto with_exclusion = underlay();
    with_exclusion.a_ex = 0.2;
    EXPECT_THROW(avg_se_uplink(with_exclusion), ParamError);
}

TEST(Exclusion, D2dLowerBoundReferenceValues)
{
    const double expected[3][3] = {{4.4247, 4.4266, 4.4324}, {3.2142, 3.2154, 3.2192}, {2.0222, 2.0228, 2.0247}};
    const double ks[] = {5.0, 10.0, 20.0};
    const double aex[] = {0.0, 0.2, 0.4};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            auto p = underlay(0.1, ks[i]);
            p.a = 0.12;
            p.a_ex = aex[j];
            EXPECT_NEAR(avg_se_d2d_exclusion_lb(p), expected[i][j], 1e-4) << ks[i] << " " << aex[j];
        }
    }
    // Without exclusion the bound sits below the exact average.
    auto p = underlay();
    p.a = 0.12;
    EXPECT_LT(avg_se_d2d_exclusion_lb(p), avg_se_d2d(p));
}

TEST(SystemSe, D2dDominatesAtDefaults)
{
    const auto s = system_se(SystemParams{});
    EXPECT_NEAR(s.uplink, 2.26671559484947, 1e-9);
    EXPECT_NEAR(s.d2d / s.uplink, 20.86, 0.01);
    SystemParams none;
    none.k_mean = 0.0;
    EXPECT_EQ(system_se(none).d2d, 0.0);
}

TEST(MaxLoad, SolvesUplinkConstraint)
{
    auto p = underlay();
    p.a = 0.12;
    p.a_ex = 0.25;
    const auto r = max_d2d_load(p, 0.8);
    auto at = [&](double k) {
        auto q = p;
        q.k_mean = k;
        return avg_se_uplink_exclusion(q);
    };
    const double target = 0.8 * at(0.0);
    EXPECT_GE(at(r.k_max), target);
    EXPECT_LT(at(r.k_max + 2e-3), target);
    auto q = p;
    q.k_mean = r.k_max;
    EXPECT_NEAR(r.d2d_system_se, q.thinning() * r.k_max * avg_se_d2d_exclusion_lb(q), 1e-9);
    EXPECT_EQ(max_d2d_load(p, 1.0).k_max, 0.0);
    EXPECT_THROW(max_d2d_load(p, 0.0), ParamError);
    EXPECT_THROW(max_d2d_load(SystemParams{}, 0.8), ParamError);
}

TEST(Contour, EqualRateBoundary)
{
    const auto c = d2d_vs_uplink_contour(SystemParams{});
    EXPECT_NEAR(c.c, 5.12436102772065, 1e-9);
    EXPECT_DOUBLE_EQ(c.exponent, 4.5 / 3.5);
    EXPECT_NEAR(c.share(0.15), 0.80, 0.02);
    EXPECT_GE(c.share(0.05), 0.98);
    double prev = 1.0;
    for (double ad = 0.01; ad < 0.5; ad += 0.01) {
        ASSERT_LE(c.share(ad), prev);
        prev = c.share(ad);
    }
    EXPECT_THROW(d2d_vs_uplink_contour(underlay()), ParamError);
}

TEST(Figures, LoadDependenceOfD2dCdfFollowsBeta)
{
    SystemParams lo;
    lo.k_mean = 10.0;
    SystemParams hi;
    hi.k_mean = 100.0;
    for (double beta : {0.25, 0.5, 0.75}) {
        lo.beta = hi.beta = beta;
        for (double nu = 0.5; nu <= 25.0; nu += 0.5) {
            const double f10 = cdf_link_se_exact(nu, lo, LinkSide::d2d);
            const double f100 = cdf_link_se_exact(nu, hi, LinkSide::d2d);
            if (beta < 0.5) {
                EXPECT_GE(f100, f10);
            } else if (beta == 0.5) {
                EXPECT_NEAR(f100, f10, 1e-12);
            } else {
                EXPECT_LE(f100, f10);
            }
        }
    }
}
