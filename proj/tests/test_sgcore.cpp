#include <gtest/gtest.h>

#include <sgd2d/sgcore.hpp>

using namespace sgd2d;

TEST(SystemParams, DefaultsAreValid)
{
    const SystemParams p;
    EXPECT_NO_THROW(validate_params(p));
    EXPECT_EQ(p.mode, Mode::overlay);
    EXPECT_DOUBLE_EQ(p.eta_c, 3.5);
    EXPECT_DOUBLE_EQ(p.eta_d, 4.5);
}

TEST(SystemParams, RejectsEachBrokenInvariant)
{
    auto expect_message = [](SystemParams p, const std::string& fragment) {
        try {
            validate_params(p);
            FAIL() << "expected ParamError containing " << fragment;
        } catch (const ParamError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    SystemParams p;
    p.eta_c = 2.0;
    expect_message(p, "eta_c must exceed 2");
    p = {};
    p.eta_d = 1.5;
    expect_message(p, "eta_d must exceed 2");
    p = {};
    p.a_ex = 1.2;
    expect_message(p, "exclusion radius must be < 1");
    p = {};
    p.a_ex = -0.1;
    expect_message(p, "exclusion radius");
    p = {};
    p.mu = 0.0;
    expect_message(p, "mu must be positive");
    p = {};
    p.k_mean = -1.0;
    expect_message(p, "k_mean");
    p = {};
    p.a = 0.0;
    expect_message(p, "a must be positive");
    p = {};
    p.beta = -0.5;
    expect_message(p, "beta");
}

TEST(SystemParams, ZeroLoadIsAllowedButLinkLengthNeedsBetaZero)
{
    SystemParams p;
    p.k_mean = 0.0;
    EXPECT_NO_THROW(validate_params(p));
    EXPECT_DOUBLE_EQ(p.d2d_link_length(), p.a);
    p.beta = 0.5;
    EXPECT_NO_THROW(validate_params(p));
    EXPECT_THROW(p.d2d_link_length(), ParamError);
}

TEST(SystemParams, DensityFactorCancelsForHalfBetaOverlay)
{
    SystemParams p;
    p.beta = 0.5;
    for (double k : {1.0, 3.0, 10.0, 100.0, 12345.0}) {
        p.k_mean = k;
        EXPECT_EQ(p.d2d_density_factor(4.0), 1.0) << k;
    }
    p.mode = Mode::underlay;
    p.k_mean = 10.0;
    p.beta = 0.0;
    EXPECT_NEAR(p.d2d_density_factor(4.0), 10.0 + 1.0 / std::sqrt(0.1), 1e-12);
}

TEST(SystemParams, DescribeIsCanonical)
{
    SystemParams a;
    SystemParams b;
    EXPECT_EQ(describe(a), describe(b));
    b.k_mean = 11.0;
    EXPECT_NE(describe(a), describe(b));
    EXPECT_NE(describe(a).find("mode=overlay"), std::string::npos);
}

TEST(MeanNeighborDistance, MatchesGammaRatio)
{
    // Gamma(j + 1/2) / (Gamma(j) sqrt(K)), evaluated with mpmath.
    EXPECT_NEAR(mean_neighbor_distance(1, 10.0), 0.280249560819896, 1e-12);
    EXPECT_NEAR(mean_neighbor_distance(2, 10.0), 0.420374341229845, 1e-12);
    EXPECT_NEAR(mean_neighbor_distance(10, 10.0), 0.987582928826156, 1e-12);
    EXPECT_NEAR(mean_neighbor_distance(1, 1.0), std::sqrt(std::acos(-1.0)) / 2.0, 1e-14);
}

TEST(MeanNeighborDistance, IncreasingAndFiniteForLargeIndex)
{
    double prev = 0.0;
    for (int j = 1; j <= 2000; ++j) {
        const double d = mean_neighbor_distance(j, 10.0);
        ASSERT_TRUE(std::isfinite(d));
        ASSERT_GT(d, prev);
        prev = d;
    }
    EXPECT_THROW(mean_neighbor_distance(0, 10.0), ParamError);
    EXPECT_THROW(mean_neighbor_distance(1, 0.0), ParamError);
}

TEST(TypicalGeometry, CountsAndExclusion)
{
    SystemParams p;
    auto g = typical_geometry(p, Viewpoint::uplink_bs);
    EXPECT_EQ(g.d2d_count(), 10u);
    EXPECT_EQ(g.cell_count(), 0u);
    EXPECT_NO_THROW(g.check());

    p.a_ex = 0.4;
    g = typical_geometry(p, Viewpoint::uplink_bs);
    EXPECT_EQ(g.d2d_count(), 9u); // only the nearest, at 0.280, falls inside the exclusion radius
    for (double d : g.d2d_interferers) {
        EXPECT_GT(d, 0.4);
    }

    p.a_ex = 0.0;
    p.k_mean = 2.6;
    EXPECT_EQ(typical_geometry(p, Viewpoint::uplink_bs).d2d_count(), 3u);
    p.k_mean = 0.4;
    EXPECT_THROW(typical_geometry(p, Viewpoint::uplink_bs), ParamError);
}

TEST(TypicalGeometry, D2dViewpointFixesLinkLength)
{
    SystemParams p;
    p.beta = 0.5;
    p.k_mean = 16.0;
    const auto g = typical_geometry(p, Viewpoint::d2d_receiver);
    EXPECT_DOUBLE_EQ(g.a0, 0.1 / 4.0);
    ASSERT_EQ(g.cell_count(), 1u);
    EXPECT_NEAR(g.cell_interferers[0], 0.886226925452758, 1e-12);
}

TEST(GeometrySnapshot, CheckRejectsNonCanonical)
{
    GeometrySnapshot g;
    g.a0 = 0.5;
    g.d2d_interferers = {0.2, 0.1};
    EXPECT_THROW(g.check(), ParamError);
    g.d2d_interferers = {0.1, 0.2};
    EXPECT_NO_THROW(g.check());
    g.a0 = 1.5;
    EXPECT_THROW(g.check(), ParamError);
    g.viewpoint = Viewpoint::d2d_receiver;
    EXPECT_NO_THROW(g.check());
    g.cell_interferers = {0.0};
    EXPECT_THROW(g.check(), ParamError);
}

TEST(DistributionCurve, Validity)
{
    DistributionCurve c;
    c.x = {1.0, 2.0, 3.0};
    c.f = {0.1, 0.1, 0.9};
    EXPECT_TRUE(c.valid());
    c.f = {0.1, 0.05, 0.9};
    EXPECT_FALSE(c.valid());
    c.f = {0.1, 0.2, 1.1};
    EXPECT_FALSE(c.valid());
    c.f = {0.1, 0.2, 0.3};
    c.x = {1.0, 1.0, 3.0};
    EXPECT_FALSE(c.valid());
    c.x = {1.0, 2.0};
    EXPECT_FALSE(c.valid());
}

TEST(Enums, Names)
{
    EXPECT_STREQ(to_string(Mode::underlay), "underlay");
    EXPECT_STREQ(to_string(Viewpoint::d2d_receiver), "d2d_receiver");
}
