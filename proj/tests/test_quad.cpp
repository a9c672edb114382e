#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <sgd2d/quad.hpp>

using namespace sgd2d;
using namespace sgd2d::quad;

TEST(IntegrateFinite, ReferenceIntegrals)
{
    // mpmath values.
    auto r = integrate_finite([](double a) { return a * std::exp(-std::pow(a, 4)); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 0.373412066406214, 1e-12);
    // Logarithmic endpoint singularity.
    r = integrate_finite([](double u) { return std::log1p(0.82 / (u * u)); }, 0.0, 1.0);
    EXPECT_NEAR(r.value, 2.11095847496246, 1e-10);
    EXPECT_NEAR(r.value, std::log(1.82) + 2.0 * std::sqrt(0.82) * std::atan(1.0 / std::sqrt(0.82)), 1e-10);
}

TEST(IntegrateFinite, ErrorEstimateBoundsTrueError)
{
    struct Case {
        double (*f)(double);
        double lo, hi, exact;
    };
    const Case cases[] = {
        {[](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 2.0},
        {[](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 2.0},
        {[](double x) { return std::exp(-x * x); }, -5.0, 5.0, std::sqrt(std::numbers::pi) * std::erf(5.0)},
        {[](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
        {[](double x) { return 1.0 / (1.0 + 1e4 * x * x); }, -1.0, 1.0, 2.0 * std::atan(100.0) / 100.0},
    };
    for (const auto& c : cases) {
        for (double tol : {1e-6, 1e-9, 1e-12}) {
            QuadSpec spec;
            spec.rel_tol = tol;
            spec.abs_tol = 1e-15;
            const auto r = integrate_finite(c.f, c.lo, c.hi, spec);
            EXPECT_LE(std::fabs(r.value - c.exact), std::max(r.err_est, 1e-15)) << c.exact << " tol " << tol;
            EXPECT_LE(r.err_est, std::max(spec.abs_tol, tol * std::fabs(r.value)));
        }
    }
}

TEST(IntegrateFinite, FailureCarriesBestEstimate)
{
    QuadSpec spec;
    spec.max_subdivisions = 50;
    try {
        integrate_finite([](double x) { return 1.0 / x; }, 0.0, 1.0, spec);
        FAIL() << "divergent integral converged";
    } catch (const QuadError& e) {
        EXPECT_GT(e.best_estimate, 0.0);
        EXPECT_GT(e.err_est, 0.0);
    }
    EXPECT_THROW(integrate_finite([](double x) { return x; }, 1.0, 1.0), ParamError);
}

TEST(IntegrateSemiInfinite, ReferenceIntegrals)
{
    auto r = integrate_semi_infinite([](double g) { return std::exp(-std::sqrt(g)) / (1.0 + g); }, 0.0);
    EXPECT_NEAR(r.value, 0.686755923112854, 1e-10);
    r = integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x * x); }, 0.0);
    EXPECT_NEAR(r.value, std::numbers::pi / 2.0, 1e-10);
    r = integrate_semi_infinite([](double x) { return std::exp(-x); }, 2.0);
    EXPECT_NEAR(r.value, std::exp(-2.0), 1e-12);
}

TEST(IntegrateSemiInfinite, SquareRootEndpoint)
{
    const auto r = integrate_semi_infinite([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0, {},
                                           Endpoint::sqrt_singular);
    EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi), 1e-11);
    const auto shifted = integrate_semi_infinite([](double x) { return std::exp(-(x - 1.0)) / std::sqrt(x - 1.0); },
                                                 1.0, {}, Endpoint::sqrt_singular);
    EXPECT_NEAR(shifted.value, std::sqrt(std::numbers::pi), 1e-11);
}

TEST(SumSeries, ExponentialSeries)
{
    const double x = 2.5;
    auto term = [x](int k) { return std::exp(k * std::log(x) - std::lgamma(k + 1.0)); };
    const auto r = sum_series(term);
    EXPECT_NEAR(r.value, std::expm1(x), 1e-12);
    EXPECT_GT(r.n_used, 10);
    EXPECT_NEAR(r.max_abs_term, x * x / 2.0, 1e-12); // largest term is k = 2
}

TEST(SumSeries, CancellingAlternatingSeries)
{
    // sum (-1)^k x^k/k! with large x cancels heavily. The terms themselves
    // carry ~1e-14 relative error from exp/lgamma, so the absolute error is
    // bounded by a small multiple of that times the max term (~2.8e3).
    const double x = 10.0;
    auto term = [x](int k) { return (k % 2 ? -1.0 : 1.0) * std::exp(k * std::log(x) - std::lgamma(k + 1.0)); };
    const auto r = sum_series(term);
    EXPECT_NEAR(r.value, std::exp(-x) - 1.0, 1e-13 * r.max_abs_term);
}

TEST(SumSeries, NonConvergenceThrows)
{
    EXPECT_THROW(sum_series([](int k) { return 1.0 / k; }, {}, 200), QuadError);
    EXPECT_THROW(sum_series([](int) { return std::numeric_limits<double>::infinity(); }), QuadError);
}
