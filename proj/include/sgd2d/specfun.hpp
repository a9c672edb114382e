#pragma once

// Real-valued special functions: gamma, error functions, exponential
// integrals of real order and the trigonometric integrals.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "sgcore.hpp"

namespace sgd2d::specfun {

struct Accuracy {
    double abs_tol = 1e-12;
    int max_terms = 500;
};

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

inline constexpr double eps = std::numeric_limits<double>::epsilon();
inline constexpr double tiny = 1e-300;
inline constexpr int max_iter = 1000;

inline void require_positive(double x, const char* fn)
{
    if (!(x > 0.0)) {
        throw ParamError(std::string(fn) + ": argument must be positive");
    }
}

} // namespace detail

inline double gamma_fn(double x)
{
    detail::require_positive(x, "gamma_fn");
    return std::tgamma(x);
}

inline double erf_fn(double x) { return std::erf(x); }

inline double erfc_fn(double x) { return std::erfc(x); }

/// Scaled complementary error function exp(x^2) erfc(x), x >= 0.
inline double erfcx_fn(double x)
{
    if (x < 0.0) {
        throw ParamError("erfcx_fn: argument must be nonnegative");
    }
    if (x < 4.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    // Laplace continued fraction: sqrt(pi) erfcx(x) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+ ...)))),
    // evaluated by modified Lentz.
    double f = x;
    double c = x;
    double d = 0.0;
    for (int n = 1; n <= detail::max_iter; ++n) {
        const double an = 0.5 * n;
        d = x + an * d;
        if (std::fabs(d) < detail::tiny) {
            d = detail::tiny;
        }
        c = x + an / c;
        if (std::fabs(c) < detail::tiny) {
            c = detail::tiny;
        }
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < detail::eps) {
            break;
        }
    }
    return 1.0 / (f * std::sqrt(std::numbers::pi));
}

namespace detail {

// exp(x) E_nu(x) for x > 1 via the continued fraction
// E_nu(x) = e^{-x} (1/(x+nu-  1*nu/(x+nu+2-  2(nu+1)/(x+nu+4- ...)))).
inline double scaled_expint_cf(double nu, double x)
{
    double b = x + nu;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -i * (nu - 1.0 + i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) < eps) {
            return h;
        }
    }
    return h;
}

// Integer order n >= 1, 0 < x <= 1: power series with the digamma term.
inline double expint_int_series(int n, double x)
{
    double ans = n - 1 != 0 ? 1.0 / (n - 1) : -std::log(x) - euler_gamma;
    double fact = 1.0;
    for (int i = 1; i <= max_iter; ++i) {
        fact *= -x / i;
        double del;
        if (i != n - 1) {
            del = -fact / (i - n + 1);
        } else {
            double psi = -euler_gamma;
            for (int ii = 1; ii <= n - 1; ++ii) {
                psi += 1.0 / ii;
            }
            del = fact * (-std::log(x) + psi);
        }
        ans += del;
        if (std::fabs(del) < std::fabs(ans) * eps) {
            break;
        }
    }
    return ans;
}

// Non-integer order, 0 < x <= 1:
// E_nu(x) = Gamma(1-nu) x^{nu-1} - sum_k (-x)^k / (k! (1-nu+k)).
inline double expint_real_series(double nu, double x)
{
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k <= max_iter; ++k) {
        if (k > 0) {
            term *= -x / k;
        }
        const double del = term / (1.0 - nu + k);
        sum += del;
        if (k > 2 && std::fabs(del) < eps * std::fabs(sum)) {
            break;
        }
    }
    return std::tgamma(1.0 - nu) * std::pow(x, nu - 1.0) - sum;
}

inline bool is_integer(double nu) { return nu == std::floor(nu); }

} // namespace detail

/// exp(x) E_1(x) for x > 0, free of overflow for large x.
inline double scaled_exp_int_e1(double x)
{
    detail::require_positive(x, "exp_int_e1");
    if (x > 1.0) {
        return detail::scaled_expint_cf(1.0, x);
    }
    return std::exp(x) * detail::expint_int_series(1, x);
}

inline double exp_int_e1(double x)
{
    detail::require_positive(x, "exp_int_e1");
    if (x > 1.0) {
        return std::exp(-x) * detail::scaled_expint_cf(1.0, x);
    }
    return detail::expint_int_series(1, x);
}

/// Generalized exponential integral E_nu(x) = int_1^inf e^{-x t} t^{-nu} dt
/// for real order nu > 1 and x >= 0.
inline double exp_int_en(double nu, double x)
{
    if (!(nu > 1.0)) {
        throw ParamError("exp_int_en: order must exceed 1");
    }
    if (x < 0.0) {
        throw ParamError("exp_int_en: argument must be nonnegative");
    }
    if (x == 0.0) {
        return 1.0 / (nu - 1.0);
    }
    if (x > 1.0) {
        if (x > 745.0) {
            return 0.0;
        }
        return std::exp(-x) * detail::scaled_expint_cf(nu, x);
    }
    if (detail::is_integer(nu)) {
        return detail::expint_int_series(static_cast<int>(nu), x);
    }
    return detail::expint_real_series(nu, x);
}

namespace detail {

struct TrigIntegrals {
    double si_tail; // int_x^inf sin(t)/t dt
    double ci;      // Ci(x) = -int_x^inf cos(t)/t dt
};

inline TrigIntegrals trig_integrals(double x)
{
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (x > 2.0) {
        // E_1(ix) by continued fraction; then Ci = -Re(h), pi/2 - Si = -Im(h).
        std::complex<double> b(1.0, x);
        std::complex<double> c(1.0 / tiny, 0.0);
        std::complex<double> d = 1.0 / b;
        std::complex<double> h = d;
        for (int i = 2; i <= max_iter; ++i) {
            const double a = -static_cast<double>((i - 1) * (i - 1));
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            const std::complex<double> del = c * d;
            h *= del;
            if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < eps) {
                break;
            }
        }
        h *= std::complex<double>(std::cos(x), -std::sin(x));
        return {-h.imag(), -h.real()};
    }
    // Power series for Si and Ci.
    double si_sum = 0.0;
    double ci_sum = 0.0;
    double term = 1.0; // x^k / k!
    for (int k = 1; k <= max_iter; ++k) {
        term *= x / k;
        const int m = k % 4;
        if (k % 2 == 1) {
            const double del = (m == 1 ? term : -term) / k;
            si_sum += del;
            if (std::fabs(del) < eps * std::fabs(si_sum) && k > 3) {
                break;
            }
        } else {
            ci_sum += (m == 0 ? term : -term) / k;
        }
    }
    return {half_pi - si_sum, euler_gamma + std::log(x) + ci_sum};
}

} // namespace detail

/// si(x) = int_x^inf sin(t)/t dt = pi/2 - Si(x).
inline double trig_int_si(double x)
{
    detail::require_positive(x, "trig_int_si");
    return detail::trig_integrals(x).si_tail;
}

/// ci(x) = -int_x^inf cos(t)/t dt, the standard cosine integral Ci(x).
inline double trig_int_ci(double x)
{
    detail::require_positive(x, "trig_int_ci");
    return detail::trig_integrals(x).ci;
}

} // namespace sgd2d::specfun
