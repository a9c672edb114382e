#pragma once

// Adaptive Gauss-Kronrod integration on finite and semi-infinite ranges,
// plus compensated summation of slowly decaying series.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgcore.hpp"

namespace sgd2d::quad {

struct QuadSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;

    /// Tighter spec for integrals nested inside another integrand.
    QuadSpec nested() const { return {rel_tol * 0.1, abs_tol * 0.1, max_subdivisions}; }
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
};

/// Raised when an integral or a series fails to converge. Carries the best
/// estimate reached so that callers can report it.
class QuadError : public std::runtime_error {
public:
    QuadError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), err_est(err)
    {
    }
    double best_estimate;
    double err_est;
};

enum class Endpoint {
    regular,      ///< f is bounded (or log-singular) at the lower limit
    sqrt_singular ///< f behaves like 1/sqrt(x - lo); integrated after x = lo + t^2
};

namespace detail {

// 15-point Kronrod abscissae with the embedded 7-point Gauss weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, err;
    bool operator<(const Segment& o) const { return err < o.err; }
};

// One GK15 panel with the QUADPACK error heuristic.
template <class F>
Segment gk15(F& f, double lo, double hi)
{
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double s = f1[j] + f2[j];
        resk += wgk[j] * s;
        resabs += wgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) {
            resg += wg[j / 2] * s;
        }
    }
    const double mean = resk * 0.5;
    double resasc = wgk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        resasc += wgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }
    resk *= half;
    resabs *= std::fabs(half);
    resasc *= std::fabs(half);
    double err = std::fabs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * resabs, err);
    }
    return {lo, hi, resk, err};
}

} // namespace detail

/// Globally adaptive GK15 on [lo, hi]. Integrable endpoint singularities are
/// fine since the rule never samples the endpoints.
template <class F>
QuadResult integrate_finite(F&& f, double lo, double hi, const QuadSpec& spec = {})
{
    if (!(lo < hi)) {
        throw ParamError("integrate_finite: requires lo < hi");
    }
    std::priority_queue<detail::Segment> heap;
    const auto first = detail::gk15(f, lo, hi);
    double total = first.value;
    double total_err = first.err;
    heap.push(first);
    int subdivisions = 1;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
        if (!std::isfinite(total)) {
            throw QuadError("integrand produced a non-finite value", total, total_err);
        }
        if (subdivisions >= spec.max_subdivisions) {
            throw QuadError("integral did not converge within " + std::to_string(spec.max_subdivisions) +
                                " subdivisions",
                            total, total_err);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const auto left = detail::gk15(f, worst.lo, mid);
        const auto right = detail::gk15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
        // Re-sum occasionally so that the running totals do not drift.
        if (subdivisions % 64 == 0) {
            auto copy = heap;
            total = 0.0;
            total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().err;
                copy.pop();
            }
        }
    }
    return {total, total_err};
}

/// Integral over (lo, inf). The range is mapped onto (0,1) by x = lo + u/(1-u);
/// with Endpoint::sqrt_singular the substitution x = lo + t^2 is applied first.
template <class F>
QuadResult integrate_semi_infinite(F&& f, double lo, const QuadSpec& spec = {},
                                   Endpoint endpoint = Endpoint::regular)
{
    if (endpoint == Endpoint::sqrt_singular) {
        auto mapped = [&](double u) {
            const double one_minus = 1.0 - u;
            const double t = u / one_minus;
            const double v = f(lo + t * t);
            if (v == 0.0) {
                return 0.0;
            }
            return v * 2.0 * t / (one_minus * one_minus);
        };
        return integrate_finite(mapped, 0.0, 1.0, spec);
    }
    auto mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double v = f(lo + u / one_minus);
        if (v == 0.0) {
            return 0.0;
        }
        return v / (one_minus * one_minus);
    };
    return integrate_finite(mapped, 0.0, 1.0, spec);
}

struct SeriesResult {
    double value = 0.0;
    int n_used = 0;
    double max_abs_term = 0.0;
};

/// Neumaier-compensated sum of term(1), term(2), ... stopping after three
/// consecutive terms below abs_tol. Throws QuadError after max_terms.
template <class Term>
SeriesResult sum_series(Term&& term, const QuadSpec& spec = {}, int max_terms = 500, int first = 1)
{
    double sum = 0.0;
    double comp = 0.0;
    double max_abs = 0.0;
    int small_run = 0;
    for (int i = 0; i < max_terms; ++i) {
        const double t = term(first + i);
        if (!std::isfinite(t)) {
            throw QuadError("series term is not finite", sum + comp, std::numeric_limits<double>::infinity());
        }
        max_abs = std::max(max_abs, std::fabs(t));
        const double next = sum + t;
        if (std::fabs(sum) >= std::fabs(t)) {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
        small_run = std::fabs(t) < spec.abs_tol ? small_run + 1 : 0;
        if (small_run == 3) {
            return {sum + comp, i + 1, max_abs};
        }
    }
    throw QuadError("series did not converge within " + std::to_string(max_terms) + " terms", sum + comp,
                    max_abs);
}

} // namespace sgd2d::quad
