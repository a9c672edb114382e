#pragma once

// Closed forms and quadrature evaluations of local-average SIR
// distributions and ergodic spectral efficiencies for the cellular uplink
// and the D2D link, with and without exclusion regions.

#include <cmath>
#include <numbers>
#include <string>

#include "quad.hpp"
#include "sgcore.hpp"
#include "specfun.hpp"

namespace sgd2d::analytic {

enum class LinkSide { cellular_uplink, d2d };

inline constexpr double log2e = std::numbers::log2e;

namespace detail {

inline double gamma_one_minus(double eta) { return std::tgamma(1.0 - 2.0 / eta); }

inline void require_no_exclusion(const SystemParams& p, const char* op)
{
    if (p.a_ex != 0.0) {
        throw ParamError(std::string(op) + ": exclusion regions are not part of this model (a_ex must be 0)");
    }
}

// Upper limit for an inner integral over a in (0, 1] whose integrand carries
// exp(-decay a^eta) times at most e^slack: beyond it the integrand is below
// e^-60 of its peak. Without it the rule can miss a peak narrower than its
// first nodes and report a converged zero.
inline double decay_cutoff(double decay, double eta, double slack = 0.0)
{
    if (!(decay > 0.0)) {
        return 1.0;
    }
    return std::min(1.0, std::pow((60.0 + slack) / decay, 1.0 / eta));
}

inline void require_underlay(const SystemParams& p, const char* op)
{
    if (p.mode != Mode::underlay) {
        throw ParamError(std::string(op) + ": requires underlay mode");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Local-average SIR for a given geometry
// ---------------------------------------------------------------------------

/// Local-average SIR at the BS with the averaging circle equal to the cell.
/// Interference from outside the cell enters through its spatial mean
/// 2 (alpha mu p K + 1) / (eta - 2).
inline double local_avg_sir_uplink(const GeometrySnapshot& g, const SystemParams& p)
{
    if (g.viewpoint != Viewpoint::uplink_bs) {
        throw ParamError("local_avg_sir_uplink: snapshot is not at the uplink viewpoint");
    }
    const double eta = p.eta_c;
    const double alpha = p.alpha();
    double in_circle = 0.0;
    for (double d : g.d2d_interferers) {
        in_circle += std::pow(d, -eta);
    }
    const double out_mean = 2.0 * (alpha * p.mu * p.thinning() * p.k_mean + 1.0) / (eta - 2.0);
    return std::pow(g.a0, -eta) / (alpha * p.mu * in_circle + out_mean);
}

/// Local-average SIR at a D2D receiver; a0 must equal a / K^beta.
inline double local_avg_sir_d2d(const GeometrySnapshot& g, const SystemParams& p)
{
    if (g.viewpoint != Viewpoint::d2d_receiver) {
        throw ParamError("local_avg_sir_d2d: snapshot is not at the d2d viewpoint");
    }
    const double a0 = p.d2d_link_length();
    if (std::fabs(g.a0 - a0) > 1e-12 * a0) {
        throw ParamError("local_avg_sir_d2d: snapshot a0 differs from a/K^beta");
    }
    const double eta = p.eta_d;
    const double alpha = p.alpha();
    double d2d = 0.0;
    for (double d : g.d2d_interferers) {
        d2d += std::pow(d, -eta);
    }
    double cell = 0.0;
    for (double d : g.cell_interferers) {
        cell += std::pow(d, -eta);
    }
    const double out_mean = 2.0 * (p.thinning() * p.k_mean + alpha / p.mu) / (eta - 2.0);
    return std::pow(a0, -eta) / (d2d + alpha / p.mu * cell + out_mean);
}

// ---------------------------------------------------------------------------
// Local-average SIR distributions
// ---------------------------------------------------------------------------

/// CDF of the uplink local-average SIR for underlay at eta = 4. The
/// e^{kappa^2} factors are carried inside erfcx so that large kappa is safe.
inline double cdf_rho_underlay_eta4(double x, const SystemParams& p)
{
    using specfun::erf_fn;
    using specfun::erfcx_fn;
    detail::require_underlay(p, "cdf_rho_underlay_eta4");
    detail::require_no_exclusion(p, "cdf_rho_underlay_eta4");
    if (p.eta_c != 4.0) {
        throw ParamError("cdf_rho_underlay_eta4: closed form exists only for eta_c = 4");
    }
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double kappa = std::sqrt(std::numbers::pi * p.mu) * p.k_mean / 2.0;
    if (x >= 1.0) {
        return 1.0 - erfcx_fn(kappa) / std::sqrt(x);
    }
    const double t = kappa / std::sqrt(1.0 - x);
    const double shifted = erfcx_fn(t) * std::exp(-kappa * kappa * x / (1.0 - x)) - erfcx_fn(kappa);
    return shifted / std::sqrt(x) + erf_fn(kappa * std::sqrt(x / (1.0 - x)));
}

/// CDF of the uplink local-average SIR for overlay (any eta_c).
inline double cdf_rho_overlay(double x, const SystemParams& p)
{
    if (p.mode != Mode::overlay) {
        throw ParamError("cdf_rho_overlay: requires overlay mode");
    }
    const double eta = p.eta_c;
    const double edge = (eta - 2.0) / 2.0;
    if (x < edge) {
        return 0.0;
    }
    return 1.0 - std::pow(edge / x, 2.0 / eta);
}

/// Uplink local-average SIR CDF for whichever closed form applies.
inline double cdf_rho(double x, const SystemParams& p)
{
    return p.mode == Mode::overlay ? cdf_rho_overlay(x, p) : cdf_rho_underlay_eta4(x, p);
}

/// Base b of the D2D SIR series: F(x) = (1/pi) sum_k b^k Gamma(2k/eta)/k! sin(k pi (1 - 2/eta)).
inline double varrho_series_base(double x, const SystemParams& p)
{
    const double eta = p.eta_d;
    const double a = p.a;
    return std::pow(x, 2.0 / eta) * a * a * p.d2d_density_factor(eta) * detail::gamma_one_minus(eta);
}

/// Closed form for eta_d = 4.
inline double cdf_varrho_erf(double x, const SystemParams& p)
{
    if (p.eta_d != 4.0) {
        throw ParamError("cdf_varrho_erf: requires eta_d = 4");
    }
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double a = p.a;
    const double arg = std::sqrt(std::numbers::pi * x) * a * a / 2.0 * p.d2d_density_factor(4.0);
    return specfun::erf_fn(arg);
}

/// Largest series term magnitude that still leaves ~1e-10 absolute accuracy:
/// the terms carry ~1e-14 relative error from exp, lgamma and sin.
inline constexpr double varrho_series_term_limit = 1e4;

/// Series form for general eta_d. Throws quad::QuadError when the series
/// would lose accuracy to cancellation or does not converge.
inline double cdf_varrho_series(double x, const SystemParams& p, int max_terms = 500)
{
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double eta = p.eta_d;
    const double b = varrho_series_base(x, p);
    const double log_b = std::log(b);
    const double phase = std::numbers::pi * (1.0 - 2.0 / eta);
    auto term = [&](int k) {
        const double log_mag = k * log_b + std::lgamma(2.0 * k / eta) - std::lgamma(k + 1.0);
        return std::exp(log_mag) * std::sin(k * phase) / std::numbers::pi;
    };
    quad::QuadSpec spec;
    spec.abs_tol = 1e-17;
    const auto res = quad::sum_series(term, spec, max_terms);
    if (res.max_abs_term > varrho_series_term_limit) {
        throw quad::QuadError("varrho series argument " + std::to_string(b) + " beyond cancellation guard",
                              res.value, res.max_abs_term * 1e-16);
    }
    return std::min(1.0, std::max(0.0, res.value));
}

/// Integral representation of the same CDF. The aggregate interference of
/// the full-plane field is one-sided stable with index 2/eta, and Kanter's
/// representation turns its CDF into a smooth integral over (0, pi).
inline double cdf_varrho_stable_integral(double x, const SystemParams& p, const quad::QuadSpec& spec = {})
{
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double alpha = 2.0 / p.eta_d;
    const double b = varrho_series_base(x, p);
    const double scale = std::pow(b, 1.0 / (1.0 - alpha));
    auto integrand = [&](double phi) {
        const double log_a = std::log(std::sin((1.0 - alpha) * phi)) +
                             alpha / (1.0 - alpha) * std::log(std::sin(alpha * phi)) -
                             std::log(std::sin(phi)) / (1.0 - alpha);
        return std::exp(-scale * std::exp(log_a));
    };
    const auto res = quad::integrate_finite(integrand, 0.0, std::numbers::pi, spec);
    return std::min(1.0, std::max(0.0, 1.0 - res.value / std::numbers::pi));
}

enum class CdfMethod { closed_form, series, quadrature };

inline const char* to_string(CdfMethod m)
{
    switch (m) {
    case CdfMethod::closed_form:
        return "closed_form";
    case CdfMethod::series:
        return "series";
    case CdfMethod::quadrature:
        return "quadrature";
    }
    return "?";
}

struct CdfEval {
    double value;
    CdfMethod method;
};

/// D2D local-average SIR CDF with the evaluation route used.
inline CdfEval cdf_varrho_eval(double x, const SystemParams& p)
{
    detail::require_no_exclusion(p, "cdf_varrho");
    if (p.eta_d == 4.0) {
        return {cdf_varrho_erf(x, p), CdfMethod::closed_form};
    }
    try {
        return {cdf_varrho_series(x, p), CdfMethod::series};
    } catch (const quad::QuadError&) {
        return {cdf_varrho_stable_integral(x, p), CdfMethod::quadrature};
    }
}

inline double cdf_varrho(double x, const SystemParams& p) { return cdf_varrho_eval(x, p).value; }

/// Instantaneous SIR given its local average: exponential with mean local_avg.
inline double cdf_inst_sir(double gamma, double local_avg)
{
    if (!(local_avg > 0.0)) {
        throw ParamError("cdf_inst_sir: local average must be positive");
    }
    if (!(gamma > 0.0)) {
        return 0.0;
    }
    return -std::expm1(-gamma / local_avg);
}

// ---------------------------------------------------------------------------
// Link spectral efficiency
// ---------------------------------------------------------------------------

/// Ergodic spectral efficiency (bits/s/Hz) under Rayleigh fading for a
/// local-average SIR: e^{1/rho} E1(1/rho) log2(e).
inline double link_se(double local_avg)
{
    if (!(local_avg > 0.0)) {
        throw ParamError("link_se: local average must be positive");
    }
    if (std::isinf(local_avg)) {
        return std::numeric_limits<double>::infinity();
    }
    return specfun::scaled_exp_int_e1(1.0 / local_avg) * log2e;
}

/// Local-average SIR whose link spectral efficiency equals nu.
inline double inverse_link_se(double nu)
{
    if (!(nu > 0.0)) {
        return 0.0;
    }
    double lo = -700.0;
    double hi = 700.0;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (link_se(std::exp(mid)) < nu) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::exp(0.5 * (lo + hi));
}

/// Local-average SIR CDF on the requested side.
inline double cdf_local_avg(double x, const SystemParams& p, LinkSide side)
{
    return side == LinkSide::cellular_uplink ? cdf_rho(x, p) : cdf_varrho(x, p);
}

/// Link spectral efficiency CDF through the logarithmic approximation
/// e^x E1(x) log2(e) ~ 1.4 ln(1 + 0.82/x).
inline double cdf_link_se_approx(double nu, const SystemParams& p, LinkSide side)
{
    if (!(nu > 0.0)) {
        return 0.0;
    }
    const double arg = std::expm1(nu / 1.4) / 0.82;
    return cdf_local_avg(arg, p, side);
}

/// Same CDF with the exact spectral efficiency mapping inverted numerically.
inline double cdf_link_se_exact(double nu, const SystemParams& p, LinkSide side)
{
    if (!(nu > 0.0)) {
        return 0.0;
    }
    return cdf_local_avg(inverse_link_se(nu), p, side);
}

// ---------------------------------------------------------------------------
// Spectral efficiency averaged over network geometries
// ---------------------------------------------------------------------------

/// Uplink average over the user position and the full-plane D2D field as an
/// iterated integral; alpha = 0 covers overlay.
inline double avg_se_uplink_iterated(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    const double eta = p.eta_c;
    const double link_coef = 2.0 / (eta - 2.0);
    const double d2d_coef = p.alpha() * p.k_mean * detail::gamma_one_minus(eta);
    const auto inner_spec = spec.nested();
    auto outer = [&](double g) {
        const double d2d_scale = d2d_coef * std::pow(g * p.mu, 2.0 / eta);
        auto inner = [&](double a) {
            return a * std::exp(-g * link_coef * std::pow(a, eta) - d2d_scale * a * a);
        };
        const double upper = detail::decay_cutoff(g * link_coef, eta);
        if (!(upper > 0.0)) {
            return 0.0;
        }
        return log2e / (g + 1.0) * quad::integrate_finite(inner, 0.0, upper, inner_spec).value;
    };
    return 2.0 * quad::integrate_semi_infinite(outer, 0.0, spec).value;
}

/// Underlay with eta_c = 4: the inner integral is an error function, leaving
/// a 1-D integral with a 1/sqrt(gamma) endpoint.
inline double avg_se_uplink_underlay_eta4(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    using specfun::erfcx_fn;
    detail::require_underlay(p, "avg_se_uplink_underlay_eta4");
    if (p.eta_c != 4.0) {
        throw ParamError("avg_se_uplink_underlay_eta4: requires eta_c = 4");
    }
    const double kappa = std::sqrt(std::numbers::pi * p.mu) * p.k_mean / 2.0;
    const double base = erfcx_fn(kappa);
    // e^{kappa^2} [erf(sqrt(g) + kappa) - erf(kappa)] in overflow-free form.
    auto integrand = [&](double g) {
        const double t = std::sqrt(g);
        const double diff = base - erfcx_fn(t + kappa) * std::exp(-t * (t + 2.0 * kappa));
        return diff / (t * (1.0 + g));
    };
    const auto res = quad::integrate_semi_infinite(integrand, 0.0, spec, quad::Endpoint::sqrt_singular);
    return std::sqrt(std::numbers::pi) / (2.0 * std::numbers::ln2) * res.value;
}

/// Overlay uplink: the SIR depends only on the user distance, so the average
/// is a single integral of e^x E1(x) against the uniform-in-disc law.
inline double avg_se_uplink_overlay(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    const double eta = p.eta_c;
    auto integrand = [&](double a) {
        const double x = 2.0 * std::pow(a, eta) / (eta - 2.0);
        if (!(x > 0.0)) {
            return 0.0;
        }
        return 2.0 * a * specfun::scaled_exp_int_e1(x) * log2e;
    };
    return quad::integrate_finite(integrand, 0.0, 1.0, spec).value;
}

/// Uplink spectral efficiency averaged over all geometries (no exclusion).
inline double avg_se_uplink(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    detail::require_no_exclusion(p, "avg_se_uplink");
    if (p.mode == Mode::overlay) {
        return avg_se_uplink_overlay(p, spec);
    }
    if (p.eta_c == 4.0) {
        return avg_se_uplink_underlay_eta4(p, spec);
    }
    return avg_se_uplink_iterated(p, spec);
}

/// Exponent scale c in the D2D average int_0^inf log2(e)/(1+g) e^{-c g^{2/eta}} dg.
inline double d2d_interference_scale(const SystemParams& p)
{
    const double a = p.a;
    return a * a * p.d2d_density_factor(p.eta_d) * detail::gamma_one_minus(p.eta_d);
}

namespace detail {

inline double d2d_average_quadrature(double scale, double eta, const quad::QuadSpec& spec)
{
    auto integrand = [&](double g) { return log2e / (1.0 + g) * std::exp(-scale * std::pow(g, 2.0 / eta)); };
    return quad::integrate_semi_infinite(integrand, 0.0, spec).value;
}

// eta = 4, scale = K a^2 with K = sqrt(pi)(K + alpha/sqrt(mu))/K^{2 beta}.
inline double d2d_average_closed_form(double scale)
{
    const double si = specfun::trig_int_si(scale);
    const double ci = specfun::trig_int_ci(scale);
    return 2.0 * (std::sin(scale) * si - std::cos(scale) * ci) * log2e;
}

} // namespace detail

/// D2D average over the full-plane fields by quadrature (any eta_d).
inline double avg_se_d2d_quadrature(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    detail::require_no_exclusion(p, "avg_se_d2d");
    return detail::d2d_average_quadrature(d2d_interference_scale(p), p.eta_d, spec);
}

/// D2D average in trigonometric-integral form, eta_d = 4 only.
inline double avg_se_d2d_closed_form(const SystemParams& p)
{
    detail::require_no_exclusion(p, "avg_se_d2d");
    if (p.eta_d != 4.0) {
        throw ParamError("avg_se_d2d_closed_form: requires eta_d = 4");
    }
    return detail::d2d_average_closed_form(d2d_interference_scale(p));
}

inline double avg_se_d2d(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    return p.eta_d == 4.0 ? avg_se_d2d_closed_form(p) : avg_se_d2d_quadrature(p, spec);
}

/// Overlay with beta = 1/2: the density dependence cancels and only a and
/// eta_d remain. Uses the same kernel as avg_se_d2d.
inline double avg_se_d2d_density_invariant(double a, double eta_d, const quad::QuadSpec& spec = {})
{
    const double scale = a * a * 1.0 * detail::gamma_one_minus(eta_d);
    return eta_d == 4.0 ? detail::d2d_average_closed_form(scale)
                        : detail::d2d_average_quadrature(scale, eta_d, spec);
}

/// Uplink average with D2D exclusion discs of radius a_ex around every BS;
/// the out-of-cell D2D density is thinned to p K.
inline double avg_se_uplink_exclusion(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    detail::require_underlay(p, "avg_se_uplink_exclusion");
    const double eta = p.eta_c;
    const double nu = (2.0 + eta) / eta;
    const double K = p.k_mean;
    const double pk = p.thinning() * K;
    const double a_ex = p.a_ex;
    const double link_coef = 2.0 * (p.mu * pk + 1.0) / (eta - 2.0);
    const double a_ex_eta = std::pow(a_ex, eta);
    const auto inner_spec = spec.nested();
    auto outer = [&](double g) {
        auto inner = [&](double a) {
            const double y = g * p.mu * std::pow(a, eta);
            const double hole = a_ex > 0.0 ? a_ex * a_ex * specfun::exp_int_en(nu, y / a_ex_eta) : 0.0;
            const double expo = -pk - g * std::pow(a, eta) * link_coef -
                                2.0 * K / eta * (hole - specfun::exp_int_en(nu, y));
            return a * std::exp(expo);
        };
        const double upper = detail::decay_cutoff(g * link_coef, eta, K);
        if (!(upper > 0.0)) {
            return 0.0;
        }
        return log2e / (g + 1.0) * quad::integrate_finite(inner, 0.0, upper, inner_spec).value;
    };
    return 2.0 * quad::integrate_semi_infinite(outer, 0.0, spec).value;
}

/// Lower bound on the D2D average with exclusion regions: voids inside the
/// averaging circle are filled, which can only add interference.
inline double avg_se_d2d_exclusion_lb(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    detail::require_underlay(p, "avg_se_d2d_exclusion_lb");
    const double eta = p.eta_d;
    const double nu = (2.0 + eta) / eta;
    const double K = p.k_mean;
    const double a0_eta = std::pow(p.d2d_link_length(), eta);
    const double out_coef = 2.0 * (p.thinning() * K + 1.0 / p.mu) / (eta - 2.0);
    auto integrand = [&](double g) {
        const double s = g * a0_eta;
        const double expo = -(K + 1.0) - s * out_coef +
                            2.0 / eta * (K * specfun::exp_int_en(nu, s) + specfun::exp_int_en(nu, s / p.mu));
        return log2e / (1.0 + g) * std::exp(expo);
    };
    return quad::integrate_semi_infinite(integrand, 0.0, spec).value;
}

// ---------------------------------------------------------------------------
// System-level quantities
// ---------------------------------------------------------------------------

struct SystemSe {
    double uplink;
    double d2d;
};

/// Per-cell spectral efficiency: one uplink user, and on average K (or p K
/// with exclusion) D2D links.
inline SystemSe system_se(const SystemParams& p, const quad::QuadSpec& spec = {})
{
    SystemSe out{};
    if (p.a_ex > 0.0) {
        detail::require_underlay(p, "system_se with exclusion");
        out.uplink = avg_se_uplink_exclusion(p, spec);
        out.d2d = p.k_mean == 0.0 ? 0.0 : p.thinning() * p.k_mean * avg_se_d2d_exclusion_lb(p, spec);
    } else {
        out.uplink = avg_se_uplink(p, spec);
        out.d2d = p.k_mean == 0.0 ? 0.0 : p.k_mean * avg_se_d2d(p, spec);
    }
    return out;
}

/// Uplink average for the load constraint: exclusion form when a_ex > 0.
inline double uplink_average_for_load(const SystemParams& p, const quad::QuadSpec& spec)
{
    return p.a_ex > 0.0 ? avg_se_uplink_exclusion(p, spec) : avg_se_uplink(p, spec);
}

struct LoadResult {
    double k_max;
    double d2d_system_se;
};

inline constexpr double load_bracket_hi = 1e3;
inline constexpr double load_tolerance = 1e-3;

/// Largest mean D2D load K such that the uplink keeps at least a fraction
/// nu of its D2D-free average, and the resulting D2D system spectral efficiency.
inline LoadResult max_d2d_load(const SystemParams& p, double nu, const quad::QuadSpec& spec = {})
{
    detail::require_underlay(p, "max_d2d_load");
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw ParamError("max_d2d_load: nu must lie in (0, 1]");
    }
    auto with_k = [&](double k) {
        SystemParams q = p;
        q.k_mean = k;
        return q;
    };
    const double target = nu * uplink_average_for_load(with_k(0.0), spec);
    if (nu == 1.0) {
        return {0.0, 0.0};
    }
    if (uplink_average_for_load(with_k(load_bracket_hi), spec) >= target) {
        throw ParamError("max_d2d_load: constraint still satisfied at the bracket end K = 1000");
    }
    double lo = 0.0;
    double hi = load_bracket_hi;
    while (hi - lo > load_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (uplink_average_for_load(with_k(mid), spec) >= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (lo == 0.0) {
        return {0.0, 0.0};
    }
    return {lo, system_se(with_k(lo), spec).d2d};
}

/// Equal-rate contour between the D2D link and a direct uplink, overlay with
/// the typical geometry: the rates match when a0 = c * ad^exponent, where ad
/// is the D2D link length.
struct Contour {
    double c;
    double exponent;

    double uplink_distance(double d2d_length) const { return c * std::pow(d2d_length, exponent); }

    /// Share of uplink user positions (uniform in the cell) for which the
    /// D2D link is the better option.
    double share(double d2d_length) const
    {
        const double x = std::min(1.0, uplink_distance(d2d_length));
        return 1.0 - x * x;
    }
};

inline Contour d2d_vs_uplink_contour(const SystemParams& p)
{
    if (p.mode != Mode::overlay) {
        throw ParamError("d2d_vs_uplink_contour: requires overlay mode");
    }
    const auto g = typical_geometry(p, Viewpoint::d2d_receiver);
    // rho(a0) = (eta_c - 2) / (2 a0^eta_c) and varrho(ad) = ad^-eta_d / D.
    const double denominator = std::pow(g.a0, -p.eta_d) / local_avg_sir_d2d(g, p);
    const double c = std::pow((p.eta_c - 2.0) / 2.0 * denominator, 1.0 / p.eta_c);
    return {c, p.eta_d / p.eta_c};
}

} // namespace sgd2d::analytic
