#pragma once

// Curve families behind each reproduced figure. Every figure returns its
// CSV tables plus the parameter sets it used, so the manifest is
// self-describing.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <sgd2d/analytic.hpp>
#include <sgd2d/mcsim.hpp>

#include "cli_support.hpp"

namespace sgd2d::cli {

struct FigureOptions {
    bool mc = false;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    double r_trunc = 30.0;
    unsigned workers = 0;

    mcsim::SimConfig sim(std::uint64_t n_geometry) const
    {
        mcsim::SimConfig c;
        c.n_geometry = n_geometry;
        c.seed = seed;
        c.r_trunc = r_trunc;
        c.workers = workers;
        return c;
    }
};

struct FigureOutput {
    std::vector<std::pair<std::string, CsvTable>> curves;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::string> notes;
};

/// Empirical CDF (right-continuous step) evaluated at x.
inline double empirical_at(const DistributionCurve& c, double x)
{
    const auto it = std::upper_bound(c.x.begin(), c.x.end(), x);
    if (it == c.x.begin()) {
        return 0.0;
    }
    return c.f[static_cast<std::size_t>(it - c.x.begin()) - 1];
}

inline std::vector<double> linspace(double lo, double hi, int n) { return Grid{lo, hi, n, false}.points(); }

inline std::vector<double> logspace(double lo, double hi, int n) { return Grid{lo, hi, n, true}.points(); }

inline std::string label_number(double v)
{
    std::string s = format_number(v);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

namespace figdetail {

struct SeCurve {
    std::string label;
    SystemParams p;
    analytic::LinkSide side;
};

// Link spectral efficiency CDFs: exact mapping, logarithmic approximation and
// optionally simulation.
inline CsvTable se_cdf_table(const SeCurve& c, const std::vector<double>& nus, const FigureOptions& opt)
{
    std::vector<std::string> header{"nu", "exact", "approx"};
    DistributionCurve emp;
    if (opt.mc) {
        header.push_back("mc");
        const auto vp = c.side == analytic::LinkSide::cellular_uplink ? Viewpoint::uplink_bs : Viewpoint::d2d_receiver;
        emp = mcsim::empirical_cdf_local_avg_sir(c.p, vp, opt.sim(opt.samples));
    }
    CsvTable t(header);
    for (double nu : nus) {
        std::vector<double> row{nu, analytic::cdf_link_se_exact(nu, c.p, c.side),
                                analytic::cdf_link_se_approx(nu, c.p, c.side)};
        if (opt.mc) {
            row.push_back(empirical_at(emp, analytic::inverse_link_se(nu)));
        }
        t.add_row(row);
    }
    return t;
}

} // namespace figdetail

/// Link spectral efficiency CDFs for K = 10, a = 0.1, eta = 4, eta_d = 4.5:
/// uplink and D2D, underlay (beta = 0.25) and overlay (beta = 0.5).
inline FigureOutput figure_fig4(const FigureOptions& opt)
{
    FigureOutput out;
    SystemParams base;
    base.k_mean = 10.0;
    base.a = 0.1;
    base.eta_c = 4.0;
    base.eta_d = 4.5;
    base.mu = 0.1;
    auto with = [&](Mode m, double beta) {
        SystemParams p = base;
        p.mode = m;
        p.beta = beta;
        return p;
    };
    const std::vector<figdetail::SeCurve> curves{
        {"uplink_underlay", with(Mode::underlay, 0.25), analytic::LinkSide::cellular_uplink},
        {"uplink_overlay", with(Mode::overlay, 0.5), analytic::LinkSide::cellular_uplink},
        {"d2d_underlay_beta0p25", with(Mode::underlay, 0.25), analytic::LinkSide::d2d},
        {"d2d_overlay_beta0p5", with(Mode::overlay, 0.5), analytic::LinkSide::d2d},
    };
    const auto nus = linspace(0.05, 15.0, 300);
    for (const auto& c : curves) {
        out.curves.emplace_back(c.label, figdetail::se_cdf_table(c, nus, opt));
        out.parameters[c.label] = params_json(c.p);
    }
    return out;
}

/// Overlay averages versus pathloss exponent: uplink against eta_c and D2D
/// against eta_d, with a = 0.1, K = 10, beta = 0.
inline FigureOutput figure_fig5(const FigureOptions& opt)
{
    FigureOutput out;
    SystemParams base;
    base.mode = Mode::overlay;
    base.a = 0.1;
    base.k_mean = 10.0;
    base.beta = 0.0;
    out.parameters["base"] = params_json(base);
    out.notes.push_back("beta defaults to 0 (fixed D2D link length a)");
    const auto etas = linspace(2.5, 6.0, 15);
    std::vector<std::string> header{"eta", "analytic"};
    if (opt.mc) {
        header.insert(header.end(), {"mc_mean", "mc_stderr"});
    }
    CsvTable up(header);
    CsvTable d2d(header);
    for (double eta : etas) {
        SystemParams pu = base;
        pu.eta_c = eta;
        SystemParams pd = base;
        pd.eta_d = eta;
        std::vector<double> ru{eta, analytic::avg_se_uplink(pu)};
        std::vector<double> rd{eta, analytic::avg_se_d2d(pd)};
        if (opt.mc) {
            const auto eu = mcsim::mc_avg_se(pu, analytic::LinkSide::cellular_uplink, opt.sim(opt.samples));
            const auto ed = mcsim::mc_avg_se(pd, analytic::LinkSide::d2d, opt.sim(opt.samples));
            ru.insert(ru.end(), {eu.mean, eu.std_error});
            rd.insert(rd.end(), {ed.mean, ed.std_error});
        }
        up.add_row(ru);
        d2d.add_row(rd);
    }
    out.curves.emplace_back("uplink_vs_eta_c", std::move(up));
    out.curves.emplace_back("d2d_vs_eta_d", std::move(d2d));
    return out;
}

inline constexpr double fig7_betas[] = {0.25, 0.5, 0.75};
inline constexpr double fig7_ks[] = {10.0, 100.0};

/// Overlay link spectral efficiency CDFs for a = 0.1 and several beta and K.
inline FigureOutput figure_fig7(const FigureOptions& opt)
{
    FigureOutput out;
    SystemParams base;
    base.mode = Mode::overlay;
    base.a = 0.1;
    const auto nus = linspace(0.1, 40.0, 400);
    out.curves.emplace_back("uplink", figdetail::se_cdf_table({"uplink", base, analytic::LinkSide::cellular_uplink},
                                                              nus, opt));
    out.parameters["uplink"] = params_json(base);
    for (double beta : fig7_betas) {
        for (double k : fig7_ks) {
            SystemParams p = base;
            p.beta = beta;
            p.k_mean = k;
            const std::string label = "d2d_beta" + label_number(beta) + "_k" + label_number(k);
            out.curves.emplace_back(label, figdetail::se_cdf_table({label, p, analytic::LinkSide::d2d}, nus, opt));
            out.parameters[label] = params_json(p);
        }
    }
    out.parameters["beta_set"] = fig7_betas;
    out.parameters["k_set"] = fig7_ks;
    return out;
}

inline constexpr double fig8_betas[] = {0.0, 0.1, 0.25, 0.5, 0.75};

/// Overlay system spectral efficiency K * D2D average versus K, against the
/// uplink average, a = 0.1.
inline FigureOutput figure_fig8(const FigureOptions&)
{
    FigureOutput out;
    SystemParams base;
    base.mode = Mode::overlay;
    base.a = 0.1;
    const auto ks = logspace(1.0, 1e4, 60);
    const double uplink = analytic::avg_se_uplink(base);
    for (double beta : fig8_betas) {
        CsvTable t({"k", "d2d_system_se", "uplink_se"});
        for (double k : ks) {
            SystemParams p = base;
            p.beta = beta;
            p.k_mean = k;
            t.add_row({k, k * analytic::avg_se_d2d(p), uplink});
        }
        out.curves.emplace_back("beta" + label_number(beta), std::move(t));
    }
    out.parameters["base"] = params_json(base);
    out.parameters["beta_set"] = fig8_betas;
    out.notes.push_back("K on a 60-point log grid over [1, 1e4] so the beta = 0.1 peak is inside the range");
    return out;
}

inline constexpr double fig9_aex[] = {0.0, 0.2, 0.4};
inline constexpr double fig9_mc_ks[] = {5.0, 10.0, 20.0};

inline SystemParams fig9_params(double k, double a_ex)
{
    SystemParams p;
    p.mode = Mode::underlay;
    p.a = 0.12;
    p.beta = 0.0;
    p.mu = 0.1;
    p.eta_c = 3.5;
    p.eta_d = 4.5;
    p.k_mean = k;
    p.a_ex = a_ex;
    return p;
}

/// Underlay D2D system spectral efficiency p K times the lower bound, versus
/// K, for several exclusion radii; simulation of the exact value on request.
inline FigureOutput figure_fig9(const FigureOptions& opt)
{
    FigureOutput out;
    const auto ks = linspace(1.0, 30.0, 30);
    for (double a_ex : fig9_aex) {
        CsvTable t({"k", "pk", "lower_bound_system_se"});
        for (double k : ks) {
            const auto p = fig9_params(k, a_ex);
            const double pk = p.thinning() * k;
            t.add_row({k, pk, pk * analytic::avg_se_d2d_exclusion_lb(p)});
        }
        const std::string label = "aex" + label_number(a_ex);
        out.curves.emplace_back(label, std::move(t));
        if (opt.mc) {
            CsvTable m({"k", "pk", "lower_bound_system_se", "mc_system_se", "mc_stderr"});
            for (double k : fig9_mc_ks) {
                const auto p = fig9_params(k, a_ex);
                const double pk = p.thinning() * k;
                const auto e = mcsim::mc_avg_se(p, analytic::LinkSide::d2d, opt.sim(opt.samples));
                m.add_row({k, pk, pk * analytic::avg_se_d2d_exclusion_lb(p), pk * e.mean, pk * e.std_error});
            }
            out.curves.emplace_back(label + "_mc", std::move(m));
        }
    }
    out.parameters["base"] = params_json(fig9_params(10.0, 0.0));
    out.parameters["a_ex_set"] = fig9_aex;
    out.notes.push_back("bound tightness tolerance: lower bound within 25% of the simulated mean");
    return out;
}

inline constexpr double fig10_mus[] = {0.01, 0.1, 1.0};
inline constexpr double fig10_aex[] = {0.0, 0.25, 0.5, 0.75};
inline constexpr double fig10_nu = 0.8;
// The load is bisected to 1e-3, so the uplink averages need no more than this.
inline const quad::QuadSpec fig10_quad{1e-7, 1e-10, 2000};

/// Underlay D2D system spectral efficiency p K times the average D2D rate
/// (lower bound with exclusion) for K up to the largest load that keeps the
/// uplink within nu = 0.8 of its D2D-free average.
inline FigureOutput figure_fig10(const FigureOptions&)
{
    FigureOutput out;
    nlohmann::json loads = nlohmann::json::object();
    for (double mu : fig10_mus) {
        for (double a_ex : fig10_aex) {
            auto p = fig9_params(10.0, a_ex);
            p.mu = mu;
            const auto load = analytic::max_d2d_load(p, fig10_nu, fig10_quad);
            CsvTable t({"pk", "d2d_system_se"});
            for (double k : linspace(0.0, load.k_max, 40)) {
                auto q = p;
                q.k_mean = k;
                const double d2d = k == 0.0 ? 0.0
                                   : a_ex > 0.0 ? analytic::avg_se_d2d_exclusion_lb(q)
                                                : analytic::avg_se_d2d(q);
                t.add_row({q.thinning() * k, q.thinning() * k * d2d});
            }
            const std::string label = "mu" + label_number(mu) + "_aex" + label_number(a_ex);
            out.curves.emplace_back(label, std::move(t));
            loads[label] = {{"k_max", load.k_max}, {"pk_max", p.thinning() * load.k_max},
                            {"d2d_system_se_at_k_max", load.d2d_system_se}};
        }
    }
    out.parameters["base"] = params_json(fig9_params(10.0, 0.0));
    out.parameters["mu_set"] = fig10_mus;
    out.parameters["a_ex_set"] = fig10_aex;
    out.parameters["nu"] = fig10_nu;
    out.parameters["max_load"] = loads;
    out.notes.push_back("a_ex = 0 uses the exact D2D average; a_ex > 0 uses the lower bound");
    return out;
}

inline constexpr double fig11_aex[] = {0.0, 0.2, 0.4};
inline constexpr double fig11_a0 = 0.6;

inline SystemParams fig11_params(double a_ex)
{
    SystemParams p;
    p.mode = Mode::underlay;
    p.mu = 0.1;
    p.k_mean = 10.0;
    p.eta_c = 3.5;
    p.a_ex = a_ex;
    return p;
}

/// Local-average SIR of the typical in-cell geometry with the user at a0.
inline double fig11_local_avg(const SystemParams& p)
{
    auto g = typical_geometry(p, Viewpoint::uplink_bs);
    g.a0 = fig11_a0;
    return analytic::local_avg_sir_uplink(g, p);
}

/// Instantaneous uplink SIR CDFs, underlay, a0 = 0.6, eta = 3.5, K = 10.
inline FigureOutput figure_fig11(const FigureOptions& opt)
{
    FigureOutput out;
    const auto gammas = logspace(1e-3, 1e2, 200);
    nlohmann::json rhos = nlohmann::json::object();
    for (double a_ex : fig11_aex) {
        const auto p = fig11_params(a_ex);
        const double rho = fig11_local_avg(p);
        std::vector<std::string> header{"sir", "analytic"};
        DistributionCurve emp;
        if (opt.mc) {
            header.push_back("mc");
            emp = mcsim::empirical_cdf_inst_sir_typical(p, fig11_a0, opt.sim(opt.samples));
        }
        CsvTable t(header);
        for (double g : gammas) {
            std::vector<double> row{g, analytic::cdf_inst_sir(g, rho)};
            if (opt.mc) {
                row.push_back(empirical_at(emp, g));
            }
            t.add_row(row);
        }
        const std::string label = "aex" + label_number(a_ex);
        out.curves.emplace_back(label, std::move(t));
        rhos[label] = rho;
    }
    out.parameters["base"] = params_json(fig11_params(0.0));
    out.parameters["a0"] = fig11_a0;
    out.parameters["a_ex_set"] = fig11_aex;
    out.parameters["local_avg_sir"] = rhos;
    out.notes.push_back("simulation: hexagonal BS lattice with a BS at the origin; in-cell D2D interferers at their "
                        "typical distances, fields outside the cell random");
    return out;
}

} // namespace sgd2d::cli
