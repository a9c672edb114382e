// sgd2d: spectral efficiency of D2D links sharing a cellular uplink.
// Subcommands write CSV files plus a JSON manifest into --out.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include <sgd2d/analytic.hpp>
#include <sgd2d/mcsim.hpp>

#include "cli_support.hpp"
#include "figures.hpp"

using namespace sgd2d;
using namespace sgd2d::cli;

namespace {

struct ParamFlags {
    std::string mode = "overlay";
    double mu = 0.1;
    CLI::Option* mu_opt = nullptr;
    double k = 10.0;
    double beta = 0.0;
    double a = 0.1;
    double eta_c = 3.5;
    double eta_d = 4.5;
    double a_ex = 0.0;

    void attach(CLI::App* app)
    {
        app->add_option("--mode", mode, "underlay or overlay")->check(CLI::IsMember({"underlay", "overlay"}));
        mu_opt = app->add_option("--mu", mu, "D2D-to-cellular power ratio (required for underlay)");
        app->add_option("--k", k, "mean active D2D links per cell");
        app->add_option("--beta", beta, "link length exponent: a / K^beta");
        app->add_option("--a", a, "normalized D2D reference distance");
        app->add_option("--eta-c", eta_c, "cellular pathloss exponent");
        app->add_option("--eta-d", eta_d, "user-to-user pathloss exponent");
        app->add_option("--a-ex", a_ex, "normalized exclusion radius");
    }

    SystemParams params() const
    {
        SystemParams p;
        p.mode = mode == "underlay" ? Mode::underlay : Mode::overlay;
        if (p.mode == Mode::underlay && mu_opt->count() == 0) {
            throw UsageError("--mu is required in underlay mode");
        }
        p.mu = mu;
        p.k_mean = k;
        p.beta = beta;
        p.a = a;
        p.eta_c = eta_c;
        p.eta_d = eta_d;
        p.a_ex = a_ex;
        return validate_params(p);
    }
};

struct McFlags {
    bool enabled = false;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    double r_trunc = 30.0;
    unsigned workers = 0;

    void attach(CLI::App* app)
    {
        app->add_flag("--mc", enabled, "add Monte Carlo columns");
        app->add_option("--samples", samples, "Monte Carlo geometries");
        seed_opt = app->add_option("--seed", seed, "Monte Carlo seed (default from SGD2D_SEED, else 1)");
        app->add_option("--r-trunc", r_trunc, "truncation radius of simulated fields");
        app->add_option("--workers", workers, "worker threads (0 = all cores)");
    }

    std::uint64_t resolved_seed() const { return seed_opt->count() ? seed : default_seed(); }

    mcsim::SimConfig sim() const
    {
        mcsim::SimConfig c;
        c.n_geometry = samples;
        c.seed = resolved_seed();
        c.r_trunc = r_trunc;
        c.workers = workers;
        c.check();
        return c;
    }
};

std::string command_line;

void emit(const std::filesystem::path& dir, const std::string& stem, const CsvTable& table, RunManifest& manifest)
{
    const auto path = dir / (stem + ".csv");
    write_text(path, table.str());
    manifest.outputs.push_back(path.filename().string());
    std::cout << path.string() << '\n';
}

void finish(const std::filesystem::path& dir, const std::string& stem, RunManifest& manifest, const Stopwatch& clock)
{
    manifest.command_line = command_line;
    manifest.wall_time_s = clock.seconds();
    write_text(dir / (stem + "_manifest.json"), manifest.to_json().dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct CdfArgs {
    ParamFlags params;
    std::string quantity;
    std::string grid = "0.01:100:100";
    std::string grid_scale = "linear";
    std::string side = "uplink";
    std::string se_method = "exact";
    double a0 = 0.6;
    std::string out = "out";
};

int run_cdf(const CdfArgs& args)
{
    Stopwatch clock;
    const auto p = args.params.params();
    const auto xs = parse_grid(args.grid, args.grid_scale == "log").points();
    RunManifest manifest;
    manifest.parameters = params_json(p);
    manifest.parameters["quantity"] = args.quantity;
    CsvTable table({"x", "cdf"});
    std::set<std::string> methods;
    const auto side = args.side == "d2d" ? analytic::LinkSide::d2d : analytic::LinkSide::cellular_uplink;
    double rho_typical = 0.0;
    if (args.quantity == "inst-sir") {
        auto g = typical_geometry(p, Viewpoint::uplink_bs);
        g.a0 = args.a0;
        g.check();
        rho_typical = analytic::local_avg_sir_uplink(g, p);
        manifest.parameters["a0"] = args.a0;
        manifest.notes.push_back("local-average SIR of the typical in-cell geometry: " + format_number(rho_typical));
    }
    for (double x : xs) {
        double f = 0.0;
        try {
            if (args.quantity == "rho") {
                f = analytic::cdf_rho(x, p);
                methods.insert("closed_form");
            } else if (args.quantity == "varrho") {
                const auto r = analytic::cdf_varrho_eval(x, p);
                f = r.value;
                methods.insert(analytic::to_string(r.method));
            } else if (args.quantity == "inst-sir") {
                f = analytic::cdf_inst_sir(x, rho_typical);
                methods.insert("closed_form");
            } else {
                f = args.se_method == "approx" ? analytic::cdf_link_se_approx(x, p, side)
                                               : analytic::cdf_link_se_exact(x, p, side);
                methods.insert(args.se_method);
            }
        } catch (const quad::QuadError& e) {
            throw quad::QuadError(args.quantity + " CDF at x=" + format_number(x) + ": " + e.what(),
                                  e.best_estimate, e.err_est);
        }
        table.add_row({x, f});
    }
    for (const auto& m : methods) {
        manifest.notes.push_back("method=" + m);
    }
    manifest.parameter_digest = fnv1a_hex(describe(p) + ";quantity=" + args.quantity + ";grid=" + args.grid +
                                          ";scale=" + args.grid_scale + ";side=" + args.side);
    const std::filesystem::path dir(args.out);
    const std::string stem = "cdf_" + args.quantity;
    emit(dir, stem, table, manifest);
    finish(dir, stem, manifest, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct AvgSeArgs {
    ParamFlags params;
    McFlags mc;
    std::string side;
    std::vector<std::string> sweep;
    double nu = 0.0;
    CLI::Option* nu_opt = nullptr;
    std::string out = "out";
};

void set_param(SystemParams& p, const std::string& name, double v)
{
    static const std::map<std::string, double SystemParams::*> fields{
        {"k", &SystemParams::k_mean}, {"mu", &SystemParams::mu},       {"beta", &SystemParams::beta},
        {"a", &SystemParams::a},      {"a-ex", &SystemParams::a_ex},   {"eta-c", &SystemParams::eta_c},
        {"eta-d", &SystemParams::eta_d}};
    const auto it = fields.find(name);
    if (it == fields.end()) {
        throw UsageError("unknown sweep parameter '" + name + "' (k, mu, beta, a, a-ex, eta-c, eta-d)");
    }
    p.*(it->second) = v;
}

double analytic_side(const SystemParams& p, analytic::LinkSide side)
{
    if (side == analytic::LinkSide::cellular_uplink) {
        return analytic::uplink_average_for_load(p, {});
    }
    return p.a_ex > 0.0 ? analytic::avg_se_d2d_exclusion_lb(p) : analytic::avg_se_d2d(p);
}

int run_avg_se(const AvgSeArgs& args)
{
    Stopwatch clock;
    const auto base = args.params.params();
    std::string name = "k";
    std::vector<double> values{base.k_mean};
    if (!args.sweep.empty()) {
        if (args.sweep.size() != 2) {
            throw UsageError("--sweep takes <param> lo:hi:n");
        }
        name = args.sweep[0];
        values = parse_grid(args.sweep[1]).points();
    }
    const bool load_mode = args.nu_opt->count() > 0;
    const bool mc = args.mc.enabled;
    const mcsim::SimConfig sim = mc ? args.mc.sim() : mcsim::SimConfig{};
    RunManifest manifest;
    manifest.parameters = params_json(base);
    manifest.parameters["side"] = args.side;
    manifest.parameters["sweep"] = name;
    if (mc) {
        manifest.seed = sim.seed;
        manifest.parameters["mc_samples"] = sim.n_geometry;
        manifest.parameters["r_trunc"] = sim.r_trunc;
    }

    std::vector<std::string> header{name};
    if (load_mode) {
        if (args.side != "system") {
            throw UsageError("--nu applies to --side system");
        }
        manifest.parameters["nu"] = args.nu;
        header.insert(header.end(), {"k_max", "pk_max", "d2d_system_se"});
    } else if (args.side == "system") {
        header.insert(header.end(), {"uplink", "d2d"});
        if (mc) {
            header.insert(header.end(), {"mc_uplink", "mc_uplink_stderr", "mc_d2d", "mc_d2d_stderr"});
        }
    } else {
        header.push_back("analytic");
        if (mc) {
            header.insert(header.end(), {"mc_mean", "mc_stderr"});
        }
    }
    if (base.a_ex > 0.0 && args.side != "uplink") {
        manifest.notes.push_back("D2D average with exclusion is the analytical lower bound");
    }
    CsvTable table(header);
    for (double v : values) {
        SystemParams p = base;
        set_param(p, name, v);
        p = validate_params(p);
        std::vector<double> row{v};
        if (load_mode) {
            const auto load = analytic::max_d2d_load(p, args.nu);
            row.insert(row.end(), {load.k_max, p.thinning() * load.k_max, load.d2d_system_se});
        } else if (args.side == "system") {
            const auto s = analytic::system_se(p);
            row.insert(row.end(), {s.uplink, s.d2d});
            if (mc) {
                const auto eu = mcsim::mc_avg_se(p, analytic::LinkSide::cellular_uplink, sim);
                const double pk = p.thinning() * p.k_mean;
                mcsim::SimConfig sd = sim;
                sd.seed = sim.seed + 1;
                const auto ed = pk > 0.0 ? mcsim::mc_avg_se(p, analytic::LinkSide::d2d, sd) : McEstimate{};
                row.insert(row.end(), {eu.mean, eu.std_error, pk * ed.mean, pk * ed.std_error});
            }
        } else {
            const auto side = args.side == "uplink" ? analytic::LinkSide::cellular_uplink : analytic::LinkSide::d2d;
            row.push_back(analytic_side(p, side));
            if (mc) {
                const auto e = mcsim::mc_avg_se(p, side, sim);
                row.insert(row.end(), {e.mean, e.std_error});
            }
        }
        table.add_row(row);
    }
    manifest.parameter_digest = fnv1a_hex(describe(base) + ";side=" + args.side + ";sweep=" + name + ":" +
                                          (args.sweep.size() == 2 ? args.sweep[1] : "") +
                                          ";nu=" + format_number(load_mode ? args.nu : 0.0));
    const std::filesystem::path dir(args.out);
    const std::string stem = "avg_se_" + args.side;
    emit(dir, stem, table, manifest);
    finish(dir, stem, manifest, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct FigureArgs {
    std::string id;
    McFlags mc;
    std::string out = "out";
};

int run_figure(const FigureArgs& args)
{
    Stopwatch clock;
    static const std::map<std::string, std::function<FigureOutput(const FigureOptions&)>> figures{
        {"fig4", figure_fig4},   {"fig5", figure_fig5}, {"fig7", figure_fig7},  {"fig8", figure_fig8},
        {"fig9", figure_fig9},   {"fig10", figure_fig10}, {"fig11", figure_fig11}};
    if (args.id == "fig6") {
        throw UsageError("fig6 is the contour example; use cmd_contour");
    }
    const auto it = figures.find(args.id);
    if (it == figures.end()) {
        throw UsageError("unknown figure '" + args.id + "' (fig4, fig5, fig7, fig8, fig9, fig10, fig11)");
    }
    FigureOptions opt;
    opt.mc = args.mc.enabled;
    if (opt.mc) {
        const auto sim = args.mc.sim();
        opt.samples = sim.n_geometry;
        opt.seed = sim.seed;
        opt.r_trunc = sim.r_trunc;
        opt.workers = sim.workers;
    }
    auto fig = it->second(opt);
    RunManifest manifest;
    manifest.parameters = fig.parameters;
    manifest.notes = fig.notes;
    if (opt.mc) {
        manifest.seed = opt.seed;
        manifest.parameters["mc_samples"] = opt.samples;
        manifest.parameters["r_trunc"] = opt.r_trunc;
    }
    manifest.parameter_digest = fnv1a_hex(args.id + ";" + fig.parameters.dump() + ";mc=" + (opt.mc ? "1" : "0") +
                                          ";samples=" + std::to_string(opt.samples));
    const std::filesystem::path dir(args.out);
    for (const auto& [label, table] : fig.curves) {
        emit(dir, args.id + "_" + label, table, manifest);
    }
    finish(dir, args.id, manifest, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct ContourArgs {
    double eta_c = 3.5;
    double eta_d = 4.5;
    double k = 10.0;
    std::string grid = "0.01:0.3:30";
    std::string out = "out";
};

int run_contour(const ContourArgs& args)
{
    Stopwatch clock;
    SystemParams p;
    p.mode = Mode::overlay;
    p.eta_c = args.eta_c;
    p.eta_d = args.eta_d;
    p.k_mean = args.k;
    p = validate_params(p);
    const auto contour = analytic::d2d_vs_uplink_contour(p);
    CsvTable table({"a_d2d", "a0_contour", "share"});
    for (double ad : parse_grid(args.grid).points()) {
        if (!(ad > 0.0)) {
            throw UsageError("contour grid must be positive");
        }
        table.add_row({ad, contour.uplink_distance(ad), contour.share(ad)});
    }
    RunManifest manifest;
    manifest.parameters = params_json(p);
    manifest.parameters["c"] = contour.c;
    manifest.parameters["exponent"] = contour.exponent;
    manifest.notes.push_back("warning: the printed contour constant 0.512 contradicts the 80% share at a_d2d = 0.15; "
                             "the constant derived from the typical geometry is c = " +
                             format_number(contour.c));
    manifest.parameter_digest = fnv1a_hex(describe(p) + ";grid=" + args.grid);
    const std::filesystem::path dir(args.out);
    emit(dir, "contour", table, manifest);
    finish(dir, "contour", manifest, clock);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    for (int i = 0; i < argc; ++i) {
        command_line += (i ? " " : "") + std::string(argv[i]);
    }
    CLI::App app{"Spectral efficiency of D2D communication with a cellular uplink"};
    app.require_subcommand(1);

    CdfArgs cdf;
    auto* cdf_cmd = app.add_subcommand("cdf", "CDF of a local-average SIR, instantaneous SIR or link spectral efficiency");
    cdf.params.attach(cdf_cmd);
    cdf_cmd->add_option("--quantity", cdf.quantity, "rho, varrho, inst-sir or link-se")
        ->required()
        ->check(CLI::IsMember({"rho", "varrho", "inst-sir", "link-se"}));
    cdf_cmd->add_option("--grid", cdf.grid, "lo:hi:n");
    cdf_cmd->add_option("--grid-scale", cdf.grid_scale, "linear or log")->check(CLI::IsMember({"linear", "log"}));
    cdf_cmd->add_option("--side", cdf.side, "link-se side: uplink or d2d")->check(CLI::IsMember({"uplink", "d2d"}));
    cdf_cmd->add_option("--se-method", cdf.se_method, "link-se mapping: exact or approx")
        ->check(CLI::IsMember({"exact", "approx"}));
    cdf_cmd->add_option("--a0", cdf.a0, "inst-sir: uplink user distance");
    cdf_cmd->add_option("--out", cdf.out, "output directory");

    AvgSeArgs avg;
    auto* avg_cmd = app.add_subcommand("avg-se", "spectral efficiency averaged over network geometries");
    avg.params.attach(avg_cmd);
    avg.mc.attach(avg_cmd);
    avg_cmd->add_option("--side", avg.side, "uplink, d2d or system")
        ->required()
        ->check(CLI::IsMember({"uplink", "d2d", "system"}));
    avg_cmd->add_option("--sweep", avg.sweep, "<param> lo:hi:n")->expected(2);
    avg.nu_opt = avg_cmd->add_option("--nu", avg.nu, "uplink protection level: solve for the largest D2D load");
    avg_cmd->add_option("--out", avg.out, "output directory");

    FigureArgs fig;
    auto* fig_cmd = app.add_subcommand("figure", "reproduce a figure's curves as CSV");
    fig_cmd->add_option("id", fig.id, "fig4, fig5, fig7, fig8, fig9, fig10 or fig11")->required();
    fig.mc.attach(fig_cmd);
    fig_cmd->add_option("--out", fig.out, "output directory");

    ContourArgs contour;
    auto* contour_cmd = app.add_subcommand("contour", "where a direct D2D link beats the uplink (overlay)");
    contour_cmd->add_option("--eta-c", contour.eta_c, "cellular pathloss exponent");
    contour_cmd->add_option("--eta-d", contour.eta_d, "user-to-user pathloss exponent");
    contour_cmd->add_option("--k", contour.k, "mean active D2D links per cell");
    contour_cmd->add_option("--grid", contour.grid, "D2D link lengths lo:hi:n");
    contour_cmd->add_option("--out", contour.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*cdf_cmd) {
            return run_cdf(cdf);
        }
        if (*avg_cmd) {
            return run_avg_se(avg);
        }
        if (*fig_cmd) {
            return run_figure(fig);
        }
        return run_contour(contour);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParamError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const quad::QuadError& e) {
        std::cerr << "numerical failure: " << e.what() << " (best estimate " << format_number(e.best_estimate)
                  << ", error estimate " << format_number(e.err_est) << ")\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
}
