#pragma once

// Monte Carlo oracle: Poisson point process geometries, Rayleigh fading and
// hexagonal exclusion layouts, producing empirical CDFs and averages that
// the analytic results are checked against.
//
// Work is split into chunks of 2^14 geometries. Each chunk draws from its
// own generator seeded by (seed, chunk index) and results are merged in chunk
// order, so output does not depend on the number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "analytic.hpp"
#include "sgcore.hpp"

namespace sgd2d::mcsim {

struct SimConfig {
    std::uint64_t n_geometry = 100000;
    std::uint64_t n_fading = 1; // fading draws per geometry, instantaneous SIR only
    std::uint64_t seed = 1;
    double r_trunc = 30.0;      // normalized truncation radius of "infinite" fields
    bool tail_correction = true; // add the mean power beyond r_trunc
    unsigned workers = 0;        // 0 = hardware concurrency

    void check() const
    {
        if (n_geometry == 0) {
            throw ParamError("n_geometry must be positive");
        }
        if (n_fading == 0) {
            throw ParamError("n_fading must be positive");
        }
        if (!(r_trunc >= 10.0)) {
            throw ParamError("r_trunc must be at least 10");
        }
    }
};

inline constexpr std::uint64_t chunk_size = std::uint64_t{1} << 14;
inline constexpr std::uint64_t min_cdf_geometries = 1000;

using Rng = std::mt19937_64;

/// Generator for one chunk; depends only on the seed and the chunk index.
inline Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      0x5d2du};
    return Rng(seq);
}

/// Uniform on (0, 1]. Written out so the stream is the same on every
/// standard library.
inline double uniform_pos(Rng& rng) { return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53; }

inline double exponential(Rng& rng) { return -std::log(uniform_pos(rng)); }

// ---------------------------------------------------------------------------
// Hexagonal BS lattice
// ---------------------------------------------------------------------------

/// Hexagonal lattice with one point per area pi (unit-radius cells), with a
/// point at the origin.
struct HexLattice {
    static inline const double spacing = std::sqrt(2.0 * std::numbers::pi / std::sqrt(3.0));
    static inline const double row_height = spacing * std::sqrt(3.0) / 2.0;

    /// Squared distance from (x, y) to the nearest lattice point. The nearest
    /// point is a corner of the lattice parallelogram containing (x, y).
    static double nearest_sq(double x, double y)
    {
        const double v = y / row_height;
        const double u = x / spacing - 0.5 * v;
        const double fu = std::floor(u);
        const double fv = std::floor(v);
        double best = std::numeric_limits<double>::infinity();
        for (int du = 0; du < 2; ++du) {
            for (int dv = 0; dv < 2; ++dv) {
                const double cu = fu + du;
                const double cv = fv + dv;
                const double dx = x - (cu * spacing + 0.5 * cv * spacing);
                const double dy = y - cv * row_height;
                best = std::min(best, dx * dx + dy * dy);
            }
        }
        return best;
    }

    static bool excluded(double x, double y, double a_ex) { return a_ex > 0.0 && nearest_sq(x, y) < a_ex * a_ex; }
};

struct Point {
    double x;
    double y;
};

/// Exclusion centers (the BS lattice) within a disc of radius extent.
inline std::vector<Point> hex_exclusion_layout(double a_ex, double extent)
{
    if (!(a_ex > 0.0 && a_ex < 1.0)) {
        throw ParamError("hex_exclusion_layout: requires 0 < a_ex < 1");
    }
    if (!(extent > 0.0)) {
        throw ParamError("hex_exclusion_layout: extent must be positive");
    }
    std::vector<Point> out;
    const auto rows = static_cast<long>(std::ceil(extent / HexLattice::row_height)) + 1;
    const auto cols = static_cast<long>(std::ceil(extent / HexLattice::spacing)) + rows + 1;
    for (long v = -rows; v <= rows; ++v) {
        for (long u = -cols; u <= cols; ++u) {
            const double x = (u + 0.5 * v) * HexLattice::spacing;
            const double y = v * HexLattice::row_height;
            if (x * x + y * y <= extent * extent) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Poisson fields
// ---------------------------------------------------------------------------

/// Visits the squared distances of a PPP with the given density (points per
/// unit area) in the annulus r_in < r < r_out, in increasing order. The area
/// enclosed grows by independent exponential steps of mean 1/density.
template <class Fn>
void for_each_ppp_radius_sq(double density, double r_in, double r_out, Rng& rng, Fn&& fn)
{
    if (!(density > 0.0)) {
        return;
    }
    const double step = 1.0 / (density * std::numbers::pi);
    const double s_out = r_out * r_out;
    double s = r_in * r_in;
    while (true) {
        s += exponential(rng) * step;
        if (s >= s_out) {
            return;
        }
        fn(s);
    }
}

/// Sorted distances of a PPP sample in an annulus.
inline std::vector<double> sample_ppp_annulus(double density, double r_in, double r_out, Rng& rng)
{
    if (!(density > 0.0) || !(r_in >= 0.0) || !(r_in < r_out)) {
        throw ParamError("sample_ppp_annulus: requires density > 0 and 0 <= r_in < r_out");
    }
    std::vector<double> out;
    for_each_ppp_radius_sq(density, r_in, r_out, rng, [&](double s) { out.push_back(std::sqrt(s)); });
    return out;
}

/// Mean interference power of a field with `per_cell` points per area pi
/// beyond radius r (Campbell's theorem).
inline double tail_power(double per_cell, double r, double eta)
{
    return 2.0 * per_cell * std::pow(r, 2.0 - eta) / (eta - 2.0);
}

namespace detail {

inline double path_gain_sq(double s, double eta) { return eta == 4.0 ? 1.0 / (s * s) : std::pow(s, -0.5 * eta); }

// Power of a PPP annulus around (cx, cy), optionally hex-thinned, optionally
// recording the kept distances.
inline double field_power(double per_cell, double r_in, double r_out, double eta, Rng& rng, double a_ex = 0.0,
                          Point center = {0.0, 0.0}, std::vector<double>* record = nullptr)
{
    double power = 0.0;
    const double density = per_cell / std::numbers::pi;
    for_each_ppp_radius_sq(density, r_in, r_out, rng, [&](double s) {
        if (a_ex > 0.0) {
            const double phi = 2.0 * std::numbers::pi * uniform_pos(rng);
            const double r = std::sqrt(s);
            if (HexLattice::excluded(center.x + r * std::cos(phi), center.y + r * std::sin(phi), a_ex)) {
                return;
            }
        }
        power += path_gain_sq(s, eta);
        if (record != nullptr) {
            record->push_back(std::sqrt(s));
        }
    });
    return power;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Geometry realizations
// ---------------------------------------------------------------------------

/// A sampled geometry: explicit interferers out to r_trunc plus the mean
/// power of what lies beyond. Under the uplink model without exclusion the
/// cellular interferers are not sampled at all and cell_tail_power holds
/// their mean power from the cell edge outwards.
struct SimGeometry {
    GeometrySnapshot snapshot;
    double d2d_power = 0.0;  // sum of r^-eta over the sampled D2D interferers
    double cell_power = 0.0; // same for cellular interferers
    double d2d_tail_power = 0.0;
    double cell_tail_power = 0.0;
};

namespace detail {

// Random position of a D2D receiver whose transmitter lies outside every
// exclusion disc: receiver uniform over one lattice cell, transmitter at a0
// in a uniform direction.
inline Point sample_d2d_receiver(double a0, double a_ex, Rng& rng)
{
    while (true) {
        const double u = uniform_pos(rng);
        const double v = uniform_pos(rng);
        const Point rx{(u + 0.5 * v) * HexLattice::spacing, v * HexLattice::row_height};
        const double phi = 2.0 * std::numbers::pi * uniform_pos(rng);
        if (!HexLattice::excluded(rx.x + a0 * std::cos(phi), rx.y + a0 * std::sin(phi), a_ex)) {
            return rx;
        }
    }
}

inline void realize_into(const SystemParams& p, Viewpoint viewpoint, const SimConfig& cfg, Rng& rng,
                         SimGeometry& g, bool record)
{
    const double rt = cfg.r_trunc;
    const double tail_on = cfg.tail_correction ? 1.0 : 0.0;
    const double pk = p.thinning() * p.k_mean;
    const bool underlay = p.mode == Mode::underlay;
    g.snapshot.viewpoint = viewpoint;
    g.snapshot.d2d_interferers.clear();
    g.snapshot.cell_interferers.clear();
    auto* d2d_rec = record ? &g.snapshot.d2d_interferers : nullptr;
    auto* cell_rec = record ? &g.snapshot.cell_interferers : nullptr;
    g.d2d_power = g.cell_power = g.d2d_tail_power = g.cell_tail_power = 0.0;

    if (viewpoint == Viewpoint::uplink_bs) {
        const double eta = p.eta_c;
        g.snapshot.a0 = std::sqrt(uniform_pos(rng));
        if (p.a_ex > 0.0) {
            // BS at a lattice point; cellular interferers are a PPP outside the cell.
            if (underlay) {
                g.d2d_power = field_power(p.k_mean, 0.0, rt, eta, rng, p.a_ex, {0.0, 0.0}, d2d_rec);
                g.d2d_tail_power = tail_on * tail_power(pk, rt, eta);
            }
            g.cell_power = field_power(1.0, 1.0, rt, eta, rng, 0.0, {0.0, 0.0}, cell_rec);
            g.cell_tail_power = tail_on * tail_power(1.0, rt, eta);
        } else {
            if (underlay) {
                g.d2d_power = field_power(p.k_mean, 0.0, rt, eta, rng, 0.0, {0.0, 0.0}, d2d_rec);
                g.d2d_tail_power = tail_on * tail_power(p.k_mean, rt, eta);
            }
            g.cell_tail_power = tail_power(1.0, 1.0, eta);
        }
        return;
    }

    const double eta = p.eta_d;
    const double a0 = p.d2d_link_length();
    g.snapshot.a0 = a0;
    Point rx{0.0, 0.0};
    if (p.a_ex > 0.0) {
        rx = sample_d2d_receiver(a0, p.a_ex, rng);
    }
    if (p.k_mean > 0.0) {
        g.d2d_power = field_power(p.k_mean, 0.0, rt, eta, rng, p.a_ex, rx, d2d_rec);
        g.d2d_tail_power = tail_on * tail_power(pk, rt, eta);
    }
    if (underlay) {
        // Cellular transmitters may come arbitrarily close to a D2D receiver.
        g.cell_power = field_power(1.0, 0.0, rt, eta, rng, 0.0, {0.0, 0.0}, cell_rec);
        g.cell_tail_power = tail_on * tail_power(1.0, rt, eta);
    }
}

} // namespace detail

/// One random geometry at the given viewpoint. Uplink: user uniform in the
/// cell, D2D field over the plane, cellular field outside the cell (sampled
/// only with exclusion, otherwise replaced by its mean). D2D receiver:
/// a0 = a / K^beta, D2D and cellular fields over the whole plane.
inline SimGeometry realize_geometry(const SystemParams& p, Viewpoint viewpoint, const SimConfig& cfg, Rng& rng)
{
    SimGeometry g;
    detail::realize_into(p, viewpoint, cfg, rng, g, true);
    return g;
}

/// Local-average SIR of a realized geometry with the full-plane interference.
inline double local_avg_sir(const SimGeometry& g, const SystemParams& p)
{
    const double alpha = p.alpha();
    const double d2d = g.d2d_power + g.d2d_tail_power;
    const double cell = g.cell_power + g.cell_tail_power;
    if (g.snapshot.viewpoint == Viewpoint::uplink_bs) {
        return std::pow(g.snapshot.a0, -p.eta_c) / (alpha * p.mu * d2d + cell);
    }
    return std::pow(g.snapshot.a0, -p.eta_d) / (d2d + alpha / p.mu * cell);
}

// ---------------------------------------------------------------------------
// Chunked parallel execution
// ---------------------------------------------------------------------------

/// Runs fn(rng, count) for every chunk of n items and returns the per-chunk
/// results in chunk order.
template <class Result, class Fn>
std::vector<Result> run_chunks(std::uint64_t n, const SimConfig& cfg, Fn&& fn)
{
    const std::uint64_t n_chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<Result> results(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) {
                return;
            }
            try {
                Rng rng = chunk_rng(cfg.seed, c);
                const std::uint64_t count = std::min(chunk_size, n - c * chunk_size);
                results[c] = fn(rng, count);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = n_chunks;
            }
        }
    };
    unsigned workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

/// Running mean and sum of squared deviations.
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0) {
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double delta = o.mean - mean;
        const double total = na + nb;
        mean += delta * nb / total;
        m2 += o.m2 + delta * delta * na * nb / total;
        n += o.n;
    }
};

// ---------------------------------------------------------------------------
// Empirical distributions
// ---------------------------------------------------------------------------

/// Empirical CDF of the samples: at each distinct sorted value the fraction
/// of samples <= it.
inline DistributionCurve empirical_cdf(std::vector<double> samples, CurveKind kind, std::string digest = {})
{
    std::sort(samples.begin(), samples.end());
    DistributionCurve c;
    c.kind = kind;
    c.params_digest = std::move(digest);
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) {
            continue;
        }
        c.x.push_back(samples[i]);
        c.f.push_back(static_cast<double>(i + 1) / n);
    }
    return c;
}

/// Largest gap between an empirical CDF (a step function) and a continuous CDF.
template <class F>
double ks_distance(const DistributionCurve& empirical, F&& cdf)
{
    double worst = 0.0;
    double below = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        const double f = cdf(empirical.x[i]);
        worst = std::max({worst, std::fabs(f - empirical.f[i]), std::fabs(f - below)});
        below = empirical.f[i];
    }
    return worst;
}

namespace detail {

template <class Sampler>
std::vector<double> collect(std::uint64_t n, const SimConfig& cfg, Sampler&& sample)
{
    auto chunks = run_chunks<std::vector<double>>(n, cfg, [&](Rng& rng, std::uint64_t count) {
        std::vector<double> v;
        v.reserve(count);
        sample(rng, count, v);
        return v;
    });
    std::vector<double> all;
    all.reserve(n);
    for (auto& c : chunks) {
        all.insert(all.end(), c.begin(), c.end());
    }
    return all;
}

} // namespace detail

/// Empirical CDF of the local-average SIR (rho at the BS, varrho at a D2D
/// receiver) with full-plane interference.
inline DistributionCurve empirical_cdf_local_avg_sir(const SystemParams& p, Viewpoint viewpoint, const SimConfig& cfg)
{
    cfg.check();
    if (cfg.n_geometry < min_cdf_geometries) {
        throw ParamError("empirical CDFs need at least 1000 geometries");
    }
    auto samples = detail::collect(cfg.n_geometry, cfg, [&](Rng& rng, std::uint64_t count, std::vector<double>& out) {
        SimGeometry g;
        for (std::uint64_t i = 0; i < count; ++i) {
            detail::realize_into(p, viewpoint, cfg, rng, g, false);
            out.push_back(local_avg_sir(g, p));
        }
    });
    return empirical_cdf(std::move(samples), CurveKind::local_avg_sir, describe(p));
}

/// Empirical CDF of rho |H|^2 for a fixed local-average SIR rho, with
/// n_geometry * n_fading unit-mean exponential fading draws.
inline DistributionCurve empirical_cdf_inst_sir(double rho, const SimConfig& cfg)
{
    cfg.check();
    if (!(rho > 0.0)) {
        throw ParamError("empirical_cdf_inst_sir: local average must be positive");
    }
    const std::uint64_t n = cfg.n_geometry * cfg.n_fading;
    auto samples = detail::collect(n, cfg, [&](Rng& rng, std::uint64_t count, std::vector<double>& out) {
        for (std::uint64_t i = 0; i < count; ++i) {
            out.push_back(rho * exponential(rng));
        }
    });
    return empirical_cdf(std::move(samples), CurveKind::inst_sir);
}

/// Uplink instantaneous SIR with the user at distance a0, the in-cell D2D
/// interferers at their typical positions and random fields outside the cell:
/// D2D hex-thinned around the lattice of BSs, cellular unthinned. Each
/// geometry gets n_fading fading draws.
inline DistributionCurve empirical_cdf_inst_sir_typical(const SystemParams& p, double a0, const SimConfig& cfg)
{
    cfg.check();
    if (p.mode != Mode::underlay) {
        throw ParamError("empirical_cdf_inst_sir_typical: requires underlay mode");
    }
    if (!(a0 > 0.0 && a0 <= 1.0)) {
        throw ParamError("empirical_cdf_inst_sir_typical: a0 must lie in (0, 1]");
    }
    const double eta = p.eta_c;
    const auto typical = typical_geometry(p, Viewpoint::uplink_bs);
    double in_cell = 0.0;
    for (double d : typical.d2d_interferers) {
        in_cell += std::pow(d, -eta);
    }
    const double signal = std::pow(a0, -eta);
    const double rt = cfg.r_trunc;
    const double tail_on = cfg.tail_correction ? 1.0 : 0.0;
    const double pk = p.thinning() * p.k_mean;
    auto samples = detail::collect(cfg.n_geometry, cfg, [&](Rng& rng, std::uint64_t count, std::vector<double>& out) {
        for (std::uint64_t i = 0; i < count; ++i) {
            const double d2d = detail::field_power(p.k_mean, 1.0, rt, eta, rng, p.a_ex) + tail_on * tail_power(pk, rt, eta);
            const double cell = detail::field_power(1.0, 1.0, rt, eta, rng) + tail_on * tail_power(1.0, rt, eta);
            const double rho = signal / (p.mu * (in_cell + d2d) + cell);
            for (std::uint64_t f = 0; f < cfg.n_fading; ++f) {
                out.push_back(rho * exponential(rng));
            }
        }
    });
    return empirical_cdf(std::move(samples), CurveKind::inst_sir, describe(p));
}

/// Mean link spectral efficiency over random geometries; fading is averaged
/// exactly inside link_se. With a_ex > 0 the hex exclusion layout applies.
inline McEstimate mc_avg_se(const SystemParams& p, analytic::LinkSide side, const SimConfig& cfg)
{
    cfg.check();
    if (p.a_ex > 0.0 && p.mode != Mode::underlay) {
        throw ParamError("mc_avg_se: exclusion regions apply to underlay only");
    }
    const Viewpoint viewpoint =
        side == analytic::LinkSide::cellular_uplink ? Viewpoint::uplink_bs : Viewpoint::d2d_receiver;
    auto chunks = run_chunks<Moments>(cfg.n_geometry, cfg, [&](Rng& rng, std::uint64_t count) {
        Moments m;
        SimGeometry g;
        for (std::uint64_t i = 0; i < count; ++i) {
            detail::realize_into(p, viewpoint, cfg, rng, g, false);
            m.add(analytic::link_se(local_avg_sir(g, p)));
        }
        return m;
    });
    Moments total;
    for (const auto& c : chunks) {
        total.merge(c);
    }
    McEstimate est;
    est.mean = total.mean;
    est.n_samples = total.n;
    est.seed = cfg.seed;
    est.std_error = total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n)) : 0.0;
    return est;
}

} // namespace sgd2d::mcsim
