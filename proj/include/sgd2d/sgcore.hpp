#pragma once

// Core domain types: system parameters, normalized geometry snapshots,
// sampled distributions and Monte Carlo estimates.
//
// All distances are normalized by the cell radius R, so the model never
// carries absolute powers or lengths; only the power ratio mu survives.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgd2d {

/// Thrown when a parameter set or an argument violates a documented invariant.
class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Mode { underlay, overlay };

enum class Viewpoint { uplink_bs, d2d_receiver };

inline const char* to_string(Mode m) { return m == Mode::underlay ? "underlay" : "overlay"; }

inline const char* to_string(Viewpoint v) { return v == Viewpoint::uplink_bs ? "uplink_bs" : "d2d_receiver"; }

struct SystemParams {
    Mode mode = Mode::overlay;
    double mu = 0.1;      // D2D-to-cellular transmit power ratio
    double k_mean = 10.0; // mean active D2D links per cell
    double beta = 0.0;    // D2D link length shrinks as a / K^beta
    double a = 0.1;       // normalized D2D reference distance
    double eta_c = 3.5;   // cellular pathloss exponent
    double eta_d = 4.5;   // user-to-user pathloss exponent
    double a_ex = 0.0;    // normalized exclusion radius, 0 = none

    /// 1 for underlay (D2D shares the uplink), 0 for overlay.
    double alpha() const { return mode == Mode::underlay ? 1.0 : 0.0; }

    /// Fraction of the plane left open to D2D transmitters.
    double thinning() const { return 1.0 - a_ex * a_ex; }

    /// Normalized length of the intended D2D link, a / K^beta.
    double d2d_link_length() const
    {
        if (k_mean == 0.0 && beta > 0.0) {
            throw ParamError("d2d link length a/K^beta is not finite for K=0 and beta>0");
        }
        return a / std::pow(k_mean, beta);
    }

    /// Ratio (K + alpha / mu^(2/eta)) / K^(2 beta), evaluated so that beta = 1/2
    /// with overlay gives exactly 1 for every K.
    double d2d_density_factor(double eta) const
    {
        const double k_scaled = k_mean == 0.0 ? 0.0 : k_mean / std::pow(k_mean, 2.0 * beta);
        if (alpha() == 0.0) {
            return k_scaled;
        }
        return k_scaled + alpha() / (std::pow(mu, 2.0 / eta) * std::pow(k_mean, 2.0 * beta));
    }

    bool operator==(const SystemParams&) const = default;
};

/// Canonical text form of a parameter set, used for manifests and digests.
inline std::string describe(const SystemParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "mode=" << to_string(p.mode) << ";mu=" << p.mu << ";k=" << p.k_mean << ";beta=" << p.beta
       << ";a=" << p.a << ";eta_c=" << p.eta_c << ";eta_d=" << p.eta_d << ";a_ex=" << p.a_ex;
    return os.str();
}

/// Returns p unchanged when every invariant holds, otherwise throws ParamError
/// naming the first violation.
inline SystemParams validate_params(const SystemParams& p)
{
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.eta_c) || p.eta_c <= 2.0) {
        throw ParamError("eta_c must exceed 2");
    }
    if (!finite(p.eta_d) || p.eta_d <= 2.0) {
        throw ParamError("eta_d must exceed 2");
    }
    if (!finite(p.a_ex) || p.a_ex < 0.0) {
        throw ParamError("exclusion radius must be >= 0");
    }
    if (p.a_ex >= 1.0) {
        throw ParamError("exclusion radius must be < 1");
    }
    if (!finite(p.mu) || p.mu <= 0.0) {
        throw ParamError("mu must be positive");
    }
    if (!finite(p.k_mean) || p.k_mean < 0.0) {
        throw ParamError("k_mean must be nonnegative");
    }
    if (!finite(p.a) || p.a <= 0.0) {
        throw ParamError("a must be positive");
    }
    if (!finite(p.beta) || p.beta < 0.0) {
        throw ParamError("beta must be nonnegative");
    }
    if (p.k_mean > 0.0 || p.beta == 0.0) {
        const double a0 = p.d2d_link_length();
        if (!finite(a0) || a0 <= 0.0) {
            throw ParamError("d2d link length a/K^beta must be finite and positive");
        }
    }
    return p;
}

/// One realization of normalized interferer distances around a receiver.
struct GeometrySnapshot {
    Viewpoint viewpoint = Viewpoint::uplink_bs;
    double a0 = 1.0;
    std::vector<double> d2d_interferers;
    std::vector<double> cell_interferers;

    std::size_t d2d_count() const { return d2d_interferers.size(); }
    std::size_t cell_count() const { return cell_interferers.size(); }

    /// Throws ParamError if the snapshot is not canonical.
    void check() const
    {
        auto check_list = [](const std::vector<double>& v, const char* name) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!(v[i] > 0.0)) {
                    throw ParamError(std::string(name) + " distances must be positive");
                }
                if (i > 0 && v[i] < v[i - 1]) {
                    throw ParamError(std::string(name) + " distances must be sorted ascending");
                }
            }
        };
        if (!(a0 > 0.0)) {
            throw ParamError("a0 must be positive");
        }
        if (viewpoint == Viewpoint::uplink_bs && a0 > 1.0) {
            throw ParamError("uplink intended user must lie inside the unit cell");
        }
        check_list(d2d_interferers, "d2d_interferers");
        check_list(cell_interferers, "cell_interferers");
    }
};

enum class CurveKind { local_avg_sir, inst_sir, spectral_eff };

/// Sampled CDF: strictly increasing x, nondecreasing f in [0,1].
struct DistributionCurve {
    std::vector<double> x;
    std::vector<double> f;
    CurveKind kind = CurveKind::local_avg_sir;
    std::string params_digest;

    std::size_t size() const { return x.size(); }

    bool valid() const
    {
        if (x.size() != f.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(f[i] >= 0.0 && f[i] <= 1.0)) {
                return false;
            }
            if (i > 0 && (!(x[i] > x[i - 1]) || f[i] < f[i - 1])) {
                return false;
            }
        }
        return true;
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Expected normalized distance to the j-th nearest point of a PPP with
/// k_mean points per unit-radius disc: Gamma(j + 1/2) / (Gamma(j) sqrt(K)).
inline double mean_neighbor_distance(int j, double k_mean)
{
    if (j < 1) {
        throw ParamError("neighbor index j must be >= 1");
    }
    if (!(k_mean > 0.0)) {
        throw ParamError("k_mean must be positive");
    }
    // lgamma keeps the ratio finite for large j.
    return std::exp(std::lgamma(j + 0.5) - std::lgamma(static_cast<double>(j))) / std::sqrt(k_mean);
}

/// Deterministic "typical" geometry: round(K) D2D interferers, each at the
/// mean distance of the corresponding nearest neighbor. With an exclusion
/// radius, interferers at or inside it are dropped.
///
/// At the uplink viewpoint a0 is left at 1 (callers set the user distance);
/// at the D2D viewpoint a0 = a / K^beta and one cellular interferer sits at
/// the mean nearest-neighbor distance of the unit-density cellular PPP.
inline GeometrySnapshot typical_geometry(const SystemParams& p, Viewpoint viewpoint)
{
    const auto count = static_cast<long>(std::floor(p.k_mean + 0.5));
    if (count < 1) {
        throw ParamError("typical geometry needs k_mean that rounds to at least 1");
    }
    GeometrySnapshot g;
    g.viewpoint = viewpoint;
    g.d2d_interferers.reserve(static_cast<std::size_t>(count));
    for (long j = 1; j <= count; ++j) {
        const double d = mean_neighbor_distance(static_cast<int>(j), p.k_mean);
        if (d > p.a_ex) {
            g.d2d_interferers.push_back(d);
        }
    }
    if (viewpoint == Viewpoint::d2d_receiver) {
        g.a0 = p.d2d_link_length();
        g.cell_interferers.push_back(mean_neighbor_distance(1, 1.0));
    }
    return g;
}

} // namespace sgd2d
