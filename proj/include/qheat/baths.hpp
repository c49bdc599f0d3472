#pragma once

#include "qheat/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qheat {

/// Thermal bath response spectrum. Units: hbar = k_B = 1 throughout, so
/// frequencies and temperatures share one unit. Negative frequencies are
/// always evaluated through the KMS relation G(-w) = exp(-w/T) G(w); only
/// the positive-frequency transition rate gamma(w) is modeled.
struct BathSpec {
    enum class Model { flat, ohmic, tabulated };

    std::string label = "cold";
    double temperature = 1.0;
    Model model = Model::flat;

    // flat: gamma0 on [band_min, band_max]
    double gamma0 = 1.0;
    double band_min = 0.0;
    double band_max = std::numeric_limits<double>::infinity();
    // ohmic: kappa * w * exp(-w / cutoff)
    double kappa = 1.0;
    double cutoff = 1.0;
    // tabulated: sorted (w, gamma) samples, linear interpolation, zero outside
    std::vector<std::pair<double, double>> table;

    static BathSpec flat(std::string label, double temperature, double gamma0, double band_min,
                         double band_max) {
        BathSpec b;
        b.label = std::move(label);
        b.temperature = temperature;
        b.model = Model::flat;
        b.gamma0 = gamma0;
        b.band_min = band_min;
        b.band_max = band_max;
        return b;
    }

    static BathSpec ohmic(std::string label, double temperature, double kappa, double cutoff) {
        BathSpec b;
        b.label = std::move(label);
        b.temperature = temperature;
        b.model = Model::ohmic;
        b.kappa = kappa;
        b.cutoff = cutoff;
        return b;
    }

    static BathSpec tabulated(std::string label, double temperature,
                              std::vector<std::pair<double, double>> samples) {
        BathSpec b;
        b.label = std::move(label);
        b.temperature = temperature;
        b.model = Model::tabulated;
        b.table = std::move(samples);
        std::sort(b.table.begin(), b.table.end());
        return b;
    }
};

/// Bare transition rate gamma(w) for w > 0.
inline double bare_rate(const BathSpec& bath, double omega) {
    switch (bath.model) {
        case BathSpec::Model::flat:
            return (omega >= bath.band_min && omega <= bath.band_max) ? bath.gamma0 : 0.0;
        case BathSpec::Model::ohmic:
            return bath.kappa * omega * std::exp(-omega / bath.cutoff);
        case BathSpec::Model::tabulated: {
            if (bath.table.empty()) return 0.0;
            if (omega < bath.table.front().first || omega > bath.table.back().first) return 0.0;
            auto hi = std::lower_bound(bath.table.begin(), bath.table.end(),
                                       std::make_pair(omega, -1.0));
            if (hi == bath.table.begin()) return hi->second;
            auto lo = std::prev(hi);
            if (hi == bath.table.end()) return lo->second;
            const double span = hi->first - lo->first;
            if (span <= 0.0) return lo->second;
            const double t = (omega - lo->first) / span;
            return (1.0 - t) * lo->second + t * hi->second;
        }
    }
    return 0.0;
}

inline double thermal_occupation(double omega, double temperature) {
    return 1.0 / std::expm1(omega / temperature);
}

/// Bath response G(w) = gamma(w) (nbar(w) + 1) for w > 0, extended to
/// negative frequencies by detailed balance.
inline double response(const BathSpec& bath, double omega) {
    if (omega == 0.0)
        throw Error(Errc::zero_frequency, "bath response undefined at zero frequency");
    if (bath.temperature <= 0.0)
        throw Error(Errc::invalid_config, "bath temperature must be positive");
    if (omega < 0.0) return std::exp(omega / bath.temperature) * response(bath, -omega);
    const double g = bare_rate(bath, omega);
    if (g == 0.0) return 0.0;
    // nbar + 1 = 1 / (1 - e^{-w/T}); safe for large w/T.
    return g / (-std::expm1(-omega / bath.temperature));
}

/// Floquet harmonic weights P(q) induced by the periodic modulation.
/// Weights are validated at construction: nonnegative and summing to one.
struct ModulationSpec {
    double rate = 0.0;  // Omega
    std::map<int, double> weights;

    static ModulationSpec none() {
        ModulationSpec m;
        m.rate = 0.0;
        m.weights = {{0, 1.0}};
        return m;
    }

    static ModulationSpec two_sideband(double rate) {
        ModulationSpec m;
        m.rate = rate;
        m.weights = {{-1, 0.5}, {1, 0.5}};
        m.validate();
        return m;
    }

    static ModulationSpec custom(double rate, std::map<int, double> weights) {
        ModulationSpec m;
        m.rate = rate;
        m.weights = std::move(weights);
        m.validate();
        return m;
    }

    void validate() const {
        if (rate < 0.0) throw Error(Errc::invalid_config, "modulation rate must be >= 0");
        double sum = 0.0;
        for (const auto& [q, p] : weights) {
            if (p < 0.0) throw Error(Errc::invalid_config, "Floquet weights must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw Error(Errc::invalid_config, "Floquet weights must sum to 1");
    }

    double weight(int q) const {
        auto it = weights.find(q);
        return it == weights.end() ? 0.0 : it->second;
    }

    double sideband(int q, double omega0) const { return omega0 + q * rate; }

    /// Every weighted sideband must sit at strictly positive frequency.
    void require_positive_sidebands(double omega0) const {
        for (const auto& [q, p] : weights)
            if (p > 0.0 && sideband(q, omega0) <= 0.0)
                throw Error(Errc::invalid_config,
                            "modulation places a weighted sideband at or below zero frequency");
    }
};

/// Boltzmann factor exp(-beta_eff * omega0) of the effective temperature that
/// summarizes both baths over all sidebands: the ratio of total upward to
/// total downward response.
inline double effective_boltzmann(const BathSpec& cold, const BathSpec& hot,
                                  const ModulationSpec& mod, double omega0) {
    if (omega0 <= 0.0) throw Error(Errc::invalid_config, "omega0 must be positive");
    mod.validate();
    mod.require_positive_sidebands(omega0);
    double up = 0.0, down = 0.0;
    for (const auto& [q, p] : mod.weights) {
        if (p == 0.0) continue;
        const double wq = mod.sideband(q, omega0);
        for (const BathSpec* bath : {&cold, &hot}) {
            down += p * response(*bath, wq);
            up += p * response(*bath, -wq);
        }
    }
    if (down <= 0.0)
        throw Error(Errc::no_coupling, "system decoupled from both baths at every sideband");
    return up / down;
}

}  // namespace qheat
