#pragma once

// Spectrum CSV: `k,omega,re,im,abs`, one row per bin.
// Report CSV: `output_id,delta`, one row per output in the order given.

#include <span>
#include <string>

#include "memnet/csv.hpp"
#include "memnet/json_util.hpp"
#include "memnet/spectral.hpp"

namespace memnet {

[[nodiscard]] inline std::string spectrum_to_csv(const Spectrum& s) {
    std::string out = "k,omega,re,im,abs\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out += std::to_string(k);
        for (double v : {s.omega(k), s.bins[k].real(), s.bins[k].imag(), std::abs(s.bins[k])}) {
            out += ',';
            append_number(out, v);
        }
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline std::string reports_to_csv(std::span<const DissimilarityReport> reports) {
    std::string out = "output_id,delta\n";
    for (const auto& r : reports) {
        out += std::to_string(r.output_id) + ',' + format_number(r.delta) + '\n';
    }
    return out;
}

[[nodiscard]] inline detail::ordered_json report_to_json(const DissimilarityReport& r) {
    detail::ordered_json j;
    j["output_id"] = r.output_id;
    j["delta"] = r.delta;
    j["residual_norm"] = r.residual_norm;
    j["output_norm"] = r.output_norm;
    j["degenerate"] = r.degenerate;
    auto& w = j["weights"] = detail::ordered_json::array();
    for (const auto& c : r.weights) w.push_back({{"re", c.real()}, {"im", c.imag()}});
    return j;
}

/// Spectrum of the fitted combination sum_i w_i u_i. Phase-shifted weights
/// apply on positive frequencies and conjugate on negative ones; direct
/// weights apply to every bin.
[[nodiscard]] inline Spectrum fitted_spectrum(const DissimilarityReport& r,
                                              std::span<const Spectrum> inputs,
                                              Basis basis = Basis::PhaseShifted) {
    Spectrum z;
    z.dt = inputs.front().dt;
    const std::size_t n = inputs.front().size();
    z.bins.assign(n, cplx(0.0));
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t mirror = n - k;
            const cplx w = basis == Basis::Direct            ? r.weights[i]
                           : (k == 0 || k == mirror) ? cplx(r.weights[i].real())
                           : k < mirror           ? r.weights[i]
                                                  : std::conj(r.weights[i]);
            z.bins[k] += w * inputs[i].bins[k];
        }
    }
    return z;
}

}  // namespace memnet
