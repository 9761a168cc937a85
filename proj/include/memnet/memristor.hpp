#pragma once

#include <algorithm>
#include <cmath>

namespace memnet {

/// Constants of a threshold memristor whose state variable is its resistance.
///
/// The resistance moves at `rate(params, v)` while inside [r_min, r_max] and is
/// pinned at a limit when the rate points outward. A passive resistor is the
/// degenerate case alpha = beta = 0 with r_min = r_max = r_init.
struct MemristorParams {
    double alpha = 0.0;        // Ω/(V·s), slope below threshold
    double beta = 0.0;         // Ω/(V·s), slope above threshold
    double v_threshold = 0.0;  // V
    double r_min = 1.0;        // Ω
    double r_max = 1.0;        // Ω
    double r_init = 1.0;       // Ω

    friend bool operator==(const MemristorParams&, const MemristorParams&) = default;

    [[nodiscard]] static MemristorParams passive(double resistance) {
        return {0.0, 0.0, 0.0, resistance, resistance, resistance};
    }

    [[nodiscard]] bool is_passive() const { return alpha == 0.0 && beta == 0.0; }

    [[nodiscard]] bool valid() const {
        return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(v_threshold) &&
               std::isfinite(r_max) && r_min > 0.0 && r_min <= r_init && r_init <= r_max &&
               v_threshold >= 0.0;
    }
};

/// dR/dt for an element voltage drop v. Odd in v, continuous at ±V_T.
[[nodiscard]] inline double rate(const MemristorParams& p, double v) {
    return p.beta * v +
           0.5 * (p.alpha - p.beta) * (std::abs(v + p.v_threshold) - std::abs(v - p.v_threshold));
}

[[nodiscard]] inline double clamp_resistance(const MemristorParams& p, double r) {
    return std::min(std::max(r, p.r_min), p.r_max);
}

}  // namespace memnet
