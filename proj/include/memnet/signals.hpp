#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace memnet {

enum class SignalKind { Sine, Cosine, Square, Sawtooth, Constant };

inline const char* kind_name(SignalKind kind) {
    switch (kind) {
        case SignalKind::Sine: return "sine";
        case SignalKind::Cosine: return "cosine";
        case SignalKind::Square: return "square";
        case SignalKind::Sawtooth: return "sawtooth";
        case SignalKind::Constant: return "constant";
    }
    return "constant";
}

inline std::optional<SignalKind> parse_kind(const std::string& text) {
    if (text == "sine") return SignalKind::Sine;
    if (text == "cosine") return SignalKind::Cosine;
    if (text == "square") return SignalKind::Square;
    if (text == "sawtooth") return SignalKind::Sawtooth;
    if (text == "constant") return SignalKind::Constant;
    return std::nullopt;
}

/// Periodic or constant voltage source. Constant ignores frequency and phase
/// and evaluates to `offset + amplitude`.
struct Signal {
    SignalKind kind = SignalKind::Constant;
    double amplitude = 0.0;  // V
    double frequency = 0.0;  // Hz
    double phase = 0.0;      // rad
    double offset = 0.0;     // V

    friend bool operator==(const Signal&, const Signal&) = default;

    static Signal sine(double amplitude, double frequency, double phase = 0.0) {
        return {SignalKind::Sine, amplitude, frequency, phase, 0.0};
    }
    static Signal cosine(double amplitude, double frequency, double phase = 0.0) {
        return {SignalKind::Cosine, amplitude, frequency, phase, 0.0};
    }
    static Signal square(double amplitude, double frequency, double phase = 0.0) {
        return {SignalKind::Square, amplitude, frequency, phase, 0.0};
    }
    static Signal sawtooth(double amplitude, double frequency, double phase = 0.0) {
        return {SignalKind::Sawtooth, amplitude, frequency, phase, 0.0};
    }
    static Signal constant(double value) { return {SignalKind::Constant, value, 0.0, 0.0, 0.0}; }
};

[[nodiscard]] inline double evaluate(const Signal& s, double t) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double arg = two_pi * s.frequency * t + s.phase;
    switch (s.kind) {
        case SignalKind::Sine: return s.amplitude * std::sin(arg) + s.offset;
        case SignalKind::Cosine: return s.amplitude * std::cos(arg) + s.offset;
        case SignalKind::Square:
            // +A when the sine is exactly zero.
            return (std::sin(arg) < 0.0 ? -s.amplitude : s.amplitude) + s.offset;
        case SignalKind::Sawtooth: {
            const double cycles = s.frequency * t + s.phase / two_pi;
            return s.amplitude * (2.0 * (cycles - std::floor(cycles)) - 1.0) + s.offset;
        }
        case SignalKind::Constant: return s.amplitude + s.offset;
    }
    return s.offset;
}

}  // namespace memnet
