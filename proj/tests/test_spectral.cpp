#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "memnet/dynamics.hpp"
#include "memnet/spectral.hpp"
#include "oracles.hpp"

using namespace memnet;
using Catch::Approx;

namespace {

std::vector<double> tone(std::size_t n, double cycles, double phase = 0.0, double amp = 1.0) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = amp * std::sin(2.0 * std::numbers::pi * cycles * static_cast<double>(j) /
                                    static_cast<double>(n) + phase);
    }
    return out;
}

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) x = g(rng);
    return out;
}

double norm_sq(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

TEST_CASE("dft of simple series", "[spectral][dft]") {
    SECTION("constant") {
        const std::vector<double> c(16, 0.75);
        const auto s = dft(c, 0.1);
        REQUIRE(s.bins[0].real() == Approx(12.0).epsilon(1e-14));
        for (std::size_t k = 1; k < 16; ++k) REQUIRE(std::abs(s.bins[k]) < 1e-13);
    }
    SECTION("integer-period sine") {
        const std::size_t n = 40;
        const auto s = dft(tone(n, 3.0), 0.01);
        for (std::size_t k = 0; k < n; ++k) {
            const double expected = (k == 3 || k == n - 3) ? n / 2.0 : 0.0;
            REQUIRE(std::abs(s.bins[k]) == Approx(expected).margin(1e-12));
        }
    }
    SECTION("omega mapping") {
        const auto s = dft(std::vector<double>(500, 1.0), 0.006);
        REQUIRE(s.omega(6) == Approx(2.0 * std::numbers::pi * 2.0));
    }
    SECTION("too short") {
        REQUIRE_THROWS_AS(dft(std::vector<double>{1.0}, 1.0), UsageError);
    }
}

TEST_CASE("dft agrees with a per-term reference and obeys Parseval", "[spectral][dft][property]") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {2u, 3u, 17u, 64u, 101u, 500u}) {
        const auto x = random_series(rng, n);
        const auto s = dft(x, 1.0);
        const auto ref = oracle::naive_dft(x);
        double bins_sq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            REQUIRE(std::abs(s.bins[k] - ref[k]) <= 1e-9 * std::sqrt(static_cast<double>(n)));
            bins_sq += std::norm(s.bins[k]);
            if (k > 0) REQUIRE(s.bins[n - k] == std::conj(s.bins[k]));
        }
        REQUIRE(bins_sq / static_cast<double>(n) == Approx(norm_sq(x)).epsilon(1e-10));
    }
}

TEST_CASE("fit_linear_combination recovers exact combinations", "[spectral][fit]") {
    std::mt19937_64 rng(5);
    const std::size_t n = 64;
    const std::vector<Spectrum> inputs{dft(random_series(rng, n), 1.0),
                                       dft(random_series(rng, n), 1.0),
                                       dft(random_series(rng, n), 1.0)};
    SECTION("output equal to the first input") {
        const auto fit = fit_linear_combination(inputs[0], inputs, false);
        REQUIRE(std::abs(fit.weights[0] - cplx(1.0)) < 1e-12);
        REQUIRE(std::abs(fit.weights[1]) < 1e-12);
        REQUIRE(std::abs(fit.weights[2]) < 1e-12);
        REQUIRE(fit.residual_norm < 1e-10 * fit.output_norm);
        REQUIRE_FALSE(fit.degenerate);
    }
    SECTION("complex combination") {
        Spectrum o = inputs[0];
        for (std::size_t k = 0; k < n; ++k) {
            o.bins[k] = 2.0 * inputs[0].bins[k] + cplx(0.0, 3.0) * inputs[1].bins[k];
        }
        const auto fit = fit_linear_combination(o, inputs, false);
        REQUIRE(std::abs(fit.weights[0] - cplx(2.0)) < 1e-12);
        REQUIRE(std::abs(fit.weights[1] - cplx(0.0, 3.0)) < 1e-12);
        REQUIRE(std::abs(fit.weights[2]) < 1e-12);
        REQUIRE(fit.residual_norm < 1e-10 * fit.output_norm);
    }
    SECTION("frequency absent from every input") {
        const std::vector<Spectrum> tones{dft(tone(n, 2.0), 1.0), dft(tone(n, 5.0, 0.3), 1.0)};
        const auto o = dft(tone(n, 7.0, 1.1), 1.0);
        const auto fit = fit_linear_combination(o, tones, true);
        for (const auto& w : fit.weights) REQUIRE(std::abs(w) < 1e-12);
        REQUIRE(fit.residual_norm == Approx(fit.output_norm).epsilon(1e-12));
    }
    SECTION("collinear inputs are flagged and still fitted") {
        Spectrum twice = inputs[0];
        for (auto& b : twice.bins) b *= 2.0;
        const std::vector<Spectrum> collinear{inputs[0], twice};
        const auto fit = fit_linear_combination(inputs[0], collinear, false);
        REQUIRE(fit.degenerate);
        // Minimum-norm solution of c0 + 2 c1 = 1.
        REQUIRE(std::abs(fit.weights[0] - cplx(0.2)) < 1e-10);
        REQUIRE(std::abs(fit.weights[1] - cplx(0.4)) < 1e-10);
        REQUIRE(fit.residual_norm < 1e-9 * fit.output_norm);
    }
    SECTION("argument checks") {
        REQUIRE_THROWS_AS(fit_linear_combination(inputs[0], std::vector<Spectrum>{}, false),
                          UsageError);
        const std::vector<Spectrum> wrong{dft(random_series(rng, n + 1), 1.0)};
        REQUIRE_THROWS_AS(fit_linear_combination(inputs[0], wrong, false), UsageError);
    }
}

TEST_CASE("dissimilarity extremes", "[spectral][delta]") {
    const std::size_t n = 120;
    const std::vector<std::vector<double>> inputs{tone(n, 4.0), tone(n, 6.0, 0.4)};
    REQUIRE(dissimilarity(inputs[0], inputs, 0.01, false) < 1e-12);
    REQUIRE(dissimilarity(tone(n, 9.0, 0.2), inputs, 0.01, true) == Approx(1.0).epsilon(1e-12));
    // A time-shifted input is reproduced by the phase-shifted basis only.
    const auto shifted = tone(n, 4.0, 0.9, 1.7);
    REQUIRE(dissimilarity(shifted, inputs, 0.01, false, Basis::PhaseShifted) < 1e-12);
    REQUIRE(dissimilarity(shifted, inputs, 0.01, false, Basis::Direct) > 0.5);
    REQUIRE_THROWS_AS(dissimilarity(std::vector<double>(n, 0.0), inputs, 0.01, false),
                      NumericalError);
    // Pure DC output with DC excluded leaves nothing to score.
    REQUIRE_THROWS_AS(dissimilarity(std::vector<double>(n, 3.0), inputs, 0.01, true),
                      NumericalError);
}

TEST_CASE("phase-shifted weights encode amplitude and phase", "[spectral][delta]") {
    const std::size_t n = 200;
    const std::vector<Spectrum> inputs{dft(tone(n, 5.0), 1.0)};
    const double amp = 0.8;
    const double shift = 0.6;
    const auto r = analyze_output(3, dft(tone(n, 5.0, shift, amp), 1.0), inputs, true);
    REQUIRE(r.output_id == 3);
    REQUIRE(std::abs(r.weights[0]) == Approx(amp).epsilon(1e-10));
    REQUIRE(std::arg(r.weights[0]) == Approx(shift).epsilon(1e-10));
}

TEST_CASE("dissimilarity invariants", "[spectral][delta][property]") {
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> scale(-5.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 32 + static_cast<std::size_t>(trial) * 3;
        const auto o = random_series(rng, n);
        std::vector<std::vector<double>> inputs{random_series(rng, n), random_series(rng, n)};
        for (bool exclude_dc : {false, true}) {
            for (Basis basis : {Basis::Direct, Basis::PhaseShifted}) {
                const double d = dissimilarity(o, inputs, 0.01, exclude_dc, basis);
                REQUIRE(d >= 0.0);
                REQUIRE(d <= 1.0);

                double c = scale(rng);
                if (std::abs(c) < 0.1) c = 0.1;
                auto scaled = o;
                for (auto& x : scaled) x *= c;
                REQUIRE(dissimilarity(scaled, inputs, 0.01, exclude_dc, basis) ==
                        Approx(d).epsilon(1e-10));

                auto more = inputs;
                more.push_back(random_series(rng, n));
                REQUIRE(dissimilarity(o, more, 0.01, exclude_dc, basis) <= d + 1e-12);
            }
        }

        // Pythagoras over the included bins.
        std::vector<Spectrum> in;
        for (const auto& s : inputs) in.push_back(dft(s, 0.01));
        const auto fit = fit_linear_combination(dft(o, 0.01), in, true);
        const double proj_sq = fit.output_norm * fit.output_norm - fit.residual_norm * fit.residual_norm;
        Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n - 1));
        for (std::size_t i = 0; i < in.size(); ++i) {
            for (std::size_t k = 1; k < n; ++k) {
                z(static_cast<Eigen::Index>(k - 1)) += fit.weights[i] * in[i].bins[k];
            }
        }
        REQUIRE(z.squaredNorm() == Approx(proj_sq).epsilon(1e-8));
    }
}

TEST_CASE("Fourier fit equals the time-domain least-squares oracle", "[spectral][oracle]") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 16 + static_cast<std::size_t>(trial) * 5;
        const auto o = random_series(rng, n);
        const std::vector<std::vector<double>> inputs{random_series(rng, n), random_series(rng, n),
                                                      random_series(rng, n)};
        std::vector<Spectrum> in;
        for (const auto& s : inputs) in.push_back(dft(s, 1.0));
        for (bool exclude_dc : {false, true}) {
            for (Basis basis : {Basis::PhaseShifted, Basis::Direct}) {
                const auto r = analyze_output(0, dft(o, 1.0), in, exclude_dc, basis);
                const double fourier = r.residual_norm / std::sqrt(static_cast<double>(n));
                const double time = oracle::time_domain_fit_residual(
                    o, inputs, exclude_dc, basis == Basis::PhaseShifted);
                REQUIRE(std::abs(fourier - time) <= 1e-8 * time);
            }
        }
    }
}

TEST_CASE("rank_outputs orders by descending delta", "[spectral][rank]") {
    std::vector<DissimilarityReport> reports(3);
    reports[0].output_id = 1;
    reports[0].delta = 0.3;
    reports[1].output_id = 2;
    reports[1].delta = 0.1;
    reports[2].output_id = 3;
    reports[2].delta = 0.9;
    REQUIRE(rank_outputs(reports) == std::vector<int>{3, 1, 2});

    for (auto& r : reports) r.delta = 0.5;
    reports[0].output_id = 9;
    REQUIRE(rank_outputs(reports) == std::vector<int>{2, 3, 9});
}

TEST_CASE("cube voltages are easy to mimic, some memristances are not", "[spectral][cube]") {
    const Network cube = build_cube();
    SimulationConfig cfg;
    const auto trace = simulate(cube, {{1, Signal::sine(1.0, 2.0)}, {2, Signal::sine(1.0, 3.0)},
                                       {3, Signal::sine(1.0, 5.0)}},
                                cfg);
    auto window = [](std::vector<double> s) {
        s.pop_back();
        return s;
    };
    std::vector<std::vector<double>> inputs;
    std::vector<Spectrum> in;
    for (NodeId id : {1, 2, 3}) {
        inputs.push_back(window(trace.voltage_of(id)));
        in.push_back(dft(inputs.back(), cfg.dt));
    }
    std::vector<DissimilarityReport> voltages;
    for (std::size_t i = 0; i < cube.nodes.size(); ++i) {
        if (cube.nodes[i].role != NodeRole::Internal) continue;
        const auto series = window(trace.node_voltages[i]);
        voltages.push_back(analyze_output(cube.nodes[i].id, dft(series, cfg.dt), in, false));
        const double time = oracle::time_domain_fit_residual(series, inputs, false);
        REQUIRE(voltages.back().residual_norm / std::sqrt(500.0) == Approx(time).epsilon(1e-8));
    }
    std::vector<DissimilarityReport> resistances;
    for (std::size_t k = 0; k < cube.links.size(); ++k) {
        const auto series = window(trace.resistances[k]);
        resistances.push_back(analyze_output(static_cast<int>(k), dft(series, cfg.dt), in, true));
        const double time = oracle::time_domain_fit_residual(series, inputs, true);
        REQUIRE(resistances.back().residual_norm / std::sqrt(500.0) == Approx(time).epsilon(1e-8));
    }
    double max_v = 0.0;
    double max_r = 0.0;
    for (const auto& r : voltages) max_v = std::max(max_v, r.delta);
    for (const auto& r : resistances) max_r = std::max(max_r, r.delta);
    REQUIRE(max_r > max_v);

    // Ranking frozen from this run: hardest voltages at nodes 5 and 10, easiest at 12.
    const auto order = rank_outputs(voltages);
    REQUIRE(order.size() == 23);
    REQUIRE(order[0] == 5);
    REQUIRE(order[1] == 10);
    REQUIRE(order.back() == 12);
}
