#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "memnet/dynamics.hpp"
#include "memnet/errors.hpp"
#include "memnet/network.hpp"
#include "memnet/signals.hpp"

namespace memnet {

/// Training instances by observables. When `bias_column` is set, that column
/// is the constant 1 and is exempt from the ridge penalty.
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;
    std::optional<Eigen::Index> bias_column;

    [[nodiscard]] Eigen::Index rows() const { return values.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return values.cols(); }

    /// Observables plus an appended bias column.
    static FeatureMatrix with_bias(const Eigen::MatrixXd& observables,
                                   std::vector<std::string> names = {}) {
        FeatureMatrix f;
        f.values.resize(observables.rows(), observables.cols() + 1);
        f.values.leftCols(observables.cols()) = observables;
        f.values.col(observables.cols()).setOnes();
        f.bias_column = observables.cols();
        if (names.empty()) {
            for (Eigen::Index c = 0; c < observables.cols(); ++c) {
                names.push_back("f" + std::to_string(c));
            }
        }
        names.emplace_back("bias");
        f.column_names = std::move(names);
        return f;
    }
};

struct ReadoutWeights {
    Eigen::MatrixXd weights;     // feature columns x target dimensions
    bool rank_deficient = false; // minimum-norm solution of singular normal equations
};

/// Minimizer of ||F w - y||^2 + ridge * ||w||^2 (bias column unpenalized).
[[nodiscard]] inline ReadoutWeights train_readout(const FeatureMatrix& features,
                                                  const Eigen::MatrixXd& targets, double ridge) {
    if (features.rows() != targets.rows()) {
        throw UsageError("feature rows (" + std::to_string(features.rows()) +
                         ") and target rows (" + std::to_string(targets.rows()) + ") differ");
    }
    if (!(ridge >= 0.0)) throw UsageError("ridge must be >= 0");
    if (!features.values.allFinite() || !targets.allFinite()) {
        throw UsageError("features and targets must be finite");
    }

    const Eigen::MatrixXd& f = features.values;
    Eigen::MatrixXd normal = f.transpose() * f;
    for (Eigen::Index c = 0; c < normal.rows(); ++c) {
        if (c != features.bias_column) normal(c, c) += ridge;
    }
    const Eigen::MatrixXd rhs = f.transpose() * targets;

    ReadoutWeights out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    const bool singular = !(eig.eigenvalues().minCoeff() > 1e-12 * std::max(largest, 1e-300));
    if (!singular) {
        out.weights = normal.ldlt().solve(rhs);
    } else if (ridge == 0.0) {
        out.rank_deficient = true;
        out.weights = f.completeOrthogonalDecomposition().solve(targets);
    } else {
        // Only the bias direction can be left unpenalized and singular here.
        out.rank_deficient = true;
        out.weights = normal.completeOrthogonalDecomposition().solve(rhs);
    }
    return out;
}

[[nodiscard]] inline Eigen::VectorXd readout_scores(const ReadoutWeights& w,
                                                    const FeatureMatrix& features) {
    if (w.weights.rows() != features.cols()) {
        throw UsageError("readout expects " + std::to_string(w.weights.rows()) +
                         " feature columns, got " + std::to_string(features.cols()));
    }
    return features.values * w.weights.col(0);
}

/// +1 where the score is >= 0, -1 otherwise.
[[nodiscard]] inline std::vector<int> classify(const ReadoutWeights& w,
                                               const FeatureMatrix& features) {
    const Eigen::VectorXd s = readout_scores(w, features);
    std::vector<int> labels(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        labels[static_cast<std::size_t>(i)] = s(i) >= 0.0 ? 1 : -1;
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Sawtooth-vs-square discrimination.

enum class Observables { Voltages, Resistances, Both };

inline const char* observables_name(Observables o) {
    switch (o) {
        case Observables::Voltages: return "voltages";
        case Observables::Resistances: return "resistances";
        case Observables::Both: return "both";
    }
    return "voltages";
}

inline std::optional<Observables> parse_observables(const std::string& text) {
    if (text == "voltages") return Observables::Voltages;
    if (text == "resistances") return Observables::Resistances;
    if (text == "both") return Observables::Both;
    return std::nullopt;
}

struct WaveformTaskConfig {
    std::size_t episodes = 100;
    double train_fraction = 0.8;
    std::uint64_t seed = 1;
    double frequency = 1.0;   // Hz
    double amplitude = 1.0;   // V
    double duration = 2.0;    // s
    double dt = 0.006;        // s
    std::size_t samples = 8;  // observation times per episode, evenly spaced, last at the end
    Observables observables = Observables::Voltages;
    double ridge = 1e-6;
    bool shuffle_labels = false;  // control run: labels decoupled from waveforms
    std::size_t jobs = 1;
};

/// Label +1 is a square drive, -1 a sawtooth.
struct Episode {
    int label = 1;
    double phase = 0.0;
    bool train = false;
    double score = 0.0;
    int predicted = 1;
};

struct WaveformTaskResult {
    double accuracy = 0.0;        // held-out
    double train_accuracy = 0.0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::vector<Episode> episodes;
    FeatureMatrix features;
    ReadoutWeights weights;
};

namespace detail {

inline std::vector<double> episode_features(const Network& network,
                                            const WaveformTaskConfig& cfg, int label,
                                            double phase) {
    const Signal drive = label > 0 ? Signal::square(cfg.amplitude, cfg.frequency, phase)
                                   : Signal::sawtooth(cfg.amplitude, cfg.frequency, phase);
    DriveAssignment drives;
    for (NodeId id : network.ids_with_role(NodeRole::External)) drives[id] = drive;

    SimulationConfig sim;
    sim.dt = cfg.dt;
    sim.n_steps = static_cast<std::size_t>(std::max<long>(1, std::lround(cfg.duration / cfg.dt)));
    const SimulationTrace trace = simulate(network, drives, sim);

    std::vector<double> out;
    for (std::size_t j = 1; j <= cfg.samples; ++j) {
        const std::size_t idx = (j * sim.n_steps) / cfg.samples;
        if (cfg.observables != Observables::Resistances) {
            for (std::size_t i = 0; i < network.nodes.size(); ++i) {
                if (network.nodes[i].role == NodeRole::Internal) {
                    out.push_back(trace.node_voltages[i][idx]);
                }
            }
        }
        if (cfg.observables != Observables::Voltages) {
            for (std::size_t k = 0; k < network.links.size(); ++k) {
                if (!network.links[k].params.is_passive()) {
                    // Deviation from the initial value keeps the column well scaled.
                    out.push_back(trace.resistances[k][idx] - network.links[k].params.r_init);
                }
            }
        }
    }
    return out;
}

inline std::vector<std::string> feature_names(const Network& network,
                                              const WaveformTaskConfig& cfg) {
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= cfg.samples; ++j) {
        const std::string at = "@" + std::to_string(j);
        if (cfg.observables != Observables::Resistances) {
            for (const auto& n : network.nodes) {
                if (n.role == NodeRole::Internal) names.push_back("V_node_" + std::to_string(n.id) + at);
            }
        }
        if (cfg.observables != Observables::Voltages) {
            for (std::size_t k = 0; k < network.links.size(); ++k) {
                if (!network.links[k].params.is_passive()) {
                    names.push_back("R_link_" + std::to_string(k) + at);
                }
            }
        }
    }
    return names;
}

}  // namespace detail

/// Generates balanced square/sawtooth episodes with random phases, simulates
/// each from the network's initial resistances, trains the readout on the
/// first `train_fraction` of the (shuffled) episodes and scores the rest.
/// Deterministic in `seed` regardless of `jobs`.
[[nodiscard]] inline WaveformTaskResult waveform_task(const Network& network,
                                                      const WaveformTaskConfig& cfg) {
    require_valid(network);
    if (network.ids_with_role(NodeRole::External).empty()) {
        throw UsageError("waveform task needs at least one external node");
    }
    if (cfg.samples == 0 || !(cfg.dt > 0.0) || !(cfg.duration > 0.0) || !(cfg.frequency >= 0.0)) {
        throw UsageError("waveform task needs samples >= 1, dt > 0, duration > 0, frequency >= 0");
    }
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw UsageError("train fraction must lie strictly between 0 and 1");
    }

    const std::size_t n = cfg.episodes;
    const auto n_train = static_cast<std::size_t>(
        std::lround(static_cast<double>(n) * cfg.train_fraction));
    const std::size_t n_test = n - std::min(n, n_train);

    std::mt19937_64 rng(cfg.seed);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < n / 2 ? 1 : -1;
    std::shuffle(labels.begin(), labels.end(), rng);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);

    WaveformTaskResult result;
    result.episodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.episodes[i].label = labels[i];
        result.episodes[i].phase = phase_dist(rng);
        result.episodes[i].train = i < n_train;
    }

    auto has_both = [&](std::size_t begin, std::size_t end) {
        bool pos = false;
        bool neg = false;
        for (std::size_t i = begin; i < end; ++i) (labels[i] > 0 ? pos : neg) = true;
        return pos && neg;
    };
    if (n_train < 2 || n_test < 2 || !has_both(0, n_train) || !has_both(n_train, n)) {
        throw UsageError("waveform task with " + std::to_string(n) + " episodes and train fraction " +
                         std::to_string(cfg.train_fraction) + " gives " + std::to_string(n_train) +
                         " training and " + std::to_string(n_test) +
                         " held-out episodes; each split needs at least two episodes covering both "
                         "classes");
    }

    // Simulations depend only on (label, phase); run them in parallel if asked.
    std::vector<std::vector<double>> rows(n);
    const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            rows[i] = detail::episode_features(network, cfg, labels[i], result.episodes[i].phase);
        }
    } else {
        std::vector<std::future<void>> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < n; i += jobs) {
                    rows[i] = detail::episode_features(network, cfg, labels[i],
                                                       result.episodes[i].phase);
                }
            }));
        }
        for (auto& f : workers) f.get();
    }

    // Control: permute the labels after the waveforms are fixed.
    if (cfg.shuffle_labels) {
        std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        std::shuffle(labels.begin(), labels.end(), shuffle_rng);
        for (std::size_t i = 0; i < n; ++i) result.episodes[i].label = labels[i];
    }

    const auto cols = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd observed(static_cast<Eigen::Index>(n), cols);
    for (std::size_t i = 0; i < n; ++i) {
        observed.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), cols);
    }
    result.features = FeatureMatrix::with_bias(observed, detail::feature_names(network, cfg));

    FeatureMatrix train;
    train.values = result.features.values.topRows(static_cast<Eigen::Index>(n_train));
    train.bias_column = result.features.bias_column;
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n_train), 1);
    for (std::size_t i = 0; i < n_train; ++i) y(static_cast<Eigen::Index>(i), 0) = labels[i];
    result.weights = train_readout(train, y, cfg.ridge);

    const Eigen::VectorXd scores = readout_scores(result.weights, result.features);
    std::size_t train_hits = 0;
    std::size_t test_hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& e = result.episodes[i];
        e.score = scores(static_cast<Eigen::Index>(i));
        e.predicted = e.score >= 0.0 ? 1 : -1;
        if (e.predicted == e.label) ++(e.train ? train_hits : test_hits);
    }
    result.train_count = n_train;
    result.test_count = n_test;
    result.train_accuracy = static_cast<double>(train_hits) / static_cast<double>(n_train);
    result.accuracy = static_cast<double>(test_hits) / static_cast<double>(n_test);
    return result;
}

}  // namespace memnet
