#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "memnet/errors.hpp"

namespace memnet {

using cplx = std::complex<double>;

/// Unnormalized forward DFT of a real series sampled every `dt` seconds.
struct Spectrum {
    std::vector<cplx> bins;
    double dt = 1.0;

    [[nodiscard]] std::size_t size() const { return bins.size(); }

    /// Angular frequency of bin k, 2*pi*k / (N*dt).
    [[nodiscard]] double omega(std::size_t k) const {
        return 2.0 * std::numbers::pi * static_cast<double>(k) /
               (static_cast<double>(bins.size()) * dt);
    }
};

/// bin[k] = sum_n series[n] * exp(-2*pi*i*k*n/N). Direct O(N^2) evaluation with
/// an exact twiddle table (indices reduced mod N), good for the few-hundred
/// sample traces this library produces.
[[nodiscard]] inline Spectrum dft(std::span<const double> series, double dt) {
    const std::size_t n = series.size();
    if (n < 2) throw UsageError("dft needs at least two samples");
    std::vector<cplx> twiddle(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) /
                             static_cast<double>(n);
        twiddle[m] = {std::cos(angle), std::sin(angle)};
    }
    Spectrum s;
    s.dt = dt;
    s.bins.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0;
        double im = 0.0;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < n; ++j) {
            re += series[j] * twiddle[idx].real();
            im += series[j] * twiddle[idx].imag();
            idx += k;
            if (idx >= n) idx -= n;
        }
        s.bins[k] = {re, im};
    }
    // Real input: enforce exact conjugate symmetry.
    for (std::size_t k = 1; k < n; ++k) {
        if (k > n - k) s.bins[k] = std::conj(s.bins[n - k]);
    }
    if (n % 2 == 0) s.bins[n / 2].imag(0.0);
    s.bins[0].imag(0.0);
    return s;
}

/// Spectrum of the quarter-period-shifted copy of a real series (its discrete
/// Hilbert transform): bin[k] * (-i * sign(k)), with DC and Nyquist zeroed.
/// Positive frequencies are k in (0, N/2).
[[nodiscard]] inline Spectrum quadrature(const Spectrum& s) {
    Spectrum q = s;
    const std::size_t n = s.size();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t mirror = n - k;
        if (k == 0 || k == mirror) {
            q.bins[k] = 0.0;
        } else if (k < mirror) {
            q.bins[k] = s.bins[k] * cplx(0.0, -1.0);
        } else {
            q.bins[k] = s.bins[k] * cplx(0.0, 1.0);
        }
    }
    return q;
}

struct FitResult {
    std::vector<cplx> weights;
    double residual_norm = 0.0;
    double output_norm = 0.0;
    bool degenerate = false;  // Gram matrix singular; weights are the minimum-norm solution
};

/// Complex weights c minimizing sum_k |o[k] - sum_i c_i u_i[k]|^2 over all bins,
/// or over k != 0 with `exclude_dc`, via the normal equations.
[[nodiscard]] inline FitResult fit_linear_combination(const Spectrum& output,
                                                      std::span<const Spectrum> inputs,
                                                      bool exclude_dc) {
    if (inputs.empty()) throw UsageError("fit needs at least one input spectrum");
    const std::size_t n = output.size();
    for (const auto& in : inputs) {
        if (in.size() != n) throw UsageError("fit needs spectra of equal length");
    }
    const std::size_t first = exclude_dc ? 1 : 0;
    if (first >= n) throw UsageError("fit has no bins to include");

    const auto rows = static_cast<Eigen::Index>(n - first);
    const auto cols = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXcd basis(rows, cols);
    Eigen::VectorXcd o(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        o(r) = output.bins[first + static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < cols; ++c) {
            basis(r, c) = inputs[static_cast<std::size_t>(c)].bins[first + static_cast<std::size_t>(r)];
        }
    }

    const Eigen::MatrixXcd gram = basis.adjoint() * basis;
    const Eigen::VectorXcd rhs = basis.adjoint() * o;

    FitResult result;
    Eigen::VectorXcd c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    const auto& lambda = eig.eigenvalues();
    const double largest = lambda.cwiseAbs().maxCoeff();
    const double cutoff = 1e-12 * std::max(largest, 1e-300);
    if (lambda.minCoeff() > cutoff) {
        c = gram.ldlt().solve(rhs);
    } else {
        // Pseudoinverse restricted to the well-determined eigenvectors.
        result.degenerate = true;
        const Eigen::MatrixXcd& v = eig.eigenvectors();
        Eigen::VectorXcd proj = v.adjoint() * rhs;
        for (Eigen::Index i = 0; i < proj.size(); ++i) {
            proj(i) = lambda(i) > cutoff ? proj(i) / lambda(i) : cplx(0.0);
        }
        c = v * proj;
    }

    result.weights.assign(c.data(), c.data() + c.size());
    result.residual_norm = (o - basis * c).norm();
    result.output_norm = o.norm();
    return result;
}

/// How each input enters the fit.
///   Direct: one complex weight per input spectrum, applied to every bin.
///   PhaseShifted: each input plus its quarter-period-shifted copy, i.e. an
///     amplitude and a phase per input (complex weight on positive
///     frequencies, its conjugate on negative ones).
enum class Basis { Direct, PhaseShifted };

inline const char* basis_name(Basis b) { return b == Basis::Direct ? "direct" : "phase-shifted"; }

struct DissimilarityReport {
    int output_id = 0;
    double delta = 0.0;
    std::vector<cplx> weights;  // one per input, positive-frequency convention
    double residual_norm = 0.0;
    double output_norm = 0.0;
    bool degenerate = false;
};

/// Fit `output` against already-transformed inputs and score it.
[[nodiscard]] inline DissimilarityReport analyze_output(int output_id, const Spectrum& output,
                                                        std::span<const Spectrum> inputs,
                                                        bool exclude_dc,
                                                        Basis basis = Basis::PhaseShifted) {
    std::vector<Spectrum> expanded(inputs.begin(), inputs.end());
    if (basis == Basis::PhaseShifted) {
        for (const auto& in : inputs) expanded.push_back(quadrature(in));
    }
    const FitResult fit = fit_linear_combination(output, expanded, exclude_dc);
    // Roundoff leaves ~1e-16 of a pure-DC signal in the other bins; treat that as empty.
    double total = 0.0;
    for (const auto& b : output.bins) total += std::norm(b);
    if (!(fit.output_norm > 1e-12 * std::sqrt(total))) {
        throw NumericalError("output " + std::to_string(output_id) +
                             " has zero norm over the included bins; dissimilarity is undefined");
    }
    DissimilarityReport r;
    r.output_id = output_id;
    r.residual_norm = fit.residual_norm;
    r.output_norm = fit.output_norm;
    r.delta = std::min(fit.residual_norm / fit.output_norm, 1.0);
    r.degenerate = fit.degenerate;
    const std::size_t m = inputs.size();
    r.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis == Basis::Direct) {
            r.weights[i] = fit.weights[i];
        } else {
            // a*u + b*H[u] acts as (a - i*b) on positive-frequency bins.
            r.weights[i] = cplx(fit.weights[i].real(), -fit.weights[m + i].real());
        }
    }
    return r;
}

/// delta = ||o - z|| / ||o|| for the best linear combination z of the inputs.
[[nodiscard]] inline double dissimilarity(std::span<const double> output,
                                          const std::vector<std::vector<double>>& inputs,
                                          double dt, bool exclude_dc,
                                          Basis basis = Basis::PhaseShifted) {
    std::vector<Spectrum> in;
    for (const auto& s : inputs) in.push_back(dft(s, dt));
    return analyze_output(0, dft(output, dt), in, exclude_dc, basis).delta;
}

/// Output ids by descending delta, ties by ascending id.
[[nodiscard]] inline std::vector<int> rank_outputs(std::span<const DissimilarityReport> reports) {
    std::vector<const DissimilarityReport*> order;
    for (const auto& r : reports) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        if (a->delta != b->delta) return a->delta > b->delta;
        return a->output_id < b->output_id;
    });
    std::vector<int> ids;
    for (const auto* r : order) ids.push_back(r->output_id);
    return ids;
}

}  // namespace memnet
