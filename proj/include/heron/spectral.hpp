#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "heron/nn.hpp"

namespace heron {

// Symmetric linear operator y = A x, dimension implied by the spans.
using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

// Quadrature view of the spectral density from one probe vector: Ritz nodes
// with weights that are the squared first components of the tridiagonal
// eigenvectors. Weights are non-negative and sum to 1 per probe.
struct ProbeSpectrum {
    std::vector<double> nodes;
    std::vector<double> weights;
    int steps = 0; // Lanczos steps completed (< m on breakdown)
};

struct SpectrumEstimate {
    std::vector<ProbeSpectrum> probes;
    int m = 0; // requested Lanczos steps

    // Monte Carlo estimate of sum(lambda^k) / dim.
    double moment(int k) const;
    // All (node, weight / n_probes) pairs, ascending by node; total mass 1.
    std::vector<std::pair<double, double>> flattened() const;
};

struct EffectiveRankReport {
    double trace = 0.0;
    double top_eigenvalue = 0.0;
    double kappa = 0.0; // trace / top_eigenvalue
};

// Hessian-vector product by symmetric finite differences of backprop
// gradients: (grad(theta + eps v) - grad(theta - eps v)) / (2 eps) on the
// cross-entropy loss over the fixed batch. Parameters are restored bit-exactly.
std::vector<double> hvp(DenseNet& net, const Batch& batch, std::span<const double> v,
                        double eps);

// The same as a reusable operator (captures net and batch by reference).
LinearOp hvp_operator(DenseNet& net, const Batch& batch, double eps);

// Stochastic Lanczos quadrature with full reorthogonalization and normalized
// Gaussian probes. Breakdown (beta ~ 0) terminates the probe early and
// reports the completed steps. m is clamped to dim.
SpectrumEstimate lanczos_density(const LinearOp& apply, int dim, int m, int n_probe,
                                 std::uint64_t seed);

// Effective rank trace / top eigenvalue, from a density estimate or from an
// explicit spectrum. An all-zero (or non-positive-top) spectrum is an error.
EffectiveRankReport effective_rank(const SpectrumEstimate& estimate, int dim);
EffectiveRankReport effective_rank(std::span<const double> eigenvalues);

// Dumps flattened (node, weight) pairs, one per line.
void save_spectrum(const SpectrumEstimate& estimate, const std::string& path);

} // namespace heron
