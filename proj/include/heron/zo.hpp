#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace heron {

// Seed-addressed description of one batch of perturbation probes. Directions
// are regenerated on demand from (seed, probe_index, dim) and never stored,
// so a ticket is all a client ever has to keep or transmit.
struct PerturbationTicket {
    std::uint64_t seed = 0;
    double mu = 1e-3; // smoothing radius, > 0
    int probes = 1;   // n_p, >= 1
    int dim = 0;      // parameter count d
};

struct ZOGradEstimate {
    std::vector<double> grad;             // flat, length dim
    int evals_used = 0;                   // probes + 1 (shared base)
    std::int64_t direction_scratch_hwm = 0; // high-water of live direction scalars
};

struct SmoothedGradEstimate {
    std::vector<double> mean;   // per-coordinate Monte Carlo mean
    std::vector<double> stderr_; // per-coordinate standard error of the mean
    std::int64_t samples = 0;
};

// Unit direction u = z / ||z||, z ~ N(0, I_dim), from the (seed, probe_index)
// stream. dim == 1 yields exactly +-1. Throws ConfigError on dim <= 0.
void sample_direction(std::uint64_t seed, int probe_index, int dim, std::span<double> out);
std::vector<double> sample_direction(std::uint64_t seed, int probe_index, int dim);

// Two-point gradient estimate, averaged over ticket.probes directions sharing
// one base evaluation:
//   g = (1/n_p) * sum_p  dim * (L(theta + mu u_p) - L(theta)) / mu * u_p
// loss_fn evaluates the loss at the CURRENT contents of theta; theta is
// perturbed in place for each probe and restored bit-exactly before return
// (base snapshot copy-back; inverse float arithmetic does not round-trip).
// Only one direction buffer is ever live; the estimate reports its high-water.
// A non-finite loss value raises NumericError naming the probe index (-1 for
// the base evaluation).
ZOGradEstimate zo_estimate(const std::function<double()>& loss_fn, std::span<double> theta,
                           const PerturbationTicket& ticket);

// Monte Carlo estimate of the smoothed-surrogate gradient: the empirical mean
// of the single-sample integrand dim * (L(theta + mu u) - L(theta)) / mu * u
// over n_samples fresh directions, with the per-coordinate standard error.
// Restores theta bit-exactly, same mechanism as zo_estimate.
SmoothedGradEstimate smoothed_grad_oracle(const std::function<double()>& loss_fn,
                                          std::span<double> theta, double mu,
                                          std::int64_t n_samples, std::uint64_t seed);

} // namespace heron
