#include "heron/zo.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "heron/errors.hpp"
#include "heron/kernels.hpp"
#include "heron/rng.hpp"

namespace heron {

namespace {

// Tracks live direction-buffer scalars so tests can assert that no more than
// one direction is ever materialized at a time.
struct ScratchMeter {
    std::int64_t live = 0;
    std::int64_t hwm = 0;
    void acquire(std::int64_t n) {
        live += n;
        if (live > hwm) hwm = live;
    }
    void release(std::int64_t n) { live -= n; }
};

void check_ticket(const PerturbationTicket& t) {
    if (t.dim <= 0) throw ConfigError("perturbation dimension must be positive");
    if (t.probes < 1) throw ConfigError("probe count must be >= 1");
    if (!(t.mu > 0.0)) throw ConfigError("smoothing radius mu must be > 0");
}

void fill_direction(std::uint64_t seed, int probe_index, int dim, double* out) {
    Rng rng(mix_seed(seed, 0x6469726563746eull, static_cast<std::uint64_t>(probe_index)));
    double norm_sq = 0.0;
    for (int i = 0; i < dim; ++i) {
        out[i] = rng.normal();
        norm_sq += out[i] * out[i];
    }
    double norm = std::sqrt(norm_sq);
    while (norm == 0.0) { // astronomically unlikely; redraw deterministically
        norm_sq = 0.0;
        for (int i = 0; i < dim; ++i) {
            out[i] = rng.normal();
            norm_sq += out[i] * out[i];
        }
        norm = std::sqrt(norm_sq);
    }
    if (dim == 1) { // the 1-sphere is {-1, +1} exactly
        out[0] = (out[0] > 0.0) ? 1.0 : -1.0;
        return;
    }
    for (int i = 0; i < dim; ++i) out[i] /= norm;
}

} // namespace

void sample_direction(std::uint64_t seed, int probe_index, int dim, std::span<double> out) {
    if (dim <= 0) throw ConfigError("direction dimension must be positive");
    if (static_cast<int>(out.size()) != dim) throw ConfigError("direction buffer size mismatch");
    fill_direction(seed, probe_index, dim, out.data());
}

std::vector<double> sample_direction(std::uint64_t seed, int probe_index, int dim) {
    if (dim <= 0) throw ConfigError("direction dimension must be positive");
    std::vector<double> u(dim);
    fill_direction(seed, probe_index, dim, u.data());
    return u;
}

ZOGradEstimate zo_estimate(const std::function<double()>& loss_fn, std::span<double> theta,
                           const PerturbationTicket& ticket) {
    check_ticket(ticket);
    const int d = ticket.dim;
    if (static_cast<int>(theta.size()) != d)
        throw ConfigError("theta length " + std::to_string(theta.size()) +
                          " does not match ticket dimension " + std::to_string(d));

    ZOGradEstimate est;
    est.grad.assign(d, 0.0);

    std::vector<double> base(theta.begin(), theta.end()); // snapshot for bit-exact restore

    double loss_base = loss_fn();
    if (!std::isfinite(loss_base))
        throw NumericError("loss is not finite at the base point (probe -1)");

    ScratchMeter meter;
    {
        std::vector<double> u(d);
        meter.acquire(d);
        for (int p = 0; p < ticket.probes; ++p) {
            fill_direction(ticket.seed, p, d, u.data());
            kernels::axpy(kernels::default_exec(), ticket.mu, u.data(), theta.data(),
                          theta.size());
            double loss_p = loss_fn();
            std::memcpy(theta.data(), base.data(), theta.size() * sizeof(double));
            if (!std::isfinite(loss_p))
                throw NumericError("loss is not finite at probe " + std::to_string(p));
            double coef = static_cast<double>(d) * (loss_p - loss_base) / ticket.mu;
            kernels::axpy(kernels::default_exec(), coef, u.data(), est.grad.data(),
                          est.grad.size());
        }
        meter.release(d);
    }

    const double inv_np = 1.0 / ticket.probes;
    for (int i = 0; i < d; ++i) est.grad[i] *= inv_np;
    est.evals_used = ticket.probes + 1;
    est.direction_scratch_hwm = meter.hwm;
    return est;
}

SmoothedGradEstimate smoothed_grad_oracle(const std::function<double()>& loss_fn,
                                          std::span<double> theta, double mu,
                                          std::int64_t n_samples, std::uint64_t seed) {
    if (!(mu > 0.0)) throw ConfigError("smoothing radius mu must be > 0");
    if (n_samples < 1) throw ConfigError("sample count must be >= 1");
    const int d = static_cast<int>(theta.size());
    if (d <= 0) throw ConfigError("theta must be non-empty");

    std::vector<double> base(theta.begin(), theta.end());
    std::vector<double> sum(d, 0.0), sum_sq(d, 0.0), u(d);

    double loss_base = loss_fn();
    if (!std::isfinite(loss_base)) throw NumericError("loss is not finite at the base point");

    for (std::int64_t s = 0; s < n_samples; ++s) {
        fill_direction(seed, static_cast<int>(s), d, u.data());
        kernels::axpy(kernels::default_exec(), mu, u.data(), theta.data(), theta.size());
        double loss_s = loss_fn();
        std::memcpy(theta.data(), base.data(), theta.size() * sizeof(double));
        if (!std::isfinite(loss_s))
            throw NumericError("loss is not finite at sample " + std::to_string(s));
        double coef = static_cast<double>(d) * (loss_s - loss_base) / mu;
        for (int i = 0; i < d; ++i) {
            double g = coef * u[i];
            sum[i] += g;
            sum_sq[i] += g * g;
        }
    }

    SmoothedGradEstimate out;
    out.samples = n_samples;
    out.mean.resize(d);
    out.stderr_.resize(d);
    const double n = static_cast<double>(n_samples);
    for (int i = 0; i < d; ++i) {
        out.mean[i] = sum[i] / n;
        double var = 0.0;
        if (n_samples > 1) {
            var = (sum_sq[i] - n * out.mean[i] * out.mean[i]) / (n - 1.0);
            if (var < 0.0) var = 0.0;
        }
        out.stderr_[i] = std::sqrt(var / n);
    }
    return out;
}

} // namespace heron
