#include "heron/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "heron/errors.hpp"
#include "heron/rng.hpp"

namespace heron {

namespace {

// Eigenvalues of a symmetric tridiagonal matrix plus the first component of
// each eigenvector, by implicit-shift QL. diag/off are modified in place;
// z starts as e_1 and ends as the first row of the eigenvector matrix.
void tridiag_eigen_first_row(std::vector<double>& diag, std::vector<double>& off,
                             std::vector<double>& z) {
    const int n = static_cast<int>(diag.size());
    if (n == 0) return;
    off.resize(n, 0.0); // off[n-1] used as workspace
    z.assign(n, 0.0);
    z[0] = 1.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
                if (std::fabs(off[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 64)
                    throw NumericError("tridiagonal eigensolve did not converge");
                double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * off[i];
                    double b = c * off[i];
                    r = std::hypot(f, g);
                    off[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        off[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                    double zf = z[i + 1];
                    z[i + 1] = s * z[i] + c * zf;
                    z[i] = c * z[i] - s * zf;
                }
                if (r == 0.0 && i >= l) continue;
                diag[l] -= p;
                off[l] = g;
                off[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

double SpectrumEstimate::moment(int k) const {
    if (probes.empty()) throw StateError("empty spectrum estimate");
    double acc = 0.0;
    for (const ProbeSpectrum& p : probes) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.nodes.size(); ++i)
            s += p.weights[i] * std::pow(p.nodes[i], k);
        acc += s;
    }
    return acc / static_cast<double>(probes.size());
}

std::vector<std::pair<double, double>> SpectrumEstimate::flattened() const {
    std::vector<std::pair<double, double>> out;
    const double inv = probes.empty() ? 1.0 : 1.0 / static_cast<double>(probes.size());
    for (const ProbeSpectrum& p : probes)
        for (std::size_t i = 0; i < p.nodes.size(); ++i)
            out.emplace_back(p.nodes[i], p.weights[i] * inv);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> hvp(DenseNet& net, const Batch& batch, std::span<const double> v,
                        double eps) {
    if (v.size() != net.param_count())
        throw ConfigError("direction length does not match parameter count");
    if (!(eps > 0.0)) throw ConfigError("hvp step eps must be > 0");

    std::vector<double> base(net.params().begin(), net.params().end());
    auto grad_at = [&](double shift) {
        params_add_inplace(net, v, shift);
        ForwardCache cache;
        Matrix logits = forward(net, batch, CacheMode::Enabled, cache);
        CrossEntropyResult ce = cross_entropy(logits, batch.labels);
        BackwardResult bw = backward(net, cache, ce.dlogits);
        set_params(net, base); // bit-exact restore
        return bw.param_grads;
    };
    std::vector<double> gp = grad_at(eps);
    std::vector<double> gm = grad_at(-eps);
    std::vector<double> out(v.size());
    const double inv = 1.0 / (2.0 * eps);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (gp[i] - gm[i]) * inv;
    return out;
}

LinearOp hvp_operator(DenseNet& net, const Batch& batch, double eps) {
    return [&net, &batch, eps](std::span<const double> x, std::span<double> y) {
        std::vector<double> r = hvp(net, batch, x, eps);
        std::memcpy(y.data(), r.data(), r.size() * sizeof(double));
    };
}

SpectrumEstimate lanczos_density(const LinearOp& apply, int dim, int m, int n_probe,
                                 std::uint64_t seed) {
    if (dim < 1) throw ConfigError("operator dimension must be >= 1");
    if (m < 1) throw ConfigError("lanczos step count must be >= 1");
    if (n_probe < 1) throw ConfigError("probe count must be >= 1");
    if (m > dim) m = dim;

    SpectrumEstimate est;
    est.m = m;

    for (int p = 0; p < n_probe; ++p) {
        Rng rng(mix_seed(seed, 0x6c616e63ull, static_cast<std::uint64_t>(p)));
        std::vector<std::vector<double>> v;
        v.emplace_back(dim);
        double norm_sq = 0.0;
        for (int i = 0; i < dim; ++i) {
            v[0][i] = rng.normal();
            norm_sq += v[0][i] * v[0][i];
        }
        double inv = 1.0 / std::sqrt(norm_sq);
        for (int i = 0; i < dim; ++i) v[0][i] *= inv;

        std::vector<double> alpha, beta;
        std::vector<double> w(dim);
        int steps = 0;
        for (int j = 0; j < m; ++j) {
            apply(v[j], w);
            double a = 0.0;
            for (int i = 0; i < dim; ++i) a += v[j][i] * w[i];
            alpha.push_back(a);
            ++steps;
            for (int i = 0; i < dim; ++i) w[i] -= a * v[j][i];
            if (j > 0)
                for (int i = 0; i < dim; ++i) w[i] -= beta[j - 1] * v[j - 1][i];
            // full reorthogonalization, two classical Gram-Schmidt passes
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& vk : v) {
                    double c = 0.0;
                    for (int i = 0; i < dim; ++i) c += vk[i] * w[i];
                    for (int i = 0; i < dim; ++i) w[i] -= c * vk[i];
                }
            }
            double b = 0.0;
            for (int i = 0; i < dim; ++i) b += w[i] * w[i];
            b = std::sqrt(b);
            double scale = std::fabs(a);
            for (double x : beta) scale = std::max(scale, x);
            if (j == m - 1 || b <= 1e-12 * std::max(scale, 1.0)) break; // breakdown: stop early
            beta.push_back(b);
            double ib = 1.0 / b;
            v.emplace_back(dim);
            for (int i = 0; i < dim; ++i) v[j + 1][i] = w[i] * ib;
        }

        ProbeSpectrum ps;
        ps.steps = steps;
        std::vector<double> d = alpha;
        std::vector<double> e = beta;
        std::vector<double> z;
        tridiag_eigen_first_row(d, e, z);
        ps.nodes.resize(steps);
        ps.weights.resize(steps);
        std::vector<int> idx(steps);
        for (int i = 0; i < steps; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b2) { return d[a] < d[b2]; });
        for (int i = 0; i < steps; ++i) {
            ps.nodes[i] = d[idx[i]];
            ps.weights[i] = z[idx[i]] * z[idx[i]];
        }
        est.probes.push_back(std::move(ps));
    }
    return est;
}

EffectiveRankReport effective_rank(const SpectrumEstimate& estimate, int dim) {
    if (estimate.probes.empty()) throw StateError("empty spectrum estimate");
    if (dim < 1) throw ConfigError("dimension must be >= 1");
    EffectiveRankReport rep;
    rep.trace = static_cast<double>(dim) * estimate.moment(1);
    rep.top_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const ProbeSpectrum& p : estimate.probes)
        for (double nd : p.nodes) rep.top_eigenvalue = std::max(rep.top_eigenvalue, nd);
    if (!(rep.top_eigenvalue > 0.0))
        throw NumericError("effective rank undefined: top eigenvalue is not positive");
    rep.kappa = rep.trace / rep.top_eigenvalue;
    return rep;
}

EffectiveRankReport effective_rank(std::span<const double> eigenvalues) {
    if (eigenvalues.empty()) throw ConfigError("empty spectrum");
    EffectiveRankReport rep;
    for (double l : eigenvalues) {
        rep.trace += l;
        rep.top_eigenvalue = std::max(rep.top_eigenvalue, l);
    }
    if (!(rep.top_eigenvalue > 0.0))
        throw NumericError("effective rank undefined: top eigenvalue is not positive");
    rep.kappa = rep.trace / rep.top_eigenvalue;
    return rep;
}

void save_spectrum(const SpectrumEstimate& estimate, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write spectrum file '" + path + "'");
    char buf[80];
    for (const auto& [node, weight] : estimate.flattened()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", node, weight);
        out << buf;
    }
}

} // namespace heron
