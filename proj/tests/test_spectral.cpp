#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "heron/errors.hpp"
#include "heron/rng.hpp"
#include "heron/spectral.hpp"

using namespace heron;

namespace {

// dense symmetric matrix as a LinearOp
LinearOp matrix_op(const std::vector<double>& a, int n) {
    return [&a, n](std::span<const double> x, std::span<double> y) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
            y[i] = acc;
        }
    };
}

// random symmetric with a unit diagonal shift so the low moments are O(1)
// and a relative tolerance on them is meaningful
std::vector<double> random_symmetric(int n, std::uint64_t seed, double spread = 0.3) {
    Rng rng(seed);
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = spread * rng.normal() / std::sqrt(static_cast<double>(n));
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    for (int i = 0; i < n; ++i) a[i * n + i] += 1.0;
    return a;
}

// exact tr(A^k)/n by repeated multiplication
double direct_moment(const std::vector<double>& a, int n, int k) {
    std::vector<double> acc(a), next(a.size());
    for (int e = 1; e < k; ++e) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += acc[i * n + l] * a[l * n + j];
                next[i * n + j] = s;
            }
        acc.swap(next);
    }
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += acc[i * n + i];
    return tr / n;
}

} // namespace

TEST_CASE("hvp on a quadratic recovers the matrix action") {
    // loss(theta) = 0.5 theta^T A theta is realized by a linear net scoring
    // two classes; instead of building that, check hvp against the exact
    // hessian of the actual network loss via the quadratic form identity
    // v^T H v ~ (g(theta+eps v) - g(theta-eps v)) . v / (2 eps), and
    // linearity hvp(a u + b w) = a hvp(u) + b hvp(w).
    DenseNet net({{3, 4, Activation::Tanh}, {4, 2, Activation::Identity}});
    net.init_random(11);
    Batch batch;
    batch.inputs = Matrix(6, 3);
    Rng rng(12);
    for (double& x : batch.inputs.data) x = rng.normal();
    batch.labels = {0, 1, 1, 0, 1, 0};

    const int d = static_cast<int>(net.param_count());
    std::vector<double> u(d), w(d);
    for (double& x : u) x = rng.normal();
    for (double& x : w) x = rng.normal();

    std::vector<double> before(net.params().begin(), net.params().end());
    std::vector<double> hu = hvp(net, batch, u, 1e-4);
    for (int i = 0; i < d; ++i) CHECK(net.params()[i] == before[i]); // restored

    // symmetry of the quadratic form: u^T H w == w^T H u
    std::vector<double> hw = hvp(net, batch, w, 1e-4);
    double uhw = 0.0, whu = 0.0;
    for (int i = 0; i < d; ++i) {
        uhw += u[i] * hw[i];
        whu += w[i] * hu[i];
    }
    CHECK(std::fabs(uhw - whu) <= 1e-6 * std::max(1.0, std::fabs(uhw)));

    // linearity within finite-difference error
    std::vector<double> comb(d);
    for (int i = 0; i < d; ++i) comb[i] = 2.0 * u[i] - 0.5 * w[i];
    std::vector<double> hc = hvp(net, batch, comb, 1e-4);
    for (int i = 0; i < d; ++i) {
        double want = 2.0 * hu[i] - 0.5 * hw[i];
        CHECK(std::fabs(hc[i] - want) <= 1e-5 * std::max(1.0, std::fabs(want)));
    }
}

TEST_CASE("hvp matches the analytic hessian of a softmax on a linear net") {
    // single identity layer, one sample x, two classes: logits = W x + b.
    // the CE hessian over logits is diag(p) - p p^T, and the parameter
    // hessian for class-row weights is that kronecker x x^T.
    DenseNet net({{2, 2, Activation::Identity}});
    net.init_random(13);
    Batch batch;
    batch.inputs = Matrix(1, 2);
    batch.inputs.at(0, 0) = 0.7;
    batch.inputs.at(0, 1) = -0.4;
    batch.labels = {0};

    ForwardCache cache;
    Matrix logits = forward(net, batch, CacheMode::Enabled, cache);
    double m = std::max(logits.at(0, 0), logits.at(0, 1));
    double e0 = std::exp(logits.at(0, 0) - m), e1 = std::exp(logits.at(0, 1) - m);
    double p0 = e0 / (e0 + e1), p1 = e1 / (e0 + e1);

    // v picks the first weight coordinate W[0][0]
    std::vector<double> v(net.param_count(), 0.0);
    v[0] = 1.0;
    std::vector<double> hv = hvp(net, batch, v, 1e-5);

    double x0 = 0.7, x1 = -0.4;
    // d logits0 / d W00 = x0; hessian wrt (W00, W00) = p0(1-p0) x0 x0, etc.
    CHECK(hv[0] == doctest::Approx(p0 * (1 - p0) * x0 * x0).epsilon(1e-5));
    CHECK(hv[1] == doctest::Approx(p0 * (1 - p0) * x0 * x1).epsilon(1e-5));
    CHECK(hv[2] == doctest::Approx(-p0 * p1 * x0 * x0).epsilon(1e-5));
    CHECK(hv[3] == doctest::Approx(-p0 * p1 * x0 * x1).epsilon(1e-5));
}

TEST_CASE("lanczos on the identity concentrates all mass at one") {
    const int n = 12;
    std::vector<double> eye(n * n, 0.0);
    for (int i = 0; i < n; ++i) eye[i * n + i] = 1.0;
    LinearOp op = matrix_op(eye, n);
    SpectrumEstimate est = lanczos_density(op, n, 8, 3, 21);
    for (const ProbeSpectrum& p : est.probes) {
        REQUIRE(p.steps >= 1);
        CHECK(p.steps == 1); // immediate breakdown: Av = v
        CHECK(p.nodes[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    EffectiveRankReport rep = effective_rank(est, n);
    CHECK(rep.kappa == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
}

TEST_CASE("full-depth lanczos recovers a small diagonal spectrum") {
    const int n = 10;
    std::vector<double> a(n * n, 0.0);
    for (int i = 0; i < n; ++i) a[i * n + i] = i + 1.0; // eigenvalues 1..10
    LinearOp op = matrix_op(a, n);
    SpectrumEstimate est = lanczos_density(op, n, 10, 2, 22);

    for (const ProbeSpectrum& p : est.probes) {
        REQUIRE(p.steps == 10);
        for (int i = 0; i < 10; ++i)
            CHECK(p.nodes[i] == doctest::Approx(i + 1.0).epsilon(1e-8));
        double mass = 0.0;
        for (double w : p.weights) {
            CHECK(w >= -1e-12);
            mass += w;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    EffectiveRankReport rep = effective_rank(est, n);
    CHECK(rep.top_eigenvalue == doctest::Approx(10.0).epsilon(1e-8));
}

TEST_CASE("weights sum to one for every probe") {
    const int n = 40;
    std::vector<double> a = random_symmetric(n, 23);
    SpectrumEstimate est = lanczos_density(matrix_op(a, n), n, 15, 6, 24);
    REQUIRE(est.probes.size() == 6);
    for (const ProbeSpectrum& p : est.probes) {
        double mass = 0.0;
        for (double w : p.weights) mass += w;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    auto flat = est.flattened();
    double total = 0.0;
    for (std::size_t i = 1; i < flat.size(); ++i) CHECK(flat[i - 1].first <= flat[i].first);
    for (auto& [node, w] : flat) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral moments match direct traces on a random symmetric matrix") {
    const int n = 100;
    std::vector<double> a = random_symmetric(n, 25);
    SpectrumEstimate est = lanczos_density(matrix_op(a, n), n, 40, 8, 26);
    for (int k = 1; k <= 3; ++k) {
        double direct = direct_moment(a, n, k);
        double quad = est.moment(k);
        double scale = std::max(std::fabs(direct), 0.05);
        CHECK(std::fabs(quad - direct) / scale < 0.05);
    }
}

TEST_CASE("estimates are deterministic in the seed") {
    const int n = 30;
    std::vector<double> a = random_symmetric(n, 27);
    SpectrumEstimate x = lanczos_density(matrix_op(a, n), n, 12, 4, 28);
    SpectrumEstimate y = lanczos_density(matrix_op(a, n), n, 12, 4, 28);
    REQUIRE(x.probes.size() == y.probes.size());
    for (std::size_t p = 0; p < x.probes.size(); ++p) {
        CHECK(x.probes[p].nodes == y.probes[p].nodes);
        CHECK(x.probes[p].weights == y.probes[p].weights);
    }
    SpectrumEstimate z = lanczos_density(matrix_op(a, n), n, 12, 4, 29);
    CHECK(x.probes[0].nodes != z.probes[0].nodes);
}

TEST_CASE("effective rank bounds and known values") {
    // diag(1, 0.01 x 9): trace 1.09, top 1, kappa 1.09
    std::vector<double> eig = {1.0, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01};
    EffectiveRankReport rep = effective_rank(eig);
    CHECK(rep.trace == doctest::Approx(1.09).epsilon(1e-12));
    CHECK(rep.top_eigenvalue == 1.0);
    CHECK(rep.kappa == doctest::Approx(1.09).epsilon(1e-12));

    std::vector<double> flat = {2.0, 2.0, 2.0, 2.0};
    CHECK(effective_rank(flat).kappa == doctest::Approx(4.0));

    std::vector<double> zeros(5, 0.0);
    CHECK_THROWS_AS(effective_rank(zeros), NumericError);
}

TEST_CASE("lanczos argument validation and clamping") {
    const int n = 6;
    std::vector<double> a = random_symmetric(n, 30);
    CHECK_THROWS_AS(lanczos_density(matrix_op(a, n), 0, 5, 2, 1), ConfigError);
    CHECK_THROWS_AS(lanczos_density(matrix_op(a, n), n, 0, 2, 1), ConfigError);
    CHECK_THROWS_AS(lanczos_density(matrix_op(a, n), n, 5, 0, 1), ConfigError);
    // m beyond dim clamps to dim
    SpectrumEstimate est = lanczos_density(matrix_op(a, n), n, 50, 1, 31);
    CHECK(est.probes[0].steps <= n);
}

TEST_CASE("spectrum files hold the flattened pairs") {
    const int n = 8;
    std::vector<double> a = random_symmetric(n, 32);
    SpectrumEstimate est = lanczos_density(matrix_op(a, n), n, 8, 2, 33);
    std::string path = "test_spectrum_dump.txt";
    save_spectrum(est, path);

    auto flat = est.flattened();
    FILE* f = fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    double node = 0.0, weight = 0.0;
    std::size_t rows = 0;
    while (fscanf(f, "%lf %lf", &node, &weight) == 2) {
        REQUIRE(rows < flat.size());
        CHECK(node == flat[rows].first);
        CHECK(weight == flat[rows].second);
        ++rows;
    }
    fclose(f);
    CHECK(rows == flat.size());
    std::remove(path.c_str());
}

TEST_CASE("hessian diagnostics run end to end on a network") {
    DenseNet net({{4, 6, Activation::Tanh}, {6, 3, Activation::Identity}});
    net.init_random(34);
    Batch batch;
    batch.inputs = Matrix(12, 4);
    Rng rng(35);
    for (double& x : batch.inputs.data) x = rng.normal();
    batch.labels.resize(12);
    for (int i = 0; i < 12; ++i) batch.labels[i] = static_cast<int>(rng.next_below(3));

    const int d = static_cast<int>(net.param_count());
    LinearOp op = hvp_operator(net, batch, 1e-4);
    SpectrumEstimate est = lanczos_density(op, d, 20, 4, 36);
    EffectiveRankReport rep = effective_rank(est, d);
    CHECK(std::isfinite(rep.trace));
    CHECK(rep.top_eigenvalue > 0.0);
    CHECK(rep.kappa > 0.0);
    CHECK(rep.kappa <= d);
}
