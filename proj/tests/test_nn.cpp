#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "heron/errors.hpp"
#include "heron/nn.hpp"
#include "heron/rng.hpp"

using namespace heron;

namespace {

Batch random_batch(int n, int d, int classes, std::uint64_t seed) {
    Rng rng(seed);
    Batch b;
    b.inputs = Matrix(n, d);
    for (double& x : b.inputs.data) x = rng.normal();
    b.labels.resize(n);
    for (int i = 0; i < n; ++i) b.labels[i] = static_cast<int>(rng.next_below(classes));
    return b;
}

double loss_at(DenseNet& net, const Batch& batch) {
    ForwardCache cache;
    Matrix logits = forward(net, batch, CacheMode::Disabled, cache);
    return cross_entropy(logits, batch.labels).loss;
}

// central-difference gradient of the batch loss w.r.t. every parameter
std::vector<double> fd_param_grad(DenseNet& net, const Batch& batch, double step) {
    std::vector<double> g(net.param_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::span<double> p = net.params_mut();
        double keep = p[i];
        p[i] = keep + step;
        double up = loss_at(net, batch);
        net.params_mut()[i] = keep - step;
        double dn = loss_at(net, batch);
        net.params_mut()[i] = keep;
        g[i] = (up - dn) / (2.0 * step);
    }
    return g;
}

void check_close(const std::vector<double>& fd, const std::vector<double>& an, double tol) {
    REQUIRE(fd.size() == an.size());
    for (std::size_t i = 0; i < fd.size(); ++i) {
        double denom = std::max(std::fabs(fd[i]) + std::fabs(an[i]), 1e-6);
        CHECK(std::fabs(fd[i] - an[i]) / denom <= tol);
    }
}

} // namespace

TEST_CASE("constructor rejects mismatched layer chains") {
    CHECK_THROWS_AS(DenseNet({{4, 3, Activation::Tanh}, {2, 5, Activation::Identity}}),
                    ConfigError);
    CHECK_THROWS_AS(DenseNet({{0, 3, Activation::Tanh}}), ConfigError);
    CHECK_NOTHROW(DenseNet({{4, 3, Activation::Tanh}, {3, 5, Activation::Identity}}));
}

TEST_CASE("parameter layout is W then b per layer, prefixes contiguous") {
    DenseNet net({{4, 3, Activation::Tanh}, {3, 2, Activation::Identity}});
    CHECK(net.param_count() == 4 * 3 + 3 + 3 * 2 + 2);
    CHECK(net.prefix_param_count(0) == 0);
    CHECK(net.prefix_param_count(1) == 15);
    CHECK(net.prefix_param_count(2) == net.param_count());
    CHECK(net.layer_w(0) == net.params().data());
    CHECK(net.layer_b(0) == net.params().data() + 12);
    CHECK(net.layer_w(1) == net.params().data() + 15);
}

TEST_CASE("init_random is seed deterministic") {
    DenseNet a({{5, 4, Activation::Tanh}, {4, 3, Activation::Identity}});
    DenseNet b({{5, 4, Activation::Tanh}, {4, 3, Activation::Identity}});
    a.init_random(42);
    b.init_random(42);
    for (std::size_t i = 0; i < a.param_count(); ++i) CHECK(a.params()[i] == b.params()[i]);
    b.init_random(43);
    int differing = 0;
    for (std::size_t i = 0; i < a.param_count(); ++i)
        if (a.params()[i] != b.params()[i]) ++differing;
    CHECK(differing > 0);
}

TEST_CASE("shared init stream gives identical prefixes across depths") {
    // a shorter net drawn from the same seed owns the same leading parameters,
    // which is what keeps client submodels identical across arms
    DenseNet full({{5, 4, Activation::Tanh}, {4, 3, Activation::Identity}});
    DenseNet head({{5, 4, Activation::Tanh}});
    full.init_random(9);
    head.init_random(9);
    for (std::size_t i = 0; i < head.param_count(); ++i)
        CHECK(full.params()[i] == head.params()[i]);
}

TEST_CASE("forward matches a straight-line oracle bit for bit") {
    DenseNet net({{3, 4, Activation::Tanh}, {4, 2, Activation::Identity}});
    net.init_random(7);
    Batch batch = random_batch(5, 3, 2, 8);
    ForwardCache cache;
    Matrix out = forward(net, batch, CacheMode::Disabled, cache);
    REQUIRE(out.rows == 5);
    REQUIRE(out.cols == 2);

    for (int r = 0; r < 5; ++r) {
        double h[4];
        for (int o = 0; o < 4; ++o) {
            double acc = net.layer_b(0)[o];
            for (int k = 0; k < 3; ++k) acc += batch.inputs.at(r, k) * net.layer_w(0)[o * 3 + k];
            h[o] = std::tanh(acc);
        }
        for (int o = 0; o < 2; ++o) {
            double acc = net.layer_b(1)[o];
            for (int k = 0; k < 4; ++k) acc += h[k] * net.layer_w(1)[o * 4 + k];
            CHECK(out.at(r, o) == acc);
        }
    }
}

TEST_CASE("forward_prefix and forward_range compose to the full forward") {
    DenseNet net({{3, 5, Activation::Tanh}, {5, 4, Activation::Tanh}, {4, 2, Activation::Identity}});
    net.init_random(21);
    Batch batch = random_batch(6, 3, 2, 22);
    ForwardCache cache;
    Matrix full = forward(net, batch, CacheMode::Disabled, cache);

    Matrix cut = forward_prefix(net, batch.inputs, 2);
    CHECK(cut.cols == 4);
    Matrix rest = forward_range(net, cut, 2, 1);
    REQUIRE(rest.rows == full.rows);
    REQUIRE(rest.cols == full.cols);
    for (std::size_t i = 0; i < full.data.size(); ++i) CHECK(rest.data[i] == full.data[i]);

    Matrix all = forward_prefix(net, batch.inputs, 3);
    for (std::size_t i = 0; i < full.data.size(); ++i) CHECK(all.data[i] == full.data[i]);
}

TEST_CASE("cross entropy of uniform logits is log C and gradient is scaled by 1/B") {
    Matrix logits(3, 4);
    std::vector<int> labels = {0, 2, 3};
    CrossEntropyResult ce = cross_entropy(logits, labels);
    CHECK(ce.loss == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) {
            double expect = (0.25 - (c == labels[r] ? 1.0 : 0.0)) / 3.0;
            CHECK(ce.dlogits.at(r, c) == doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("cross entropy rejects bad labels and non-finite logits") {
    Matrix logits(2, 3);
    CHECK_THROWS_AS(cross_entropy(logits, {0, 3}), ConfigError);
    CHECK_THROWS_AS(cross_entropy(logits, {0, -1}), ConfigError);
    CHECK_THROWS_AS(cross_entropy(logits, {0}), ConfigError);
    logits.at(1, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(cross_entropy(logits, {0, 1}), NumericError);
    Matrix empty(0, 3);
    CHECK_THROWS_AS(cross_entropy(empty, {}), ConfigError);
}

TEST_CASE("backward gradients match central differences (tanh)") {
    DenseNet net({{4, 6, Activation::Tanh}, {6, 5, Activation::Tanh}, {5, 3, Activation::Identity}});
    net.init_random(31);
    Batch batch = random_batch(7, 4, 3, 32);

    ForwardCache cache;
    Matrix logits = forward(net, batch, CacheMode::Enabled, cache);
    CrossEntropyResult ce = cross_entropy(logits, batch.labels);
    BackwardResult bw = backward(net, cache, ce.dlogits);

    check_close(fd_param_grad(net, batch, 1e-5), bw.param_grads, 1e-4);
}

TEST_CASE("backward gradients match central differences (relu, away from kinks)") {
    DenseNet net({{4, 6, Activation::Relu}, {6, 3, Activation::Identity}});
    net.init_random(33);
    Batch batch = random_batch(5, 4, 3, 34);

    ForwardCache cache;
    Matrix logits = forward(net, batch, CacheMode::Enabled, cache);

    // the finite-difference step must not cross a relu kink
    double min_abs_pre = 1e30;
    for (double v : cache.pre[0].data) min_abs_pre = std::min(min_abs_pre, std::fabs(v));
    REQUIRE(min_abs_pre > 1e-3);

    CrossEntropyResult ce = cross_entropy(logits, batch.labels);
    BackwardResult bw = backward(net, cache, ce.dlogits);
    check_close(fd_param_grad(net, batch, 1e-5), bw.param_grads, 1e-4);
}

TEST_CASE("backward input gradient matches central differences") {
    DenseNet net({{3, 5, Activation::Tanh}, {5, 2, Activation::Identity}});
    net.init_random(41);
    Batch batch = random_batch(4, 3, 2, 42);

    ForwardCache cache;
    Matrix logits = forward(net, batch, CacheMode::Enabled, cache);
    CrossEntropyResult ce = cross_entropy(logits, batch.labels);
    BackwardResult bw = backward(net, cache, ce.dlogits);
    REQUIRE(bw.input_grad.rows == 4);
    REQUIRE(bw.input_grad.cols == 3);

    double step = 1e-5;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 3; ++c) {
            Batch pert = batch;
            pert.inputs.at(r, c) += step;
            double up = loss_at(net, pert);
            pert.inputs.at(r, c) -= 2 * step;
            double dn = loss_at(net, pert);
            double fd = (up - dn) / (2 * step);
            double an = bw.input_grad.at(r, c);
            double denom = std::max(std::fabs(fd) + std::fabs(an), 1e-6);
            CHECK(std::fabs(fd - an) / denom <= 1e-4);
        }
}

TEST_CASE("cache accounting matches the closed form") {
    DenseNet net({{3, 5, Activation::Tanh}, {5, 4, Activation::Tanh}, {4, 2, Activation::Identity}});
    net.init_random(51);
    Batch batch = random_batch(6, 3, 2, 52);

    CHECK(activation_cache_scalars(net, 6) == 2 * 6 * (5 + 4 + 2));
    CHECK(forward_macs(net, 6) == 6 * (3 * 5 + 5 * 4 + 4 * 2));
    CHECK(forward_macs_prefix(net, 2, 6) == 6 * (3 * 5 + 5 * 4));

    ForwardCache cache;
    forward(net, batch, CacheMode::Enabled, cache);
    CHECK(cache.scalar_count == activation_cache_scalars(net, 6));
    forward(net, batch, CacheMode::Disabled, cache);
    CHECK(cache.scalar_count == 0);
}

TEST_CASE("backward rejects stale or disabled caches") {
    DenseNet net({{3, 4, Activation::Tanh}, {4, 2, Activation::Identity}});
    net.init_random(61);
    Batch batch = random_batch(3, 3, 2, 62);

    ForwardCache cache;
    Matrix logits = forward(net, batch, CacheMode::Enabled, cache);
    CrossEntropyResult ce = cross_entropy(logits, batch.labels);

    net.params_mut()[0] += 0.0; // version bump alone must invalidate
    CHECK_THROWS_AS(backward(net, cache, ce.dlogits), StateError);

    ForwardCache disabled;
    forward(net, batch, CacheMode::Disabled, disabled);
    CHECK_THROWS_AS(backward(net, disabled, ce.dlogits), StateError);

    DenseNet other({{3, 4, Activation::Tanh}, {4, 2, Activation::Identity}});
    other.init_random(61);
    ForwardCache foreign;
    forward(other, batch, CacheMode::Enabled, foreign);
    CHECK_THROWS_AS(backward(net, foreign, ce.dlogits), StateError);
}

TEST_CASE("params_add_inplace applies scaled delta and set_params copies") {
    DenseNet net({{2, 3, Activation::Tanh}});
    net.init_random(71);
    std::vector<double> before(net.params().begin(), net.params().end());
    std::vector<double> delta(net.param_count(), 1.0);
    params_add_inplace(net, delta, -0.5);
    for (std::size_t i = 0; i < net.param_count(); ++i)
        CHECK(net.params()[i] == before[i] - 0.5);

    std::vector<double> wrong(net.param_count() + 1, 0.0);
    CHECK_THROWS_AS(params_add_inplace(net, wrong, 1.0), ConfigError);

    set_params(net, before);
    for (std::size_t i = 0; i < net.param_count(); ++i) CHECK(net.params()[i] == before[i]);
}

TEST_CASE("activation names round trip") {
    CHECK(activation_from_name("tanh") == Activation::Tanh);
    CHECK(activation_from_name("relu") == Activation::Relu);
    CHECK(activation_from_name("identity") == Activation::Identity);
    CHECK(activation_name(Activation::Tanh) == "tanh");
    CHECK_THROWS_AS(activation_from_name("gelu"), ConfigError);
}
