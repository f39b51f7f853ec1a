#include "heron/nn.hpp"

#include <cmath>
#include <cstring>

#include "heron/errors.hpp"
#include "heron/rng.hpp"

namespace heron {

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    if (name == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation '" + name + "'");
}

std::string activation_name(Activation act) {
    switch (act) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
    }
    return "identity";
}

DenseNet::DenseNet(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ConfigError("dense net needs at least one layer");
    std::size_t off = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const LayerSpec& l = layers_[i];
        if (l.in <= 0 || l.out <= 0)
            throw ConfigError("layer " + std::to_string(i) + " has non-positive width");
        if (i > 0 && l.in != layers_[i - 1].out)
            throw ConfigError("layer " + std::to_string(i) + " input width " +
                              std::to_string(l.in) + " does not chain from previous output " +
                              std::to_string(layers_[i - 1].out));
        Extent e;
        e.w_off = off;
        off += static_cast<std::size_t>(l.out) * l.in;
        e.b_off = off;
        off += static_cast<std::size_t>(l.out);
        extents_.push_back(e);
    }
    params_.assign(off, 0.0);
}

std::size_t DenseNet::prefix_param_count(int n_layers) const {
    if (n_layers < 0 || n_layers > layer_count())
        throw ConfigError("prefix layer count out of range");
    if (n_layers == 0) return 0;
    const LayerSpec& l = layers_[n_layers - 1];
    return extents_[n_layers - 1].b_off + static_cast<std::size_t>(l.out);
}

void DenseNet::init_random(std::uint64_t seed) {
    Rng rng(seed);
    ++version_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const LayerSpec& l = layers_[i];
        double sd = 1.0 / std::sqrt(static_cast<double>(l.in));
        double* w = params_.data() + extents_[i].w_off;
        for (std::size_t k = 0; k < static_cast<std::size_t>(l.out) * l.in; ++k)
            w[k] = sd * rng.normal();
        double* b = params_.data() + extents_[i].b_off;
        for (int k = 0; k < l.out; ++k) b[k] = 0.0;
    }
}

std::int64_t activation_cache_scalars(const DenseNet& net, int batch) {
    std::int64_t sum = 0;
    for (int i = 0; i < net.layer_count(); ++i) sum += net.layer(i).out;
    return 2 * static_cast<std::int64_t>(batch) * sum;
}

std::int64_t forward_macs(const DenseNet& net, int batch) {
    return forward_macs_prefix(net, net.layer_count(), batch);
}

std::int64_t forward_macs_prefix(const DenseNet& net, int n_layers, int batch) {
    std::int64_t sum = 0;
    for (int i = 0; i < n_layers; ++i)
        sum += static_cast<std::int64_t>(net.layer(i).in) * net.layer(i).out;
    return sum * batch;
}

Matrix forward(const DenseNet& net, const Batch& batch, CacheMode mode, ForwardCache& cache,
               kernels::Exec exec) {
    if (batch.inputs.cols != net.input_width())
        throw ConfigError("batch width " + std::to_string(batch.inputs.cols) +
                          " does not match net input width " + std::to_string(net.input_width()));
    const int B = batch.size();
    cache = ForwardCache{};
    cache.net = &net;
    cache.net_version = net.version();
    cache.batch = &batch;
    cache.enabled = (mode == CacheMode::Enabled);

    Matrix cur = batch.inputs;
    Matrix scratch_pre; // reused when cache is off
    for (int i = 0; i < net.layer_count(); ++i) {
        const LayerSpec& l = net.layer(i);
        Matrix next(B, l.out);
        double* pre_ptr = nullptr;
        if (cache.enabled) {
            cache.pre.emplace_back(B, l.out);
            pre_ptr = cache.pre.back().data.data();
        }
        kernels::dense_forward(exec, cur.data.data(), B, l.in, net.layer_w(i), net.layer_b(i),
                               l.out, l.act, pre_ptr, next.data.data());
        if (cache.enabled) {
            cache.post.push_back(next);
            cache.scalar_count += 2 * static_cast<std::int64_t>(B) * l.out;
        }
        cur = std::move(next);
    }
    return cur;
}

Matrix forward_range(const DenseNet& net, const Matrix& inputs, int first, int count,
                     kernels::Exec exec) {
    if (first < 0 || count < 1 || first + count > net.layer_count())
        throw ConfigError("layer range out of bounds");
    if (inputs.cols != net.layer(first).in)
        throw ConfigError("input width does not match layer " + std::to_string(first) +
                          " input width");
    const int B = inputs.rows;
    Matrix cur = inputs;
    for (int i = first; i < first + count; ++i) {
        const LayerSpec& l = net.layer(i);
        Matrix next(B, l.out);
        kernels::dense_forward(exec, cur.data.data(), B, l.in, net.layer_w(i), net.layer_b(i),
                               l.out, l.act, nullptr, next.data.data());
        cur = std::move(next);
    }
    return cur;
}

Matrix forward_prefix(const DenseNet& net, const Matrix& inputs, int n_layers,
                      kernels::Exec exec) {
    return forward_range(net, inputs, 0, n_layers, exec);
}

CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                                 kernels::Exec exec) {
    const int B = logits.rows;
    const int C = logits.cols;
    if (static_cast<int>(labels.size()) != B)
        throw ConfigError("label count " + std::to_string(labels.size()) +
                          " does not match batch size " + std::to_string(B));
    if (B == 0) throw ConfigError("cross entropy on empty batch");
    for (int r = 0; r < B; ++r) {
        if (labels[r] < 0 || labels[r] >= C)
            throw ConfigError("label " + std::to_string(labels[r]) + " out of range at row " +
                              std::to_string(r));
    }
    for (std::size_t i = 0; i < logits.data.size(); ++i) {
        if (!std::isfinite(logits.data[i]))
            throw NumericError("non-finite logit at flat index " + std::to_string(i));
    }

    CrossEntropyResult res;
    res.dlogits = Matrix(B, C);
    std::vector<double> row_loss(B);
    kernels::softmax_xent_rows(exec, logits.data.data(), labels.data(), B, C, row_loss.data(),
                               res.dlogits.data.data());
    double total = 0.0;
    for (int r = 0; r < B; ++r) total += row_loss[r]; // fixed order
    res.loss = total / B;
    const double inv_b = 1.0 / B;
    for (std::size_t i = 0; i < res.dlogits.data.size(); ++i) res.dlogits.data[i] *= inv_b;
    return res;
}

BackwardResult backward(const DenseNet& net, const ForwardCache& cache, const Matrix& dlogits,
                        kernels::Exec exec) {
    if (cache.net != &net) throw StateError("cache was built for a different net");
    if (!cache.enabled) throw StateError("backward needs a cache-enabled forward pass");
    if (cache.net_version != net.version())
        throw StateError("cache is stale: parameters changed since the forward pass");
    const Batch& batch = *cache.batch;
    const int B = batch.size();
    if (dlogits.rows != B || dlogits.cols != net.output_width())
        throw ConfigError("output gradient shape does not match net output");

    BackwardResult res;
    res.param_grads.assign(net.param_count(), 0.0);

    Matrix delta = dlogits; // gradient w.r.t. post-activation of current layer
    std::size_t off = net.param_count();
    for (int i = net.layer_count() - 1; i >= 0; --i) {
        const LayerSpec& l = net.layer(i);
        Matrix dpre(B, l.out);
        kernels::activation_backward(exec, l.act, cache.pre[i].data.data(),
                                     cache.post[i].data.data(), delta.data.data(),
                                     dpre.data.data(), dpre.data.size());
        const double* layer_in =
            (i == 0) ? batch.inputs.data.data() : cache.post[i - 1].data.data();
        off -= static_cast<std::size_t>(l.out) * l.in + l.out;
        double* dw = res.param_grads.data() + off;
        double* db = dw + static_cast<std::size_t>(l.out) * l.in;
        kernels::dense_grad_params(exec, layer_in, dpre.data.data(), B, l.in, l.out, dw, db);
        Matrix dx(B, l.in);
        kernels::dense_grad_input(exec, dpre.data.data(), net.layer_w(i), B, l.in, l.out,
                                  dx.data.data());
        delta = std::move(dx);
    }
    res.input_grad = std::move(delta);
    return res;
}

void params_add_inplace(DenseNet& net, std::span<const double> delta, double scale,
                        kernels::Exec exec) {
    if (delta.size() != net.param_count())
        throw ConfigError("delta length " + std::to_string(delta.size()) +
                          " does not match parameter count " + std::to_string(net.param_count()));
    auto p = net.params_mut();
    kernels::axpy(exec, scale, delta.data(), p.data(), p.size());
}

void set_params(DenseNet& net, std::span<const double> src) {
    if (src.size() != net.param_count())
        throw ConfigError("source length does not match parameter count");
    auto p = net.params_mut();
    std::memcpy(p.data(), src.data(), src.size() * sizeof(double));
}

} // namespace heron
