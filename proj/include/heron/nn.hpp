#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heron/kernels.hpp"

namespace heron {

// Row-major dense matrix used for batches, activations and gradients.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data; // rows * cols

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const double& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Mini-batch: inputs are B x n_in, labels integer class ids in [0, n_classes).
struct Batch {
    Matrix inputs;
    std::vector<int> labels;

    int size() const { return inputs.rows; }
};

struct LayerSpec {
    int in = 0;
    int out = 0;
    Activation act = Activation::Identity;
};

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation act);

// Feed-forward stack of dense layers over one contiguous parameter buffer.
// Layer l stores W (out x in, row-major) then b (out); layers are laid out in
// order, so any leading group of layers owns a contiguous parameter prefix.
class DenseNet {
public:
    DenseNet() = default;
    explicit DenseNet(std::vector<LayerSpec> layers); // throws ConfigError on bad dims

    int layer_count() const { return static_cast<int>(layers_.size()); }
    const LayerSpec& layer(int i) const { return layers_[i]; }
    int input_width() const { return layers_.front().in; }
    int output_width() const { return layers_.back().out; }
    std::size_t param_count() const { return params_.size(); }

    std::span<const double> params() const { return params_; }
    // Mutable access bumps the version: any cache built before is stale.
    std::span<double> params_mut() {
        ++version_;
        return params_;
    }
    std::uint64_t version() const { return version_; }

    // Parameter count of the first n layers (a contiguous prefix of params()).
    std::size_t prefix_param_count(int n_layers) const;

    const double* layer_w(int i) const { return params_.data() + extents_[i].w_off; }
    const double* layer_b(int i) const { return params_.data() + extents_[i].b_off; }

    void init_random(std::uint64_t seed); // scaled Gaussian fan-in init

private:
    struct Extent {
        std::size_t w_off = 0;
        std::size_t b_off = 0;
    };
    std::vector<LayerSpec> layers_;
    std::vector<Extent> extents_;
    std::vector<double> params_;
    std::uint64_t version_ = 0;
};

enum class CacheMode { Disabled, Enabled };

// Per-layer pre/post activations recorded by a cached forward pass. The cache
// borrows the input batch (keep it alive until backward) and remembers the
// net version so a stale cache is rejected.
struct ForwardCache {
    const DenseNet* net = nullptr;
    std::uint64_t net_version = 0;
    const Batch* batch = nullptr;
    bool enabled = false;
    std::vector<Matrix> pre;
    std::vector<Matrix> post;
    std::int64_t scalar_count = 0;
};

// Number of scalars a cached forward stores for batch size B:
// pre- and post-activations for every layer, 2 * B * sum(out_l).
std::int64_t activation_cache_scalars(const DenseNet& net, int batch);

// Forward MACs for batch size B: B * sum(in_l * out_l). Bias adds and
// activation evaluations are not counted.
std::int64_t forward_macs(const DenseNet& net, int batch);
std::int64_t forward_macs_prefix(const DenseNet& net, int n_layers, int batch);

// Runs the full stack on the batch inputs. With CacheMode::Enabled the cache
// is filled for a later backward(); with Disabled it is cleared
// (scalar_count == 0).
Matrix forward(const DenseNet& net, const Batch& batch, CacheMode mode, ForwardCache& cache,
               kernels::Exec exec = kernels::default_exec());

// Outputs of layers [first, first + count) only, no cache. forward_prefix is
// the cut-layer case: the first n_layers from the batch inputs.
Matrix forward_range(const DenseNet& net, const Matrix& inputs, int first, int count,
                     kernels::Exec exec = kernels::default_exec());
Matrix forward_prefix(const DenseNet& net, const Matrix& inputs, int n_layers,
                      kernels::Exec exec = kernels::default_exec());

// Mean cross entropy -log softmax(logits)[label] and its exact gradient
// d(loss)/d(logits) (already scaled by 1/B). Throws NumericError on
// non-finite logits.
struct CrossEntropyResult {
    double loss = 0.0;
    Matrix dlogits;
};
CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                                 kernels::Exec exec = kernels::default_exec());

// Backprop through the cached forward. Returns flat parameter gradients
// (same layout as params()) and the gradient w.r.t. the batch inputs, which
// at a cut layer is exactly the gradient returned to the client.
struct BackwardResult {
    std::vector<double> param_grads;
    Matrix input_grad;
};
BackwardResult backward(const DenseNet& net, const ForwardCache& cache, const Matrix& dlogits,
                        kernels::Exec exec = kernels::default_exec());

// params += scale * delta, in place; length mismatch throws ConfigError.
void params_add_inplace(DenseNet& net, std::span<const double> delta, double scale,
                        kernels::Exec exec = kernels::default_exec());

// params := src, bit-exact copy.
void set_params(DenseNet& net, std::span<const double> src);

} // namespace heron
