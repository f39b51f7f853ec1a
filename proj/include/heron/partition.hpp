#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heron/nn.hpp"

namespace heron {

struct LabeledDataset {
    Matrix inputs; // M x n_in
    std::vector<int> labels;
    int n_classes = 0;

    int size() const { return inputs.rows; }
    int feature_width() const { return inputs.cols; }
};

// Disjoint per-client index lists covering [0, M).
struct PartitionPlan {
    std::vector<std::vector<int>> shards;

    int client_count() const { return static_cast<int>(shards.size()); }
};

enum class PartitionMode { Iid, Dirichlet };

// Gaussian blobs: one seeded mean per class at distance class_separation from
// the origin, labels assigned round-robin so class counts differ by at most 1.
LabeledDataset make_synthetic(int n_samples, int n_in, int n_classes, double class_separation,
                              double noise_sd, std::uint64_t seed);

// mode Iid: per-class even stratified split. mode Dirichlet: per-class client
// proportions drawn from Dir(alpha). Every client gets >= 1 sample overall,
// enforced by bounded re-draws; exhaustion raises PartitionError.
PartitionPlan partition(const LabeledDataset& data, int n_clients, PartitionMode mode,
                        double alpha, std::uint64_t seed);

// Per-client normalized label histogram (rows sum to 1).
std::vector<std::vector<double>> label_histograms(const LabeledDataset& data,
                                                  const PartitionPlan& plan);

// Mean pairwise L1 distance between client label histograms; the usual
// heterogeneity summary for a plan.
double mean_pairwise_l1(const std::vector<std::vector<double>>& hists);

// Text dataset file: one header line "M n_in n_classes", then M lines of
// n_in feature values followed by an integer label.
LabeledDataset load_dataset_file(const std::string& path);
void save_dataset_file(const LabeledDataset& data, const std::string& path);

} // namespace heron
