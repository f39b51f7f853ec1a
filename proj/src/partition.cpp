#include "heron/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "heron/errors.hpp"
#include "heron/rng.hpp"

namespace heron {

LabeledDataset make_synthetic(int n_samples, int n_in, int n_classes, double class_separation,
                              double noise_sd, std::uint64_t seed) {
    if (n_samples <= 0 || n_in <= 0 || n_classes <= 0)
        throw ConfigError("synthetic dataset sizes must be positive");
    if (n_classes > n_samples)
        throw ConfigError("more classes than samples");
    if (class_separation < 0.0 || noise_sd < 0.0)
        throw ConfigError("class separation and noise must be non-negative");

    Rng rng(mix_seed(seed, 0x73796e7468ull));
    // Class means: random unit directions scaled to the separation radius.
    std::vector<std::vector<double>> means(n_classes, std::vector<double>(n_in));
    for (int c = 0; c < n_classes; ++c) {
        double norm_sq = 0.0;
        for (int j = 0; j < n_in; ++j) {
            means[c][j] = rng.normal();
            norm_sq += means[c][j] * means[c][j];
        }
        double scale = class_separation / std::sqrt(norm_sq);
        for (int j = 0; j < n_in; ++j) means[c][j] *= scale;
    }

    LabeledDataset data;
    data.inputs = Matrix(n_samples, n_in);
    data.labels.resize(n_samples);
    data.n_classes = n_classes;
    for (int i = 0; i < n_samples; ++i) {
        int c = i % n_classes;
        data.labels[i] = c;
        for (int j = 0; j < n_in; ++j)
            data.inputs.at(i, j) = means[c][j] + noise_sd * rng.normal();
    }
    return data;
}

namespace {

std::vector<std::vector<int>> indices_by_class(const LabeledDataset& data) {
    std::vector<std::vector<int>> by_class(data.n_classes);
    for (int i = 0; i < data.size(); ++i) {
        int c = data.labels[i];
        if (c < 0 || c >= data.n_classes)
            throw PartitionError("label " + std::to_string(c) + " out of range at sample " +
                                 std::to_string(i));
        by_class[c].push_back(i);
    }
    return by_class;
}

PartitionPlan partition_iid(const LabeledDataset& data, int n_clients, std::uint64_t seed) {
    auto by_class = indices_by_class(data);
    PartitionPlan plan;
    plan.shards.resize(n_clients);
    Rng rng(mix_seed(seed, 0x696964ull));
    int turn = 0; // deal round-robin across classes so shard sizes stay even too
    for (auto& idx : by_class) {
        shuffle(std::span<int>(idx), rng);
        for (int v : idx) {
            plan.shards[turn % n_clients].push_back(v);
            ++turn;
        }
    }
    return plan;
}

PartitionPlan partition_dirichlet_once(const LabeledDataset& data, int n_clients, double alpha,
                                       Rng& rng) {
    auto by_class = indices_by_class(data);
    PartitionPlan plan;
    plan.shards.resize(n_clients);
    for (auto& idx : by_class) {
        shuffle(std::span<int>(idx), rng);
        // client proportions ~ Dir(alpha) via normalized gammas
        std::vector<double> w(n_clients);
        double total = 0.0;
        for (int i = 0; i < n_clients; ++i) {
            w[i] = rng.gamma(alpha);
            total += w[i];
        }
        if (total <= 0.0) total = 1.0;
        // largest-remainder rounding of per-client counts
        int m = static_cast<int>(idx.size());
        std::vector<int> count(n_clients, 0);
        std::vector<std::pair<double, int>> rem(n_clients);
        int assigned = 0;
        for (int i = 0; i < n_clients; ++i) {
            double exact = w[i] / total * m;
            count[i] = static_cast<int>(exact);
            rem[i] = {exact - count[i], i};
            assigned += count[i];
        }
        std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (int r = 0; assigned < m; ++r, ++assigned) count[rem[r % n_clients].second]++;
        int pos = 0;
        for (int i = 0; i < n_clients; ++i)
            for (int t = 0; t < count[i]; ++t) plan.shards[i].push_back(idx[pos++]);
    }
    return plan;
}

} // namespace

PartitionPlan partition(const LabeledDataset& data, int n_clients, PartitionMode mode,
                        double alpha, std::uint64_t seed) {
    if (n_clients <= 0) throw ConfigError("client count must be positive");
    if (data.size() < n_clients)
        throw PartitionError("dataset has " + std::to_string(data.size()) +
                             " samples for " + std::to_string(n_clients) +
                             " clients; every client needs at least one");

    if (mode == PartitionMode::Iid) return partition_iid(data, n_clients, seed);

    if (!(alpha > 0.0)) throw ConfigError("dirichlet alpha must be > 0");
    const int max_draws = 100;
    for (int attempt = 0; attempt < max_draws; ++attempt) {
        Rng rng(mix_seed(seed, 0x646972ull, static_cast<std::uint64_t>(attempt)));
        PartitionPlan plan = partition_dirichlet_once(data, n_clients, alpha, rng);
        bool ok = true;
        for (const auto& s : plan.shards)
            if (s.empty()) ok = false;
        if (ok) return plan;
    }
    throw PartitionError("could not give every client a sample after " +
                         std::to_string(max_draws) +
                         " dirichlet draws; use a larger dataset or larger alpha");
}

std::vector<std::vector<double>> label_histograms(const LabeledDataset& data,
                                                  const PartitionPlan& plan) {
    std::vector<std::vector<double>> hists(plan.client_count(),
                                           std::vector<double>(data.n_classes, 0.0));
    for (int i = 0; i < plan.client_count(); ++i) {
        const auto& shard = plan.shards[i];
        if (shard.empty()) continue;
        for (int v : shard) hists[i][data.labels[v]] += 1.0;
        for (double& x : hists[i]) x /= static_cast<double>(shard.size());
    }
    return hists;
}

double mean_pairwise_l1(const std::vector<std::vector<double>>& hists) {
    int n = static_cast<int>(hists.size());
    if (n < 2) return 0.0;
    double total = 0.0;
    int pairs = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double l1 = 0.0;
            for (std::size_t c = 0; c < hists[i].size(); ++c)
                l1 += std::fabs(hists[i][c] - hists[j][c]);
            total += l1;
            ++pairs;
        }
    return total / pairs;
}

LabeledDataset load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file '" + path + "'");
    std::string header;
    if (!std::getline(in, header)) throw ParseError("dataset file '" + path + "' is empty");
    std::istringstream hs(header);
    int m = 0, n_in = 0, n_classes = 0;
    if (!(hs >> m >> n_in >> n_classes) || m <= 0 || n_in <= 0 || n_classes <= 0)
        throw ParseError("dataset header must be 'M n_in n_classes' with positive values");

    LabeledDataset data;
    data.inputs = Matrix(m, n_in);
    data.labels.resize(m);
    data.n_classes = n_classes;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n_in; ++j) {
            if (!(in >> data.inputs.at(i, j)))
                throw ParseError("dataset row " + std::to_string(i) + ": expected " +
                                 std::to_string(n_in) + " feature values");
        }
        int label;
        if (!(in >> label))
            throw ParseError("dataset row " + std::to_string(i) + ": missing label");
        if (label < 0 || label >= n_classes)
            throw ParseError("dataset row " + std::to_string(i) + ": label " +
                             std::to_string(label) + " outside [0, " +
                             std::to_string(n_classes) + ")");
        data.labels[i] = label;
    }
    return data;
}

void save_dataset_file(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file '" + path + "'");
    out << data.size() << " " << data.feature_width() << " " << data.n_classes << "\n";
    char buf[32];
    for (int i = 0; i < data.size(); ++i) {
        for (int j = 0; j < data.feature_width(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.inputs.at(i, j));
            out << buf << " ";
        }
        out << data.labels[i] << "\n";
    }
}

} // namespace heron
