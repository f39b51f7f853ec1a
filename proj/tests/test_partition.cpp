#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "heron/errors.hpp"
#include "heron/partition.hpp"

using namespace heron;

namespace {

std::vector<int> sorted_union(const PartitionPlan& plan) {
    std::vector<int> all;
    for (const auto& s : plan.shards) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    return all;
}

} // namespace

TEST_CASE("synthetic blobs have balanced labels and seeded determinism") {
    LabeledDataset a = make_synthetic(100, 5, 3, 3.0, 1.0, 9);
    CHECK(a.size() == 100);
    CHECK(a.feature_width() == 5);
    CHECK(a.n_classes == 3);
    int counts[3] = {0, 0, 0};
    for (int l : a.labels) {
        REQUIRE(l >= 0);
        REQUIRE(l < 3);
        counts[l]++;
    }
    CHECK(std::abs(counts[0] - counts[1]) <= 1);
    CHECK(std::abs(counts[1] - counts[2]) <= 1);

    LabeledDataset b = make_synthetic(100, 5, 3, 3.0, 1.0, 9);
    CHECK(a.inputs.data == b.inputs.data);
    CHECK(a.labels == b.labels);
    LabeledDataset c = make_synthetic(100, 5, 3, 3.0, 1.0, 10);
    CHECK(a.inputs.data != c.inputs.data);
}

TEST_CASE("synthetic class means sit at the requested separation") {
    double sep = 4.0;
    LabeledDataset d = make_synthetic(30000, 6, 3, sep, 0.5, 21);
    for (int cls = 0; cls < 3; ++cls) {
        std::vector<double> mean(6, 0.0);
        int n = 0;
        for (int i = 0; i < d.size(); ++i) {
            if (d.labels[i] != cls) continue;
            for (int j = 0; j < 6; ++j) mean[j] += d.inputs.at(i, j);
            ++n;
        }
        double norm2 = 0.0;
        for (double& m : mean) {
            m /= n;
            norm2 += m * m;
        }
        // sample mean of ~10k points with sd 0.5 is within ~0.02 of the true mean
        CHECK(std::fabs(std::sqrt(norm2) - sep) < 0.05);
    }
}

TEST_CASE("partitions are disjoint and cover the dataset") {
    LabeledDataset d = make_synthetic(403, 4, 3, 3.0, 1.0, 5);
    for (PartitionMode mode : {PartitionMode::Iid, PartitionMode::Dirichlet}) {
        PartitionPlan plan = partition(d, 5, mode, 0.5, 77);
        REQUIRE(plan.client_count() == 5);
        std::vector<int> all = sorted_union(plan);
        REQUIRE(static_cast<int>(all.size()) == d.size());
        for (int i = 0; i < d.size(); ++i) CHECK(all[i] == i);
        for (const auto& s : plan.shards) CHECK(!s.empty());
    }
}

TEST_CASE("iid split is stratified to within one sample per class") {
    LabeledDataset d = make_synthetic(400, 4, 4, 3.0, 1.0, 6);
    PartitionPlan plan = partition(d, 4, PartitionMode::Iid, 1.0, 8);
    for (const auto& shard : plan.shards) {
        CHECK(shard.size() == 100);
        int counts[4] = {0, 0, 0, 0};
        for (int idx : shard) counts[d.labels[idx]]++;
        for (int c = 0; c < 4; ++c) CHECK(std::abs(counts[c] - 25) <= 1);
    }
}

TEST_CASE("partition is deterministic in the seed") {
    LabeledDataset d = make_synthetic(240, 4, 3, 3.0, 1.0, 6);
    PartitionPlan a = partition(d, 6, PartitionMode::Dirichlet, 0.3, 42);
    PartitionPlan b = partition(d, 6, PartitionMode::Dirichlet, 0.3, 42);
    CHECK(a.shards == b.shards);
    PartitionPlan c = partition(d, 6, PartitionMode::Dirichlet, 0.3, 43);
    CHECK(a.shards != c.shards);
}

TEST_CASE("smaller alpha gives more heterogeneous label marginals") {
    LabeledDataset d = make_synthetic(1200, 4, 4, 3.0, 1.0, 30);
    const double alphas[] = {0.1, 1.0, 10.0, 100.0};
    double mean_h[4] = {0, 0, 0, 0};
    const int n_seeds = 20;
    for (int s = 0; s < n_seeds; ++s) {
        for (int a = 0; a < 4; ++a) {
            PartitionPlan plan = partition(d, 6, PartitionMode::Dirichlet, alphas[a],
                                           1000 + static_cast<std::uint64_t>(s));
            mean_h[a] += mean_pairwise_l1(label_histograms(d, plan)) / n_seeds;
        }
    }
    CHECK(mean_h[0] > mean_h[1]);
    CHECK(mean_h[1] > mean_h[2]);
    CHECK(mean_h[2] > mean_h[3]);
}

TEST_CASE("large alpha approaches the uniform iid histogram") {
    // Dir(100) over 5 clients has per-bin relative sd near 9%, so the mean
    // relative deviation from uniform lands around 7% and stays under 10%
    LabeledDataset d = make_synthetic(2000, 4, 4, 3.0, 1.0, 31);
    const int n_seeds = 20;
    double sum_dev = 0.0;
    std::int64_t bins = 0;
    for (int s = 0; s < n_seeds; ++s) {
        PartitionPlan plan =
            partition(d, 5, PartitionMode::Dirichlet, 100.0, 2000 + static_cast<std::uint64_t>(s));
        auto hists = label_histograms(d, plan);
        for (const auto& h : hists)
            for (double v : h) {
                sum_dev += std::fabs(v * 4.0 - 1.0);
                ++bins;
            }
    }
    CHECK(sum_dev / bins < 0.10);
}

TEST_CASE("every client receives at least one sample or partition fails loudly") {
    LabeledDataset d = make_synthetic(60, 3, 3, 3.0, 1.0, 7);
    PartitionPlan plan = partition(d, 6, PartitionMode::Dirichlet, 0.5, 3);
    for (const auto& s : plan.shards) CHECK(!s.empty());

    // more clients than samples cannot be covered in any mode
    LabeledDataset tiny = make_synthetic(3, 3, 3, 3.0, 1.0, 7);
    CHECK_THROWS_AS(partition(tiny, 8, PartitionMode::Dirichlet, 0.01, 3), PartitionError);
    CHECK_THROWS_AS(partition(tiny, 8, PartitionMode::Iid, 1.0, 3), PartitionError);
}

TEST_CASE("label histograms are normalized and the l1 summary behaves") {
    LabeledDataset d = make_synthetic(300, 4, 3, 3.0, 1.0, 40);
    PartitionPlan plan = partition(d, 3, PartitionMode::Iid, 1.0, 41);
    auto hists = label_histograms(d, plan);
    REQUIRE(hists.size() == 3);
    for (const auto& h : hists) {
        double sum = 0.0;
        for (double v : h) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    // identical histograms give 0
    CHECK(mean_pairwise_l1({{0.5, 0.5}, {0.5, 0.5}}) == 0.0);
    // disjoint supports give 2
    CHECK(mean_pairwise_l1({{1.0, 0.0}, {0.0, 1.0}}) == doctest::Approx(2.0));
}

TEST_CASE("dataset files round trip") {
    LabeledDataset d = make_synthetic(37, 5, 3, 2.5, 0.7, 50);
    std::string path = "test_partition_roundtrip.txt";
    save_dataset_file(d, path);
    LabeledDataset r = load_dataset_file(path);
    CHECK(r.size() == d.size());
    CHECK(r.feature_width() == d.feature_width());
    CHECK(r.n_classes == d.n_classes);
    CHECK(r.labels == d.labels);
    for (std::size_t i = 0; i < d.inputs.data.size(); ++i)
        CHECK(r.inputs.data[i] == d.inputs.data[i]);
    std::remove(path.c_str());
}

TEST_CASE("dataset loader reports malformed rows") {
    std::string path = "test_partition_bad.txt";
    {
        FILE* f = fopen(path.c_str(), "w");
        fputs("2 3 2\n1 2 3 0\n1 2\n", f); // row 2 truncated
        fclose(f);
    }
    CHECK_THROWS_AS(load_dataset_file(path), ParseError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_dataset_file("does_not_exist.txt"), IoError);
}
