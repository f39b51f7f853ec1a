#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heron/protocol.hpp"

namespace heron {

// Parsed experiment description. The on-disk format is line-oriented
// "key value..." text with '#' comments and dotted keys for nesting; the
// full schema is documented in the README.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::vector<std::string> arm_names; // validated against known algorithms
    double threshold_acc = 0.8;

    RoundConfig round; // round.algorithm is overwritten per arm when running

    // dataset
    std::string dataset_kind = "synthetic"; // synthetic | file
    int data_samples = 512;
    int data_features = 8;
    int data_classes = 3;
    double data_separation = 3.0;
    double data_noise = 1.0;
    int eval_samples = 256;
    std::string dataset_path;
    std::string eval_path;

    // partition
    std::string partition_mode = "iid"; // iid | dirichlet
    double alpha = 1.0;

    // model (input/output widths come from the dataset)
    int cut_width = 4;
    std::vector<int> client_hidden;
    std::vector<int> aux_hidden;
    std::vector<int> server_hidden;
    std::string activation = "tanh";

    // spectral diagnostics
    int spectral_steps = 40;
    int spectral_probes = 8;
    double spectral_eps = 1e-4;

    std::vector<std::string> unknown_keys; // collected by the parser
};

struct Violation {
    std::string key;
    std::string message;
};

// Reads and type-checks a config file. Malformed lines and bad literals are
// ParseError with a line number; unknown keys are collected for validation.
ExperimentConfig parse_experiment_config(const std::string& path);

// Semantic checks; an empty result means the config can run.
std::vector<Violation> validate_experiment_config(const ExperimentConfig& cfg);

} // namespace heron
