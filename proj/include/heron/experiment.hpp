#pragma once

#include <string>
#include <vector>

#include "heron/config.hpp"
#include "heron/spectral.hpp"

namespace heron {

// The pinned metrics CSV header. Counters are cumulative client-side sums as
// of each round's end; participants are '|'-joined ascending ids;
// rounds_to_threshold is the first round whose eval_acc reached
// threshold_acc, or -1 if not reached yet.
extern const char* kMetricsCsvHeader;

struct ArmResult {
    Algorithm algorithm = Algorithm::Heron;
    TrainingResult training;
    bool reconciled = false;
    std::string reconcile_detail;
    std::string metrics_path;
    std::string ledger_path;
};

struct ExperimentResult {
    std::vector<ArmResult> arms;
};

// Derived inputs shared by every arm of one experiment.
struct ExperimentInputs {
    LabeledDataset train;
    LabeledDataset eval_set;
    PartitionPlan plan;
    ModelSpec model;
};
ExperimentInputs build_inputs(const ExperimentConfig& cfg);

// Runs every arm on identical seeds/data and writes per-arm metrics_<arm>.csv
// and ledger_<arm>.json under cfg.output_dir (plus drift_<arm>.csv when the
// drift diagnostic is on). Throws on config violations.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string metrics_csv_text(const TrainingResult& result, double threshold_acc);

// Hessian diagnostics of the client-0 local loss at initialization: density
// estimate, effective-rank report, and a spectrum dump at
// output_dir/spectrum.txt.
struct SpectrumRun {
    SpectrumEstimate estimate;
    EffectiveRankReport report;
    int dim = 0;
    std::string spectrum_path;
};
SpectrumRun run_spectrum(const ExperimentConfig& cfg);

} // namespace heron
