#include "heron/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "heron/errors.hpp"
#include "heron/rng.hpp"
#include "heron/zo.hpp"

namespace heron {

const char* kMetricsCsvHeader =
    "round,train_loss,eval_acc,uploaded_scalars,downloaded_scalars,forward_ops,"
    "backward_ops,cache_hwm,participants,rounds_to_threshold";

namespace {

constexpr std::uint64_t kTagDataset = 0x64617461ull;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_ids(const std::vector<int>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += '|';
        out += std::to_string(ids[i]);
    }
    return out;
}

void require_valid(const ExperimentConfig& cfg) {
    std::vector<Violation> v = validate_experiment_config(cfg);
    if (!v.empty()) {
        std::string msg = "config has " + std::to_string(v.size()) + " violation(s):";
        for (const Violation& x : v) msg += "\n  " + x.key + ": " + x.message;
        throw ConfigError(msg);
    }
}

nlohmann::ordered_json counters_json(const LedgerCounters& c) {
    nlohmann::ordered_json j;
    j["uploaded_scalars"] = c.uploaded_scalars;
    j["downloaded_scalars"] = c.downloaded_scalars;
    j["forward_ops"] = c.forward_ops;
    j["backward_ops"] = c.backward_ops;
    j["activation_cache_hwm"] = c.activation_cache_hwm;
    return j;
}

} // namespace

ExperimentInputs build_inputs(const ExperimentConfig& cfg) {
    require_valid(cfg);
    ExperimentInputs in;

    if (cfg.dataset_kind == "synthetic") {
        // one blob family for train and eval so both splits share class means
        LabeledDataset all =
            make_synthetic(cfg.data_samples + cfg.eval_samples, cfg.data_features,
                           cfg.data_classes, cfg.data_separation, cfg.data_noise,
                           mix_seed(cfg.seed, kTagDataset));
        in.train.inputs = Matrix(cfg.data_samples, cfg.data_features);
        in.train.labels.assign(all.labels.begin(), all.labels.begin() + cfg.data_samples);
        in.train.n_classes = cfg.data_classes;
        std::copy(all.inputs.data.begin(),
                  all.inputs.data.begin() +
                      static_cast<std::ptrdiff_t>(cfg.data_samples) * cfg.data_features,
                  in.train.inputs.data.begin());
        in.eval_set.inputs = Matrix(cfg.eval_samples, cfg.data_features);
        in.eval_set.labels.assign(all.labels.begin() + cfg.data_samples, all.labels.end());
        in.eval_set.n_classes = cfg.data_classes;
        std::copy(all.inputs.data.begin() +
                      static_cast<std::ptrdiff_t>(cfg.data_samples) * cfg.data_features,
                  all.inputs.data.end(), in.eval_set.inputs.data.begin());
    } else {
        LabeledDataset file = load_dataset_file(cfg.dataset_path);
        if (!cfg.eval_path.empty()) {
            in.train = std::move(file);
            in.eval_set = load_dataset_file(cfg.eval_path);
            if (in.eval_set.feature_width() != in.train.feature_width() ||
                in.eval_set.n_classes != in.train.n_classes)
                throw ConfigError("train and eval dataset files disagree on shape");
        } else {
            if (cfg.eval_samples >= file.size())
                throw ConfigError("dataset.eval_samples leaves no training data");
            int train_n = file.size() - cfg.eval_samples;
            in.train.inputs = Matrix(train_n, file.feature_width());
            in.train.labels.assign(file.labels.begin(), file.labels.begin() + train_n);
            in.train.n_classes = file.n_classes;
            std::copy(file.inputs.data.begin(),
                      file.inputs.data.begin() +
                          static_cast<std::ptrdiff_t>(train_n) * file.feature_width(),
                      in.train.inputs.data.begin());
            in.eval_set.inputs = Matrix(cfg.eval_samples, file.feature_width());
            in.eval_set.labels.assign(file.labels.begin() + train_n, file.labels.end());
            in.eval_set.n_classes = file.n_classes;
            std::copy(file.inputs.data.begin() +
                          static_cast<std::ptrdiff_t>(train_n) * file.feature_width(),
                      file.inputs.data.end(), in.eval_set.inputs.data.begin());
        }
    }

    PartitionMode mode =
        (cfg.partition_mode == "iid") ? PartitionMode::Iid : PartitionMode::Dirichlet;
    in.plan = partition(in.train, cfg.round.n_clients, mode, cfg.alpha, cfg.seed);

    in.model.n_in = in.train.feature_width();
    in.model.n_classes = in.train.n_classes;
    in.model.cut_width = cfg.cut_width;
    in.model.client_hidden = cfg.client_hidden;
    in.model.aux_hidden = cfg.aux_hidden;
    in.model.server_hidden = cfg.server_hidden;
    in.model.act = activation_from_name(cfg.activation);
    return in;
}

std::string metrics_csv_text(const TrainingResult& result, double threshold_acc) {
    std::string out = kMetricsCsvHeader;
    out += '\n';
    int first_reach = -1;
    for (const RoundMetrics& rm : result.rounds) {
        if (first_reach < 0 && rm.eval_acc >= threshold_acc) first_reach = rm.round;
        out += std::to_string(rm.round);
        out += ',';
        out += fmt_double(rm.train_loss);
        out += ',';
        out += fmt_double(rm.eval_acc);
        out += ',';
        out += std::to_string(rm.client_cumulative.uploaded_scalars);
        out += ',';
        out += std::to_string(rm.client_cumulative.downloaded_scalars);
        out += ',';
        out += std::to_string(rm.client_cumulative.forward_ops);
        out += ',';
        out += std::to_string(rm.client_cumulative.backward_ops);
        out += ',';
        out += std::to_string(rm.client_cumulative.activation_cache_hwm);
        out += ',';
        out += join_ids(rm.participants);
        out += ',';
        out += std::to_string(first_reach);
        out += '\n';
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentInputs in = build_inputs(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    ExperimentResult result;
    for (const std::string& arm : cfg.arm_names) {
        RoundConfig rc = cfg.round;
        rc.algorithm = algorithm_from_name(arm);

        ArmResult ar;
        ar.algorithm = rc.algorithm;
        ar.training = run_training(rc, in.model, in.train, in.eval_set, in.plan, cfg.seed);

        ar.metrics_path = cfg.output_dir + "/metrics_" + arm + ".csv";
        {
            std::ofstream f(ar.metrics_path, std::ios::binary);
            if (!f) throw IoError("cannot write '" + ar.metrics_path + "'");
            f << metrics_csv_text(ar.training, cfg.threshold_acc);
        }

        if (rc.drift_enabled) {
            std::string drift_path = cfg.output_dir + "/drift_" + arm + ".csv";
            std::ofstream f(drift_path, std::ios::binary);
            if (!f) throw IoError("cannot write '" + drift_path + "'");
            f << "round,client,drift\n";
            for (const RoundMetrics& rm : ar.training.rounds)
                for (std::size_t id = 0; id < rm.drift.size(); ++id)
                    if (!std::isnan(rm.drift[id]))
                        f << rm.round << ',' << id << ',' << fmt_double(rm.drift[id]) << '\n';
        }

        // per-client reconciliation against the closed-form predictions
        nlohmann::ordered_json j;
        j["arm"] = arm;
        j["seed"] = cfg.seed;
        j["rounds"] = rc.rounds;
        j["clients"] = nlohmann::ordered_json::array();
        LedgerCounters measured_total, predicted_total;
        ar.reconciled = true;
        for (int id = 0; id < rc.n_clients; ++id) {
            const LedgerCounters& m = ar.training.client_ledgers[id];
            LedgerCounters p = predict_client_counters(
                rc, in.model, static_cast<int>(in.plan.shards[id].size()),
                ar.training.rounds_participated[id]);
            measured_total += m;
            predicted_total += p;
            nlohmann::ordered_json cj;
            cj["id"] = id;
            cj["shard_size"] = in.plan.shards[id].size();
            cj["rounds_participated"] = ar.training.rounds_participated[id];
            cj["measured"] = counters_json(m);
            cj["predicted"] = counters_json(p);
            try {
                reconcile(m, p, "client " + std::to_string(id));
                cj["reconciled"] = true;
            } catch (const ReconcileError& e) {
                cj["reconciled"] = false;
                ar.reconciled = false;
                if (!ar.reconcile_detail.empty()) ar.reconcile_detail += "; ";
                ar.reconcile_detail += e.what();
            }
            j["clients"].push_back(std::move(cj));
        }
        if (ar.reconciled) ar.reconcile_detail = "all clients match closed-form predictions";
        j["client_totals"] = counters_json(measured_total);
        j["client_totals_predicted"] = counters_json(predicted_total);
        j["server"] = counters_json(ar.training.server_ledger);
        j["reconciled"] = ar.reconciled;
        j["reconcile_detail"] = ar.reconcile_detail;

        ar.ledger_path = cfg.output_dir + "/ledger_" + arm + ".json";
        {
            std::ofstream f(ar.ledger_path, std::ios::binary);
            if (!f) throw IoError("cannot write '" + ar.ledger_path + "'");
            f << j.dump(2) << '\n';
        }

        result.arms.push_back(std::move(ar));
    }
    return result;
}

SpectrumRun run_spectrum(const ExperimentConfig& cfg) {
    ExperimentInputs in = build_inputs(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    // local model of client 0 at the initialization every arm starts from
    DenseNet net = initial_local_model(in.model, cfg.seed);

    const auto& shard = in.plan.shards[0];
    int draw = static_cast<int>(
        std::min<std::size_t>(shard.size(), static_cast<std::size_t>(cfg.round.batch_size)));
    Batch probe;
    probe.inputs = Matrix(draw, in.train.feature_width());
    probe.labels.resize(draw);
    for (int r = 0; r < draw; ++r) {
        for (int c = 0; c < in.train.feature_width(); ++c)
            probe.inputs.at(r, c) = in.train.inputs.at(shard[r], c);
        probe.labels[r] = in.train.labels[shard[r]];
    }

    SpectrumRun run;
    run.dim = static_cast<int>(net.param_count());
    LinearOp op = hvp_operator(net, probe, cfg.spectral_eps);
    run.estimate = lanczos_density(op, run.dim, cfg.spectral_steps, cfg.spectral_probes,
                                   mix_seed(cfg.seed, 0x73706563ull));
    run.report = effective_rank(run.estimate, run.dim);
    run.spectrum_path = cfg.output_dir + "/spectrum.txt";
    save_spectrum(run.estimate, run.spectrum_path);
    return run;
}

} // namespace heron
