#include "heron/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "heron/errors.hpp"

namespace heron {

namespace {

struct Line {
    std::string key;
    std::vector<std::string> values;
    int number = 0;
};

std::vector<Line> tokenize(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::vector<Line> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::istringstream ls(raw);
        Line line;
        line.number = number;
        if (!(ls >> line.key)) continue; // blank or comment-only
        std::string v;
        while (ls >> v) line.values.push_back(v);
        if (line.values.empty())
            throw ParseError("line " + std::to_string(number) + ": key '" + line.key +
                             "' has no value");
        lines.push_back(std::move(line));
    }
    return lines;
}

template <typename T>
T parse_number(const Line& line, const std::string& text);

template <>
double parse_number<double>(const Line& line, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size())
        throw ParseError("line " + std::to_string(line.number) + ": key '" + line.key +
                         "' expects a real number, got '" + text + "'");
    return v;
}

template <>
int parse_number<int>(const Line& line, const std::string& text) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size())
        throw ParseError("line " + std::to_string(line.number) + ": key '" + line.key +
                         "' expects an integer, got '" + text + "'");
    return static_cast<int>(v);
}

template <>
std::uint64_t parse_number<std::uint64_t>(const Line& line, const std::string& text) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size())
        throw ParseError("line " + std::to_string(line.number) + ": key '" + line.key +
                         "' expects an unsigned integer, got '" + text + "'");
    return static_cast<std::uint64_t>(v);
}

template <typename T>
T single(const Line& line) {
    if (line.values.size() != 1)
        throw ParseError("line " + std::to_string(line.number) + ": key '" + line.key +
                         "' expects exactly one value");
    return parse_number<T>(line, line.values[0]);
}

std::string single_string(const Line& line) {
    if (line.values.size() != 1)
        throw ParseError("line " + std::to_string(line.number) + ": key '" + line.key +
                         "' expects exactly one value");
    return line.values[0];
}

std::vector<int> int_list(const Line& line) {
    std::vector<int> out;
    for (const std::string& v : line.values) out.push_back(parse_number<int>(line, v));
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    ExperimentConfig cfg;
    for (const Line& line : tokenize(path)) {
        const std::string& k = line.key;
        if (k == "seed") cfg.seed = single<std::uint64_t>(line);
        else if (k == "output_dir") cfg.output_dir = single_string(line);
        else if (k == "arms") cfg.arm_names = line.values;
        else if (k == "threshold_acc") cfg.threshold_acc = single<double>(line);
        else if (k == "rounds") cfg.round.rounds = single<int>(line);
        else if (k == "clients") cfg.round.n_clients = single<int>(line);
        else if (k == "local_steps") cfg.round.local_steps = single<int>(line);
        else if (k == "upload_period") cfg.round.upload_period = single<int>(line);
        else if (k == "batch_size") cfg.round.batch_size = single<int>(line);
        else if (k == "lr_client") cfg.round.lr_client = single<double>(line);
        else if (k == "lr_server") cfg.round.lr_server = single<double>(line);
        else if (k == "mu") cfg.round.mu = single<double>(line);
        else if (k == "probes") cfg.round.probes = single<int>(line);
        else if (k == "participation") cfg.round.participation = single<double>(line);
        else if (k == "optimizer") cfg.round.optimizer = optimizer_from_name(single_string(line));
        else if (k == "drift.enabled") {
            std::string v = single_string(line);
            if (v != "true" && v != "false")
                throw ParseError("line " + std::to_string(line.number) +
                                 ": drift.enabled expects true or false");
            cfg.round.drift_enabled = (v == "true");
        } else if (k == "drift.bins") cfg.round.drift_hist.bins = single<int>(line);
        else if (k == "drift.lo") cfg.round.drift_hist.lo = single<double>(line);
        else if (k == "drift.hi") cfg.round.drift_hist.hi = single<double>(line);
        else if (k == "dataset.kind") cfg.dataset_kind = single_string(line);
        else if (k == "dataset.samples") cfg.data_samples = single<int>(line);
        else if (k == "dataset.features") cfg.data_features = single<int>(line);
        else if (k == "dataset.classes") cfg.data_classes = single<int>(line);
        else if (k == "dataset.separation") cfg.data_separation = single<double>(line);
        else if (k == "dataset.noise") cfg.data_noise = single<double>(line);
        else if (k == "dataset.eval_samples") cfg.eval_samples = single<int>(line);
        else if (k == "dataset.path") cfg.dataset_path = single_string(line);
        else if (k == "dataset.eval_path") cfg.eval_path = single_string(line);
        else if (k == "partition.mode") cfg.partition_mode = single_string(line);
        else if (k == "partition.alpha") cfg.alpha = single<double>(line);
        else if (k == "model.cut_width") cfg.cut_width = single<int>(line);
        else if (k == "model.client_hidden") cfg.client_hidden = int_list(line);
        else if (k == "model.aux_hidden") cfg.aux_hidden = int_list(line);
        else if (k == "model.server_hidden") cfg.server_hidden = int_list(line);
        else if (k == "model.activation") cfg.activation = single_string(line);
        else if (k == "spectral.steps") cfg.spectral_steps = single<int>(line);
        else if (k == "spectral.probes") cfg.spectral_probes = single<int>(line);
        else if (k == "spectral.eps") cfg.spectral_eps = single<double>(line);
        else cfg.unknown_keys.push_back(k + " (line " + std::to_string(line.number) + ")");
    }
    return cfg;
}

std::vector<Violation> validate_experiment_config(const ExperimentConfig& cfg) {
    std::vector<Violation> out;
    auto flag = [&](const std::string& key, const std::string& msg) {
        out.push_back({key, msg});
    };

    for (const std::string& u : cfg.unknown_keys) flag(u, "unknown key");

    if (cfg.arm_names.empty()) flag("arms", "at least one arm is required");
    std::set<std::string> seen;
    for (const std::string& a : cfg.arm_names) {
        if (a != "heron" && a != "sflv2" && a != "cse_fsl_fo")
            flag("arms", "unknown arm '" + a + "' (use heron, sflv2, cse_fsl_fo)");
        else if (!seen.insert(a).second)
            flag("arms", "arm '" + a + "' listed twice");
    }

    const RoundConfig& r = cfg.round;
    if (r.rounds < 0) flag("rounds", "must be >= 0");
    if (r.n_clients < 1) flag("clients", "must be >= 1");
    if (r.local_steps < 1) flag("local_steps", "must be >= 1");
    if (r.upload_period < 1) flag("upload_period", "must be >= 1");
    else if (r.upload_period > r.local_steps)
        flag("upload_period", "upload period exceeds local steps");
    if (r.batch_size < 1) flag("batch_size", "must be >= 1");
    if (!(r.participation > 0.0))
        flag("participation", "participation fraction must be in (0, 1]");
    else if (r.participation > 1.0)
        flag("participation", "participation fraction must be in (0, 1]");
    if (!(r.mu > 0.0)) flag("mu", "must be > 0");
    if (r.probes < 1) flag("probes", "must be >= 1");
    if (r.lr_client < 0.0) flag("lr_client", "must be >= 0");
    if (r.lr_server < 0.0) flag("lr_server", "must be >= 0");
    if (r.drift_enabled) {
        if (r.drift_hist.bins < 1) flag("drift.bins", "must be >= 1");
        if (!(r.drift_hist.hi > r.drift_hist.lo)) flag("drift.lo", "range must be increasing");
    }

    if (cfg.dataset_kind == "synthetic") {
        if (cfg.data_samples < 1) flag("dataset.samples", "must be >= 1");
        if (cfg.data_features < 1) flag("dataset.features", "must be >= 1");
        if (cfg.data_classes < 2) flag("dataset.classes", "must be >= 2");
        if (cfg.data_separation < 0.0) flag("dataset.separation", "must be >= 0");
        if (cfg.data_noise < 0.0) flag("dataset.noise", "must be >= 0");
        if (cfg.eval_samples < 1) flag("dataset.eval_samples", "must be >= 1");
    } else if (cfg.dataset_kind == "file") {
        if (cfg.dataset_path.empty()) flag("dataset.path", "required for dataset.kind file");
        if (cfg.eval_path.empty() && cfg.eval_samples < 1)
            flag("dataset.eval_samples", "must be >= 1 when no eval_path is given");
    } else {
        flag("dataset.kind", "must be synthetic or file");
    }

    if (cfg.partition_mode == "dirichlet") {
        if (!(cfg.alpha > 0.0)) flag("partition.alpha", "must be > 0");
    } else if (cfg.partition_mode != "iid") {
        flag("partition.mode", "must be iid or dirichlet");
    }

    if (cfg.cut_width < 1) flag("model.cut_width", "must be >= 1");
    for (int w : cfg.client_hidden)
        if (w < 1) flag("model.client_hidden", "widths must be >= 1");
    for (int w : cfg.aux_hidden)
        if (w < 1) flag("model.aux_hidden", "widths must be >= 1");
    for (int w : cfg.server_hidden)
        if (w < 1) flag("model.server_hidden", "widths must be >= 1");
    if (cfg.activation != "tanh" && cfg.activation != "relu" && cfg.activation != "identity")
        flag("model.activation", "must be tanh, relu or identity");

    if (cfg.spectral_steps < 1) flag("spectral.steps", "must be >= 1");
    if (cfg.spectral_probes < 1) flag("spectral.probes", "must be >= 1");
    if (!(cfg.spectral_eps > 0.0)) flag("spectral.eps", "must be > 0");

    if (cfg.threshold_acc < 0.0 || cfg.threshold_acc > 1.0)
        flag("threshold_acc", "must be within [0, 1]");

    return out;
}

} // namespace heron
