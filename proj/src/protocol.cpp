#include "heron/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>

#include "heron/errors.hpp"
#include "heron/zo.hpp"

namespace heron {

namespace {

// seed-stream tags
constexpr std::uint64_t kTagZo = 0x7a6f5f737465ull;
constexpr std::uint64_t kTagBatch = 0x62617463ull;
constexpr std::uint64_t kTagParts = 0x70617274ull;
constexpr std::uint64_t kTagInitLocal = 0x696e69744cull;
constexpr std::uint64_t kTagInitServer = 0x696e697453ull;

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

int batch_draw(const ClientState& c, const RoundConfig& cfg) {
    return static_cast<int>(
        std::min<std::size_t>(c.shard.size(), static_cast<std::size_t>(cfg.batch_size)));
}

Batch next_batch(ClientState& c, const LabeledDataset& data, int draw) {
    if (c.shard.empty()) throw ProtocolError("client " + std::to_string(c.id) + " has no data");
    if (c.order.size() != c.shard.size() || c.cursor + draw > c.order.size()) {
        c.order = c.shard;
        shuffle(std::span<int>(c.order), c.batch_rng);
        c.cursor = 0;
    }
    Batch b;
    b.inputs = Matrix(draw, data.feature_width());
    b.labels.resize(draw);
    for (int r = 0; r < draw; ++r) {
        int src = c.order[c.cursor + r];
        std::memcpy(&b.inputs.at(r, 0), &data.inputs.at(src, 0),
                    static_cast<std::size_t>(data.feature_width()) * sizeof(double));
        b.labels[r] = data.labels[src];
    }
    c.cursor += draw;
    return b;
}

void optimizer_step(DenseNet& net, std::vector<double>& m, std::vector<double>& v,
                    std::int64_t& t, std::span<const double> grad, double lr, Optimizer opt) {
    if (opt == Optimizer::Sgd) {
        params_add_inplace(net, grad, -lr);
        return;
    }
    const std::size_t d = net.param_count();
    if (m.size() != d) m.assign(d, 0.0);
    if (v.size() != d) v.assign(d, 0.0);
    ++t;
    double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
    double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
    auto p = net.params_mut();
    for (std::size_t i = 0; i < d; ++i) {
        m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * grad[i];
        v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
        double mh = m[i] / c1;
        double vh = v[i] / c2;
        p[i] -= lr * mh / (std::sqrt(vh) + kAdamEps);
    }
}

std::vector<double> histogram(std::span<const double> values, const HistogramSpec& spec) {
    if (spec.bins < 1) throw ConfigError("histogram needs at least one bin");
    if (!(spec.hi > spec.lo)) throw ConfigError("histogram range must be increasing");
    std::vector<double> h(spec.bins, 0.0);
    if (values.empty()) return h;
    const double width = (spec.hi - spec.lo) / spec.bins;
    for (double x : values) {
        int b = static_cast<int>(std::floor((x - spec.lo) / width));
        if (b < 0) b = 0;
        if (b >= spec.bins) b = spec.bins - 1;
        h[b] += 1.0;
    }
    for (double& x : h) x /= static_cast<double>(values.size());
    return h;
}

} // namespace

Optimizer optimizer_from_name(const std::string& name) {
    if (name == "sgd") return Optimizer::Sgd;
    if (name == "adam") return Optimizer::Adam;
    throw ConfigError("unknown optimizer '" + name + "'");
}

double drift_statistic(std::span<const double> values, std::span<const double> reference,
                       const HistogramSpec& spec) {
    std::vector<double> a = histogram(values, spec);
    std::vector<double> b = histogram(reference, spec);
    double l1 = 0.0;
    for (int i = 0; i < spec.bins; ++i) l1 += std::fabs(a[i] - b[i]);
    return l1;
}

std::vector<LayerSpec> client_layer_specs(const ModelSpec& m) {
    if (m.n_in <= 0 || m.n_classes <= 0 || m.cut_width <= 0)
        throw ConfigError("model widths must be positive");
    std::vector<LayerSpec> specs;
    int prev = m.n_in;
    for (int w : m.client_hidden) {
        specs.push_back({prev, w, m.act});
        prev = w;
    }
    specs.push_back({prev, m.cut_width, m.act});
    return specs;
}

namespace {
std::vector<LayerSpec> head_specs(const ModelSpec& m, const std::vector<int>& hidden) {
    std::vector<LayerSpec> specs;
    int prev = m.cut_width;
    for (int w : hidden) {
        specs.push_back({prev, w, m.act});
        prev = w;
    }
    specs.push_back({prev, m.n_classes, Activation::Identity});
    return specs;
}
} // namespace

std::vector<LayerSpec> aux_layer_specs(const ModelSpec& m) { return head_specs(m, m.aux_hidden); }

std::vector<LayerSpec> server_layer_specs(const ModelSpec& m) {
    return head_specs(m, m.server_hidden);
}

void validate_round_config(const RoundConfig& cfg) {
    if (cfg.rounds < 0) throw ConfigError("round count must be >= 0");
    if (cfg.n_clients < 1) throw ConfigError("client count must be >= 1");
    if (cfg.local_steps < 1) throw ConfigError("local step count must be >= 1");
    if (cfg.upload_period < 1 || cfg.upload_period > cfg.local_steps)
        throw ConfigError("upload period exceeds local steps");
    if (cfg.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(cfg.participation > 0.0) || cfg.participation > 1.0)
        throw ConfigError("participation fraction must be in (0, 1]");
    if (!(cfg.mu > 0.0)) throw ConfigError("mu must be > 0");
    if (cfg.probes < 1) throw ConfigError("probe count must be >= 1");
    if (!(cfg.lr_client >= 0.0) || !(cfg.lr_server >= 0.0))
        throw ConfigError("learning rates must be >= 0");
}

void broadcast_init(std::span<const double> global_params, ClientState& client) {
    set_params(client.local, global_params);
    client.ledger.downloaded_scalars += static_cast<std::int64_t>(client.local.param_count());
    client.opt_m.clear();
    client.opt_v.clear();
    client.opt_t = 0;
}

std::uint64_t zo_ticket_seed(std::uint64_t master_seed, int client_id, int round,
                             int local_step) {
    return mix_seed(mix_seed(master_seed, kTagZo, static_cast<std::uint64_t>(client_id)),
                    static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(local_step));
}

std::vector<SmashedBatch> client_local_round(ClientState& client, const RoundConfig& cfg,
                                             const LabeledDataset& train, int round,
                                             std::uint64_t master_seed, double* local_loss_out) {
    validate_round_config(cfg);
    const std::int64_t backward_before = client.ledger.backward_ops;
    const std::int64_t cache_before = client.ledger.activation_cache_hwm;
    const int draw = batch_draw(client, cfg);
    const int q = client.local.layer(client.client_layers - 1).out;
    std::vector<SmashedBatch> uploads;

    for (int m = 1; m <= cfg.local_steps; ++m) {
        Batch batch = next_batch(client, train, draw);
        const bool upload_now = (m % cfg.upload_period == 0);
        Matrix cut_saved;
        double base_loss = std::numeric_limits<double>::quiet_NaN();
        bool first_call = true;

        auto loss_fn = [&]() {
            Matrix cut = forward_prefix(client.local, batch.inputs, client.client_layers);
            Matrix logits =
                forward_range(client.local, cut, client.client_layers,
                              client.local.layer_count() - client.client_layers);
            double loss = cross_entropy(logits, batch.labels).loss;
            if (first_call) {
                if (upload_now) cut_saved = std::move(cut);
                base_loss = loss;
                first_call = false;
            }
            return loss;
        };

        PerturbationTicket ticket;
        ticket.seed = zo_ticket_seed(master_seed, client.id, round, m);
        ticket.mu = cfg.mu;
        ticket.probes = cfg.probes;
        ticket.dim = static_cast<int>(client.local.param_count());

        ZOGradEstimate est = zo_estimate(loss_fn, client.local.params_mut(), ticket);
        client.ledger.forward_ops +=
            static_cast<std::int64_t>(est.evals_used) * forward_macs(client.local, draw);

        optimizer_step(client.local, client.opt_m, client.opt_v, client.opt_t, est.grad,
                       cfg.lr_client, cfg.optimizer);

        if (upload_now) {
            SmashedBatch sb;
            sb.client_id = client.id;
            sb.activations = std::move(cut_saved);
            sb.labels = batch.labels;
            sb.round = round;
            sb.local_step = m;
            client.ledger.uploaded_scalars += static_cast<std::int64_t>(draw) * q;
            uploads.push_back(std::move(sb));
        }
        if (local_loss_out) *local_loss_out = base_loss;
    }

    if (client.ledger.backward_ops != backward_before ||
        client.ledger.activation_cache_hwm != cache_before)
        throw StateError("client " + std::to_string(client.id) +
                         " ran backward or cached activations during a forward-only round");
    return uploads;
}

std::vector<SmashedBatch> client_local_round_fo(ClientState& client, const RoundConfig& cfg,
                                                const LabeledDataset& train, int round,
                                                std::uint64_t master_seed,
                                                double* local_loss_out) {
    validate_round_config(cfg);
    (void)master_seed; // FO consumes no probe seeds; batch schedule lives in client state
    const int draw = batch_draw(client, cfg);
    const int q = client.local.layer(client.client_layers - 1).out;
    std::vector<SmashedBatch> uploads;

    for (int m = 1; m <= cfg.local_steps; ++m) {
        Batch batch = next_batch(client, train, draw);
        ForwardCache cache;
        Matrix logits = forward(client.local, batch, CacheMode::Enabled, cache);
        client.ledger.forward_ops += forward_macs(client.local, draw);
        client.ledger.note_cache(cache.scalar_count);

        CrossEntropyResult ce = cross_entropy(logits, batch.labels);
        if (local_loss_out) *local_loss_out = ce.loss;
        BackwardResult bw = backward(client.local, cache, ce.dlogits);
        client.ledger.backward_ops += 2 * forward_macs(client.local, draw);

        if (m % cfg.upload_period == 0) {
            SmashedBatch sb;
            sb.client_id = client.id;
            sb.activations = cache.post[client.client_layers - 1]; // pre-update forward
            sb.labels = batch.labels;
            sb.round = round;
            sb.local_step = m;
            client.ledger.uploaded_scalars += static_cast<std::int64_t>(draw) * q;
            uploads.push_back(std::move(sb));
        }

        optimizer_step(client.local, client.opt_m, client.opt_v, client.opt_t, bw.param_grads,
                       cfg.lr_client, cfg.optimizer);
    }
    return uploads;
}

namespace {

struct ServerStepResult {
    Matrix cut_grad; // w.r.t. the pre-update server parameters
    double loss = 0.0;
};

// One server pass over a smashed batch: forward, cross entropy, backward,
// optimizer step.
ServerStepResult server_process_one(MainServerState& server, const SmashedBatch& sb) {
    if (sb.activations.cols != server.net.input_width())
        throw ProtocolError("smashed batch from client " + std::to_string(sb.client_id) +
                            " has width " + std::to_string(sb.activations.cols) +
                            " but the server expects " +
                            std::to_string(server.net.input_width()));
    Batch batch;
    batch.inputs = sb.activations;
    batch.labels = sb.labels;
    ForwardCache cache;
    Matrix logits = forward(server.net, batch, CacheMode::Enabled, cache);
    server.ledger.forward_ops += forward_macs(server.net, batch.size());
    server.ledger.note_cache(cache.scalar_count);
    CrossEntropyResult ce = cross_entropy(logits, batch.labels);
    BackwardResult bw = backward(server.net, cache, ce.dlogits);
    server.ledger.backward_ops += 2 * forward_macs(server.net, batch.size());
    optimizer_step(server.net, server.opt_m, server.opt_v, server.opt_t, bw.param_grads,
                   server.lr, server.optimizer);
    return {std::move(bw.input_grad), ce.loss};
}

} // namespace

void client_local_round_sflv2(ClientState& client, MainServerState& server,
                              const RoundConfig& cfg, const LabeledDataset& train, int round,
                              double* local_loss_out) {
    validate_round_config(cfg);
    const int draw = batch_draw(client, cfg);
    const int q = client.local.output_width();

    for (int m = 1; m <= cfg.local_steps; ++m) {
        Batch batch = next_batch(client, train, draw);
        ForwardCache cache;
        Matrix cut = forward(client.local, batch, CacheMode::Enabled, cache);
        client.ledger.forward_ops += forward_macs(client.local, draw);
        client.ledger.note_cache(cache.scalar_count);

        SmashedBatch sb;
        sb.client_id = client.id;
        sb.activations = cut;
        sb.labels = batch.labels;
        sb.round = round;
        sb.local_step = m;
        client.ledger.uploaded_scalars += static_cast<std::int64_t>(draw) * q;

        ServerStepResult step = server_process_one(server, sb);
        client.ledger.downloaded_scalars += static_cast<std::int64_t>(draw) * q;
        if (local_loss_out) *local_loss_out = step.loss; // composite loss, pre-update

        BackwardResult bw = backward(client.local, cache, step.cut_grad);
        client.ledger.backward_ops += 2 * forward_macs(client.local, draw);
        optimizer_step(client.local, client.opt_m, client.opt_v, client.opt_t, bw.param_grads,
                       cfg.lr_client, cfg.optimizer);
    }
}

void server_process_queue(MainServerState& server) {
    while (!server.queue.empty()) {
        SmashedBatch sb = std::move(server.queue.front());
        server.queue.pop_front();
        (void)server_process_one(server, sb);
    }
}

std::vector<double> fed_aggregate(
    const std::vector<std::span<const double>>& participant_params) {
    if (participant_params.empty()) throw ProtocolError("aggregate of zero participants");
    const std::size_t d = participant_params.front().size();
    for (const auto& p : participant_params)
        if (p.size() != d) throw ProtocolError("participant parameter lengths differ");
    std::vector<double> mean(d, 0.0);
    for (const auto& p : participant_params) // caller supplies ascending client-id order
        kernels::axpy(kernels::default_exec(), 1.0, p.data(), mean.data(), d);
    const double inv = 1.0 / static_cast<double>(participant_params.size());
    for (double& x : mean) x *= inv;
    return mean;
}

std::vector<int> select_participants(int n_clients, double fraction, std::uint64_t round_seed) {
    if (n_clients < 1) throw ConfigError("client count must be >= 1");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw ConfigError("participation fraction must be in (0, 1]");
    int count = static_cast<int>(std::llround(fraction * n_clients));
    if (count < 1) count = 1;
    if (count > n_clients) count = n_clients;
    std::vector<int> ids(n_clients);
    for (int i = 0; i < n_clients; ++i) ids[i] = i;
    Rng rng(round_seed);
    for (int i = 0; i < count; ++i) {
        int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_clients - i)));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalResult evaluate_net(const DenseNet& eval_net, const LabeledDataset& data) {
    Batch all;
    all.inputs = data.inputs;
    all.labels = data.labels;
    ForwardCache cache;
    Matrix logits = forward(eval_net, all, CacheMode::Disabled, cache);
    EvalResult res;
    res.loss = cross_entropy(logits, data.labels).loss;
    int correct = 0;
    for (int r = 0; r < logits.rows; ++r) {
        int best = 0;
        for (int c = 1; c < logits.cols; ++c)
            if (logits.at(r, c) > logits.at(r, best)) best = c;
        if (best == data.labels[r]) ++correct;
    }
    res.accuracy = static_cast<double>(correct) / logits.rows;
    return res;
}

} // namespace

TrainingResult run_training(const RoundConfig& cfg, const ModelSpec& model,
                            const LabeledDataset& train, const LabeledDataset& eval_set,
                            const PartitionPlan& plan, std::uint64_t master_seed) {
    validate_round_config(cfg);
    if (plan.client_count() != cfg.n_clients)
        throw ConfigError("partition has " + std::to_string(plan.client_count()) +
                          " shards for " + std::to_string(cfg.n_clients) + " clients");

    const bool sflv2 = (cfg.algorithm == Algorithm::Sflv2);
    std::vector<LayerSpec> client_specs = client_layer_specs(model);
    std::vector<LayerSpec> local_specs = client_specs;
    if (!sflv2) {
        for (const LayerSpec& l : aux_layer_specs(model)) local_specs.push_back(l);
    }

    DenseNet local_template(local_specs);
    local_template.init_random(mix_seed(master_seed, kTagInitLocal));
    std::vector<double> global(local_template.params().begin(), local_template.params().end());
    const std::size_t d_client = local_template.prefix_param_count(
        static_cast<int>(client_specs.size()));

    MainServerState server;
    server.net = DenseNet(server_layer_specs(model));
    server.net.init_random(mix_seed(master_seed, kTagInitServer));
    server.lr = cfg.lr_server;
    server.optimizer = cfg.optimizer;

    std::vector<ClientState> clients;
    clients.reserve(cfg.n_clients);
    for (int id = 0; id < cfg.n_clients; ++id) {
        ClientState c;
        c.id = id;
        c.local = DenseNet(local_specs);
        set_params(c.local, global);
        c.client_layers = static_cast<int>(client_specs.size());
        c.shard = plan.shards[id];
        c.batch_rng = Rng(mix_seed(master_seed, kTagBatch, static_cast<std::uint64_t>(id)));
        clients.push_back(std::move(c));
    }

    // composite used for global metrics: client layers then server layers
    std::vector<LayerSpec> eval_specs = client_specs;
    for (const LayerSpec& l : server_layer_specs(model)) eval_specs.push_back(l);
    DenseNet eval_net(eval_specs);

    TrainingResult result;
    result.rounds_participated.assign(cfg.n_clients, 0);

    for (int t = 1; t <= cfg.rounds; ++t) {
        std::vector<int> parts = select_participants(
            cfg.n_clients, cfg.participation,
            mix_seed(master_seed, kTagParts, static_cast<std::uint64_t>(t)));
        for (int id : parts) {
            broadcast_init(global, clients[id]);
            result.rounds_participated[id]++;
        }

        const int np = static_cast<int>(parts.size());
        std::vector<std::vector<SmashedBatch>> uploads(np);
        std::vector<double> local_loss(cfg.n_clients,
                                       std::numeric_limits<double>::quiet_NaN());

        if (sflv2) {
            for (int i = 0; i < np; ++i)
                client_local_round_sflv2(clients[parts[i]], server, cfg, train, t,
                                         &local_loss[parts[i]]);
        } else {
            // clients are independent; run them in parallel, merge in id order
            std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static)
            for (int i = 0; i < np; ++i) {
                try {
                    if (cfg.algorithm == Algorithm::Heron)
                        uploads[i] = client_local_round(clients[parts[i]], cfg, train, t,
                                                        master_seed, &local_loss[parts[i]]);
                    else
                        uploads[i] = client_local_round_fo(clients[parts[i]], cfg, train, t,
                                                           master_seed, &local_loss[parts[i]]);
                } catch (...) {
#pragma omp critical
                    if (!err) err = std::current_exception();
                }
            }
            if (err) std::rethrow_exception(err);
        }

        if (!sflv2) {
            for (int i = 0; i < np; ++i) // ascending client id, then step order
                for (auto& sb : uploads[i]) server.queue.push_back(std::move(sb));
            server_process_queue(server);
        }

        std::vector<std::span<const double>> views;
        views.reserve(np);
        for (int id : parts) views.push_back(clients[id].local.params());
        global = fed_aggregate(views);
        for (int id : parts)
            clients[id].ledger.uploaded_scalars +=
                static_cast<std::int64_t>(clients[id].local.param_count());

        RoundMetrics rm;
        rm.round = t;
        rm.participants = parts;
        rm.client_local_loss = std::move(local_loss);

        std::vector<double> eval_params(eval_net.param_count());
        std::memcpy(eval_params.data(), global.data(), d_client * sizeof(double));
        std::memcpy(eval_params.data() + d_client, server.net.params().data(),
                    server.net.param_count() * sizeof(double));
        set_params(eval_net, eval_params);
        rm.train_loss = evaluate_net(eval_net, train).loss;
        rm.eval_acc = evaluate_net(eval_net, eval_set).accuracy;

        for (const ClientState& c : clients) rm.client_cumulative += c.ledger;

        if (cfg.drift_enabled) {
            rm.drift.assign(cfg.n_clients, std::numeric_limits<double>::quiet_NaN());
            for (int id : parts) {
                ClientState& c = clients[id];
                int probe_n = static_cast<int>(
                    std::min<std::size_t>(c.shard.size(),
                                          static_cast<std::size_t>(cfg.batch_size)));
                Matrix probe(probe_n, train.feature_width());
                for (int r = 0; r < probe_n; ++r)
                    std::memcpy(&probe.at(r, 0), &train.inputs.at(c.shard[r], 0),
                                static_cast<std::size_t>(train.feature_width()) * sizeof(double));
                Matrix cut = forward_prefix(c.local, probe, c.client_layers);
                std::vector<double> hist = histogram(cut.data, cfg.drift_hist);
                if (c.drift_ref_hist.empty()) c.drift_ref_hist = hist;
                double l1 = 0.0;
                for (std::size_t bin = 0; bin < hist.size(); ++bin)
                    l1 += std::fabs(hist[bin] - c.drift_ref_hist[bin]);
                rm.drift[id] = l1;
            }
        }

        result.rounds.push_back(std::move(rm));
    }

    for (const ClientState& c : clients) result.client_ledgers.push_back(c.ledger);
    result.server_ledger = server.ledger;
    return result;
}

DenseNet initial_local_model(const ModelSpec& model, std::uint64_t master_seed) {
    std::vector<LayerSpec> specs = client_layer_specs(model);
    for (const LayerSpec& l : aux_layer_specs(model)) specs.push_back(l);
    DenseNet net(specs);
    net.init_random(mix_seed(master_seed, kTagInitLocal));
    return net;
}

LedgerCounters predict_client_counters(const RoundConfig& cfg, const ModelSpec& model,
                                       int shard_size, int rounds_participated) {
    validate_round_config(cfg);
    if (shard_size < 1) throw ConfigError("shard size must be >= 1");

    const bool sflv2 = (cfg.algorithm == Algorithm::Sflv2);
    std::vector<LayerSpec> local_specs = client_layer_specs(model);
    std::int64_t mac_client_per_sample = 0;
    for (const LayerSpec& l : local_specs)
        mac_client_per_sample += static_cast<std::int64_t>(l.in) * l.out;
    std::int64_t out_sum = 0;
    for (const LayerSpec& l : local_specs) out_sum += l.out;
    if (!sflv2) {
        for (const LayerSpec& l : aux_layer_specs(model)) {
            local_specs.push_back(l);
            out_sum += l.out;
        }
    }
    std::int64_t mac_local_per_sample = 0;
    std::int64_t d_local = 0;
    for (const LayerSpec& l : local_specs) {
        mac_local_per_sample += static_cast<std::int64_t>(l.in) * l.out;
        d_local += static_cast<std::int64_t>(l.in) * l.out + l.out;
    }

    const std::int64_t b = std::min<std::int64_t>(shard_size, cfg.batch_size);
    const std::int64_t q = model.cut_width;
    const std::int64_t h = cfg.local_steps;
    const std::int64_t uploads_per_round = sflv2 ? h : h / cfg.upload_period;
    const std::int64_t rounds = rounds_participated;

    LedgerCounters pred;
    pred.downloaded_scalars = rounds * d_local + (sflv2 ? rounds * h * b * q : 0);
    pred.uploaded_scalars = rounds * (d_local + uploads_per_round * b * q);
    switch (cfg.algorithm) {
        case Algorithm::Heron:
            pred.forward_ops = rounds * h * (cfg.probes + 1) * mac_local_per_sample * b;
            pred.backward_ops = 0;
            pred.activation_cache_hwm = 0;
            break;
        case Algorithm::CseFslFo:
            pred.forward_ops = rounds * h * mac_local_per_sample * b;
            pred.backward_ops = 2 * pred.forward_ops;
            pred.activation_cache_hwm = (rounds > 0) ? 2 * b * out_sum : 0;
            break;
        case Algorithm::Sflv2:
            pred.forward_ops = rounds * h * mac_client_per_sample * b;
            pred.backward_ops = 2 * pred.forward_ops;
            pred.activation_cache_hwm = (rounds > 0) ? 2 * b * out_sum : 0;
            break;
    }
    return pred;
}

} // namespace heron
