#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "heron/ledger.hpp"
#include "heron/nn.hpp"
#include "heron/partition.hpp"
#include "heron/rng.hpp"

namespace heron {

enum class Optimizer { Sgd, Adam };
Optimizer optimizer_from_name(const std::string& name);

// One upload of cut-layer activations for a mini-batch.
struct SmashedBatch {
    int client_id = -1;
    Matrix activations; // B x q
    std::vector<int> labels;
    int round = 0;
    int local_step = 0;
};

struct HistogramSpec {
    double lo = -4.0;
    double hi = 4.0;
    int bins = 64;
};

// L1 distance between the binned, normalized distributions of two scalar
// samples (out-of-range values clamp to the edge bins). 0 for identical
// distributions, 2 for disjoint supports.
double drift_statistic(std::span<const double> values, std::span<const double> reference,
                       const HistogramSpec& spec);

// Model shape shared by every arm: a client submodel up to the cut layer of
// width q, an auxiliary head the client trains against locally, and the
// server submodel fed with smashed activations. Hidden layers use `act`; the
// final aux/server layers emit logits (identity).
struct ModelSpec {
    int n_in = 0;
    int n_classes = 0;
    int cut_width = 0;
    std::vector<int> client_hidden;
    std::vector<int> aux_hidden;
    std::vector<int> server_hidden;
    Activation act = Activation::Tanh;
};

std::vector<LayerSpec> client_layer_specs(const ModelSpec& m);
std::vector<LayerSpec> aux_layer_specs(const ModelSpec& m);
std::vector<LayerSpec> server_layer_specs(const ModelSpec& m);

struct RoundConfig {
    Algorithm algorithm = Algorithm::Heron;
    int rounds = 1;           // T
    int n_clients = 1;        // N
    int local_steps = 1;      // h
    int upload_period = 1;    // k, 1 <= k <= h
    int batch_size = 1;       // B
    double lr_client = 0.01;  // eta_c
    double lr_server = 0.01;  // eta_s
    double mu = 1e-3;
    int probes = 1;           // n_p
    double participation = 1.0; // fraction in (0, 1]
    Optimizer optimizer = Optimizer::Sgd;
    bool drift_enabled = false;
    HistogramSpec drift_hist;
};

// Throws ConfigError on any out-of-range field.
void validate_round_config(const RoundConfig& cfg);

struct ClientState {
    int id = -1;
    DenseNet local;        // client layers then aux layers over one buffer
    int client_layers = 0; // leading layers that form the client submodel
    std::vector<int> shard;
    LedgerCounters ledger;

    // mini-batch schedule: seeded shuffle, sequential slices, drop remainder
    Rng batch_rng{0};
    std::vector<int> order;
    std::size_t cursor = 0;

    // optimizer state (adam), reset at each broadcast
    std::vector<double> opt_m, opt_v;
    std::int64_t opt_t = 0;

    // drift diagnostics
    std::vector<double> drift_ref_hist; // empty until first snapshot
};

struct MainServerState {
    DenseNet net;
    std::deque<SmashedBatch> queue;
    double lr = 0.01;
    Optimizer optimizer = Optimizer::Sgd;
    LedgerCounters ledger;
    std::vector<double> opt_m, opt_v;
    std::int64_t opt_t = 0;
};

struct RoundMetrics {
    int round = 0;
    double train_loss = 0.0;
    double eval_acc = 0.0;
    std::vector<double> client_local_loss; // size N, NaN for non-participants
    LedgerCounters client_cumulative;      // summed over clients, as of round end
    std::vector<int> participants;         // ascending ids
    std::vector<double> drift;             // size N when enabled, else empty
};

struct TrainingResult {
    std::vector<RoundMetrics> rounds;
    std::vector<LedgerCounters> client_ledgers;
    LedgerCounters server_ledger;
    std::vector<int> rounds_participated; // per client
};

// Stage 1: copy the aggregated local-model parameters into the client,
// charging the download (one full local-model exchange per round is charged
// half here, half at aggregation upload).
void broadcast_init(std::span<const double> global_params, ClientState& client);

// Seed of the perturbation ticket used by one client at local step m of
// round t; exposed so the probe directions can be regenerated independently.
std::uint64_t zo_ticket_seed(std::uint64_t master_seed, int client_id, int round, int local_step);

// Stage 2, HERON arm: h seeded ZO steps on the local loss (client + aux).
// Forward passes only; never calls backward and never enables a cache
// (checked). Returns the floor(h/k) smashed uploads in step order; cut
// activations come from the unperturbed base evaluation of the step that
// triggered the upload. local_loss_out, when given, receives the base-point
// loss of the last local step.
std::vector<SmashedBatch> client_local_round(ClientState& client, const RoundConfig& cfg,
                                             const LabeledDataset& train, int round,
                                             std::uint64_t master_seed,
                                             double* local_loss_out = nullptr);

// Stage 2, CSE-FSL-style FO arm: h exact backprop steps on the same local
// loss with activation caching; identical upload schedule, cut activations
// from the cached (pre-update) forward.
std::vector<SmashedBatch> client_local_round_fo(ClientState& client, const RoundConfig& cfg,
                                                const LabeledDataset& train, int round,
                                                std::uint64_t master_seed,
                                                double* local_loss_out = nullptr);

// SFLV2 arm: every local step is a synchronous exchange; the server returns
// the cut-layer gradient and the client backprops its submodel with it.
void client_local_round_sflv2(ClientState& client, MainServerState& server,
                              const RoundConfig& cfg, const LabeledDataset& train, int round,
                              double* local_loss_out = nullptr);

// Stage 3: drain the FIFO queue; per batch one forward, cross entropy,
// backward and optimizer step on the server submodel. Width mismatches raise
// ProtocolError naming the client.
void server_process_queue(MainServerState& server);

// Stage 4: coordinate-wise mean over participants, summed in ascending
// client-id order. Inputs must share one length.
std::vector<double> fed_aggregate(const std::vector<std::span<const double>>& participant_params);

// Deterministic uniform draw of max(1, round(fraction * n)) distinct ids,
// returned ascending.
std::vector<int> select_participants(int n_clients, double fraction, std::uint64_t round_seed);

// Full driver: T rounds of broadcast, local rounds, server processing and
// aggregation, with per-round global train loss / eval accuracy on the
// client+server composite. Deterministic given master_seed.
TrainingResult run_training(const RoundConfig& cfg, const ModelSpec& model,
                            const LabeledDataset& train, const LabeledDataset& eval_set,
                            const PartitionPlan& plan, std::uint64_t master_seed);

// Client+aux local model at the shared initialization every arm of
// run_training starts from (used for pre-training diagnostics).
DenseNet initial_local_model(const ModelSpec& model, std::uint64_t master_seed);

// Closed-form prediction of one client's cumulative counters, used by ledger
// reconciliation. shard_size determines the uniform batch draw min(B, shard).
LedgerCounters predict_client_counters(const RoundConfig& cfg, const ModelSpec& model,
                                       int shard_size, int rounds_participated);

} // namespace heron
