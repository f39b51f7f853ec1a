#pragma once

#include <cstdint>
#include <string>

namespace heron {

enum class Algorithm { Heron, Sflv2, CseFslFo };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm alg);

// Inputs to the closed-form per-update cost model. All counts are scalars
// (not bytes): p samples per uploaded batch, q cut-layer width, size_c/size_a
// client and auxiliary parameter counts, F_c/F_a forward MACs per batch
// through the client and auxiliary submodels, n_p perturbation probes.
struct CostModelInput {
    std::int64_t p = 0;
    std::int64_t q = 0;
    std::int64_t size_c = 0;
    std::int64_t size_a = 0;
    std::int64_t f_c = 0;
    std::int64_t f_a = 0;
    std::int64_t n_p = 1;
};

enum class MemoryClass { Constant, ParameterScaled };

// Client-side communication scalars per local update, parameter exchange
// amortized per update:
//   SFLV2      -> 2pq + 2*size_c
//   CSE-FSL-FO -> pq + 2*(size_c + size_a)
//   HERON      -> pq + 2*(size_c + size_a)   (identical to CSE-FSL-FO)
std::int64_t comm_per_update(Algorithm alg, const CostModelInput& in);

// Per-round communication with the parameter exchange charged once and
// floor(h/k) smashed uploads (SFLV2 exchanges every one of the h steps).
std::int64_t comm_per_round(Algorithm alg, const CostModelInput& in, int h, int k);

// Client-side FLOPs per local update, headline closed forms:
//   SFLV2      -> 3*F_c
//   CSE-FSL-FO -> 3*(F_c + F_a)
//   HERON      -> n_p*(F_c + F_a)
std::int64_t flops_per_update(Algorithm alg, const CostModelInput& in);

// Same, under the implemented shared-base probe scheme where a HERON update
// spends (n_p + 1) forward passes (n_p = 1 reproduces the standard two-point
// cost). FO algorithms are unchanged.
std::int64_t flops_per_update_measured(Algorithm alg, const CostModelInput& in);

// HERON needs no activation cache: constant peak memory. FO baselines cache
// activations scaling with the cached submodel size.
MemoryClass peak_memory_class(Algorithm alg);

// Per-client cumulative counters, updated at protocol charge points only
// (evaluation and diagnostics are free). Monotone except the high-water mark.
struct LedgerCounters {
    std::int64_t uploaded_scalars = 0;
    std::int64_t downloaded_scalars = 0;
    std::int64_t forward_ops = 0;
    std::int64_t backward_ops = 0;
    std::int64_t activation_cache_hwm = 0;

    void note_cache(std::int64_t scalars) {
        if (scalars > activation_cache_hwm) activation_cache_hwm = scalars;
    }
    LedgerCounters& operator+=(const LedgerCounters& o) {
        uploaded_scalars += o.uploaded_scalars;
        downloaded_scalars += o.downloaded_scalars;
        forward_ops += o.forward_ops;
        backward_ops += o.backward_ops;
        if (o.activation_cache_hwm > activation_cache_hwm)
            activation_cache_hwm = o.activation_cache_hwm;
        return *this;
    }
};

// Compares measured counters against an expected prediction, field by field.
// Throws ReconcileError naming the first mismatching category.
struct ReconcileReport {
    bool ok = false;
    std::string detail;
};
ReconcileReport reconcile(const LedgerCounters& measured, const LedgerCounters& predicted,
                          const std::string& context);

} // namespace heron
