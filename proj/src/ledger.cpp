#include "heron/ledger.hpp"

#include "heron/errors.hpp"

namespace heron {

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "heron") return Algorithm::Heron;
    if (name == "sflv2") return Algorithm::Sflv2;
    if (name == "cse_fsl_fo") return Algorithm::CseFslFo;
    throw ConfigError("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm alg) {
    switch (alg) {
        case Algorithm::Heron: return "heron";
        case Algorithm::Sflv2: return "sflv2";
        case Algorithm::CseFslFo: return "cse_fsl_fo";
    }
    return "heron";
}

namespace {
void check_input(const CostModelInput& in) {
    if (in.p <= 0 || in.q <= 0 || in.size_c <= 0 || in.size_a <= 0 || in.f_c <= 0 ||
        in.f_a <= 0 || in.n_p <= 0)
        throw ConfigError("cost model inputs must all be positive");
}
} // namespace

std::int64_t comm_per_update(Algorithm alg, const CostModelInput& in) {
    check_input(in);
    switch (alg) {
        case Algorithm::Sflv2:
            return 2 * in.p * in.q + 2 * in.size_c;
        case Algorithm::CseFslFo:
        case Algorithm::Heron:
            return in.p * in.q + 2 * (in.size_c + in.size_a);
    }
    return 0;
}

std::int64_t comm_per_round(Algorithm alg, const CostModelInput& in, int h, int k) {
    check_input(in);
    if (h < 1) throw ConfigError("local step count h must be >= 1");
    if (k < 1 || k > h) throw ConfigError("upload period k must satisfy 1 <= k <= h");
    switch (alg) {
        case Algorithm::Sflv2:
            return static_cast<std::int64_t>(h) * 2 * in.p * in.q + 2 * in.size_c;
        case Algorithm::CseFslFo:
        case Algorithm::Heron:
            return static_cast<std::int64_t>(h / k) * in.p * in.q +
                   2 * (in.size_c + in.size_a);
    }
    return 0;
}

std::int64_t flops_per_update(Algorithm alg, const CostModelInput& in) {
    check_input(in);
    switch (alg) {
        case Algorithm::Sflv2:
            return 3 * in.f_c;
        case Algorithm::CseFslFo:
            return 3 * (in.f_c + in.f_a);
        case Algorithm::Heron:
            return in.n_p * (in.f_c + in.f_a);
    }
    return 0;
}

std::int64_t flops_per_update_measured(Algorithm alg, const CostModelInput& in) {
    check_input(in);
    if (alg == Algorithm::Heron) return (in.n_p + 1) * (in.f_c + in.f_a);
    return flops_per_update(alg, in);
}

MemoryClass peak_memory_class(Algorithm alg) {
    return alg == Algorithm::Heron ? MemoryClass::Constant : MemoryClass::ParameterScaled;
}

ReconcileReport reconcile(const LedgerCounters& measured, const LedgerCounters& predicted,
                          const std::string& context) {
    auto fail = [&](const std::string& category, std::int64_t got, std::int64_t want) {
        throw ReconcileError(context + ": " + category + " measured " + std::to_string(got) +
                             " != predicted " + std::to_string(want));
    };
    if (measured.uploaded_scalars != predicted.uploaded_scalars)
        fail("uploaded_scalars", measured.uploaded_scalars, predicted.uploaded_scalars);
    if (measured.downloaded_scalars != predicted.downloaded_scalars)
        fail("downloaded_scalars", measured.downloaded_scalars, predicted.downloaded_scalars);
    if (measured.forward_ops != predicted.forward_ops)
        fail("forward_ops", measured.forward_ops, predicted.forward_ops);
    if (measured.backward_ops != predicted.backward_ops)
        fail("backward_ops", measured.backward_ops, predicted.backward_ops);
    if (measured.activation_cache_hwm != predicted.activation_cache_hwm)
        fail("activation_cache_hwm", measured.activation_cache_hwm,
             predicted.activation_cache_hwm);
    ReconcileReport rep;
    rep.ok = true;
    rep.detail = context + ": all counters match";
    return rep;
}

} // namespace heron
