#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "heron/kernels.hpp"
#include "heron/nn.hpp"
#include "heron/partition.hpp"
#include "heron/protocol.hpp"
#include "heron/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;
using heron::kernels::Exec;

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warmup
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void fill(std::vector<double>& v, heron::Rng& rng) {
    for (double& x : v) x = rng.normal();
}

void bench_dense(int batch, int in, int out, int reps) {
    heron::Rng rng(7);
    std::vector<double> x(static_cast<std::size_t>(batch) * in);
    std::vector<double> w(static_cast<std::size_t>(out) * in);
    std::vector<double> b(out);
    std::vector<double> ys(static_cast<std::size_t>(batch) * out);
    std::vector<double> yp(ys.size());
    fill(x, rng);
    fill(w, rng);
    fill(b, rng);

    double ts = time_ms(
        [&] {
            heron::kernels::dense_forward(Exec::Serial, x.data(), batch, in, w.data(), b.data(),
                                          out, heron::Activation::Tanh, nullptr, ys.data());
        },
        reps);
    double tp = time_ms(
        [&] {
            heron::kernels::dense_forward(Exec::Parallel, x.data(), batch, in, w.data(), b.data(),
                                          out, heron::Activation::Tanh, nullptr, yp.data());
        },
        reps);
    std::printf("dense_forward  B=%-4d %4dx%-4d  serial %8.3f ms  parallel %8.3f ms  "
                "speedup %5.2fx  bits %s\n",
                batch, in, out, ts, tp, ts / tp, bits_equal(ys, yp) ? "equal" : "DIFFER");

    std::vector<double> dy(ys.size());
    fill(dy, rng);
    std::vector<double> dws(w.size()), dbs(b.size()), dwp(w.size()), dbp(b.size());
    ts = time_ms(
        [&] {
            heron::kernels::dense_grad_params(Exec::Serial, x.data(), dy.data(), batch, in, out,
                                              dws.data(), dbs.data());
        },
        reps);
    tp = time_ms(
        [&] {
            heron::kernels::dense_grad_params(Exec::Parallel, x.data(), dy.data(), batch, in, out,
                                              dwp.data(), dbp.data());
        },
        reps);
    std::printf("grad_params    B=%-4d %4dx%-4d  serial %8.3f ms  parallel %8.3f ms  "
                "speedup %5.2fx  bits %s\n",
                batch, in, out, ts, tp, ts / tp,
                bits_equal(dws, dwp) && bits_equal(dbs, dbp) ? "equal" : "DIFFER");

    std::vector<double> dxs(x.size()), dxp(x.size());
    ts = time_ms(
        [&] {
            heron::kernels::dense_grad_input(Exec::Serial, dy.data(), w.data(), batch, in, out,
                                             dxs.data());
        },
        reps);
    tp = time_ms(
        [&] {
            heron::kernels::dense_grad_input(Exec::Parallel, dy.data(), w.data(), batch, in, out,
                                             dxp.data());
        },
        reps);
    std::printf("grad_input     B=%-4d %4dx%-4d  serial %8.3f ms  parallel %8.3f ms  "
                "speedup %5.2fx  bits %s\n",
                batch, in, out, ts, tp, ts / tp, bits_equal(dxs, dxp) ? "equal" : "DIFFER");
}

void bench_client_round(int reps) {
    heron::ModelSpec model;
    model.n_in = 32;
    model.n_classes = 5;
    model.cut_width = 16;
    model.client_hidden = {64};
    model.aux_hidden = {32};
    model.server_hidden = {32};

    heron::LabeledDataset data =
        heron::make_synthetic(512, model.n_in, model.n_classes, 3.0, 1.0, 11);
    heron::PartitionPlan plan = heron::partition(data, 1, heron::PartitionMode::Iid, 1.0, 11);

    heron::RoundConfig cfg;
    cfg.rounds = 1;
    cfg.n_clients = 1;
    cfg.local_steps = 8;
    cfg.upload_period = 2;
    cfg.batch_size = 64;
    cfg.probes = 4;

    auto run_once = [&](Exec exec) {
        heron::kernels::set_default_exec(exec);
        heron::ClientState c;
        c.id = 0;
        c.local = heron::initial_local_model(model, 11);
        c.client_layers = static_cast<int>(heron::client_layer_specs(model).size());
        c.shard = plan.shards[0];
        c.batch_rng = heron::Rng(3);
        heron::client_local_round(c, cfg, data, 1, 11);
    };

    double ts = time_ms([&] { run_once(Exec::Serial); }, reps);
    double tp = time_ms([&] { run_once(Exec::Parallel); }, reps);
    heron::kernels::set_default_exec(Exec::Parallel);
    std::printf("client round   h=8 np=4 B=64      serial %8.3f ms  parallel %8.3f ms  "
                "speedup %5.2fx\n",
                ts, tp, ts / tp);
}

} // namespace

int main() {
    std::printf("serial vs parallel kernels (identical bit patterns required)\n\n");
    bench_dense(64, 256, 256, 20);
    bench_dense(128, 512, 512, 10);
    bench_dense(256, 1024, 1024, 5);
    std::printf("\n");
    bench_client_round(5);
    return 0;
}
