#include "heron/kernels.hpp"

#include <cmath>

namespace heron::kernels {

namespace {

Exec g_default = Exec::Parallel;

inline double apply_act(Activation act, double z) {
    switch (act) {
        case Activation::Identity: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
    }
    return z;
}

inline double dot_row(const double* x, const double* w, int n, double acc) {
    for (int k = 0; k < n; ++k) acc += x[k] * w[k];
    return acc;
}

} // namespace

Exec default_exec() { return g_default; }
void set_default_exec(Exec mode) { g_default = mode; }

void dense_forward_serial(const double* x, int batch, int in, const double* w,
                          const double* b, int out, Activation act,
                          double* preact, double* y) {
    for (int r = 0; r < batch; ++r) {
        const double* xr = x + static_cast<std::size_t>(r) * in;
        for (int o = 0; o < out; ++o) {
            double z = dot_row(xr, w + static_cast<std::size_t>(o) * in, in, b[o]);
            if (preact) preact[static_cast<std::size_t>(r) * out + o] = z;
            y[static_cast<std::size_t>(r) * out + o] = apply_act(act, z);
        }
    }
}

void dense_forward_parallel(const double* x, int batch, int in, const double* w,
                            const double* b, int out, Activation act,
                            double* preact, double* y) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < batch; ++r) {
        const double* xr = x + static_cast<std::size_t>(r) * in;
        for (int o = 0; o < out; ++o) {
            double z = dot_row(xr, w + static_cast<std::size_t>(o) * in, in, b[o]);
            if (preact) preact[static_cast<std::size_t>(r) * out + o] = z;
            y[static_cast<std::size_t>(r) * out + o] = apply_act(act, z);
        }
    }
}

void dense_forward(Exec mode, const double* x, int batch, int in, const double* w,
                   const double* b, int out, Activation act,
                   double* preact, double* y) {
    if (mode == Exec::Serial)
        dense_forward_serial(x, batch, in, w, b, out, act, preact, y);
    else
        dense_forward_parallel(x, batch, in, w, b, out, act, preact, y);
}

void dense_grad_params_serial(const double* x, const double* dy, int batch,
                              int in, int out, double* dw, double* db) {
    for (int o = 0; o < out; ++o) {
        double* dwo = dw + static_cast<std::size_t>(o) * in;
        for (int k = 0; k < in; ++k) dwo[k] = 0.0;
        double acc = 0.0;
        for (int r = 0; r < batch; ++r) {
            double g = dy[static_cast<std::size_t>(r) * out + o];
            const double* xr = x + static_cast<std::size_t>(r) * in;
            for (int k = 0; k < in; ++k) dwo[k] += g * xr[k];
            acc += g;
        }
        db[o] = acc;
    }
}

void dense_grad_params_parallel(const double* x, const double* dy, int batch,
                                int in, int out, double* dw, double* db) {
#pragma omp parallel for schedule(static)
    for (int o = 0; o < out; ++o) {
        double* dwo = dw + static_cast<std::size_t>(o) * in;
        for (int k = 0; k < in; ++k) dwo[k] = 0.0;
        double acc = 0.0;
        for (int r = 0; r < batch; ++r) {
            double g = dy[static_cast<std::size_t>(r) * out + o];
            const double* xr = x + static_cast<std::size_t>(r) * in;
            for (int k = 0; k < in; ++k) dwo[k] += g * xr[k];
            acc += g;
        }
        db[o] = acc;
    }
}

void dense_grad_params(Exec mode, const double* x, const double* dy, int batch,
                       int in, int out, double* dw, double* db) {
    if (mode == Exec::Serial)
        dense_grad_params_serial(x, dy, batch, in, out, dw, db);
    else
        dense_grad_params_parallel(x, dy, batch, in, out, dw, db);
}

void dense_grad_input_serial(const double* dy, const double* w, int batch,
                             int in, int out, double* dx) {
    for (int r = 0; r < batch; ++r) {
        const double* dyr = dy + static_cast<std::size_t>(r) * out;
        double* dxr = dx + static_cast<std::size_t>(r) * in;
        for (int k = 0; k < in; ++k) {
            double acc = 0.0;
            for (int o = 0; o < out; ++o) acc += dyr[o] * w[static_cast<std::size_t>(o) * in + k];
            dxr[k] = acc;
        }
    }
}

void dense_grad_input_parallel(const double* dy, const double* w, int batch,
                               int in, int out, double* dx) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < batch; ++r) {
        const double* dyr = dy + static_cast<std::size_t>(r) * out;
        double* dxr = dx + static_cast<std::size_t>(r) * in;
        for (int k = 0; k < in; ++k) {
            double acc = 0.0;
            for (int o = 0; o < out; ++o) acc += dyr[o] * w[static_cast<std::size_t>(o) * in + k];
            dxr[k] = acc;
        }
    }
}

void dense_grad_input(Exec mode, const double* dy, const double* w, int batch,
                      int in, int out, double* dx) {
    if (mode == Exec::Serial)
        dense_grad_input_serial(dy, w, batch, in, out, dx);
    else
        dense_grad_input_parallel(dy, w, batch, in, out, dx);
}

namespace {
inline double act_grad(Activation act, double pre, double post, double dpost) {
    switch (act) {
        case Activation::Identity: return dpost;
        case Activation::Relu: return pre > 0.0 ? dpost : 0.0;
        case Activation::Tanh: return dpost * (1.0 - post * post);
    }
    return dpost;
}
} // namespace

void activation_backward_serial(Activation act, const double* pre, const double* post,
                                const double* dpost, double* dpre, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dpre[i] = act_grad(act, pre[i], post[i], dpost[i]);
}

void activation_backward_parallel(Activation act, const double* pre, const double* post,
                                  const double* dpost, double* dpre, std::size_t n) {
    const std::int64_t m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) dpre[i] = act_grad(act, pre[i], post[i], dpost[i]);
}

void activation_backward(Exec mode, Activation act, const double* pre, const double* post,
                         const double* dpost, double* dpre, std::size_t n) {
    if (mode == Exec::Serial)
        activation_backward_serial(act, pre, post, dpost, dpre, n);
    else
        activation_backward_parallel(act, pre, post, dpost, dpre, n);
}

void axpy_serial(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy_parallel(double a, const double* x, double* y, std::size_t n) {
    const std::int64_t m = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) y[i] += a * x[i];
}

void axpy(Exec mode, double a, const double* x, double* y, std::size_t n) {
    if (mode == Exec::Serial)
        axpy_serial(a, x, y, n);
    else
        axpy_parallel(a, x, y, n);
}

namespace {
inline void xent_row(const double* lr, int label, int classes, double* loss, double* dr) {
    double mx = lr[0];
    for (int c = 1; c < classes; ++c)
        if (lr[c] > mx) mx = lr[c];
    double z = 0.0;
    for (int c = 0; c < classes; ++c) z += std::exp(lr[c] - mx);
    double logz = std::log(z);
    *loss = logz - (lr[label] - mx);
    for (int c = 0; c < classes; ++c) {
        double p = std::exp(lr[c] - mx) / z;
        dr[c] = p - (c == label ? 1.0 : 0.0);
    }
}
} // namespace

void softmax_xent_rows_serial(const double* logits, const int* labels, int batch,
                              int classes, double* row_loss, double* dlogits) {
    for (int r = 0; r < batch; ++r)
        xent_row(logits + static_cast<std::size_t>(r) * classes, labels[r], classes,
                 row_loss + r, dlogits + static_cast<std::size_t>(r) * classes);
}

void softmax_xent_rows_parallel(const double* logits, const int* labels, int batch,
                                int classes, double* row_loss, double* dlogits) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < batch; ++r)
        xent_row(logits + static_cast<std::size_t>(r) * classes, labels[r], classes,
                 row_loss + r, dlogits + static_cast<std::size_t>(r) * classes);
}

void softmax_xent_rows(Exec mode, const double* logits, const int* labels, int batch,
                       int classes, double* row_loss, double* dlogits) {
    if (mode == Exec::Serial)
        softmax_xent_rows_serial(logits, labels, batch, classes, row_loss, dlogits);
    else
        softmax_xent_rows_parallel(logits, labels, batch, classes, row_loss, dlogits);
}

} // namespace heron::kernels
