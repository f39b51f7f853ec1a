#pragma once

#include <cstddef>
#include <cstdint>

namespace heron {

enum class Activation { Identity, Relu, Tanh };

namespace kernels {

// Every kernel exists twice: a plain-loop serial reference and an OpenMP
// version parallelized over independent output elements. Per-element
// accumulation order is identical in both, so outputs compare bit-exactly.
// The Exec dispatchers below pick a path at runtime; tests pin serial vs
// parallel equality and the benchmark tool compares their timings.

enum class Exec { Serial, Parallel };

Exec default_exec();
void set_default_exec(Exec mode);

// y[B x out] = act(x[B x in] . W^T + b); W is row-major [out x in].
// Accumulation per element: start from b[o], add products in ascending k.
// When preact is non-null the pre-activation values are written there.
void dense_forward_serial(const double* x, int batch, int in, const double* w,
                          const double* b, int out, Activation act,
                          double* preact, double* y);
void dense_forward_parallel(const double* x, int batch, int in, const double* w,
                            const double* b, int out, Activation act,
                            double* preact, double* y);
void dense_forward(Exec mode, const double* x, int batch, int in, const double* w,
                   const double* b, int out, Activation act,
                   double* preact, double* y);

// dW[out x in] = dy^T . x (batch accumulated ascending), db[out] = column sums of dy.
void dense_grad_params_serial(const double* x, const double* dy, int batch,
                              int in, int out, double* dw, double* db);
void dense_grad_params_parallel(const double* x, const double* dy, int batch,
                                int in, int out, double* dw, double* db);
void dense_grad_params(Exec mode, const double* x, const double* dy, int batch,
                       int in, int out, double* dw, double* db);

// dx[B x in] = dy[B x out] . W[out x in]
void dense_grad_input_serial(const double* dy, const double* w, int batch,
                             int in, int out, double* dx);
void dense_grad_input_parallel(const double* dy, const double* w, int batch,
                               int in, int out, double* dx);
void dense_grad_input(Exec mode, const double* dy, const double* w, int batch,
                      int in, int out, double* dx);

// dpre[i] = dpost[i] * act'(pre[i]); tanh derivative uses the cached post value.
void activation_backward_serial(Activation act, const double* pre, const double* post,
                                const double* dpost, double* dpre, std::size_t n);
void activation_backward_parallel(Activation act, const double* pre, const double* post,
                                  const double* dpost, double* dpre, std::size_t n);
void activation_backward(Exec mode, Activation act, const double* pre, const double* post,
                         const double* dpost, double* dpre, std::size_t n);

// y[i] += a * x[i]
void axpy_serial(double a, const double* x, double* y, std::size_t n);
void axpy_parallel(double a, const double* x, double* y, std::size_t n);
void axpy(Exec mode, double a, const double* x, double* y, std::size_t n);

// Row-wise softmax cross entropy against integer labels. Writes the per-row
// loss -log softmax(logits)[label] and the per-row gradient
// softmax(logits) - onehot(label). Callers sum row_loss serially and apply
// any 1/B scaling themselves so reductions stay order-fixed.
void softmax_xent_rows_serial(const double* logits, const int* labels, int batch,
                              int classes, double* row_loss, double* dlogits);
void softmax_xent_rows_parallel(const double* logits, const int* labels, int batch,
                                int classes, double* row_loss, double* dlogits);
void softmax_xent_rows(Exec mode, const double* logits, const int* labels, int batch,
                       int classes, double* row_loss, double* dlogits);

} // namespace kernels
} // namespace heron
