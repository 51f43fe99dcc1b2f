// Copyright 2026 The LongSeq Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "longseq/core/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "longseq/core/error.h"

namespace longseq {
namespace {

void require_rank2(const Tensor& t, std::string_view op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + " expects rank-2 input, got " +
                         shape_string(t.shape()));
  }
}

[[noreturn]] void shape_mismatch(std::string_view op, const Tensor& a, const Tensor& b) {
  throw DimensionError(std::string(op) + " shape mismatch: " + shape_string(a.shape()) +
                       " vs " + shape_string(b.shape()));
}

Tape& tape_of(Var a, Var b) {
  if (a.tape() != b.tape()) throw StateError("operands recorded on different tapes");
  return *a.tape();
}

// out(m x n) += a(m x k) * b(k x n)
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = po + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

// out(m x n) += a(m x k) * b(n x k)^T
void gemm_nt(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = pb + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      po[i * n + j] += s;
    }
  }
}

// out(k x n) += a(m x k)^T * b(m x n)
void gemm_tn(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* brow = pb + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      double* orow = po + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& tape = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "matmul");
  require_rank2(bv, "matmul");
  if (av.cols() != bv.rows()) shape_mismatch("matmul", av, bv);
  Tensor out = Tensor::zeros(av.rows(), bv.cols());
  gemm_nn(av, bv, out);
  const NodeId ia = a.id(), ib = b.id();
  return tape.record("matmul", std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
    if (t.requires_grad(ia)) gemm_nt(g, t.value(ib), t.grad_buffer(ia));
    if (t.requires_grad(ib)) gemm_tn(t.value(ia), g, t.grad_buffer(ib));
  });
}

Var matmul_nt(Var a, Var b) {
  Tape& tape = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "matmul_nt");
  require_rank2(bv, "matmul_nt");
  if (av.cols() != bv.cols()) shape_mismatch("matmul_nt", av, bv);
  Tensor out = Tensor::zeros(av.rows(), bv.rows());
  gemm_nt(av, bv, out);
  const NodeId ia = a.id(), ib = b.id();
  return tape.record("matmul_nt", std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
    if (t.requires_grad(ia)) gemm_nn(g, t.value(ib), t.grad_buffer(ia));
    if (t.requires_grad(ib)) gemm_tn(g, t.value(ia), t.grad_buffer(ib));
  });
}

Var hadamard(Var a, Var b) {
  Tape& tape = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_mismatch("hadamard", av, bv);
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const NodeId ia = a.id(), ib = b.id();
  return tape.record("hadamard", std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_buffer(ia);
      const Tensor& bv = t.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_buffer(ib);
      const Tensor& av = t.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var add(Var a, Var b) {
  Tape& tape = tape_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_mismatch("add", av, bv);
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const NodeId ia = a.id(), ib = b.id();
  return tape.record("add", std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor&, const Tensor& g) {
    for (NodeId id : {ia, ib}) {
      if (!t.requires_grad(id)) continue;
      Tensor& gx = t.grad_buffer(id);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    }
  });
}

Var add_row(Var a, Var row) {
  Tape& tape = tape_of(a, row);
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  require_rank2(av, "add_row");
  require_rank2(rv, "add_row");
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_mismatch("add_row", av, rv);
  Tensor out = av;
  const std::size_t n = av.cols();
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += rv[c];
  }
  const NodeId ia = a.id(), ir = row.id();
  return tape.record("add_row", std::move(out), {a, row}, [ia, ir, n](Tape& t, const Tensor&, const Tensor& g) {
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_buffer(ia);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(ir)) {
      Tensor& gr = t.grad_buffer(ir);
      for (std::size_t i = 0; i < g.size(); ++i) gr[i % n] += g[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tape& tape = *a.tape();
  Tensor out = a.value();
  for (double& v : out.data()) v *= factor;
  const NodeId ia = a.id();
  return tape.record("scale", std::move(out), {a}, [ia, factor](Tape& t, const Tensor&, const Tensor& g) {
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

Var broadcast_rows(Var row, std::size_t m) {
  Tape& tape = *row.tape();
  const Tensor& rv = row.value();
  require_rank2(rv, "broadcast_rows");
  if (rv.rows() != 1) {
    throw DimensionError("broadcast_rows expects a single row, got " + shape_string(rv.shape()));
  }
  const std::size_t n = rv.cols();
  Tensor out = Tensor::zeros(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    std::copy(rv.data().begin(), rv.data().end(), out.row_span(r).begin());
  }
  const NodeId ir = row.id();
  return tape.record("broadcast_rows", std::move(out), {row}, [ir, n](Tape& t, const Tensor&, const Tensor& g) {
    Tensor& gr = t.grad_buffer(ir);
    for (std::size_t i = 0; i < g.size(); ++i) gr[i % n] += g[i];
  });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  Tape& tape = *a.tape();
  const Tensor& av = a.value();
  if (rows * cols != av.size()) {
    throw DimensionError("reshape " + shape_string(av.shape()) + " to " +
                         shape_string({rows, cols}));
  }
  Tensor out({rows, cols}, av.storage());
  const NodeId ia = a.id();
  return tape.record("reshape", std::move(out), {a}, [ia](Tape& t, const Tensor&, const Tensor& g) {
    Tensor& ga = t.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var softmax_rows(Var x, const Mask& mask) {
  Tape& tape = *x.tape();
  const Tensor& xv = x.value();
  require_rank2(xv, "softmax_rows");
  if (!mask.empty() && mask.size() != xv.size()) {
    throw DimensionError("softmax_rows mask has " + std::to_string(mask.size()) +
                         " entries for input " + shape_string(xv.shape()));
  }
  const std::size_t m = xv.rows(), n = xv.cols();
  Tensor out = Tensor::zeros(m, n);
  for (std::size_t r = 0; r < m; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (mask.empty() || mask[r * n + c]) mx = std::max(mx, xv[r * n + c]);
    }
    if (mx == -std::numeric_limits<double>::infinity()) {
      throw DimensionError("softmax_rows: row " + std::to_string(r) + " is fully masked");
    }
    double z = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (mask.empty() || mask[r * n + c]) {
        const double e = std::exp(xv[r * n + c] - mx);
        out[r * n + c] = e;
        z += e;
      }
    }
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] /= z;
  }
  const NodeId ix = x.id();
  return tape.record("softmax_rows", std::move(out), {x},
                     [ix, m, n](Tape& t, const Tensor& y, const Tensor& g) {
                       Tensor& gx = t.grad_buffer(ix);
                       for (std::size_t r = 0; r < m; ++r) {
                         double dot = 0.0;
                         for (std::size_t c = 0; c < n; ++c) dot += g[r * n + c] * y[r * n + c];
                         for (std::size_t c = 0; c < n; ++c) {
                           gx[r * n + c] += y[r * n + c] * (g[r * n + c] - dot);
                         }
                       }
                     });
}

Var gather(Var table, const std::vector<std::int32_t>& ids, std::string_view what) {
  Tape& tape = *table.tape();
  const Tensor& tv = table.value();
  require_rank2(tv, "gather");
  const std::size_t v = tv.rows(), d = tv.cols();
  Tensor out = Tensor::zeros(ids.size(), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= v) {
      throw IndexError("id " + std::to_string(ids[i]) + " out of range for vocabulary '" +
                       std::string(what) + "' of size " + std::to_string(v));
    }
    auto src = tv.row_span(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), out.row_span(i).begin());
  }
  const NodeId it = table.id();
  return tape.record("gather", std::move(out), {table},
                     [it, ids, d](Tape& t, const Tensor&, const Tensor& g) {
                       Tensor& gt = t.grad_buffer(it);
                       for (std::size_t i = 0; i < ids.size(); ++i) {
                         double* dst = gt.data().data() + static_cast<std::size_t>(ids[i]) * d;
                         const double* src = g.data().data() + i * d;
                         for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
                       }
                     });
}

Var concat_last_axis(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_last_axis of zero tensors");
  Tape& tape = *parts.front().tape();
  const std::size_t m = parts.front().value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    const Tensor& pv = p.value();
    require_rank2(pv, "concat_last_axis");
    if (pv.rows() != m) shape_mismatch("concat_last_axis", parts.front().value(), pv);
    widths.push_back(pv.cols());
    total += pv.cols();
  }
  Tensor out = Tensor::zeros(m, total);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& pv = parts[k].value();
    for (std::size_t r = 0; r < m; ++r) {
      std::copy(pv.row_span(r).begin(), pv.row_span(r).end(), out.row_span(r).begin() + off);
    }
    off += widths[k];
  }
  std::vector<NodeId> ids;
  for (const Var& p : parts) ids.push_back(p.id());
  return tape.record("concat_last_axis", std::move(out), parts,
                     [ids, widths, m, total](Tape& t, const Tensor&, const Tensor& g) {
                       std::size_t off = 0;
                       for (std::size_t k = 0; k < ids.size(); ++k) {
                         if (t.requires_grad(ids[k])) {
                           Tensor& gp = t.grad_buffer(ids[k]);
                           for (std::size_t r = 0; r < m; ++r) {
                             for (std::size_t c = 0; c < widths[k]; ++c) {
                               gp[r * widths[k] + c] += g[r * total + off + c];
                             }
                           }
                         }
                         off += widths[k];
                       }
                     });
}

Var sum_axis(Var a, int axis) {
  Tape& tape = *a.tape();
  const Tensor& av = a.value();
  require_rank2(av, "sum_axis");
  if (axis != 0 && axis != 1) throw DimensionError("sum_axis axis must be 0 or 1");
  const std::size_t m = av.rows(), n = av.cols();
  Tensor out = axis == 0 ? Tensor::zeros(1, n) : Tensor::zeros(m, 1);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) out[axis == 0 ? c : r] += av[r * n + c];
  }
  const NodeId ia = a.id();
  return tape.record("sum_axis", std::move(out), {a},
                     [ia, axis, m, n](Tape& t, const Tensor&, const Tensor& g) {
                       Tensor& ga = t.grad_buffer(ia);
                       for (std::size_t r = 0; r < m; ++r) {
                         for (std::size_t c = 0; c < n; ++c) ga[r * n + c] += g[axis == 0 ? c : r];
                       }
                     });
}

namespace {
double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
}  // namespace

Var sigmoid(Var a) {
  Tape& tape = *a.tape();
  Tensor out = a.value();
  for (double& v : out.data()) v = sigmoid_scalar(v);
  const NodeId ia = a.id();
  return tape.record("sigmoid", std::move(out), {a},
                     [ia](Tape& t, const Tensor& y, const Tensor& g) {
                       Tensor& ga = t.grad_buffer(ia);
                       for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
                     });
}

Var silu(Var a) {
  Tape& tape = *a.tape();
  Tensor out = a.value();
  for (double& v : out.data()) v = v * sigmoid_scalar(v);
  const NodeId ia = a.id();
  return tape.record("silu", std::move(out), {a},
                     [ia](Tape& t, const Tensor&, const Tensor& g) {
                       const Tensor& x = t.value(ia);
                       Tensor& ga = t.grad_buffer(ia);
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         const double s = sigmoid_scalar(x[i]);
                         ga[i] += g[i] * (s + x[i] * s * (1.0 - s));
                       }
                     });
}

Var dense_layer(Var x, Var weight, Var bias, Activation act) {
  Var z = add_row(matmul(x, weight), bias);
  switch (act) {
    case Activation::kSigmoid:
      return sigmoid(z);
    case Activation::kSilu:
      return silu(z);
    case Activation::kNone:
      break;
  }
  return z;
}

Var bce_loss(Var p, const std::vector<double>& labels) {
  Tape& tape = *p.tape();
  const Tensor& pv = p.value();
  require_rank2(pv, "bce_loss");
  if (pv.cols() != 1 || pv.rows() != labels.size()) {
    throw DimensionError("bce_loss: probabilities " + shape_string(pv.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const double m = static_cast<double>(labels.size());
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double q = std::clamp(pv[i], kProbClamp, 1.0 - kProbClamp);
    total -= labels[i] * std::log(q) + (1.0 - labels[i]) * std::log(1.0 - q);
  }
  const NodeId ip = p.id();
  return tape.record("bce_loss", Tensor::scalar(total / m), {p},
                     [ip, labels, m](Tape& t, const Tensor&, const Tensor& g) {
                       const Tensor& pv = t.value(ip);
                       Tensor& gp = t.grad_buffer(ip);
                       for (std::size_t i = 0; i < labels.size(); ++i) {
                         if (pv[i] < kProbClamp || pv[i] > 1.0 - kProbClamp) continue;
                         const double y = labels[i], q = pv[i];
                         gp[i] += g[0] * (-y / q + (1.0 - y) / (1.0 - q)) / m;
                       }
                     });
}

}  // namespace longseq
