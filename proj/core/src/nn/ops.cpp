#include "aomd/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aomd/error.hpp"
#include "kernels.hpp"

namespace aomd::nn {

namespace {

[[noreturn]] void mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shapes " + a.shape_string() + " and " + b.shape_string() +
                   " do not conform");
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                     t.shape_string());
  }
}

Tape& tape_of(const char* op, std::initializer_list<Var> vars) {
  Tape* t = nullptr;
  for (const Var& v : vars) {
    if (!v.valid()) throw ShapeError(std::string(op) + ": uninitialized variable");
    if (t == nullptr) t = v.tape();
    if (v.tape() != t) throw ShapeError(std::string(op) + ": operands live on different tapes");
  }
  return *t;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& tape = tape_of("matmul", {a, b});
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank("matmul", av, 2);
  require_rank("matmul", bv, 2);
  if (av.cols() != bv.rows()) mismatch("matmul", av, bv);
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* row = &out.values()[i * n];
    for (std::size_t p = 0; p < k; ++p) kernels::axpy(av.at(i, p), &bv.values()[p * n], row, n);
  }
  const auto ia = a.id(), ib = b.id();
  return tape.record("matmul", std::move(out), {a, b}, [ia, ib, m, k, n](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    const Tensor& av = t.value(ia);
    const Tensor& bv = t.value(ib);
    if (t.requires_grad(ia)) {
      // dA = G B^T
      Tensor& ga = t.grad(ia);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          ga.values()[i * k + p] += kernels::dot(&g.values()[i * n], &bv.values()[p * n], n);
        }
      }
    }
    if (t.requires_grad(ib)) {
      // dB = A^T G
      Tensor& gb = t.grad(ib);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          kernels::axpy(av.values()[i * k + p], &g.values()[i * n], &gb.values()[p * n], n);
        }
      }
    }
  });
}

Var matvec(Var w, Var x) {
  Tape& tape = tape_of("matvec", {w, x});
  const Tensor& wv = w.value();
  const Tensor& xv = x.value();
  require_rank("matvec", wv, 2);
  require_rank("matvec", xv, 1);
  if (wv.cols() != xv.size()) mismatch("matvec", wv, xv);
  const std::size_t m = wv.rows(), n = wv.cols();
  Tensor out({m});
  for (std::size_t i = 0; i < m; ++i) out[i] = kernels::dot(&wv.values()[i * n], xv.values().data(), n);
  const auto iw = w.id(), ix = x.id();
  return tape.record("matvec", std::move(out), {w, x}, [iw, ix, m, n](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    if (t.requires_grad(iw)) {
      const Tensor& xv = t.value(ix);
      Tensor& gw = t.grad(iw);
      for (std::size_t i = 0; i < m; ++i) kernels::axpy(g[i], xv.values().data(), &gw.values()[i * n], n);
    }
    if (t.requires_grad(ix)) {
      const Tensor& wv = t.value(iw);
      Tensor& gx = t.grad(ix);
      for (std::size_t i = 0; i < m; ++i) kernels::axpy(g[i], &wv.values()[i * n], gx.values().data(), n);
    }
  });
}

Var linear(Var w, Var x, Var b) { return add(matvec(w, x), b); }

Var add(Var a, Var b) {
  Tape& tape = tape_of("add", {a, b});
  if (!a.value().same_shape(b.value())) mismatch("add", a.value(), b.value());
  Tensor out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const auto ia = a.id(), ib = b.id();
  return tape.record("add", std::move(out), {a, b}, [ia, ib](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    for (auto id : {ia, ib}) {
      if (!t.requires_grad(id)) continue;
      Tensor& gi = t.grad(id);
      kernels::axpy(1.0, g.values().data(), gi.values().data(), g.size());
    }
  });
}

Var mul(Var a, Var b) {
  Tape& tape = tape_of("mul", {a, b});
  if (!a.value().same_shape(b.value())) mismatch("mul", a.value(), b.value());
  Tensor out = a.value();
  const auto& bv = b.value().values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const auto ia = a.id(), ib = b.id();
  return tape.record("mul", std::move(out), {a, b}, [ia, ib](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad(ia);
      const Tensor& bv = t.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad(ib);
      const Tensor& av = t.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tape& tape = tape_of("scale", {a});
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  const auto ia = a.id();
  return tape.record("scale", std::move(out), {a}, [ia, factor](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    kernels::axpy(factor, g.values().data(), t.grad(ia).values().data(), g.size());
  });
}

Var add_columns(Var m, Var b) {
  Tape& tape = tape_of("add_columns", {m, b});
  const Tensor& mv = m.value();
  const Tensor& bv = b.value();
  require_rank("add_columns", mv, 2);
  require_rank("add_columns", bv, 1);
  if (mv.rows() != bv.size()) mismatch("add_columns", mv, bv);
  const std::size_t rows = mv.rows(), cols = mv.cols();
  Tensor out = mv;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) += bv[r];
  }
  const auto im = m.id(), ib = b.id();
  return tape.record("add_columns", std::move(out), {m, b}, [im, ib, rows, cols](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    if (t.requires_grad(im)) kernels::axpy(1.0, g.values().data(), t.grad(im).values().data(), g.size());
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad(ib);
      for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) s += g.at(r, c);
        gb[r] += s;
      }
    }
  });
}

Var transpose(Var a) {
  Tape& tape = tape_of("transpose", {a});
  const Tensor& av = a.value();
  require_rank("transpose", av, 2);
  const std::size_t rows = av.rows(), cols = av.cols();
  Tensor out({cols, rows});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.at(c, r) = av.at(r, c);
  }
  const auto ia = a.id();
  return tape.record("transpose", std::move(out), {a}, [ia, rows, cols](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) ga.at(r, c) += g.at(c, r);
    }
  });
}

Var tanh(Var a) {
  Tape& tape = tape_of("tanh", {a});
  Tensor out = a.value();
  for (double& v : out.values()) v = std::tanh(v);
  const auto ia = a.id();
  return tape.record("tanh", std::move(out), {a}, [ia](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var sigmoid(Var a) {
  Tape& tape = tape_of("sigmoid", {a});
  Tensor out = a.value();
  for (double& v : out.values()) v = kernels::sigmoid(v);
  const auto ia = a.id();
  return tape.record("sigmoid", std::move(out), {a}, [ia](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var softmax(Var a) {
  Tape& tape = tape_of("softmax", {a});
  const Tensor& av = a.value();
  require_rank("softmax", av, 1);
  if (av.empty()) throw ShapeError("softmax: empty vector");
  Tensor out = av;
  kernels::softmax_inplace(out.values().data(), out.size());
  const auto ia = a.id();
  return tape.record("softmax", std::move(out), {a}, [ia](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    const Tensor& y = t.value(self);
    const double inner = kernels::dot(g.values().data(), y.values().data(), g.size());
    Tensor& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += y[i] * (g[i] - inner);
  });
}

Var concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  Tape& tape = *parts.front().tape();
  std::vector<double> values;
  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> offsets;
  for (const Var& p : parts) {
    if (p.tape() != &tape) throw ShapeError("concat: operands live on different tapes");
    require_rank("concat", p.value(), 1);
    offsets.push_back(values.size());
    ids.push_back(p.id());
    values.insert(values.end(), p.value().values().begin(), p.value().values().end());
  }
  Tensor out = Tensor::vector(std::move(values));
  return tape.record("concat", std::move(out), parts, [ids, offsets](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!t.requires_grad(ids[k])) continue;
      Tensor& gk = t.grad(ids[k]);
      kernels::axpy(1.0, &g.values()[offsets[k]], gk.values().data(), gk.size());
    }
  });
}

Var stack_columns(const std::vector<Var>& columns) {
  if (columns.empty()) throw ShapeError("stack_columns: no operands");
  Tape& tape = *columns.front().tape();
  const std::size_t rows = columns.front().value().size();
  const std::size_t cols = columns.size();
  Tensor out({rows, cols});
  std::vector<std::uint32_t> ids;
  for (std::size_t c = 0; c < cols; ++c) {
    const Tensor& v = columns[c].value();
    if (columns[c].tape() != &tape) throw ShapeError("stack_columns: operands live on different tapes");
    require_rank("stack_columns", v, 1);
    if (v.size() != rows) mismatch("stack_columns", columns.front().value(), v);
    for (std::size_t r = 0; r < rows; ++r) out.at(r, c) = v[r];
    ids.push_back(columns[c].id());
  }
  return tape.record("stack_columns", std::move(out), columns, [ids, rows](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    for (std::size_t c = 0; c < ids.size(); ++c) {
      if (!t.requires_grad(ids[c])) continue;
      Tensor& gc = t.grad(ids[c]);
      for (std::size_t r = 0; r < rows; ++r) gc[r] += g.at(r, c);
    }
  });
}

Var concat_rows(Var top, Var bottom) {
  Tape& tape = tape_of("concat_rows", {top, bottom});
  const Tensor& tv = top.value();
  const Tensor& bv = bottom.value();
  require_rank("concat_rows", tv, 2);
  require_rank("concat_rows", bv, 2);
  if (tv.cols() != bv.cols()) mismatch("concat_rows", tv, bv);
  std::vector<double> values(tv.values());
  values.insert(values.end(), bv.values().begin(), bv.values().end());
  const std::size_t split = tv.size();
  Tensor out({tv.rows() + bv.rows(), tv.cols()}, std::move(values));
  const auto it = top.id(), ib = bottom.id();
  return tape.record("concat_rows", std::move(out), {top, bottom}, [it, ib, split](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    if (t.requires_grad(it)) kernels::axpy(1.0, g.values().data(), t.grad(it).values().data(), split);
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad(ib);
      kernels::axpy(1.0, &g.values()[split], gb.values().data(), gb.size());
    }
  });
}

Var mean_columns(Var m) {
  Tape& tape = tape_of("mean_columns", {m});
  const Tensor& mv = m.value();
  require_rank("mean_columns", mv, 2);
  const std::size_t rows = mv.rows(), cols = mv.cols();
  if (cols == 0) throw ShapeError("mean_columns: matrix has no columns");
  Tensor out({rows});
  const double inv = 1.0 / static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += mv.at(r, c);
    out[r] = s * inv;
  }
  const auto im = m.id();
  return tape.record("mean_columns", std::move(out), {m}, [im, rows, cols, inv](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad_view(self);
    Tensor& gm = t.grad(im);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) gm.at(r, c) += g[r] * inv;
    }
  });
}

Var element(Var v, std::size_t index) {
  Tape& tape = tape_of("element", {v});
  if (index >= v.value().size()) {
    throw ShapeError("element: index " + std::to_string(index) + " out of range for shape " +
                     v.value().shape_string());
  }
  const auto iv = v.id();
  return tape.record("element", Tensor::scalar(v.value()[index]), {v}, [iv, index](Tape& t, std::uint32_t self) {
    t.grad(iv)[index] += t.grad_view(self)[0];
  });
}

Var sum(Var a) {
  Tape& tape = tape_of("sum", {a});
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const auto ia = a.id();
  return tape.record("sum", Tensor::scalar(s), {a}, [ia](Tape& t, std::uint32_t self) {
    const double g = t.grad_view(self)[0];
    for (double& v : t.grad(ia).values()) v += g;
  });
}

Var binary_cross_entropy(Var probability, int label) {
  Tape& tape = tape_of("binary_cross_entropy", {probability});
  if (probability.value().size() != 1) {
    throw ShapeError("binary_cross_entropy: expected a single probability, got shape " +
                     probability.value().shape_string());
  }
  if (label != 0 && label != 1) throw ShapeError("binary_cross_entropy: label must be 0 or 1");
  const double raw = probability.value()[0];
  const double p = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
  const bool clamped = p != raw;
  const double loss = label == 1 ? -std::log(p) : -std::log(1.0 - p);
  const auto ip = probability.id();
  return tape.record("binary_cross_entropy", Tensor::scalar(loss), {probability},
                     [ip, p, label, clamped](Tape& t, std::uint32_t self) {
                       if (clamped) return;
                       const double g = t.grad_view(self)[0];
                       t.grad(ip)[0] += g * (label == 1 ? -1.0 / p : 1.0 / (1.0 - p));
                     });
}

Var detach(Var a) { return a.tape()->constant(a.value()); }

}  // namespace aomd::nn
