#include "tsr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace tsr::nn {

namespace {

int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a) {
  throw TensorShapeError(op + ": bad shape " + shape_str(a.shape()));
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a,
                              const Tensor& b) {
  throw TensorShapeError(op + ": incompatible shapes " + shape_str(a.shape()) +
                         " and " + shape_str(b.shape()));
}

int64_t g_kink_count = 0;
double g_kink_eps = 1e-6;

// Rows/cols view of a 1-D or 2-D tensor: 1-D [d] counts as one row.
std::pair<int64_t, int64_t> rows_cols(const std::vector<int>& shape) {
  if (shape.size() == 1) return {1, shape[0]};
  if (shape.size() == 2) return {shape[0], shape[1]};
  int64_t rows = 1;
  for (size_t i = 0; i + 1 < shape.size(); ++i) rows *= shape[i];
  return {rows, shape.back()};
}

}  // namespace

Tensor make_tensor(std::vector<int> shape, std::vector<double> values,
                   bool requires_grad) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  int64_t n = shape_numel(shape);
  return make_tensor(std::move(shape), std::vector<double>(n, 0.0),
                     requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double v, bool requires_grad) {
  int64_t n = shape_numel(shape);
  return make_tensor(std::move(shape), std::vector<double>(n, v),
                     requires_grad);
}

Tensor Tensor::from_values(std::vector<int> shape, std::vector<double> values,
                           bool requires_grad) {
  if (shape_numel(shape) != static_cast<int64_t>(values.size()))
    throw TensorShapeError("from_values: shape " + shape_str(shape) +
                           " does not hold " + std::to_string(values.size()) +
                           " values");
  return make_tensor(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return make_tensor({1}, {v}, requires_grad);
}

std::vector<double>& Tensor::grad_buffer() {
  if (node_->grad.empty()) node_->grad.assign(node_->values.size(), 0.0);
  return node_->grad;
}

void Tensor::zero_grad() { node_->grad.clear(); }

double Tensor::item() const {
  if (numel() != 1)
    throw TensorShapeError("item: tensor has " + std::to_string(numel()) +
                           " elements");
  return node_->values[0];
}

int64_t kink_proximity_count() { return g_kink_count; }
void reset_kink_counter() { g_kink_count = 0; }
void set_kink_epsilon(double eps) { g_kink_eps = eps; }

namespace {

// Builds a result node; records parents + backward only when needed.
Tensor make_result(std::vector<int> shape, std::vector<double> values,
                   std::vector<Tensor> parents,
                   std::function<void(detail::Node&)> backward_fn) {
  bool needs = false;
  for (const Tensor& p : parents)
    if (p.requires_grad()) needs = true;
  Tensor out = make_tensor(std::move(shape), std::move(values), needs);
  if (needs) {
    out.node()->parents = std::move(parents);
    out.node()->backward_fn = std::move(backward_fn);
  }
  return out;
}

std::vector<double>& parent_grad(const Tensor& p) {
  return const_cast<Tensor&>(p).grad_buffer();
}

}  // namespace

void backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw TensorShapeError("backward: loss must be scalar, got " +
                           shape_str(loss.shape()));
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS over parents.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  struct Frame {
    detail::Node* node;
    size_t next_parent;
  };
  std::vector<Frame> stack{{loss.node(), 0}};
  visited.insert(loss.node());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.node->parents.size()) {
      detail::Node* p = f.node->parents[f.next_parent++].node();
      if (p->requires_grad && !visited.count(p)) {
        visited.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }

  auto& lg = const_cast<Tensor&>(loss).grad_buffer();
  lg[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 ||
      a.shape()[1] != b.shape()[0])
    shape_error("matmul", a, b);
  int64_t n = a.shape()[0], k = a.shape()[1], m = b.shape()[1];
  std::vector<double> out(n * m, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = bv + p * m;
      double* orow = out.data() + i * m;
      for (int64_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return make_result(
      {static_cast<int>(n), static_cast<int>(m)}, std::move(out), {a, b},
      [a, b, n, k, m](detail::Node& self) {
        const double* g = self.grad.data();
        if (a.requires_grad()) {
          auto& ga = parent_grad(a);
          const double* bv = b.values().data();
          for (int64_t i = 0; i < n; ++i)
            for (int64_t p = 0; p < k; ++p) {
              double acc = 0.0;
              const double* grow = g + i * m;
              const double* brow = bv + p * m;
              for (int64_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
              ga[i * k + p] += acc;
            }
        }
        if (b.requires_grad()) {
          auto& gb = parent_grad(b);
          const double* av = a.values().data();
          for (int64_t p = 0; p < k; ++p)
            for (int64_t i = 0; i < n; ++i) {
              double aip = av[i * k + p];
              if (aip == 0.0) continue;
              const double* grow = g + i * m;
              double* gbrow = gb.data() + p * m;
              for (int64_t j = 0; j < m; ++j) gbrow[j] += aip * grow[j];
            }
        }
      });
}

Tensor transpose(const Tensor& a) {
  if (a.shape().size() != 2) shape_error("transpose", a);
  int64_t n = a.shape()[0], m = a.shape()[1];
  std::vector<double> out(n * m);
  const double* av = a.values().data();
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < m; ++j) out[j * n + i] = av[i * m + j];
  return make_result({static_cast<int>(m), static_cast<int>(n)},
                     std::move(out), {a}, [a, n, m](detail::Node& self) {
                       if (!a.requires_grad()) return;
                       auto& ga = parent_grad(a);
                       const double* g = self.grad.data();
                       for (int64_t j = 0; j < m; ++j)
                         for (int64_t i = 0; i < n; ++i)
                           ga[i * m + j] += g[j * n + i];
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) {
    std::vector<double> out(a.values().begin(), a.values().end());
    const double* bv = b.values().data();
    for (int64_t i = 0; i < a.numel(); ++i) out[i] += bv[i];
    return make_result(a.shape(), std::move(out), {a, b},
                       [a, b](detail::Node& self) {
                         if (a.requires_grad()) {
                           auto& ga = parent_grad(a);
                           for (size_t i = 0; i < self.grad.size(); ++i)
                             ga[i] += self.grad[i];
                         }
                         if (b.requires_grad()) {
                           auto& gb = parent_grad(b);
                           for (size_t i = 0; i < self.grad.size(); ++i)
                             gb[i] += self.grad[i];
                         }
                       });
  }
  // Broadcast [d] over rows of [n,d].
  auto [n, d] = rows_cols(a.shape());
  if (b.shape().size() == 1 && b.shape()[0] == d) {
    std::vector<double> out(a.values().begin(), a.values().end());
    const double* bv = b.values().data();
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < d; ++j) out[i * d + j] += bv[j];
    int64_t nn = n, dd = d;
    return make_result(a.shape(), std::move(out), {a, b},
                       [a, b, nn, dd](detail::Node& self) {
                         if (a.requires_grad()) {
                           auto& ga = parent_grad(a);
                           for (size_t i = 0; i < self.grad.size(); ++i)
                             ga[i] += self.grad[i];
                         }
                         if (b.requires_grad()) {
                           auto& gb = parent_grad(b);
                           for (int64_t i = 0; i < nn; ++i)
                             for (int64_t j = 0; j < dd; ++j)
                               gb[j] += self.grad[i * dd + j];
                         }
                       });
  }
  shape_error("add", a, b);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return add(a, scalar_mul(b, -1.0));
}

Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v += c;
  return make_result(a.shape(), std::move(out), {a}, [a](detail::Node& self) {
    if (!a.requires_grad()) return;
    auto& ga = parent_grad(a);
    for (size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
  });
}

Tensor scalar_mul(const Tensor& a, double c) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= c;
  return make_result(a.shape(), std::move(out), {a},
                     [a, c](detail::Node& self) {
                       if (!a.requires_grad()) return;
                       auto& ga = parent_grad(a);
                       for (size_t i = 0; i < self.grad.size(); ++i)
                         ga[i] += c * self.grad[i];
                     });
}

Tensor scale(const Tensor& a, const Tensor& s) {
  if (s.numel() != 1) shape_error("scale", a, s);
  double sv = s.values()[0];
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= sv;
  return make_result(a.shape(), std::move(out), {a, s},
                     [a, s, sv](detail::Node& self) {
                       if (a.requires_grad()) {
                         auto& ga = parent_grad(a);
                         for (size_t i = 0; i < self.grad.size(); ++i)
                           ga[i] += sv * self.grad[i];
                       }
                       if (s.requires_grad()) {
                         auto& gs = parent_grad(s);
                         const double* av = a.values().data();
                         double acc = 0.0;
                         for (size_t i = 0; i < self.grad.size(); ++i)
                           acc += av[i] * self.grad[i];
                         gs[0] += acc;
                       }
                     });
}

namespace {

Tensor relu_impl(const char* name, const Tensor& a) {
  (void)name;
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) {
    if (std::abs(v) <= g_kink_eps) ++g_kink_count;
    if (v < 0.0) v = 0.0;
  }
  return make_result(a.shape(), std::move(out), {a}, [a](detail::Node& self) {
    if (!a.requires_grad()) return;
    auto& ga = parent_grad(a);
    const double* av = a.values().data();
    // Subgradient 0 at the kink itself.
    for (size_t i = 0; i < self.grad.size(); ++i)
      if (av[i] > 0.0) ga[i] += self.grad[i];
  });
}

}  // namespace

Tensor relu(const Tensor& a) { return relu_impl("relu", a); }
Tensor max_with_zero(const Tensor& a) { return relu_impl("max_with_zero", a); }

Tensor softmax_lastdim(const Tensor& a) {
  auto [n, d] = rows_cols(a.shape());
  if (d < 1) shape_error("softmax_lastdim", a);
  std::vector<double> out(a.numel());
  const double* av = a.values().data();
  for (int64_t i = 0; i < n; ++i) {
    const double* row = av + i * d;
    double mx = row[0];
    for (int64_t j = 1; j < d; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (int64_t j = 0; j < d; ++j) {
      out[i * d + j] = std::exp(row[j] - mx);
      denom += out[i * d + j];
    }
    for (int64_t j = 0; j < d; ++j) out[i * d + j] /= denom;
  }
  Tensor result = make_result(
      a.shape(), std::move(out), {a}, [a](detail::Node& self) {
        if (!a.requires_grad()) return;
        auto [n, d] = rows_cols(self.shape);
        auto& ga = parent_grad(a);
        const double* y = self.values.data();
        const double* g = self.grad.data();
        for (int64_t i = 0; i < n; ++i) {
          double dot = 0.0;
          for (int64_t j = 0; j < d; ++j) dot += g[i * d + j] * y[i * d + j];
          for (int64_t j = 0; j < d; ++j)
            ga[i * d + j] += y[i * d + j] * (g[i * d + j] - dot);
        }
      });
  return result;
}

Tensor concat_lastdim(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw TensorShapeError("concat_lastdim: no inputs");
  auto [n0, d0] = rows_cols(parts[0].shape());
  int64_t total_d = 0;
  for (const Tensor& p : parts) {
    auto [n, d] = rows_cols(p.shape());
    if (n != n0) shape_error("concat_lastdim", parts[0], p);
    total_d += d;
  }
  std::vector<double> out(n0 * total_d);
  int64_t off = 0;
  for (const Tensor& p : parts) {
    auto [n, d] = rows_cols(p.shape());
    const double* pv = p.values().data();
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < d; ++j) out[i * total_d + off + j] = pv[i * d + j];
    off += d;
  }
  std::vector<int> shape;
  if (parts[0].shape().size() == 1)
    shape = {static_cast<int>(total_d)};
  else
    shape = {static_cast<int>(n0), static_cast<int>(total_d)};
  (void)d0;
  const int64_t rows = n0;
  return make_result(
      std::move(shape), std::move(out), parts,
      [parts, rows, total_d](detail::Node& self) {
        int64_t off = 0;
        for (const Tensor& p : parts) {
          auto [n, d] = rows_cols(p.shape());
          (void)n;
          if (p.requires_grad()) {
            auto& gp = parent_grad(p);
            for (int64_t i = 0; i < rows; ++i)
              for (int64_t j = 0; j < d; ++j)
                gp[i * d + j] += self.grad[i * total_d + off + j];
          }
          off += d;
        }
      });
}

Tensor slice_lastdim(const Tensor& a, int begin, int end) {
  auto [n, d] = rows_cols(a.shape());
  if (begin < 0 || end > d || begin >= end)
    throw TensorShapeError("slice_lastdim: range [" + std::to_string(begin) +
                           "," + std::to_string(end) + ") of width " +
                           std::to_string(d));
  int64_t w = end - begin;
  std::vector<double> out(n * w);
  const double* av = a.values().data();
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < w; ++j) out[i * w + j] = av[i * d + begin + j];
  std::vector<int> shape;
  if (a.shape().size() == 1)
    shape = {static_cast<int>(w)};
  else
    shape = {static_cast<int>(n), static_cast<int>(w)};
  return make_result(std::move(shape), std::move(out), {a},
                     [a, begin, w](detail::Node& self) {
                       if (!a.requires_grad()) return;
                       auto [n, d] = rows_cols(a.shape());
                       (void)n;
                       auto& ga = parent_grad(a);
                       auto [rn, rw] = rows_cols(self.shape);
                       (void)rw;
                       for (int64_t i = 0; i < rn; ++i)
                         for (int64_t j = 0; j < w; ++j)
                           ga[i * d + begin + j] += self.grad[i * w + j];
                     });
}

Tensor mean(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  double inv = 1.0 / static_cast<double>(a.numel());
  return make_result({1}, {acc * inv}, {a}, [a, inv](detail::Node& self) {
    if (!a.requires_grad()) return;
    auto& ga = parent_grad(a);
    double g = self.grad[0] * inv;
    for (double& v : ga) v += g;
  });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return make_result({1}, {acc}, {a}, [a](detail::Node& self) {
    if (!a.requires_grad()) return;
    auto& ga = parent_grad(a);
    double g = self.grad[0];
    for (double& v : ga) v += g;
  });
}

Tensor abs_sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += std::abs(v);
  return make_result({1}, {acc}, {a}, [a](detail::Node& self) {
    if (!a.requires_grad()) return;
    auto& ga = parent_grad(a);
    const double* av = a.values().data();
    double g = self.grad[0];
    // sign(x); subgradient 0 at x == 0.
    for (size_t i = 0; i < ga.size(); ++i) {
      if (av[i] > 0.0) ga[i] += g;
      else if (av[i] < 0.0) ga[i] -= g;
    }
  });
}

Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids) {
  if (table.shape().size() != 2) shape_error("embedding_lookup", table);
  int64_t rows = table.shape()[0], d = table.shape()[1];
  for (int id : ids)
    if (id < 0 || id >= rows)
      throw TensorShapeError("embedding_lookup: id " + std::to_string(id) +
                             " outside [0," + std::to_string(rows) + ")");
  std::vector<double> out(ids.size() * d);
  const double* tv = table.values().data();
  for (size_t i = 0; i < ids.size(); ++i)
    std::copy(tv + ids[i] * d, tv + (ids[i] + 1) * d, out.begin() + i * d);
  return make_result({static_cast<int>(ids.size()), static_cast<int>(d)},
                     std::move(out), {table},
                     [table, ids, d](detail::Node& self) {
                       if (!table.requires_grad()) return;
                       auto& gt = parent_grad(table);
                       for (size_t i = 0; i < ids.size(); ++i)
                         for (int64_t j = 0; j < d; ++j)
                           gt[ids[i] * d + j] += self.grad[i * d + j];
                     });
}

}  // namespace ops

}  // namespace tsr::nn
