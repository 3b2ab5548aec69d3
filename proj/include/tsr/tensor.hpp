#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsr::nn {

class TensorShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Tensor;

namespace detail {
struct Node {
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;  // allocated on first use
  bool requires_grad = false;
  std::vector<Tensor> parents;
  std::function<void(Node&)> backward_fn;  // reads grad, writes parents' grads
};
}  // namespace detail

/// Dense float64 tensor, row-major, with a reverse-mode tape built from the
/// op graph. Value-semantic handle: copies share the node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor full(std::vector<int> shape, double v,
                     bool requires_grad = false);
  static Tensor from_values(std::vector<int> shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  int dim(size_t i) const { return node_->shape[i]; }
  int64_t numel() const { return static_cast<int64_t>(node_->values.size()); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> values() const { return node_->values; }
  std::span<double> values_mut() { return node_->values; }

  /// Gradient buffer; empty span until backward touched this tensor.
  std::span<const double> grad() const { return node_->grad; }
  std::vector<double>& grad_buffer();
  void zero_grad();

  double item() const;

  detail::Node* node() const { return node_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;
  friend Tensor make_tensor(std::vector<int>, std::vector<double>, bool);
};

Tensor make_tensor(std::vector<int> shape, std::vector<double> values,
                   bool requires_grad);

/// Reverse-mode sweep from a scalar loss. Accumulates into the grad buffer
/// of every requires_grad tensor reachable on the tape.
void backward(const Tensor& loss);

/// relu / max_with_zero inputs within the kink epsilon of 0 bump a global
/// counter, letting gradient checks skip non-differentiable neighborhoods.
int64_t kink_proximity_count();
void reset_kink_counter();
void set_kink_epsilon(double eps);

namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b);  // [n,k] x [k,m]
Tensor transpose(const Tensor& a);                // [n,m] -> [m,n]

/// Equal shapes, or b of shape [d] broadcast over the rows of a [n,d].
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double c);
Tensor scalar_mul(const Tensor& a, double c);
/// Multiply by a learnable scalar tensor (shape [1]).
Tensor scale(const Tensor& a, const Tensor& s);

Tensor relu(const Tensor& a);
Tensor max_with_zero(const Tensor& a);  // hinge; same kernel as relu

Tensor softmax_lastdim(const Tensor& a);
Tensor concat_lastdim(const std::vector<Tensor>& parts);
Tensor slice_lastdim(const Tensor& a, int begin, int end);  // [begin,end)

Tensor mean(const Tensor& a);     // scalar
Tensor sum(const Tensor& a);      // scalar
Tensor abs_sum(const Tensor& a);  // scalar L1 norm

/// Gather rows of a [n,d] matrix; repeated ids accumulate on backward.
Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids);

}  // namespace ops

}  // namespace tsr::nn
