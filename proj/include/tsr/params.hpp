#pragma once

#include <map>
#include <string>
#include <vector>

#include "tsr/rng.hpp"
#include "tsr/tensor.hpp"

namespace tsr::nn {

struct Parameter {
  std::string name;
  Tensor value;  // requires_grad
  std::vector<double> m, v;  // Adam moments
  int64_t steps = 0;
};

class ParameterStore {
 public:
  /// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)); fan_in = first shape dim.
  Tensor add(const std::string& name, std::vector<int> shape, Rng& rng);
  Tensor add_constant(const std::string& name, std::vector<int> shape,
                      double v);
  Tensor add_values(const std::string& name, std::vector<int> shape,
                    std::vector<double> values);

  bool contains(const std::string& name) const;
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  Tensor tensor(const std::string& name) const;

  std::vector<std::string> names() const;
  int64_t total_size() const;
  void zero_grads();

  std::map<std::string, Parameter>& entries() { return params_; }
  const std::map<std::string, Parameter>& entries() const { return params_; }

 private:
  std::map<std::string, Parameter> params_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam on every parameter with a populated gradient;
/// clears the gradients afterwards.
void adam_step(ParameterStore& store, const AdamConfig& cfg);

struct CheckpointMeta {
  int version = 1;
  std::string component;    // "regressor" or "ldp"
  std::string config_json;  // owning module's config, verbatim
};

/// JSON map name -> {shape, data}; deterministic key order, so save/load is
/// byte-stable.
void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const CheckpointMeta& meta);
std::pair<ParameterStore, CheckpointMeta> load_checkpoint(
    const std::string& path);

}  // namespace tsr::nn
