#include "tsr/params.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace tsr::nn {

Tensor ParameterStore::add(const std::string& name, std::vector<int> shape,
                           Rng& rng) {
  int fan_in = shape.empty() ? 1 : shape[0];
  double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
  int64_t n = 1;
  for (int d : shape) n *= d;
  std::vector<double> vals(n);
  for (double& v : vals) v = rng.uniform(-bound, bound);
  return add_values(name, std::move(shape), std::move(vals));
}

Tensor ParameterStore::add_constant(const std::string& name,
                                    std::vector<int> shape, double v) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return add_values(name, std::move(shape), std::vector<double>(n, v));
}

Tensor ParameterStore::add_values(const std::string& name,
                                  std::vector<int> shape,
                                  std::vector<double> values) {
  if (params_.count(name))
    throw std::runtime_error("parameter already registered: " + name);
  Parameter p;
  p.name = name;
  p.value = Tensor::from_values(std::move(shape), std::move(values), true);
  p.m.assign(p.value.numel(), 0.0);
  p.v.assign(p.value.numel(), 0.0);
  Tensor t = p.value;
  params_.emplace(name, std::move(p));
  return t;
}

bool ParameterStore::contains(const std::string& name) const {
  return params_.count(name) > 0;
}

Parameter& ParameterStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::runtime_error("unknown parameter: " + name);
  return it->second;
}

const Parameter& ParameterStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end())
    throw std::runtime_error("unknown parameter: " + name);
  return it->second;
}

Tensor ParameterStore::tensor(const std::string& name) const {
  return at(name).value;
}

std::vector<std::string> ParameterStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [k, v] : params_) out.push_back(k);
  return out;
}

int64_t ParameterStore::total_size() const {
  int64_t n = 0;
  for (const auto& [k, p] : params_) n += p.value.numel();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& [k, p] : params_) p.value.zero_grad();
}

void adam_step(ParameterStore& store, const AdamConfig& cfg) {
  for (auto& [name, p] : store.entries()) {
    auto g = p.value.grad();
    if (g.empty()) continue;
    ++p.steps;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.steps));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.steps));
    auto vals = p.value.values_mut();
    for (size_t i = 0; i < vals.size(); ++i) {
      p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g[i];
      p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double mhat = p.m[i] / bc1;
      double vhat = p.v[i] / bc2;
      vals[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    p.value.zero_grad();
  }
}

void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const CheckpointMeta& meta) {
  nlohmann::ordered_json j;
  j["format"] = "tsrkit-checkpoint";
  j["version"] = meta.version;
  j["component"] = meta.component;
  if (!meta.config_json.empty())
    j["config"] = nlohmann::json::parse(meta.config_json);
  nlohmann::ordered_json params;
  for (const auto& [name, p] : store.entries()) {
    nlohmann::ordered_json pj;
    pj["shape"] = p.value.shape();
    pj["data"] = std::vector<double>(p.value.values().begin(),
                                     p.value.values().end());
    params[name] = std::move(pj);
  }
  j["params"] = std::move(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<ParameterStore, CheckpointMeta> load_checkpoint(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("checkpoint parse error in " + path + ": " +
                             e.what());
  }
  if (j.value("format", "") != "tsrkit-checkpoint")
    throw std::runtime_error("not a tsrkit checkpoint: " + path);
  CheckpointMeta meta;
  meta.version = j.value("version", 1);
  meta.component = j.value("component", "");
  if (j.contains("config")) meta.config_json = j["config"].dump();
  ParameterStore store;
  for (const auto& [name, pj] : j.at("params").items()) {
    std::vector<int> shape = pj.at("shape").get<std::vector<int>>();
    std::vector<double> data = pj.at("data").get<std::vector<double>>();
    store.add_values(name, std::move(shape), std::move(data));
  }
  return {std::move(store), std::move(meta)};
}

}  // namespace tsr::nn
