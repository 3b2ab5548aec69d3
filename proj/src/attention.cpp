#include "tsr/attention.hpp"

#include <cmath>

namespace tsr::nn {

namespace {
using ops::add;
using ops::concat_lastdim;
using ops::matmul;
using ops::relu;
using ops::scalar_mul;
using ops::slice_lastdim;
using ops::softmax_lastdim;
using ops::transpose;
}  // namespace

AttentionLayer make_attention_layer(ParameterStore& store,
                                    const std::string& prefix, int d,
                                    int ffn_mult, Rng& rng) {
  AttentionLayer l;
  int h = d * ffn_mult;
  l.wq = store.add(prefix + ".wq", {d, d}, rng);
  l.bq = store.add_constant(prefix + ".bq", {d}, 0.0);
  l.wk = store.add(prefix + ".wk", {d, d}, rng);
  l.bk = store.add_constant(prefix + ".bk", {d}, 0.0);
  l.wv = store.add(prefix + ".wv", {d, d}, rng);
  l.bv = store.add_constant(prefix + ".bv", {d}, 0.0);
  l.wo = store.add(prefix + ".wo", {d, d}, rng);
  l.bo = store.add_constant(prefix + ".bo", {d}, 0.0);
  l.ff_w0 = store.add(prefix + ".ff.w0", {d, h}, rng);
  l.ff_b0 = store.add_constant(prefix + ".ff.b0", {h}, 0.0);
  l.ff_w1 = store.add(prefix + ".ff.w1", {h, d}, rng);
  l.ff_b1 = store.add_constant(prefix + ".ff.b1", {d}, 0.0);
  return l;
}

AttentionLayer bind_attention_layer(const ParameterStore& store,
                                    const std::string& prefix) {
  AttentionLayer l;
  l.wq = store.tensor(prefix + ".wq");
  l.bq = store.tensor(prefix + ".bq");
  l.wk = store.tensor(prefix + ".wk");
  l.bk = store.tensor(prefix + ".bk");
  l.wv = store.tensor(prefix + ".wv");
  l.bv = store.tensor(prefix + ".bv");
  l.wo = store.tensor(prefix + ".wo");
  l.bo = store.tensor(prefix + ".bo");
  l.ff_w0 = store.tensor(prefix + ".ff.w0");
  l.ff_b0 = store.tensor(prefix + ".ff.b0");
  l.ff_w1 = store.tensor(prefix + ".ff.w1");
  l.ff_b1 = store.tensor(prefix + ".ff.b1");
  return l;
}

Tensor multi_head_self_attention(const Tensor& x, const AttentionLayer& layer,
                                 int heads) {
  int d = x.shape().back();
  if (heads < 1 || d % heads != 0)
    throw TensorShapeError("multi_head_self_attention: width " +
                           std::to_string(d) + " not divisible by " +
                           std::to_string(heads) + " heads");
  int dh = d / heads;
  Tensor q = add(matmul(x, layer.wq), layer.bq);
  Tensor k = add(matmul(x, layer.wk), layer.bk);
  Tensor v = add(matmul(x, layer.wv), layer.bv);

  std::vector<Tensor> head_outputs;
  head_outputs.reserve(heads);
  double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int h = 0; h < heads; ++h) {
    Tensor qh = slice_lastdim(q, h * dh, (h + 1) * dh);
    Tensor kh = slice_lastdim(k, h * dh, (h + 1) * dh);
    Tensor vh = slice_lastdim(v, h * dh, (h + 1) * dh);
    Tensor scores = scalar_mul(matmul(qh, transpose(kh)), inv_sqrt);
    Tensor weights = softmax_lastdim(scores);
    head_outputs.push_back(matmul(weights, vh));
  }
  Tensor attended = heads == 1 ? head_outputs[0] : concat_lastdim(head_outputs);
  Tensor projected = add(matmul(attended, layer.wo), layer.bo);
  Tensor res1 = add(x, projected);

  Tensor ff = add(matmul(relu(add(matmul(res1, layer.ff_w0), layer.ff_b0)),
                         layer.ff_w1),
                  layer.ff_b1);
  return add(res1, ff);
}

Encoder make_encoder(ParameterStore& store, const std::string& prefix,
                     int n_layers, int d, int heads, int ffn_mult, Rng& rng) {
  Encoder enc;
  enc.heads = heads;
  for (int i = 0; i < n_layers; ++i)
    enc.layers.push_back(
        make_attention_layer(store, prefix + "." + std::to_string(i), d,
                             ffn_mult, rng));
  return enc;
}

Encoder bind_encoder(const ParameterStore& store, const std::string& prefix,
                     int n_layers, int heads) {
  Encoder enc;
  enc.heads = heads;
  for (int i = 0; i < n_layers; ++i)
    enc.layers.push_back(
        bind_attention_layer(store, prefix + "." + std::to_string(i)));
  return enc;
}

Tensor encode(const Tensor& x, const Encoder& enc) {
  Tensor h = x;
  for (const AttentionLayer& layer : enc.layers)
    h = multi_head_self_attention(h, layer, enc.heads);
  return h;
}

std::vector<std::string> encoder_param_names(const std::string& prefix,
                                             int n_layers) {
  static const char* kSuffixes[] = {"wq", "bq", "wk", "bk", "wv", "bv",
                                    "wo", "bo", "ff.w0", "ff.b0", "ff.w1",
                                    "ff.b1"};
  std::vector<std::string> out;
  for (int i = 0; i < n_layers; ++i)
    for (const char* s : kSuffixes)
      out.push_back(prefix + "." + std::to_string(i) + "." + s);
  return out;
}

}  // namespace tsr::nn
