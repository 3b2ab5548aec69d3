#pragma once

#include <string>
#include <vector>

#include "tsr/params.hpp"
#include "tsr/tensor.hpp"

namespace tsr::nn {

/// One encoder block: Q/K/V projections, scaled dot-product multi-head
/// attention, output projection, residual add, then a two-layer relu
/// feed-forward with another residual add. No mask.
struct AttentionLayer {
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ff_w0, ff_b0, ff_w1, ff_b1;
};

AttentionLayer make_attention_layer(ParameterStore& store,
                                    const std::string& prefix, int d,
                                    int ffn_mult, Rng& rng);
AttentionLayer bind_attention_layer(const ParameterStore& store,
                                    const std::string& prefix);

Tensor multi_head_self_attention(const Tensor& x, const AttentionLayer& layer,
                                 int heads);

struct Encoder {
  std::vector<AttentionLayer> layers;
  int heads = 1;
};

Encoder make_encoder(ParameterStore& store, const std::string& prefix,
                     int n_layers, int d, int heads, int ffn_mult, Rng& rng);
Encoder bind_encoder(const ParameterStore& store, const std::string& prefix,
                     int n_layers, int heads);

Tensor encode(const Tensor& x, const Encoder& enc);

/// Parameter names of one encoder, used by checkpoint transfer.
std::vector<std::string> encoder_param_names(const std::string& prefix,
                                             int n_layers);

}  // namespace tsr::nn
