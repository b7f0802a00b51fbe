#pragma once

#include <string>
#include <vector>

#include "follownet/param_set.hpp"
#include "follownet/rng.hpp"
#include "follownet/tensor.hpp"

namespace follownet {

enum class Activation { kIdentity, kRelu, kTanh, kSigmoid };

double apply_activation(Activation act, double x);
// Derivative expressed through the post-activation output.
double activation_grad(Activation act, double out);

// out = act(W x + b). x may have any rank; its total size is the fan-in.
// W is [n_out x n_in], b is [n_out].
TensorPtr dense(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b,
                Activation act);

// "Same"-padded cross-correlation. x is [H x W x C_in], kernels are
// [k x k x C_in x C_out], bias is [C_out]; output spatial dims are
// ceil(H/stride) x ceil(W/stride).
TensorPtr conv2d(const TensorPtr& x, const TensorPtr& kernels, const TensorPtr& bias,
                 int stride, Activation act);

struct GruParams {
  TensorPtr wz, uz, bz;
  TensorPtr wr, ur, br;
  TensorPtr wh, uh, bh;
};

// Pulls W_z/U_z/b_z, W_r/U_r/b_r, W_h/U_h/b_h from `params` under `prefix`.
GruParams gru_params_from(const ParameterSet& params, const std::string& prefix);

// z = sig(Wz x + Uz h + bz); r = sig(Wr x + Ur h + br);
// hc = tanh(Wh x + Uh (r*h) + bh); h' = (1-z)*h + z*hc.
TensorPtr gru_cell(const TensorPtr& x, const TensorPtr& h, const GruParams& p);

// Numerically stable softmax over a rank-1 tensor.
TensorPtr softmax(const TensorPtr& logits);

// Rows of an embedding table [V x d], one tensor per id.
std::vector<TensorPtr> embed_rows(const TensorPtr& table, const std::vector<int>& ids);

// Rank-1 concatenation.
TensorPtr concat(const std::vector<TensorPtr>& parts);

// Scalars -> rank-1 vector [k].
TensorPtr stack_scalars(const std::vector<TensorPtr>& xs);

// (1/k) * sum_i alpha_i * o_i, alpha is [k], each o_i is [d].
TensorPtr attention_pool(const TensorPtr& alpha, const std::vector<TensorPtr>& o);

// Scalar element selection.
TensorPtr pick(const TensorPtr& v, int index);

// (pred - target)^2 for a scalar prediction and a constant target.
TensorPtr squared_error(const TensorPtr& pred, double target);

TensorPtr sum_scalars(const std::vector<TensorPtr>& xs);
TensorPtr scale(const TensorPtr& t, double c);

// Uniform init in [-s, s] with s = sqrt(6 / (fan_in + fan_out)).
TensorPtr glorot_uniform(const Shape& shape, long long fan_in, long long fan_out, Rng& rng);

}  // namespace follownet
