#include "follownet/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "follownet/errors.hpp"
#include "follownet/rng.hpp"
#include "follownet/vocab.hpp"

namespace follownet {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void check_positive(int value, const char* what) {
  if (value < 1) {
    throw ConfigError(std::string("architecture: ") + what + " must be positive");
  }
}

void check_conv_spec(const std::vector<int>& channels, const std::vector<int>& kernels,
                     const std::vector<int>& strides, const char* branch) {
  if (channels.empty() || channels.size() != kernels.size() ||
      channels.size() != strides.size()) {
    throw ConfigError(std::string("architecture: ") + branch +
                      " conv channels/kernels/strides must be nonempty and equally long");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] < 1 || kernels[i] < 1 || strides[i] < 1) {
      throw ConfigError(std::string("architecture: ") + branch +
                        " conv spec entries must be positive");
    }
  }
}

// Registers a glorot-initialized weight drawn from a substream named after
// the parameter, so initialization is independent of registration order.
TensorPtr add_weight(ParameterSet& params, const std::string& name, const Shape& shape,
                     long long fan_in, long long fan_out, std::uint64_t seed) {
  Rng rng = substream(seed, name);
  return params.add(name, glorot_uniform(shape, fan_in, fan_out, rng));
}

TensorPtr add_bias(ParameterSet& params, const std::string& name, int n) {
  return params.add(name, Tensor::zeros({n}));
}

}  // namespace

FollowNetModel::FollowNetModel(const ArchitectureConfig& config, std::uint64_t init_seed)
    : config_(config) {
  check_positive(config.image_height, "image height");
  check_positive(config.image_width, "image width");
  check_positive(config.image_channels, "image channels");
  check_positive(config.embedding_dim, "embedding dim");
  check_positive(config.gru_dim, "GRU dim");
  check_positive(config.semantic_dim, "semantic dim");
  check_positive(config.depth_dim, "depth dim");
  check_positive(config.attention_hidden, "attention hidden width");
  check_positive(config.num_actions, "action count");
  check_positive(config.max_tokens, "max token count");
  if (config.vocab_size < 2) {
    throw ConfigError("architecture: vocabulary must include at least PAD and UNK");
  }
  check_conv_spec(config.semantic_channels, config.semantic_kernels, config.semantic_strides,
                  "semantic");
  check_conv_spec(config.depth_channels, config.depth_kernels, config.depth_strides, "depth");
  for (int hidden : config.q_hiddens) check_positive(hidden, "Q hidden width");

  // Convolution stacks; spatial dims follow ceil(extent / stride).
  auto add_conv_branch = [&](const char* prefix, int in_channels,
                             const std::vector<int>& channels, const std::vector<int>& kernels,
                             const std::vector<int>& strides) {
    int h = config.image_height;
    int w = config.image_width;
    int c_in = in_channels;
    for (std::size_t i = 0; i < channels.size(); ++i) {
      const std::string name = std::string(prefix) + ".conv" + std::to_string(i + 1);
      const int k = kernels[i];
      const int c_out = channels[i];
      add_weight(params_, name + ".w", {k, k, c_in, c_out},
                 static_cast<long long>(k) * k * c_in, static_cast<long long>(k) * k * c_out,
                 init_seed);
      add_bias(params_, name + ".b", c_out);
      h = ceil_div(h, strides[i]);
      w = ceil_div(w, strides[i]);
      c_in = c_out;
    }
    return static_cast<long long>(h) * w * c_in;
  };

  const long long sem_flat =
      add_conv_branch("sem", config.image_channels, config.semantic_channels,
                      config.semantic_kernels, config.semantic_strides);
  add_weight(params_, "sem.dense.w", {config.semantic_dim, static_cast<int>(sem_flat)},
             sem_flat, config.semantic_dim, init_seed);
  add_bias(params_, "sem.dense.b", config.semantic_dim);

  const long long depth_flat = add_conv_branch("depth", 1, config.depth_channels,
                                               config.depth_kernels, config.depth_strides);
  add_weight(params_, "depth.dense.w", {config.depth_dim, static_cast<int>(depth_flat)},
             depth_flat, config.depth_dim, init_seed);
  add_bias(params_, "depth.dense.b", config.depth_dim);

  add_weight(params_, "lang.embed", {config.vocab_size, config.embedding_dim},
             config.vocab_size, config.embedding_dim, init_seed);
  for (const char* dir : {"lang.fwd.", "lang.bwd."}) {
    for (const char* gate : {"z", "r", "h"}) {
      add_weight(params_, std::string(dir) + "w" + gate,
                 {config.gru_dim, config.embedding_dim}, config.embedding_dim, config.gru_dim,
                 init_seed);
      add_weight(params_, std::string(dir) + "u" + gate, {config.gru_dim, config.gru_dim},
                 config.gru_dim, config.gru_dim, init_seed);
      add_bias(params_, std::string(dir) + "b" + gate, config.gru_dim);
    }
  }

  const int context_dim = config.semantic_dim + config.depth_dim + 2 * config.gru_dim;
  if (config.use_attention) {
    const int score_in = context_dim + 2 * config.gru_dim;
    add_weight(params_, "attn.ff.w", {config.attention_hidden, score_in}, score_in,
               config.attention_hidden, init_seed);
    add_bias(params_, "attn.ff.b", config.attention_hidden);
    add_weight(params_, "attn.out.w", {1, config.attention_hidden}, config.attention_hidden, 1,
               init_seed);
    add_bias(params_, "attn.out.b", 1);
  }

  // The language head reads the pooled o_i in attention mode and [h_f h_b]
  // in baseline mode; both are 2*gru_dim wide, so the shape is shared.
  add_weight(params_, "lang.head.w", {config.gru_dim, 2 * config.gru_dim}, 2 * config.gru_dim,
             config.gru_dim, init_seed);
  add_bias(params_, "lang.head.b", config.gru_dim);

  int q_in = config.semantic_dim + config.depth_dim + config.gru_dim;
  for (std::size_t i = 0; i < config.q_hiddens.size(); ++i) {
    const std::string name = "q.h" + std::to_string(i + 1);
    add_weight(params_, name + ".w", {config.q_hiddens[i], q_in}, q_in, config.q_hiddens[i],
               init_seed);
    add_bias(params_, name + ".b", config.q_hiddens[i]);
    q_in = config.q_hiddens[i];
  }
  add_weight(params_, "q.out.w", {config.num_actions, q_in}, q_in, config.num_actions,
             init_seed);
  add_bias(params_, "q.out.b", config.num_actions);
}

TensorPtr FollowNetModel::encode_semantic(const TensorPtr& semantic) const {
  const Shape expected = {config_.image_height, config_.image_width, config_.image_channels};
  if (semantic->shape != expected) {
    throw ConfigError("encode_semantic: image shape " + shape_str(semantic->shape) +
                      ", expected " + shape_str(expected));
  }
  TensorPtr x = semantic;
  for (std::size_t i = 0; i < config_.semantic_channels.size(); ++i) {
    const std::string name = "sem.conv" + std::to_string(i + 1);
    x = conv2d(x, params_.get(name + ".w"), params_.get(name + ".b"),
               config_.semantic_strides[i], Activation::kRelu);
  }
  return dense(x, params_.get("sem.dense.w"), params_.get("sem.dense.b"),
               Activation::kIdentity);
}

TensorPtr FollowNetModel::encode_depth(const TensorPtr& depth) const {
  const Shape expected = {config_.image_height, config_.image_width};
  if (depth->shape != expected) {
    throw ConfigError("encode_depth: image shape " + shape_str(depth->shape) + ", expected " +
                      shape_str(expected));
  }
  for (double v : depth->values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("encode_depth: depth values must lie in [0,1]");
    }
  }
  TensorPtr x = Tensor::from_values({config_.image_height, config_.image_width, 1},
                                    depth->values);
  // The reshape is a fixed view; gradients to the raw depth image are not
  // needed (observations are constants), so the conv consumes a copy.
  for (std::size_t i = 0; i < config_.depth_channels.size(); ++i) {
    const std::string name = "depth.conv" + std::to_string(i + 1);
    x = conv2d(x, params_.get(name + ".w"), params_.get(name + ".b"),
               config_.depth_strides[i], Activation::kRelu);
  }
  return dense(x, params_.get("depth.dense.w"), params_.get("depth.dense.b"),
               Activation::kIdentity);
}

InstructionEncoding FollowNetModel::encode_instruction(const std::vector<int>& tokens) const {
  const int k = static_cast<int>(tokens.size());
  if (k == 0) throw ValidationError("encode_instruction: empty token list");
  if (k > config_.max_tokens) {
    throw ValidationError("encode_instruction: " + std::to_string(k) +
                          " tokens exceed the limit of " +
                          std::to_string(config_.max_tokens));
  }
  int valid = 0;
  while (valid < k && tokens[static_cast<std::size_t>(valid)] != kPadId) ++valid;
  for (int i = valid; i < k; ++i) {
    if (tokens[static_cast<std::size_t>(i)] != kPadId) {
      throw ValidationError("encode_instruction: PAD tokens must be trailing");
    }
  }
  if (valid == 0) {
    throw ValidationError("encode_instruction: instruction is all padding");
  }

  const std::vector<int> real(tokens.begin(), tokens.begin() + valid);
  const std::vector<TensorPtr> embedded = embed_rows(params_.get("lang.embed"), real);
  const GruParams fwd = gru_params_from(params_, "lang.fwd.");
  const GruParams bwd = gru_params_from(params_, "lang.bwd.");

  std::vector<TensorPtr> fwd_states(static_cast<std::size_t>(valid));
  TensorPtr h = Tensor::zeros({config_.gru_dim});
  for (int t = 0; t < valid; ++t) {
    h = gru_cell(embedded[static_cast<std::size_t>(t)], h, fwd);
    fwd_states[static_cast<std::size_t>(t)] = h;
  }
  std::vector<TensorPtr> bwd_states(static_cast<std::size_t>(valid));
  h = Tensor::zeros({config_.gru_dim});
  for (int t = valid - 1; t >= 0; --t) {
    h = gru_cell(embedded[static_cast<std::size_t>(t)], h, bwd);
    bwd_states[static_cast<std::size_t>(t)] = h;
  }

  InstructionEncoding enc;
  enc.valid_count = valid;
  enc.h_f = fwd_states[static_cast<std::size_t>(valid - 1)];
  enc.h_b = bwd_states[0];
  enc.o.reserve(static_cast<std::size_t>(k));
  for (int t = 0; t < valid; ++t) {
    enc.o.push_back(concat({fwd_states[static_cast<std::size_t>(t)],
                            bwd_states[static_cast<std::size_t>(t)]}));
  }
  for (int t = valid; t < k; ++t) {
    enc.o.push_back(Tensor::zeros({2 * config_.gru_dim}));
  }
  return enc;
}

AttentionResult FollowNetModel::attend(const TensorPtr& v_s, const TensorPtr& v_d,
                                       const TensorPtr& h_f, const TensorPtr& h_b,
                                       const std::vector<TensorPtr>& o,
                                       int valid_count) const {
  if (!config_.use_attention) {
    throw UnsupportedError("attend: model was built without the attention pathway");
  }
  if (o.empty()) throw ValidationError("attend: no token outputs");
  if (valid_count < 1 || valid_count > static_cast<int>(o.size())) {
    throw ValidationError("attend: every position is padding");
  }

  const TensorPtr v_c = concat({v_s, v_d, h_b, h_f});
  std::vector<TensorPtr> scores;
  scores.reserve(static_cast<std::size_t>(valid_count));
  for (int i = 0; i < valid_count; ++i) {
    const TensorPtr joint = concat({v_c, o[static_cast<std::size_t>(i)]});
    const TensorPtr hidden =
        dense(joint, params_.get("attn.ff.w"), params_.get("attn.ff.b"), Activation::kTanh);
    const TensorPtr score =
        dense(hidden, params_.get("attn.out.w"), params_.get("attn.out.b"),
              Activation::kIdentity);
    scores.push_back(pick(score, 0));
  }
  const TensorPtr weights = softmax(stack_scalars(scores));
  const std::vector<TensorPtr> valid_o(o.begin(), o.begin() + valid_count);
  const TensorPtr v_a = attention_pool(weights, valid_o);
  const TensorPtr v_l =
      dense(v_a, params_.get("lang.head.w"), params_.get("lang.head.b"),
            Activation::kIdentity);

  // Full-length snapshots for analysis; masked positions read 0.
  const int k = static_cast<int>(o.size());
  AttentionResult result;
  result.alpha = Tensor::zeros({k});
  result.e = Tensor::zeros({k});
  for (int i = 0; i < valid_count; ++i) {
    result.alpha->values[static_cast<std::size_t>(i)] =
        weights->values[static_cast<std::size_t>(i)];
    result.e->values[static_cast<std::size_t>(i)] =
        scores[static_cast<std::size_t>(i)]->values[0];
  }
  result.v_a = v_a;
  result.v_l = v_l;
  return result;
}

std::pair<TensorPtr, ForwardTrace> FollowNetModel::q_values(
    const Observation& observation) const {
  ForwardTrace trace;
  trace.v_s = encode_semantic(observation.semantic);
  trace.v_d = encode_depth(observation.depth);

  const InstructionEncoding enc = encode_instruction(observation.tokens);
  trace.h_f = enc.h_f;
  trace.h_b = enc.h_b;

  if (config_.use_attention) {
    trace.o = enc.o;
    AttentionResult att =
        attend(trace.v_s, trace.v_d, enc.h_f, enc.h_b, enc.o, enc.valid_count);
    trace.e = att.e;
    trace.alpha = att.alpha;
    trace.v_a = att.v_a;
    trace.v_l = att.v_l;
  } else {
    trace.v_l = dense(concat({enc.h_f, enc.h_b}), params_.get("lang.head.w"),
                      params_.get("lang.head.b"), Activation::kIdentity);
  }

  TensorPtr x = concat({trace.v_s, trace.v_d, trace.v_l});
  for (std::size_t i = 0; i < config_.q_hiddens.size(); ++i) {
    const std::string name = "q.h" + std::to_string(i + 1);
    x = dense(x, params_.get(name + ".w"), params_.get(name + ".b"), Activation::kRelu);
  }
  trace.q = dense(x, params_.get("q.out.w"), params_.get("q.out.b"), Activation::kIdentity);
  return {trace.q, trace};
}

int greedy_action(const TensorPtr& q) {
  if (q->shape.size() != 1 || q->values.empty()) {
    throw ConfigError("greedy_action: expected a rank-1 action-value vector");
  }
  if (!q->all_finite()) {
    throw ValidationError("greedy_action: action values must be finite");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(q->values.size()); ++i) {
    if (q->values[static_cast<std::size_t>(i)] > q->values[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  return best;
}

int select_action(const TensorPtr& q, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw ConfigError("select_action: epsilon must lie in [0, 1]");
  }
  if (q == nullptr || q->shape.size() != 1 || q->values.empty()) {
    throw ConfigError("select_action: expected a rank-1 action-value vector");
  }
  const double u = rng.uniform();
  if (u < epsilon) {
    return rng.uniform_int(static_cast<int>(q->values.size()));
  }
  return greedy_action(q);
}

}  // namespace follownet
