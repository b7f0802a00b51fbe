#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "follownet/ops.hpp"
#include "follownet/param_set.hpp"
#include "follownet/render.hpp"
#include "follownet/rng.hpp"
#include "follownet/tensor.hpp"

namespace follownet {

// Network topology. Defaults reproduce the reference architecture: a
// semantic branch of 3/8/16-channel convolutions (kernels 1/4/3, strides
// 1/2/1), a depth branch of 8/16 channels (kernels 4/3, strides 2/1), each
// closed by a 32-wide dense layer; a 32-dim token embedding feeding a
// bidirectional GRU with 32 states per direction; a feed-forward attention
// scorer with 16 hidden units; and a Q head with 16 and 8 hidden units over
// the three movement actions.
struct ArchitectureConfig {
  int image_height = 24;
  int image_width = 32;
  int image_channels = 8;  // semantic classes

  std::vector<int> semantic_channels = {3, 8, 16};
  std::vector<int> semantic_kernels = {1, 4, 3};
  std::vector<int> semantic_strides = {1, 2, 1};
  std::vector<int> depth_channels = {8, 16};
  std::vector<int> depth_kernels = {4, 3};
  std::vector<int> depth_strides = {2, 1};

  int embedding_dim = 32;  // token embedding width
  int gru_dim = 32;        // GRU state width per direction
  int semantic_dim = 32;   // dense output after the semantic convs
  int depth_dim = 32;      // dense output after the depth convs
  int attention_hidden = 16;
  std::vector<int> q_hiddens = {16, 8};
  int num_actions = 3;

  int vocab_size = 64;
  int max_tokens = 64;
  bool use_attention = true;

  bool operator==(const ArchitectureConfig&) const = default;
};

// Every intermediate the forward pass computes, for analysis and heatmap
// export. `e` and `alpha` are detached snapshots over the full token
// sequence with 0 recorded at masked (PAD) positions; in no-attention mode
// `o` is empty and `e`/`alpha`/`v_a` are null.
struct ForwardTrace {
  TensorPtr v_s;             // semantic embedding
  TensorPtr v_d;             // depth embedding
  TensorPtr h_f, h_b;        // final forward/backward GRU states
  std::vector<TensorPtr> o;  // per-token GRU outputs [2*gru_dim]
  TensorPtr e;               // raw attention scores [k]
  TensorPtr alpha;           // attention weights [k]
  TensorPtr v_a;             // attention-pooled summary [2*gru_dim]
  TensorPtr v_l;             // language embedding [gru_dim]
  TensorPtr q;               // action values [num_actions]
};

// Token branch outputs. `o` spans the full sequence with zero vectors at
// trailing PAD positions; `valid_count` is the number of real tokens.
struct InstructionEncoding {
  TensorPtr h_f;
  TensorPtr h_b;
  std::vector<TensorPtr> o;
  int valid_count = 0;
};

struct AttentionResult {
  TensorPtr alpha;  // detached weights over the full sequence, 0 at PAD
  TensorPtr e;      // detached raw scores over the full sequence, 0 at PAD
  TensorPtr v_a;    // attention-weighted mean of the valid o_i
  TensorPtr v_l;    // language embedding
};

class FollowNetModel {
 public:
  // Initializes every weight from a named substream of `init_seed` (biases
  // start at zero), so two models built with the same seed agree parameter
  // by parameter regardless of which optional branches exist.
  FollowNetModel(const ArchitectureConfig& config, std::uint64_t init_seed);

  const ArchitectureConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  // conv(1x1) -> conv(4x4,s2) -> conv(3x3) -> dense, ReLU between layers.
  TensorPtr encode_semantic(const TensorPtr& semantic) const;

  // conv(4x4,s2) -> conv(3x3) -> dense, ReLU between layers. Depth values
  // must already be normalized into [0,1].
  TensorPtr encode_depth(const TensorPtr& depth) const;

  // Embeds tokens and runs the two GRU directions from zero states. Only
  // trailing PAD is accepted; PAD positions produce zero outputs.
  InstructionEncoding encode_instruction(const std::vector<int>& tokens) const;

  // Scores each valid token position from [v_c, o_i] with the shared
  // feed-forward scorer, softmaxes, and pools. v_c = [v_s v_d h_b h_f].
  AttentionResult attend(const TensorPtr& v_s, const TensorPtr& v_d, const TensorPtr& h_f,
                         const TensorPtr& h_b, const std::vector<TensorPtr>& o,
                         int valid_count) const;

  // Full forward pass: q = dense stack over [v_s, v_d, v_l] where v_l comes
  // from attention pooling (or directly from [h_f h_b] in baseline mode).
  std::pair<TensorPtr, ForwardTrace> q_values(const Observation& observation) const;

 private:
  ArchitectureConfig config_;
  ParameterSet params_;
};

// Index of the maximum action value; exact ties go to the lowest index.
int greedy_action(const TensorPtr& q);

// ε-greedy selection. Always consumes exactly one uniform draw; when that draw
// falls below epsilon it consumes one more integer draw for the random action.
// epsilon = 0 therefore still advances the stream by one draw per call.
int select_action(const TensorPtr& q, double epsilon, Rng& rng);

}  // namespace follownet
