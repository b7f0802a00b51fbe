#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "follownet/checkpoint.hpp"
#include "follownet/errors.hpp"
#include "follownet/grad_check.hpp"
#include "follownet/model.hpp"
#include "follownet/ops.hpp"
#include "follownet/rng.hpp"

using namespace follownet;

namespace {

// Small enough for fast tests, big enough that every pathway is non-trivial.
ArchitectureConfig tiny_config() {
  ArchitectureConfig c;
  c.image_height = 6;
  c.image_width = 8;
  c.image_channels = 4;
  c.semantic_channels = {2, 3, 4};
  c.semantic_kernels = {1, 3, 3};
  c.semantic_strides = {1, 2, 1};
  c.depth_channels = {3, 4};
  c.depth_kernels = {3, 3};
  c.depth_strides = {2, 1};
  c.embedding_dim = 4;
  c.gru_dim = 4;
  c.semantic_dim = 5;
  c.depth_dim = 5;
  c.attention_hidden = 3;
  c.q_hiddens = {4, 3};
  c.num_actions = 3;
  c.vocab_size = 8;
  c.max_tokens = 10;
  return c;
}

Observation random_observation(const ArchitectureConfig& c, std::uint64_t seed,
                               std::vector<int> tokens) {
  Rng rng(seed);
  Observation obs;
  obs.semantic = Tensor::zeros({c.image_height, c.image_width, c.image_channels});
  obs.depth = Tensor::zeros({c.image_height, c.image_width});
  const int pixels = c.image_height * c.image_width;
  for (int p = 0; p < pixels; ++p) {
    const int cls = rng.uniform_int(c.image_channels);
    obs.semantic->values[static_cast<std::size_t>(p) * c.image_channels + cls] = 1.0;
    obs.depth->values[static_cast<std::size_t>(p)] = rng.uniform();
  }
  obs.tokens = std::move(tokens);
  return obs;
}

void zero_params(ParameterSet& params) {
  for (const auto& [name, tensor] : params) {
    std::fill(tensor->values.begin(), tensor->values.end(), 0.0);
  }
}

}  // namespace

TEST_CASE("default architecture parameter count matches the closed-form sum") {
  // Hand sum for 24x32 images, 8 semantic classes, vocabulary 64:
  //   semantic: 1*1*8*3+3 + 4*4*3*8+8 + 3*3*8*16+16 + 32*(12*16*16)+32 = 99923
  //   depth:    4*4*1*8+8 + 3*3*8*16+16 + 32*(12*16*16)+32            = 99640
  //   language: 64*32 + 2 * 3 * (32*32 + 32*32 + 32)                  = 14528
  //   attention: 16*192+16 + 1*16+1                                   =  3105
  //   language head: 32*64+32                                         =  2080
  //   Q head: 16*96+16 + 8*16+8 + 3*8+3                               =  1715
  ArchitectureConfig config;
  const FollowNetModel model(config, 1);
  CHECK(model.params().total_parameters() == 220991);

  config.use_attention = false;
  const FollowNetModel baseline(config, 1);
  CHECK(baseline.params().total_parameters() == 220991 - 3105);
}

TEST_CASE("constructor validates the architecture") {
  ArchitectureConfig bad = tiny_config();
  bad.gru_dim = 0;
  CHECK_THROWS_AS(FollowNetModel(bad, 1), ConfigError);

  bad = tiny_config();
  bad.vocab_size = 1;
  CHECK_THROWS_AS(FollowNetModel(bad, 1), ConfigError);

  bad = tiny_config();
  bad.semantic_kernels = {1, 3};  // length mismatch with channels
  CHECK_THROWS_AS(FollowNetModel(bad, 1), ConfigError);

  bad = tiny_config();
  bad.depth_strides = {2, 0};
  CHECK_THROWS_AS(FollowNetModel(bad, 1), ConfigError);
}

TEST_CASE("initialization is seed-deterministic and name-addressed") {
  const ArchitectureConfig config = tiny_config();
  const FollowNetModel a(config, 77);
  const FollowNetModel b(config, 77);
  const FollowNetModel c(config, 78);
  bool any_difference = false;
  for (const auto& [name, tensor] : a.params()) {
    CHECK(tensor->values == b.params().get(name)->values);
    if (tensor->values != c.params().get(name)->values) any_difference = true;
  }
  CHECK(any_difference);

  // The baseline variant shares every common parameter with the attention
  // variant at the same seed: names drive initialization, not order.
  ArchitectureConfig no_attn = config;
  no_attn.use_attention = false;
  const FollowNetModel base(no_attn, 77);
  for (const auto& [name, tensor] : base.params()) {
    CHECK(tensor->values == a.params().get(name)->values);
  }
  CHECK(!base.params().contains("attn.ff.w"));
  CHECK(a.params().contains("attn.ff.w"));
}

TEST_CASE("semantic encoder shapes follow the stride chain") {
  const ArchitectureConfig config;  // 24x32x8 default
  const FollowNetModel model(config, 3);

  // Intermediate maps, checked against the conv stack run layer by layer:
  // 24x32x8 -> 24x32x3 -> 12x16x8 -> 12x16x16 -> flatten -> 32.
  Observation obs = random_observation(config, 5, {2});
  TensorPtr x = obs.semantic;
  x = conv2d(x, model.params().get("sem.conv1.w"), model.params().get("sem.conv1.b"), 1,
             Activation::kRelu);
  CHECK(x->shape == Shape{24, 32, 3});
  x = conv2d(x, model.params().get("sem.conv2.w"), model.params().get("sem.conv2.b"), 2,
             Activation::kRelu);
  CHECK(x->shape == Shape{12, 16, 8});
  x = conv2d(x, model.params().get("sem.conv3.w"), model.params().get("sem.conv3.b"), 1,
             Activation::kRelu);
  CHECK(x->shape == Shape{12, 16, 16});

  const TensorPtr v_s = model.encode_semantic(obs.semantic);
  CHECK(v_s->shape == Shape{32});

  const TensorPtr v_d = model.encode_depth(obs.depth);
  CHECK(v_d->shape == Shape{32});
}

TEST_CASE("encoders reject malformed images and zero inputs stay zero") {
  const ArchitectureConfig config = tiny_config();
  FollowNetModel model(config, 11);

  CHECK_THROWS_AS(model.encode_semantic(Tensor::zeros({6, 8, 3})), ConfigError);
  CHECK_THROWS_AS(model.encode_semantic(Tensor::zeros({8, 6, 4})), ConfigError);
  CHECK_THROWS_AS(model.encode_depth(Tensor::zeros({6, 8, 1})), ConfigError);

  TensorPtr bad_depth = Tensor::zeros({6, 8});
  bad_depth->values[5] = 1.25;
  CHECK_THROWS_AS(model.encode_depth(bad_depth), ValidationError);
  bad_depth->values[5] = -0.01;
  CHECK_THROWS_AS(model.encode_depth(bad_depth), ValidationError);

  // Zero input with zero biases (the initializer's default) gives exact 0.
  const TensorPtr v_s = model.encode_semantic(Tensor::zeros({6, 8, 4}));
  for (double v : v_s->values) CHECK(v == 0.0);
  const TensorPtr v_d = model.encode_depth(Tensor::zeros({6, 8}));
  for (double v : v_d->values) CHECK(v == 0.0);
}

TEST_CASE("instruction encoder handles singleton, padding, and errors") {
  const ArchitectureConfig config = tiny_config();
  const FollowNetModel model(config, 13);

  const InstructionEncoding one = model.encode_instruction({3});
  CHECK(one.valid_count == 1);
  REQUIRE(one.o.size() == 1);
  CHECK(one.o[0]->shape == Shape{8});
  // o_1 = [o_1F o_1B]; with one step h_F is the forward half.
  for (int i = 0; i < 4; ++i) {
    CHECK(one.o[0]->values[static_cast<std::size_t>(i)] ==
          one.h_f->values[static_cast<std::size_t>(i)]);
    CHECK(one.o[0]->values[static_cast<std::size_t>(4 + i)] ==
          one.h_b->values[static_cast<std::size_t>(i)]);
  }

  const InstructionEncoding padded = model.encode_instruction({3, 5, 0, 0});
  CHECK(padded.valid_count == 2);
  REQUIRE(padded.o.size() == 4);
  for (double v : padded.o[2]->values) CHECK(v == 0.0);
  for (double v : padded.o[3]->values) CHECK(v == 0.0);

  CHECK_THROWS_AS(model.encode_instruction({}), ValidationError);
  CHECK_THROWS_AS(model.encode_instruction({0, 0}), ValidationError);       // all PAD
  CHECK_THROWS_AS(model.encode_instruction({3, 0, 5}), ValidationError);    // gap PAD
  CHECK_THROWS_AS(model.encode_instruction({3, 99}), ValidationError);      // bad id
  CHECK_THROWS_AS(model.encode_instruction(std::vector<int>(11, 2)), ValidationError);

  FollowNetModel zeroed(config, 13);
  zero_params(zeroed.params());
  const InstructionEncoding z = zeroed.encode_instruction({2, 3, 4});
  for (const TensorPtr& o : z.o) {
    for (double v : o->values) CHECK(v == 0.0);
  }
}

TEST_CASE("reversing tokens swaps the roles of the two GRU directions") {
  const ArchitectureConfig config = tiny_config();
  const FollowNetModel fwd_model(config, 21);
  FollowNetModel swapped(config, 21);
  for (const char* gate : {"z", "r", "h"}) {
    for (const char* mat : {"w", "u", "b"}) {
      const std::string f = std::string("lang.fwd.") + mat + gate;
      const std::string b = std::string("lang.bwd.") + mat + gate;
      swapped.params().get(f)->values = fwd_model.params().get(b)->values;
      swapped.params().get(b)->values = fwd_model.params().get(f)->values;
    }
  }

  const std::vector<int> tokens = {2, 3, 4, 5, 6};
  const std::vector<int> reversed = {6, 5, 4, 3, 2};
  const InstructionEncoding a = fwd_model.encode_instruction(tokens);
  const InstructionEncoding r = swapped.encode_instruction(reversed);

  const int k = 5;
  const int d = config.gru_dim;
  for (int i = 0; i < k; ++i) {
    const TensorPtr& oi = a.o[static_cast<std::size_t>(i)];
    const TensorPtr& oj = r.o[static_cast<std::size_t>(k - 1 - i)];
    for (int u = 0; u < d; ++u) {
      // forward half of one run equals backward half of the mirrored run
      CHECK(oi->values[static_cast<std::size_t>(u)] ==
            doctest::Approx(oj->values[static_cast<std::size_t>(d + u)]).epsilon(1e-12));
      CHECK(oi->values[static_cast<std::size_t>(d + u)] ==
            doctest::Approx(oj->values[static_cast<std::size_t>(u)]).epsilon(1e-12));
    }
  }
  for (int u = 0; u < d; ++u) {
    CHECK(a.h_f->values[static_cast<std::size_t>(u)] ==
          doctest::Approx(r.h_b->values[static_cast<std::size_t>(u)]).epsilon(1e-12));
    CHECK(a.h_b->values[static_cast<std::size_t>(u)] ==
          doctest::Approx(r.h_f->values[static_cast<std::size_t>(u)]).epsilon(1e-12));
  }
}

TEST_CASE("attention weights: singleton, symmetry, and masking") {
  const ArchitectureConfig config = tiny_config();
  const FollowNetModel model(config, 31);
  Rng rng(99);
  auto random_vec = [&](int n) {
    TensorPtr t = Tensor::zeros({n});
    for (double& v : t->values) v = rng.uniform(-1.0, 1.0);
    return t;
  };
  const TensorPtr v_s = random_vec(5);
  const TensorPtr v_d = random_vec(5);
  const TensorPtr h_f = random_vec(4);
  const TensorPtr h_b = random_vec(4);

  // k = 1: the full weight lands on the only token and v_a = o_1.
  const TensorPtr o0 = random_vec(8);
  const AttentionResult single = model.attend(v_s, v_d, h_f, h_b, {o0}, 1);
  CHECK(single.alpha->values[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 8; ++i) {
    CHECK(single.v_a->values[static_cast<std::size_t>(i)] ==
          doctest::Approx(o0->values[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }

  // Identical token outputs score identically: alpha is uniform.
  const AttentionResult uniform = model.attend(v_s, v_d, h_f, h_b, {o0, o0, o0, o0}, 4);
  for (double a : uniform.alpha->values) CHECK(a == doctest::Approx(0.25).epsilon(1e-12));

  // Trailing PAD positions carry zero weight and leave the result unchanged.
  const TensorPtr o1 = random_vec(8);
  const AttentionResult bare = model.attend(v_s, v_d, h_f, h_b, {o0, o1}, 2);
  const AttentionResult padded = model.attend(
      v_s, v_d, h_f, h_b, {o0, o1, Tensor::zeros({8}), Tensor::zeros({8})}, 2);
  CHECK(padded.alpha->shape == Shape{4});
  CHECK(padded.alpha->values[2] == 0.0);
  CHECK(padded.alpha->values[3] == 0.0);
  CHECK(padded.e->values[2] == 0.0);
  CHECK(bare.v_l->values == padded.v_l->values);

  CHECK_THROWS_AS(model.attend(v_s, v_d, h_f, h_b, {o0}, 0), ValidationError);
  CHECK_THROWS_AS(model.attend(v_s, v_d, h_f, h_b, {}, 0), ValidationError);

  ArchitectureConfig no_attn = config;
  no_attn.use_attention = false;
  const FollowNetModel baseline(no_attn, 31);
  CHECK_THROWS_AS(baseline.attend(v_s, v_d, h_f, h_b, {o0}, 1), UnsupportedError);
}

TEST_CASE("attention matches a scalar oracle on a tiny instance") {
  ArchitectureConfig config = tiny_config();
  config.gru_dim = 2;
  config.semantic_dim = 2;
  config.depth_dim = 2;
  const FollowNetModel model(config, 41);

  Rng rng(7);
  auto random_vec = [&](int n) {
    TensorPtr t = Tensor::zeros({n});
    for (double& v : t->values) v = rng.uniform(-1.0, 1.0);
    return t;
  };
  const TensorPtr v_s = random_vec(2);
  const TensorPtr v_d = random_vec(2);
  const TensorPtr h_f = random_vec(2);
  const TensorPtr h_b = random_vec(2);
  const std::vector<TensorPtr> o = {random_vec(4), random_vec(4), random_vec(4)};

  const AttentionResult got = model.attend(v_s, v_d, h_f, h_b, o, 3);

  // Oracle: independent scalar math over the same parameter values.
  std::vector<double> v_c;
  for (const TensorPtr& part : {v_s, v_d, h_b, h_f}) {
    v_c.insert(v_c.end(), part->values.begin(), part->values.end());
  }
  const auto& ffw = model.params().get("attn.ff.w")->values;
  const auto& ffb = model.params().get("attn.ff.b")->values;
  const auto& ow = model.params().get("attn.out.w")->values;
  const auto& ob = model.params().get("attn.out.b")->values;
  std::vector<double> scores;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> joint = v_c;
    joint.insert(joint.end(), o[static_cast<std::size_t>(i)]->values.begin(),
                 o[static_cast<std::size_t>(i)]->values.end());
    const std::vector<double> hidden =
        oracles::dense(joint, ffw, ffb, 3, 12, [](double x) { return std::tanh(x); });
    scores.push_back(
        oracles::dense(hidden, ow, ob, 1, 3, [](double x) { return x; })[0]);
  }
  const std::vector<double> alpha = oracles::softmax(scores);
  std::vector<double> v_a(4, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      v_a[static_cast<std::size_t>(j)] +=
          alpha[static_cast<std::size_t>(i)] *
          o[static_cast<std::size_t>(i)]->values[static_cast<std::size_t>(j)] / 3.0;
    }
  }
  const std::vector<double> v_l =
      oracles::dense(v_a, model.params().get("lang.head.w")->values,
                     model.params().get("lang.head.b")->values, 2, 4,
                     [](double x) { return x; });

  for (int i = 0; i < 3; ++i) {
    CHECK(got.alpha->values[static_cast<std::size_t>(i)] ==
          doctest::Approx(alpha[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
  for (int j = 0; j < 4; ++j) {
    CHECK(got.v_a->values[static_cast<std::size_t>(j)] ==
          doctest::Approx(v_a[static_cast<std::size_t>(j)]).epsilon(1e-12));
  }
  for (int j = 0; j < 2; ++j) {
    CHECK(got.v_l->values[static_cast<std::size_t>(j)] ==
          doctest::Approx(v_l[static_cast<std::size_t>(j)]).epsilon(1e-12));
  }
}

TEST_CASE("full forward pass: zeros, determinism, and padding invariance") {
  const ArchitectureConfig config = tiny_config();

  FollowNetModel zeroed(config, 51);
  zero_params(zeroed.params());
  const auto [q0, trace0] = zeroed.q_values(random_observation(config, 1, {2, 3}));
  CHECK(q0->shape == Shape{3});
  for (double v : q0->values) CHECK(v == 0.0);

  const FollowNetModel model(config, 51);
  const Observation obs = random_observation(config, 2, {2, 3, 4});
  const auto [qa, ta] = model.q_values(obs);
  const auto [qb, tb] = model.q_values(obs);
  CHECK(qa->values == qb->values);
  CHECK(qa->all_finite());

  // Extra trailing padding must not change the action values at all.
  Observation padded = obs;
  padded.tokens.insert(padded.tokens.end(), 3, 0);
  const auto [qp, tp] = model.q_values(padded);
  CHECK(qp->values == qa->values);
  REQUIRE(tp.alpha->shape == Shape{6});
  CHECK(tp.alpha->values[3] == 0.0);
  CHECK(tp.alpha->values[4] == 0.0);
  CHECK(tp.alpha->values[5] == 0.0);

  // Trace invariants: alpha is a probability vector, everything finite.
  double alpha_sum = 0.0;
  for (double a : tp.alpha->values) {
    CHECK(a >= 0.0);
    alpha_sum += a;
  }
  CHECK(alpha_sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tp.o.size() == 6);
  CHECK(tp.v_s->all_finite());
  CHECK(tp.v_d->all_finite());
  CHECK(tp.h_f->all_finite());
  CHECK(tp.h_b->all_finite());
  CHECK(tp.e->all_finite());
  CHECK(tp.v_a->all_finite());
  CHECK(tp.v_l->all_finite());
}

TEST_CASE("baseline mode bypasses attention but shares the visual pathway") {
  ArchitectureConfig config = tiny_config();
  const FollowNetModel attention(config, 61);
  config.use_attention = false;
  const FollowNetModel baseline(config, 61);

  const Observation obs = random_observation(config, 3, {2, 5, 3});
  const auto [qa, ta] = attention.q_values(obs);
  const auto [qb, tb] = baseline.q_values(obs);

  CHECK(ta.v_s->values == tb.v_s->values);  // identical weights, identical input
  CHECK(ta.v_d->values == tb.v_d->values);
  CHECK(tb.alpha == nullptr);
  CHECK(tb.e == nullptr);
  CHECK(tb.v_a == nullptr);
  CHECK(tb.o.empty());

  // v_l = language head applied to [h_f h_b] directly.
  std::vector<double> joined = tb.h_f->values;
  joined.insert(joined.end(), tb.h_b->values.begin(), tb.h_b->values.end());
  const std::vector<double> expect =
      oracles::dense(joined, baseline.params().get("lang.head.w")->values,
                     baseline.params().get("lang.head.b")->values, 4, 8,
                     [](double x) { return x; });
  for (int i = 0; i < 4; ++i) {
    CHECK(tb.v_l->values[static_cast<std::size_t>(i)] ==
          doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("greedy action: argmax, tie to lowest, affine invariance") {
  CHECK(greedy_action(Tensor::from_values({3}, {0.1, 0.9, 0.2})) == 1);
  CHECK(greedy_action(Tensor::from_values({3}, {0.5, 0.5, 0.1})) == 0);
  CHECK(greedy_action(Tensor::from_values({3}, {-3.0, -1.0, -2.0})) == 1);

  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(3);
    for (double& v : q) v = rng.uniform(-2.0, 2.0);
    const int base = greedy_action(Tensor::from_values({3}, q));
    const double scale_factor = rng.uniform(0.1, 5.0);
    const double shift = rng.uniform(-10.0, 10.0);
    std::vector<double> transformed(3);
    for (int i = 0; i < 3; ++i) {
      transformed[static_cast<std::size_t>(i)] =
          scale_factor * q[static_cast<std::size_t>(i)] + shift;
    }
    CHECK(greedy_action(Tensor::from_values({3}, transformed)) == base);
  }

  CHECK_THROWS_AS(greedy_action(Tensor::zeros({2, 2})), ConfigError);
  CHECK_THROWS_AS(
      greedy_action(Tensor::from_values({2}, {0.0, std::nan("")})), ValidationError);
}

TEST_CASE("whole-model gradients agree with finite differences") {
  ArchitectureConfig config = tiny_config();
  config.semantic_channels = {2, 3};
  config.semantic_kernels = {1, 3};
  config.semantic_strides = {1, 2};
  FollowNetModel model(config, 71);
  const Observation obs = random_observation(config, 4, {2, 3, 7, 4, 0});

  auto forward = [&](ParameterSet&) {
    const auto [q, trace] = model.q_values(obs);
    return sum_scalars({squared_error(pick(q, 0), 0.3), squared_error(pick(q, 1), -0.2),
                        squared_error(pick(q, 2), 0.5)});
  };
  const double worst = grad_check(forward, model.params());
  CHECK(worst < 1e-4);
}

TEST_CASE("checkpoints round-trip bit-identically") {
  const ArchitectureConfig config = tiny_config();
  FollowNetModel model(config, 81);
  const std::string path =
      (std::filesystem::temp_directory_path() / "follownet_ckpt_test.bin").string();
  const std::string path2 =
      (std::filesystem::temp_directory_path() / "follownet_ckpt_test2.bin").string();

  save_checkpoint(model, path);
  const FollowNetModel loaded = load_checkpoint(path);
  CHECK(loaded.config() == model.config());
  for (const auto& [name, tensor] : model.params()) {
    const TensorPtr& other = loaded.params().get(name);
    REQUIRE(other->shape == tensor->shape);
    for (std::size_t i = 0; i < tensor->values.size(); ++i) {
      // Stored precision is 32-bit; the reload must match it exactly.
      CHECK(other->values[i] == static_cast<double>(static_cast<float>(tensor->values[i])));
    }
  }

  save_checkpoint(loaded, path2);
  std::ifstream f1(path, std::ios::binary);
  std::ifstream f2(path2, std::ios::binary);
  const std::string bytes1((std::istreambuf_iterator<char>(f1)),
                           std::istreambuf_iterator<char>());
  const std::string bytes2((std::istreambuf_iterator<char>(f2)),
                           std::istreambuf_iterator<char>());
  CHECK(bytes1 == bytes2);
  CHECK(bytes1.substr(0, 4) == "FNET");

  // Baseline configs survive the trip too.
  ArchitectureConfig no_attn = config;
  no_attn.use_attention = false;
  save_checkpoint(FollowNetModel(no_attn, 82), path);
  CHECK(load_checkpoint(path).config() == no_attn);

  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("checkpoint loading rejects corruption, truncation, bad versions") {
  const ArchitectureConfig config = tiny_config();
  FollowNetModel model(config, 91);
  const std::string path =
      (std::filesystem::temp_directory_path() / "follownet_ckpt_bad.bin").string();
  save_checkpoint(model, path);

  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  auto write_bytes = [&](const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << data;
  };

  std::string corrupted = bytes;
  corrupted[bytes.size() / 2] = static_cast<char>(corrupted[bytes.size() / 2] ^ 0x5a);
  write_bytes(corrupted);
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);

  write_bytes(bytes.substr(0, bytes.size() / 3));
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);

  write_bytes("");
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);

  // Bump the version field (bytes 4..7) and re-stamp the checksum so only
  // the version check can object.
  std::string versioned = bytes;
  versioned[4] = 2;
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i + 8 < versioned.size(); ++i) {
    h ^= static_cast<unsigned char>(versioned[i]);
    h *= 1099511628211ULL;
  }
  for (int i = 0; i < 8; ++i) {
    versioned[versioned.size() - 8 + static_cast<std::size_t>(i)] =
        static_cast<char>((h >> (8 * i)) & 0xff);
  }
  write_bytes(versioned);
  CHECK_THROWS_AS(load_checkpoint(path), UnsupportedError);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/nowhere.bin"), IoError);
  std::filesystem::remove(path);
}
