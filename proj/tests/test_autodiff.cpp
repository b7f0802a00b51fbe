#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "follownet/errors.hpp"
#include "follownet/grad_check.hpp"
#include "follownet/ops.hpp"
#include "follownet/optim.hpp"
#include "follownet/param_set.hpp"
#include "follownet/rng.hpp"
#include "follownet/tensor.hpp"
#include "oracles.hpp"

using namespace follownet;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

TensorPtr random_tensor(Rng& rng, Shape shape) {
  const auto n = static_cast<std::size_t>(shape_size(shape));
  return Tensor::from_values(std::move(shape), random_vec(rng, n));
}

}  // namespace

TEST_CASE("tensor factories validate shape against payload") {
  auto t = Tensor::zeros({2, 3});
  CHECK_EQ(t->size(), 6);
  CHECK_FALSE(t->requires_grad);
  CHECK_THROWS_AS(Tensor::from_values({2, 2}, {1.0, 2.0, 3.0}), ConfigError);
  CHECK_THROWS_AS(Tensor::zeros({2, 0}), ConfigError);
  auto s = Tensor::scalar(4.5);
  CHECK_EQ(s->size(), 1);
  CHECK_EQ(s->values[0], 4.5);
}

TEST_CASE("backward demands a scalar root and accumulates across shared paths") {
  CHECK_THROWS_AS(backward(Tensor::zeros({3})), InternalError);

  // Diamond: s = 3x + 4x, ds/dx = 7.
  auto x = Tensor::scalar(2.0, true);
  auto a = scale(x, 3.0);
  auto b = scale(x, 4.0);
  auto s = sum_scalars({a, b});
  CHECK_EQ(s->values[0], doctest::Approx(14.0));
  backward(s);
  CHECK_EQ(x->grad[0], doctest::Approx(7.0));

  // A second backward run accumulates on top unless grads are cleared.
  auto s2 = scale(x, 5.0);
  backward(s2);
  CHECK_EQ(x->grad[0], doctest::Approx(12.0));
}

TEST_CASE("grad mode guard suppresses graph construction") {
  auto x = Tensor::scalar(1.5, true);
  {
    NoGradGuard ng;
    CHECK_FALSE(GradMode::enabled());
    auto y = scale(x, 2.0);
    CHECK_FALSE(y->requires_grad);
    CHECK(y->parents.empty());
  }
  CHECK(GradMode::enabled());
  auto y = scale(x, 2.0);
  CHECK(y->requires_grad);
  CHECK_EQ(y->parents.size(), 1);
}

TEST_CASE("seeded rng streams are deterministic and well ranged") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK_EQ(a.next_u64(), b.next_u64());

  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<int> seen(10, 0);
  for (int i = 0; i < 1000; ++i) {
    const int v = r.uniform_int(10);
    CHECK(v >= 0);
    CHECK(v < 10);
    seen[static_cast<std::size_t>(v)]++;
  }
  for (int c : seen) CHECK(c > 0);
  CHECK_THROWS_AS(r.uniform_int(0), InternalError);

  CHECK_EQ(derive_seed(99, "env"), derive_seed(99, "env"));
  CHECK_NE(derive_seed(99, "env"), derive_seed(99, "init"));
  CHECK_NE(derive_seed(99, "env"), derive_seed(100, "env"));
  CHECK_NE(derive_seed(99, std::uint64_t{0}), derive_seed(99, std::uint64_t{1}));
}

TEST_CASE("parameter set rejects duplicates and unknown names") {
  ParameterSet ps;
  ps.add("w", Tensor::zeros({2, 2}));
  CHECK_THROWS_AS(ps.add("w", Tensor::zeros({1})), ConfigError);
  CHECK_THROWS_AS(ps.get("nope"), ConfigError);
  CHECK(ps.get("w")->requires_grad);
  CHECK_EQ(ps.total_parameters(), 4);

  ps.add("a", Tensor::zeros({3}));
  std::vector<std::string> order;
  for (const auto& [name, t] : ps) order.push_back(name);
  CHECK_EQ(order, std::vector<std::string>{"a", "w"});

  auto copy = ps.clone();
  copy.get("w")->values[0] = 9.0;
  CHECK_EQ(ps.get("w")->values[0], 0.0);
  ps.copy_values_from(copy);
  CHECK_EQ(ps.get("w")->values[0], 9.0);
}

TEST_CASE("dense identity and zero-weight cases") {
  auto x = Tensor::from_values({3}, {1.0, 2.0, 3.0});
  auto eye = Tensor::from_values({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  auto zero3 = Tensor::zeros({3});
  auto y = dense(x, eye, zero3, Activation::kIdentity);
  CHECK_EQ(y->values, std::vector<double>{1.0, 2.0, 3.0});

  Rng rng(3);
  auto any_x = random_tensor(rng, {4});
  auto w0 = Tensor::zeros({2, 4});
  auto b = Tensor::from_values({2}, {0.5, -0.5});
  auto y2 = dense(any_x, w0, b, Activation::kIdentity);
  CHECK_EQ(y2->values, std::vector<double>{0.5, -0.5});

  CHECK_THROWS_AS(dense(x, w0, b, Activation::kIdentity), ConfigError);
}

TEST_CASE("dense matches the scalar-loop reference for every activation") {
  Rng rng(7);
  const int n_in = 4, n_out = 3;
  auto xv = random_vec(rng, n_in);
  auto wv = random_vec(rng, static_cast<std::size_t>(n_out) * n_in);
  auto bv = random_vec(rng, n_out);
  auto x = Tensor::from_values({n_in}, xv);
  auto w = Tensor::from_values({n_out, n_in}, wv);
  auto b = Tensor::from_values({n_out}, bv);

  struct Case {
    Activation act;
    double (*fn)(double);
  };
  const Case cases[] = {
      {Activation::kIdentity, +[](double v) { return v; }},
      {Activation::kRelu, +[](double v) { return v > 0.0 ? v : 0.0; }},
      {Activation::kTanh, +[](double v) { return std::tanh(v); }},
      {Activation::kSigmoid, +[](double v) { return oracles::sigmoid(v); }},
  };
  for (const auto& c : cases) {
    auto got = dense(x, w, b, c.act);
    auto want = oracles::dense(xv, wv, bv, n_out, n_in, c.fn);
    for (int i = 0; i < n_out; ++i) {
      CHECK_EQ(got->values[static_cast<std::size_t>(i)],
               doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
  }

  // Determinism: repeated evaluation is bit-identical.
  auto once = dense(x, w, b, Activation::kTanh);
  auto twice = dense(x, w, b, Activation::kTanh);
  CHECK(once->values == twice->values);
}

TEST_CASE("conv2d identity, ones-kernel counts, and output shapes") {
  Rng rng(5);
  auto x = random_tensor(rng, {4, 3, 1});
  auto k1 = Tensor::from_values({1, 1, 1, 1}, {1.0});
  auto b1 = Tensor::zeros({1});
  auto y = conv2d(x, k1, b1, 1, Activation::kIdentity);
  CHECK(y->shape == Shape{4, 3, 1});
  CHECK(y->values == x->values);

  // All-ones 5x5 input, all-ones 3x3 kernel: each output counts the in-bounds
  // neighbours, so corners see 4 and the interior sees 9.
  auto ones = Tensor::from_values({5, 5, 1}, std::vector<double>(25, 1.0));
  auto k3 = Tensor::from_values({3, 3, 1, 1}, std::vector<double>(9, 1.0));
  auto y2 = conv2d(ones, k3, b1, 1, Activation::kIdentity);
  CHECK(y2->shape == Shape{5, 5, 1});
  auto at = [&](int r, int c) { return y2->values[static_cast<std::size_t>(r) * 5 + c]; };
  CHECK_EQ(at(0, 0), 4.0);
  CHECK_EQ(at(0, 4), 4.0);
  CHECK_EQ(at(4, 0), 4.0);
  CHECK_EQ(at(4, 4), 4.0);
  CHECK_EQ(at(2, 2), 9.0);
  CHECK_EQ(at(0, 2), 6.0);

  auto xi = random_tensor(rng, {32, 24, 1});
  auto k4 = random_tensor(rng, {4, 4, 1, 8});
  auto b8 = Tensor::zeros({8});
  auto y3 = conv2d(xi, k4, b8, 2, Activation::kRelu);
  CHECK(y3->shape == Shape{16, 12, 8});

  CHECK_THROWS_AS(conv2d(x, random_tensor(rng, {9, 9, 1, 1}), b1, 1, Activation::kIdentity),
                  ConfigError);
  CHECK_THROWS_AS(conv2d(x, k1, b1, 0, Activation::kIdentity), ConfigError);
}

TEST_CASE("conv2d matches the nested-loop reference on odd and even kernels") {
  Rng rng(13);
  const int h = 7, w = 6, c_in = 3;
  auto xv = random_vec(rng, static_cast<std::size_t>(h) * w * c_in);
  auto x = Tensor::from_values({h, w, c_in}, xv);

  struct Case {
    int k, c_out, stride;
  };
  for (const Case& c : {Case{3, 4, 1}, Case{4, 2, 2}, Case{4, 2, 1}, Case{1, 5, 2}}) {
    auto kv = random_vec(rng, static_cast<std::size_t>(c.k) * c.k * c_in * c.c_out);
    auto bv = random_vec(rng, static_cast<std::size_t>(c.c_out));
    auto kern = Tensor::from_values({c.k, c.k, c_in, c.c_out}, kv);
    auto bias = Tensor::from_values({c.c_out}, bv);
    auto got = conv2d(x, kern, bias, c.stride, Activation::kTanh);
    auto want = oracles::conv2d(xv, h, w, c_in, kv, c.k, c.c_out, bv, c.stride,
                                [](double v) { return std::tanh(v); });
    REQUIRE_EQ(got->values.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK_EQ(got->values[i], doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("gru cell trivial fixed points") {
  const int dx = 3, dh = 4;
  ParameterSet ps;
  ps.add("g.wz", Tensor::zeros({dh, dx}));
  ps.add("g.uz", Tensor::zeros({dh, dh}));
  ps.add("g.bz", Tensor::zeros({dh}));
  ps.add("g.wr", Tensor::zeros({dh, dx}));
  ps.add("g.ur", Tensor::zeros({dh, dh}));
  ps.add("g.br", Tensor::zeros({dh}));
  ps.add("g.wh", Tensor::zeros({dh, dx}));
  ps.add("g.uh", Tensor::zeros({dh, dh}));
  ps.add("g.bh", Tensor::zeros({dh}));
  auto p = gru_params_from(ps, "g.");

  Rng rng(17);
  auto x = random_tensor(rng, {dx});
  auto h0 = Tensor::zeros({dh});
  auto out = gru_cell(x, h0, p);
  for (double v : out->values) CHECK_EQ(v, 0.0);

  auto h1 = Tensor::from_values({dh}, std::vector<double>(dh, 1.0));
  auto out2 = gru_cell(x, h1, p);
  for (double v : out2->values) CHECK_EQ(v, doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(gru_cell(random_tensor(rng, {dx + 1}), h1, p), ConfigError);
  CHECK_THROWS_AS(gru_params_from(ps, "other."), ConfigError);
}

TEST_CASE("gru cell matches the per-element gate reference") {
  Rng rng(11);
  const int dx = 3, dh = 4;
  oracles::GruWeights ow;
  ow.wz = random_vec(rng, static_cast<std::size_t>(dh) * dx);
  ow.uz = random_vec(rng, static_cast<std::size_t>(dh) * dh);
  ow.bz = random_vec(rng, dh);
  ow.wr = random_vec(rng, static_cast<std::size_t>(dh) * dx);
  ow.ur = random_vec(rng, static_cast<std::size_t>(dh) * dh);
  ow.br = random_vec(rng, dh);
  ow.wh = random_vec(rng, static_cast<std::size_t>(dh) * dx);
  ow.uh = random_vec(rng, static_cast<std::size_t>(dh) * dh);
  ow.bh = random_vec(rng, dh);
  auto xv = random_vec(rng, dx);
  auto hv = random_vec(rng, dh);

  GruParams p;
  p.wz = Tensor::from_values({dh, dx}, ow.wz);
  p.uz = Tensor::from_values({dh, dh}, ow.uz);
  p.bz = Tensor::from_values({dh}, ow.bz);
  p.wr = Tensor::from_values({dh, dx}, ow.wr);
  p.ur = Tensor::from_values({dh, dh}, ow.ur);
  p.br = Tensor::from_values({dh}, ow.br);
  p.wh = Tensor::from_values({dh, dx}, ow.wh);
  p.uh = Tensor::from_values({dh, dh}, ow.uh);
  p.bh = Tensor::from_values({dh}, ow.bh);

  auto got = gru_cell(Tensor::from_values({dx}, xv), Tensor::from_values({dh}, hv), p);
  auto want = oracles::gru(xv, hv, ow, dx, dh);
  for (int i = 0; i < dh; ++i) {
    CHECK_EQ(got->values[static_cast<std::size_t>(i)],
             doctest::Approx(want[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
}

TEST_CASE("softmax is normalized, shift invariant, and overflow safe") {
  auto u = softmax(Tensor::from_values({3}, {0.0, 0.0, 0.0}));
  for (double v : u->values) CHECK_EQ(v, doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    auto xv = random_vec(rng, 6, -5.0, 5.0);
    auto y = softmax(Tensor::from_values({6}, xv));
    double sum = 0.0;
    for (double v : y->values) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK_EQ(sum, doctest::Approx(1.0).epsilon(1e-12));

    const double c = rng.uniform(-10.0, 10.0);
    auto shifted = xv;
    for (auto& v : shifted) v += c;
    auto y2 = softmax(Tensor::from_values({6}, shifted));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK_EQ(y->values[i], doctest::Approx(y2->values[i]).epsilon(1e-12));
    }
    auto want = oracles::softmax(xv);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK_EQ(y->values[i], doctest::Approx(want[i]).epsilon(1e-12));
    }
  }

  auto big = softmax(Tensor::from_values({2}, {100.0, 0.0}));
  CHECK(big->all_finite());
  CHECK_EQ(big->values[0], doctest::Approx(1.0).epsilon(1e-12));
  CHECK(big->values[1] < 1e-20);

  CHECK_THROWS_AS(softmax(Tensor::zeros({2, 2})), ConfigError);
}

TEST_CASE("embedding lookup copies rows and rejects out-of-range ids") {
  auto table = Tensor::from_values({3, 2}, {10, 11, 20, 21, 30, 31});
  auto rows = embed_rows(table, {2, 0, 2});
  REQUIRE_EQ(rows.size(), 3);
  CHECK_EQ(rows[0]->values, std::vector<double>{30, 31});
  CHECK_EQ(rows[1]->values, std::vector<double>{10, 11});
  CHECK_THROWS_AS(embed_rows(table, {3}), ValidationError);
  CHECK_THROWS_AS(embed_rows(table, {-1}), ValidationError);

  // Repeated ids accumulate gradient into the same row.
  table->set_requires_grad(true);
  auto picked = embed_rows(table, {1, 1});
  auto s = sum_scalars({pick(picked[0], 0), pick(picked[1], 0)});
  backward(s);
  CHECK_EQ(table->grad[2], doctest::Approx(2.0));
  CHECK_EQ(table->grad[0], 0.0);
}

TEST_CASE("concat, stack, pick, scale, and sums behave as glue") {
  auto a = Tensor::from_values({2}, {1, 2});
  auto b = Tensor::from_values({3}, {3, 4, 5});
  auto c = concat({a, b});
  CHECK(c->shape == Shape{5});
  CHECK_EQ(c->values, std::vector<double>{1, 2, 3, 4, 5});

  auto s = stack_scalars({Tensor::scalar(7), Tensor::scalar(8)});
  CHECK_EQ(s->values, std::vector<double>{7, 8});
  CHECK_THROWS_AS(stack_scalars({a}), ConfigError);

  auto p = pick(b, 1);
  CHECK_EQ(p->values[0], 4.0);
  CHECK_THROWS_AS(pick(b, 3), ConfigError);

  auto sc = scale(b, -2.0);
  CHECK_EQ(sc->values, std::vector<double>{-6, -8, -10});

  auto se = squared_error(Tensor::scalar(3.0), 5.0);
  CHECK_EQ(se->values[0], 4.0);

  auto total = sum_scalars({Tensor::scalar(1.0), Tensor::scalar(2.5)});
  CHECK_EQ(total->values[0], 3.5);
}

TEST_CASE("attention pooling averages weighted encodings") {
  auto alpha = Tensor::from_values({2}, {1.0, 1.0});
  auto o0 = Tensor::from_values({2}, {2, 4});
  auto o1 = Tensor::from_values({2}, {4, 6});
  auto v = attention_pool(alpha, {o0, o1});
  CHECK_EQ(v->values, std::vector<double>{3, 5});

  auto hard = attention_pool(Tensor::from_values({2}, {1.0, 0.0}), {o0, o1});
  CHECK_EQ(hard->values, std::vector<double>{1, 2});

  CHECK_THROWS_AS(attention_pool(alpha, {o0}), ConfigError);
}

TEST_CASE("sgd applies the pinned learning-rate arithmetic and zeroes grads") {
  ParameterSet ps;
  ps.add("theta", Tensor::scalar(1.0));
  ps.get("theta")->grad[0] = 1.0;
  sgd_update(ps, 1.70974e-4);
  CHECK(std::fabs(ps.get("theta")->values[0] - 0.99982903) < 5e-9);
  CHECK_EQ(ps.get("theta")->grad[0], 0.0);

  // Zero gradient leaves parameters alone.
  sgd_update(ps, 1.70974e-4);
  CHECK(std::fabs(ps.get("theta")->values[0] - 0.99982903) < 5e-9);

  // Two updates with gradient g match one update with 2g.
  ParameterSet two;
  two.add("w", Tensor::scalar(0.3));
  two.get("w")->grad[0] = 0.7;
  sgd_update(two, 0.01);
  two.get("w")->grad[0] = 0.7;
  sgd_update(two, 0.01);
  ParameterSet one;
  one.add("w", Tensor::scalar(0.3));
  one.get("w")->grad[0] = 1.4;
  sgd_update(one, 0.01);
  CHECK_EQ(two.get("w")->values[0], doctest::Approx(one.get("w")->values[0]).epsilon(1e-15));

  ParameterSet broken;
  broken.add("naked", Tensor::scalar(1.0));
  broken.get("naked")->grad.clear();
  CHECK_THROWS_WITH_AS(sgd_update(broken, 0.1),
                       "sgd_update: parameter 'naked' has no gradient buffer", InternalError);
}

TEST_CASE("momentum optimizer reduces to plain sgd at momentum zero") {
  ParameterSet a, b;
  a.add("w", Tensor::scalar(2.0));
  b.add("w", Tensor::scalar(2.0));
  SgdOptimizer opt(0.1, 0.0);
  a.get("w")->grad[0] = 1.0;
  opt.step(a);
  b.get("w")->grad[0] = 1.0;
  sgd_update(b, 0.1);
  CHECK_EQ(a.get("w")->values[0], b.get("w")->values[0]);

  SgdOptimizer mom(0.1, 0.9);
  ParameterSet c;
  c.add("w", Tensor::scalar(0.0));
  c.get("w")->grad[0] = 1.0;
  mom.step(c);  // v=1, w=-0.1
  c.get("w")->grad[0] = 1.0;
  mom.step(c);  // v=1.9, w=-0.29
  CHECK_EQ(c.get("w")->values[0], doctest::Approx(-0.29).epsilon(1e-12));

  CHECK_THROWS_AS(SgdOptimizer(0.0), ConfigError);
  CHECK_THROWS_AS(SgdOptimizer(0.1, 1.0), ConfigError);
}

TEST_CASE("finite-difference audit nails the quadratic and the degenerate cases") {
  ParameterSet ps;
  ps.add("theta", Tensor::scalar(3.0));
  auto quad = [](ParameterSet& p) { return squared_error(pick(p.get("theta"), 0), 0.0); };
  CHECK(grad_check(quad, ps) < 1e-8);

  auto constant = [](ParameterSet&) { return Tensor::scalar(5.0); };
  CHECK_EQ(grad_check(constant, ps), 0.0);

  CHECK_THROWS_AS(grad_check(quad, ps, 1e-2), ConfigError);
  auto bad = [](ParameterSet&) {
    return Tensor::scalar(std::numeric_limits<double>::infinity());
  };
  CHECK_THROWS_AS(grad_check(bad, ps), InternalError);
}

TEST_CASE("dense gradients survive the finite-difference audit") {
  Rng rng(31);
  for (Activation act : {Activation::kIdentity, Activation::kTanh, Activation::kSigmoid}) {
    ParameterSet ps;
    ps.add("x", random_tensor(rng, {4}));
    ps.add("w", random_tensor(rng, {3, 4}));
    ps.add("b", random_tensor(rng, {3}));
    auto ones = Tensor::from_values({1, 3}, {1, 1, 1});
    auto zero = Tensor::zeros({1});
    auto f = [&](ParameterSet& p) {
      auto y = dense(p.get("x"), p.get("w"), p.get("b"), act);
      return dense(y, ones, zero, Activation::kIdentity);
    };
    CHECK(grad_check(f, ps) < 1e-4);
  }
}

TEST_CASE("conv2d gradients survive the finite-difference audit") {
  Rng rng(37);
  for (int stride : {1, 2}) {
    ParameterSet ps;
    ps.add("x", random_tensor(rng, {5, 4, 2}));
    ps.add("k", random_tensor(rng, {3, 3, 2, 2}));
    ps.add("b", random_tensor(rng, {2}));
    auto f = [&, stride](ParameterSet& p) {
      auto y = conv2d(p.get("x"), p.get("k"), p.get("b"), stride, Activation::kTanh);
      const int n = static_cast<int>(y->size());
      auto ones = Tensor::from_values({1, n}, std::vector<double>(static_cast<std::size_t>(n), 1.0));
      return dense(y, ones, Tensor::zeros({1}), Activation::kIdentity);
    };
    CHECK(grad_check(f, ps) < 1e-4);
  }
}

TEST_CASE("gru gradients survive the finite-difference audit") {
  Rng rng(41);
  const int dx = 3, dh = 4;
  ParameterSet ps;
  ps.add("g.wz", random_tensor(rng, {dh, dx}));
  ps.add("g.uz", random_tensor(rng, {dh, dh}));
  ps.add("g.bz", random_tensor(rng, {dh}));
  ps.add("g.wr", random_tensor(rng, {dh, dx}));
  ps.add("g.ur", random_tensor(rng, {dh, dh}));
  ps.add("g.br", random_tensor(rng, {dh}));
  ps.add("g.wh", random_tensor(rng, {dh, dx}));
  ps.add("g.uh", random_tensor(rng, {dh, dh}));
  ps.add("g.bh", random_tensor(rng, {dh}));
  ps.add("x", random_tensor(rng, {dx}));
  ps.add("h", random_tensor(rng, {dh}));
  auto ones = Tensor::from_values({1, dh}, std::vector<double>(dh, 1.0));
  auto f = [&](ParameterSet& p) {
    auto out = gru_cell(p.get("x"), p.get("h"), gru_params_from(p, "g."));
    return dense(out, ones, Tensor::zeros({1}), Activation::kIdentity);
  };
  CHECK(grad_check(f, ps) < 1e-4);
}

TEST_CASE("softmax and attention gradients survive the finite-difference audit") {
  Rng rng(43);
  ParameterSet ps;
  ps.add("logits", random_tensor(rng, {5}));
  auto f = [](ParameterSet& p) { return pick(softmax(p.get("logits")), 2); };
  CHECK(grad_check(f, ps) < 1e-4);

  ParameterSet ps2;
  ps2.add("alpha", random_tensor(rng, {3}));
  ps2.add("o0", random_tensor(rng, {4}));
  ps2.add("o1", random_tensor(rng, {4}));
  ps2.add("o2", random_tensor(rng, {4}));
  auto ones = Tensor::from_values({1, 4}, std::vector<double>(4, 1.0));
  auto g = [&](ParameterSet& p) {
    auto pooled = attention_pool(softmax(p.get("alpha")), {p.get("o0"), p.get("o1"), p.get("o2")});
    return dense(pooled, ones, Tensor::zeros({1}), Activation::kIdentity);
  };
  CHECK(grad_check(g, ps2) < 1e-4);
}

TEST_CASE("embedding and concat gradients survive the finite-difference audit") {
  Rng rng(47);
  ParameterSet ps;
  ps.add("table", random_tensor(rng, {4, 3}));
  auto wsum = Tensor::from_values({1, 6}, std::vector<double>(6, 1.0));
  auto f = [&](ParameterSet& p) {
    auto rows = embed_rows(p.get("table"), {1, 1});
    auto cat = concat({rows[0], rows[1]});
    return dense(cat, wsum, Tensor::zeros({1}), Activation::kTanh);
  };
  CHECK(grad_check(f, ps) < 1e-4);
}

TEST_CASE("glorot initialization is bounded and reproducible") {
  Rng a(derive_seed(5, "init")), b(derive_seed(5, "init"));
  auto t1 = glorot_uniform({4, 6}, 6, 4, a);
  auto t2 = glorot_uniform({4, 6}, 6, 4, b);
  CHECK(t1->values == t2->values);
  const double s = std::sqrt(6.0 / (6 + 4));
  for (double v : t1->values) {
    CHECK(v >= -s);
    CHECK(v <= s);
  }
  CHECK_THROWS_AS(glorot_uniform({2}, 0, 1, a), ConfigError);
}
