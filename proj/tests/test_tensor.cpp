#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/adam.hpp"
#include "core/checkpoint.hpp"
#include "core/ops.hpp"
#include "test_util.hpp"

using namespace regpomdp;
using testutil::gradcheck;

namespace {

Tensor rnd(Shape shape, Rng& rng) { return Tensor::randn(std::move(shape), rng); }

}  // namespace

TEST_CASE("matmul forward identity and shape errors") {
  Rng rng(7);
  Tensor eye = Tensor::zeros({3, 3});
  for (int i = 0; i < 3; ++i) eye.data()[i * 3 + i] = 1.0;
  Tensor x = rnd({3, 4}, rng);
  Tensor y = ops::matmul(nullptr, eye, x);
  CHECK(testutil::max_abs_diff(x, y) == doctest::Approx(0.0));

  Tensor bad = rnd({5, 2}, rng);
  CHECK_THROWS_WITH_AS(ops::matmul(nullptr, x, bad),
                       doctest::Contains("[3, 4]"), std::invalid_argument);
}

TEST_CASE("softmax rows: symmetry, normalization, zero gradient of its sum") {
  Tensor x = Tensor::zeros({1, 3});
  Tensor y = ops::softmax_rows(nullptr, x);
  for (int i = 0; i < 3; ++i) CHECK(y.data()[i] == doctest::Approx(1.0 / 3.0));

  Rng rng(3);
  Tensor z = rnd({5, 7}, rng).set_requires_grad(true);
  Tape tape;
  Tensor s = ops::softmax_rows(&tape, z);
  for (int r = 0; r < 5; ++r) {
    double total = 0.0;
    for (int c = 0; c < 7; ++c) total += s.data()[r * 7 + c];
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  Tensor loss = ops::sum_all(&tape, s);
  tape.backward(loss);
  for (int64_t i = 0; i < z.numel(); ++i) CHECK(std::abs(z.grad()[i]) < 1e-12);
}

TEST_CASE("backward of x^2 at x=3 is 6 and loss must be scalar") {
  Tensor x = Tensor::scalar(3.0).set_requires_grad(true);
  Tape tape;
  Tensor y = ops::hadamard(&tape, x, x);
  tape.backward(y);
  CHECK(x.grad()[0] == doctest::Approx(6.0));

  Rng rng(1);
  Tensor v = rnd({2, 2}, rng).set_requires_grad(true);
  Tape t2;
  Tensor w = ops::scale(&t2, v, 2.0);
  CHECK_THROWS_AS(t2.backward(w), std::invalid_argument);
}

TEST_CASE("complex pair multiplication identity") {
  Tensor one = Tensor::from_data({2}, {1.0, 0.0});
  Tensor z = Tensor::from_data({2}, {3.5, -2.0});
  Tensor prod = ops::complex_pair_mul(nullptr, z, one);
  CHECK(prod.data()[0] == doctest::Approx(3.5));
  CHECK(prod.data()[1] == doctest::Approx(-2.0));
}

TEST_CASE("gradients of every op match central finite differences") {
  Rng rng(42);
  const int instances = 5;  // the acceptance suite sweeps 20+
  for (int k = 0; k < instances; ++k) {
    auto in2 = [&](Shape a, Shape b) { return std::vector<Tensor>{rnd(a, rng), rnd(b, rng)}; };
    auto in1 = [&](Shape a) { return std::vector<Tensor>{rnd(a, rng)}; };

    CHECK(gradcheck([](Tape* t, auto& v) { return ops::matmul(t, v[0], v[1]); }, in2({4, 3}, {3, 5}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::matmul_nt(t, v[0], v[1]); }, in2({4, 3}, {5, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::add(t, v[0], v[1]); }, in2({4, 3}, {4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::add(t, v[0], v[1]); }, in2({4, 3}, {3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::sub(t, v[0], v[1]); }, in2({4, 3}, {4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::hadamard(t, v[0], v[1]); }, in2({4, 3}, {4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::hadamard(t, v[0], v[1]); }, in2({4, 3}, {3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::scale(t, v[0], -1.7); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::add_scalar(t, v[0], 0.3); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::tanh(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::sigmoid(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::gelu(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::exp(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::sin(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::cos(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::softmax_rows(t, v[0]); }, in1({4, 6}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::transpose(t, v[0]); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::concat_cols(t, v[0], v[1]); }, in2({4, 3}, {4, 2}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::concat_rows(t, {v[0], v[1]}); }, in2({2, 3}, {4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::slice_cols(t, v[0], 1, 2); }, in1({4, 5}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::slice_rows(t, v[0], 1, 3); }, in1({5, 4}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::gather_rows(t, v[0], {2, 0, 2, 3}); }, in1({5, 4}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::take_per_row(t, v[0], {1, 0, 2, 1}); }, in1({4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::embedding_lookup(t, v[0], {0, 4, 4, 1}); }, in1({5, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::complex_pair_mul(t, v[0], v[1]); }, in2({4, 6}, {4, 6}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::complex_pair_mul(t, v[0], v[1]); }, in2({4, 6}, {6}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::interleave_pairs(t, v[0], v[1]); }, in2({4, 3}, {4, 3}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::pair_real(t, v[0]); }, in1({4, 6}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::pair_imag(t, v[0]); }, in1({4, 6}), rng) < 1e-4);
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::mean_all(t, v[0]); }, in1({4, 3}), rng) < 1e-4);

    // Domain-restricted ops on positive inputs.
    std::vector<Tensor> pos{Tensor::rand_uniform({4, 3}, rng, 0.5, 2.0)};
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::log(t, v[0]); }, pos, rng) < 1e-4);
    std::vector<Tensor> pos2{Tensor::rand_uniform({4, 3}, rng, 0.5, 2.0)};
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::sqrt(t, v[0]); }, pos2, rng) < 1e-4);
    // relu away from the kink.
    std::vector<Tensor> off{Tensor::rand_uniform({4, 3}, rng, 0.2, 1.0)};
    for (int64_t i = 0; i < off[0].numel(); i += 2) off[0].data()[i] *= -1.0;
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::relu(t, v[0]); }, off, rng) < 1e-4);

    std::vector<Tensor> ln{rnd({4, 6}, rng), rnd({6}, rng), rnd({6}, rng)};
    CHECK(gradcheck([](Tape* t, auto& v) { return ops::layer_norm(t, v[0], v[1], v[2]); }, ln, rng) < 1e-4);
  }
}

TEST_CASE("identical seeds give identical gradients across tapes") {
  auto run = [](uint64_t seed) {
    Rng rng(seed);
    Tensor x = rnd({6, 6}, rng).set_requires_grad(true);
    Tensor w = rnd({6, 6}, rng).set_requires_grad(true);
    Tape tape;
    Tensor loss = ops::mean_all(&tape, ops::tanh(&tape, ops::matmul(&tape, x, w)));
    tape.backward(loss);
    return std::vector<double>(w.grad(), w.grad() + w.numel());
  };
  auto a = run(123);
  auto b = run(123);
  CHECK(a == b);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  Rng rng(5);
  Tensor p = rnd({3, 3}, rng).set_requires_grad(true);
  Tensor before = p.detached_copy();
  Adam adam({p}, {});
  p.zero_grad();
  adam.step();
  CHECK(testutil::max_abs_diff(p, before) == doctest::Approx(0.0));
}

TEST_CASE("adam: constant gradient settles near lr-sized signed steps") {
  Tensor p = Tensor::scalar(0.0).set_requires_grad(true);
  AdamConfig cfg;
  cfg.lr = 3e-4;
  Adam adam({p}, cfg);
  double prev = 0.0;
  double step_size = 0.0;
  for (int i = 0; i < 500; ++i) {
    p.zero_grad();
    p.grad()[0] = 2.5;  // constant positive gradient
    adam.step();
    step_size = prev - p.item();
    prev = p.item();
  }
  CHECK(step_size == doctest::Approx(cfg.lr).epsilon(0.05));
}

TEST_CASE("adam: minimizes a scalar quadratic to |x| < 1e-3 within 2000 steps") {
  Tensor x = Tensor::scalar(0.2).set_requires_grad(true);
  AdamConfig cfg;
  cfg.lr = 3e-4;
  Adam adam({x}, cfg);
  for (int i = 0; i < 2000; ++i) {
    Tape tape;
    Tensor loss = ops::hadamard(&tape, x, x);
    tape.backward(loss);
    adam.step();
    adam.zero_grad();
  }
  CHECK(std::abs(x.item()) < 1e-3);
}

TEST_CASE("adam: non-finite gradients abort loudly") {
  Tensor p = Tensor::scalar(1.0).set_requires_grad(true);
  Adam adam({p}, {});
  p.grad()[0] = std::nan("");
  CHECK_THROWS_AS(adam.step(), std::runtime_error);
}

TEST_CASE("checkpoint round trip preserves parameter bytes") {
  Rng rng(11);
  Tensor a = rnd({4, 5}, rng);
  Tensor b = rnd({7}, rng);
  std::vector<NamedParam> params{{"a", a}, {"b", b}};
  const std::string base = "ckpt_test_roundtrip";
  save_checkpoint(base, params, {{"note", "test"}});

  Tensor a2 = Tensor::zeros({4, 5});
  Tensor b2 = Tensor::zeros({7});
  std::vector<NamedParam> loaded{{"a", a2}, {"b", b2}};
  nlohmann::json meta = load_checkpoint(base, loaded);
  CHECK(meta.at("note") == "test");
  CHECK(testutil::max_abs_diff(a, a2) == doctest::Approx(0.0));
  CHECK(testutil::max_abs_diff(b, b2) == doctest::Approx(0.0));

  Tensor wrong = Tensor::zeros({5, 4});
  std::vector<NamedParam> bad{{"a", wrong}};
  CHECK_THROWS_AS(load_checkpoint(base, bad), std::runtime_error);
}

TEST_CASE("rng forks are independent of draw order") {
  Rng root(99);
  Rng a = root.fork(1);
  root.uniform();
  root.uniform();
  Rng b = root.fork(1);
  CHECK(a.next_u64() == b.next_u64());
}
