#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lsamarl/tensor/gradcheck.hpp"
#include "lsamarl/tensor/ops.hpp"
#include "oracles.hpp"

using namespace lsamarl;
namespace o = lsamarl::ops;

namespace {

// Reduces any matrix to a scalar with a fixed random weighting, so every
// output entry contributes a distinct amount to the checked gradient.
Var weighted_sum(Var x, std::uint64_t seed) {
  auto rng = make_rng({seed, 77});
  return o::sum(o::mul(x, x.graph().constant(uniform(x.rows(), x.cols(), 0.5, 1.5, rng))));
}

// Runs the check at ten random points drawn by `make_point`.
double worst_error(const LossBuilder& loss, const std::function<std::vector<Tensor>(Rng&)>& make_point,
                   double h = 1e-6) {
  auto rng = make_rng({2024});
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) worst = std::max(worst, finite_diff_check(loss, make_point(rng), h).max_rel_error);
  return worst;
}

std::function<std::vector<Tensor>(Rng&)> shapes(std::vector<std::pair<std::size_t, std::size_t>> dims) {
  return [dims](Rng& rng) {
    std::vector<Tensor> out;
    for (auto [r, c] : dims) out.push_back(oracle::random(r, c, rng));
    return out;
  };
}

}  // namespace

TEST_CASE("matmul examples") {
  Graph g;
  const Tensor m = Tensor::matrix({{1.5, -2}, {0.25, 4}});
  CHECK(o::matmul(g.constant(Tensor::identity(2)), g.constant(m)).value() == m);
  const Tensor c = o::matmul(g.constant(Tensor::matrix({{1, 2}, {3, 4}})), g.constant(Tensor::matrix({{0}, {1}}))).value();
  CHECK(c == Tensor::matrix({{2}, {4}}));
  CHECK_THROWS_AS(o::matmul(g.constant(Tensor::zeros(2, 3)), g.constant(Tensor::zeros(2, 3))), std::invalid_argument);
}

TEST_CASE("matmul gradient of sum is ones times b transpose") {
  auto rng = make_rng({3});
  ParamSet ps;
  const auto a = ps.add("a", oracle::random(3, 4, rng));
  const auto b = ps.add("b", oracle::random(4, 2, rng));
  Graph g;
  auto grads = g.backward(o::sum(o::matmul(g.param(ps, a), g.param(ps, b))));
  const Tensor expect = oracle::matmul(Tensor::filled(3, 2, 1.0), oracle::transpose(ps.value(b)));
  CHECK(oracle::max_abs_diff(grads.at(a), expect) < 1e-12);

  const double err = finite_diff_check([](Graph&, std::span<const Var> x) { return o::sum(o::matmul(x[0], x[1])); },
                                       {ps.value(a), ps.value(b)}, 1e-6)
                         .max_rel_error;
  CHECK(err < 1e-5);
}

TEST_CASE("softmax rows examples") {
  Graph g;
  const Tensor s = o::softmax_rows(g.constant(Tensor::matrix({{0, 0, 0}, {1000, 0, 0}}))).value();
  for (int j = 0; j < 3; ++j) CHECK(s(0, j) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(std::abs(s(1, 0) - 1.0) < 1e-9);
  CHECK(std::abs(s(1, 1)) < 1e-9);

  const Tensor x = Tensor::matrix({{1, 2, 3}});
  const Tensor got = o::softmax_rows(g.constant(x)).value();
  const Tensor want = oracle::softmax_rows(x);
  CHECK(oracle::max_abs_diff(got, want) < 1e-15);
}

TEST_CASE("softmax rows are stochastic on random inputs") {
  auto rng = make_rng({11});
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor s = o::softmax_rows_value(oracle::random(4, 7, rng, -30, 30));
    for (std::size_t i = 0; i < s.rows(); ++i) {
      double total = 0;
      for (std::size_t j = 0; j < s.cols(); ++j) {
        CHECK(s(i, j) >= 0.0);
        CHECK(s(i, j) <= 1.0);
        total += s(i, j);
      }
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("tanh examples") {
  Graph g;
  CHECK(o::tanh_elem(g.constant(Tensor::zeros(1, 1))).value()[0] == 0.0);
  auto rng = make_rng({5});
  const Tensor x = oracle::random(3, 3, rng, -3, 3);
  Tensor neg = x;
  for (auto& v : neg.storage()) v = -v;
  const Tensor a = o::tanh_elem(g.constant(x)).value();
  const Tensor b = o::tanh_elem(g.constant(neg)).value();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == -b[i]);
  CHECK(worst_error([](Graph&, std::span<const Var> v) { return weighted_sum(o::tanh_elem(v[0]), 1); },
                    shapes({{3, 4}})) < 1e-6);
}

TEST_CASE("finite-difference check is exact on linear maps") {
  auto rng = make_rng({8});
  auto linear = [](const Tensor& w) {
    return [w](Graph& g, std::span<const Var> x) { return o::sum(o::matmul(x[0], g.constant(w))); };
  };
  // Generic points: only the rounding of f itself remains, ~ulp(f) / h.
  const Tensor w = oracle::random(3, 2, rng, 0.5, 1.5);
  for (double h : {1e-4, 3e-5, 1e-5}) {
    CHECK(finite_diff_check(linear(w), {oracle::random(2, 3, rng)}, h).max_rel_error < 1e-10);
  }
  // Dyadic points and power-of-two steps make every operation exact, so
  // even tiny steps reproduce the gradient to the last bit.
  auto dyadic = [&](std::size_t r, std::size_t c) {
    Tensor t = Tensor::zeros(r, c);
    for (auto& v : t.storage()) v = static_cast<double>(static_cast<int>(rng() % 17) - 8) / 8.0;
    return t;
  };
  const Tensor wd = dyadic(3, 2);
  for (int e = 14; e <= 20; e += 2) {
    CHECK(finite_diff_check(linear(wd), {dyadic(2, 3)}, std::ldexp(1.0, -e)).max_rel_error == 0.0);
  }
}

TEST_CASE("softmax gradient at h = 1e-6") {
  CHECK(worst_error([](Graph&, std::span<const Var> v) { return weighted_sum(o::softmax_rows(v[0]), 2); },
                    shapes({{3, 5}})) < 1e-5);
}

TEST_CASE("every differentiable op passes the finite-difference check") {
  struct Case {
    const char* name;
    LossBuilder loss;
    std::function<std::vector<Tensor>(Rng&)> point;
  };
  const std::vector<std::size_t> picks{2, 0, 1};
  // Points for min/max/clip keep every entry away from the kink.
  auto separated = [](Rng& rng) {
    Tensor a = oracle::random(3, 4, rng), b = a;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] + (uniform01(rng) < 0.5 ? -1 : 1) * (0.1 + uniform01(rng));
    return std::vector<Tensor>{a, b};
  };
  auto off_bounds = [](Rng& rng) {
    Tensor a = oracle::random(3, 4, rng, -2, 2);
    for (auto& x : a.storage()) {
      if (std::abs(std::abs(x) - 1.0) < 0.05) x += 0.2;
    }
    return std::vector<Tensor>{a};
  };
  const std::vector<Case> cases = {
      {"matmul", [](Graph&, std::span<const Var> v) { return weighted_sum(o::matmul(v[0], v[1]), 3); },
       shapes({{3, 4}, {4, 2}})},
      {"block_matmul_nt",
       [](Graph&, std::span<const Var> v) { return weighted_sum(o::block_matmul_nt(v[0], v[1], 3), 4); },
       shapes({{6, 2}, {6, 2}})},
      {"block_matmul", [](Graph&, std::span<const Var> v) { return weighted_sum(o::block_matmul(v[0], v[1], 3), 5); },
       shapes({{6, 3}, {6, 2}})},
      {"add", [](Graph&, std::span<const Var> v) { return weighted_sum(o::add(v[0], v[1]), 6); },
       shapes({{2, 3}, {2, 3}})},
      {"sub", [](Graph&, std::span<const Var> v) { return weighted_sum(o::sub(v[0], v[1]), 7); },
       shapes({{2, 3}, {2, 3}})},
      {"mul", [](Graph&, std::span<const Var> v) { return weighted_sum(o::mul(v[0], v[1]), 8); },
       shapes({{2, 3}, {2, 3}})},
      {"add_row", [](Graph&, std::span<const Var> v) { return weighted_sum(o::add_row(v[0], v[1]), 9); },
       shapes({{4, 3}, {1, 3}})},
      {"scale", [](Graph&, std::span<const Var> v) { return weighted_sum(o::scale(v[0], -2.5), 10); },
       shapes({{2, 2}})},
      {"add_scalar", [](Graph&, std::span<const Var> v) { return weighted_sum(o::add_scalar(v[0], 0.7), 11); },
       shapes({{2, 2}})},
      {"tanh", [](Graph&, std::span<const Var> v) { return weighted_sum(o::tanh_elem(v[0]), 12); }, shapes({{3, 3}})},
      {"exp", [](Graph&, std::span<const Var> v) { return weighted_sum(o::exp_elem(v[0]), 13); }, shapes({{3, 3}})},
      {"square", [](Graph&, std::span<const Var> v) { return weighted_sum(o::square(v[0]), 14); }, shapes({{3, 3}})},
      {"softmax_rows", [](Graph&, std::span<const Var> v) { return weighted_sum(o::softmax_rows(v[0]), 15); },
       shapes({{3, 5}})},
      {"log_softmax_rows",
       [](Graph&, std::span<const Var> v) { return weighted_sum(o::log_softmax_rows(v[0]), 16); }, shapes({{3, 5}})},
      {"sum", [](Graph&, std::span<const Var> v) { return o::sum(o::square(v[0])); }, shapes({{3, 2}})},
      {"mean", [](Graph&, std::span<const Var> v) { return o::mean(o::square(v[0])); }, shapes({{3, 2}})},
      {"row_sum", [](Graph&, std::span<const Var> v) { return weighted_sum(o::row_sum(v[0]), 17); },
       shapes({{3, 4}})},
      {"reshape", [](Graph&, std::span<const Var> v) { return weighted_sum(o::reshape(v[0], 2, 6), 18); },
       shapes({{4, 3}})},
      {"concat_cols",
       [](Graph&, std::span<const Var> v) {
         std::vector<Var> parts{v[0], v[1]};
         return weighted_sum(o::concat_cols(parts), 19);
       },
       shapes({{3, 2}, {3, 1}})},
      {"pick", [picks](Graph&, std::span<const Var> v) { return weighted_sum(o::pick(v[0], picks), 20); },
       shapes({{3, 4}})},
      {"minimum", [](Graph&, std::span<const Var> v) { return weighted_sum(o::minimum(v[0], v[1]), 21); }, separated},
      {"maximum", [](Graph&, std::span<const Var> v) { return weighted_sum(o::maximum(v[0], v[1]), 22); }, separated},
      {"clip", [](Graph&, std::span<const Var> v) { return weighted_sum(o::clip(v[0], -1.0, 1.0), 23); }, off_bounds},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(worst_error(c.loss, c.point) < 1e-4);
  }
}

TEST_CASE("block products equal per-group dense products") {
  auto rng = make_rng({31});
  const Tensor a = oracle::random(6, 2, rng), b = oracle::random(6, 2, rng), v = oracle::random(6, 4, rng);
  Graph g;
  const Tensor s = o::block_matmul_nt(g.constant(a), g.constant(b), 3).value();
  const Tensor p = o::block_matmul(g.constant(s), g.constant(v), 3).value();
  for (std::size_t grp = 0; grp < 2; ++grp) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        double want = 0;
        for (std::size_t k = 0; k < 2; ++k) want += a(grp * 3 + i, k) * b(grp * 3 + j, k);
        CHECK(std::abs(s(grp * 3 + i, j) - want) < 1e-14);
      }
      for (std::size_t j = 0; j < 4; ++j) {
        double want = 0;
        for (std::size_t k = 0; k < 3; ++k) want += s(grp * 3 + i, k) * v(grp * 3 + k, j);
        CHECK(std::abs(p(grp * 3 + i, j) - want) < 1e-14);
      }
    }
  }
}

TEST_CASE("shape mismatches are rejected") {
  Graph g;
  Var a = g.constant(Tensor::zeros(2, 3)), b = g.constant(Tensor::zeros(3, 2));
  CHECK_THROWS_AS(o::add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(o::mul(a, b), std::invalid_argument);
  CHECK_THROWS_AS(o::add_row(a, g.constant(Tensor::zeros(1, 2))), std::invalid_argument);
  CHECK_THROWS_AS(o::reshape(a, 4, 2), std::invalid_argument);
  CHECK_THROWS_AS(o::block_matmul_nt(a, a, 4), std::invalid_argument);
  const std::vector<std::size_t> bad{0, 5};
  CHECK_THROWS_AS(o::pick(a, bad), std::invalid_argument);
}

TEST_CASE("clip zeroes the gradient strictly outside its range") {
  ParamSet ps;
  const auto x = ps.add("x", Tensor::matrix({{-2.0, -0.5, 0.5, 3.0}}));
  Graph g;
  auto grads = g.backward(o::sum(o::clip(g.param(ps, x), -1.0, 1.0)));
  CHECK(grads.at(x) == Tensor::matrix({{0.0, 1.0, 1.0, 0.0}}));
}

TEST_CASE("minimum and maximum send ties to the first argument") {
  ParamSet ps;
  const auto a = ps.add("a", Tensor::matrix({{1.0, 2.0}}));
  const auto b = ps.add("b", Tensor::matrix({{1.0, 0.0}}));
  {
    Graph g;
    auto grads = g.backward(o::sum(o::minimum(g.param(ps, a), g.param(ps, b))));
    CHECK(grads.at(a) == Tensor::matrix({{1.0, 0.0}}));
    CHECK(grads.at(b) == Tensor::matrix({{0.0, 1.0}}));
  }
  {
    Graph g;
    auto grads = g.backward(o::sum(o::maximum(g.param(ps, a), g.param(ps, b))));
    CHECK(grads.at(a) == Tensor::matrix({{1.0, 1.0}}));
    CHECK(grads.at(b) == Tensor::matrix({{0.0, 0.0}}));
  }
}

TEST_CASE("forward results stay finite on finite inputs") {
  auto rng = make_rng({41});
  Graph g;
  Var x = g.constant(oracle::random(4, 4, rng, -50, 50));
  CHECK(o::softmax_rows(x).value().all_finite());
  CHECK(o::log_softmax_rows(x).value().all_finite());
  CHECK(o::tanh_elem(x).value().all_finite());
}
