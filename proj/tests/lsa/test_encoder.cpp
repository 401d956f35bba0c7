#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lsamarl/lsa/encoder.hpp"
#include "lsamarl/tensor/gradcheck.hpp"
#include "lsamarl/tensor/ops.hpp"
#include "oracles.hpp"

using namespace lsamarl;
using lsa::LsaDims;
using lsa::LsaEncoder;

namespace {

Tensor columns(const Tensor& m, std::size_t from, std::size_t count) {
  Tensor out = Tensor::zeros(m.rows(), count);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, from + j);
  return out;
}

// Head-by-head evaluation with the scalar attention oracle.
Tensor multi_head_oracle(const ParamSet& ps, const LsaEncoder& enc, const Tensor& o, std::size_t block = 0) {
  const auto& d = enc.dims();
  const auto& b = enc.blocks()[block];
  Tensor cat = Tensor::zeros(o.rows(), d.n_features);
  for (std::size_t i = 0; i < d.heads; ++i) {
    const Tensor head = oracle::attention(oracle::matmul(o, ps.value(b.wq[i])), oracle::matmul(o, ps.value(b.wk[i])),
                                          oracle::matmul(o, ps.value(b.wv[i])));
    for (std::size_t r = 0; r < o.rows(); ++r)
      for (std::size_t c = 0; c < d.head_dim(); ++c) cat(r, i * d.head_dim() + c) = head(r, c);
  }
  return oracle::matmul(cat, ps.value(b.wo));
}

Tensor feed_forward_oracle(const ParamSet& ps, const LsaEncoder& enc, const Tensor& y, std::size_t block = 0) {
  const std::size_t k = enc.dims().flat_size();
  Tensor flat({1, k}, std::vector<double>(y.data().begin(), y.data().end()));
  Tensor mixed = oracle::matmul(flat, ps.value(enc.blocks()[block].wff));
  return Tensor({y.rows(), y.cols()}, mixed.storage());
}

void set_identity_projections(ParamSet& ps, const LsaEncoder& enc) {
  const auto& b = enc.blocks()[0];
  const std::size_t x = enc.dims().n_features;
  for (auto id : b.wq) ps.value(id) = Tensor::identity(x);
  for (auto id : b.wk) ps.value(id) = Tensor::identity(x);
  for (auto id : b.wv) ps.value(id) = Tensor::identity(x);
  ps.value(b.wo) = Tensor::identity(x);
}

Tensor permute_rows(const Tensor& m, const std::array<std::size_t, 3>& p) {
  Tensor out = m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(p[i], j);
  return out;
}

}  // namespace

TEST_CASE("attention with a single row returns V") {
  auto rng = make_rng({1});
  Graph g;
  const Tensor v = oracle::random(1, 3, rng);
  const Tensor out = lsa::attention(g.constant(oracle::random(1, 3, rng)), g.constant(oracle::random(1, 3, rng)),
                                    g.constant(v), 1)
                         .value();
  CHECK(out == v);
}

TEST_CASE("zero queries attend uniformly") {
  auto rng = make_rng({2});
  Graph g;
  const Tensor v = oracle::random(4, 2, rng);
  const Tensor out =
      lsa::attention(g.constant(Tensor::zeros(4, 2)), g.constant(oracle::random(4, 2, rng)), g.constant(v), 4).value();
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0;
    for (std::size_t r = 0; r < 4; ++r) mean += v(r, c) / 4;
    for (std::size_t r = 0; r < 4; ++r) CHECK(std::abs(out(r, c) - mean) < 1e-15);
  }
}

TEST_CASE("attention matches the scalar oracle on random 3x2 inputs") {
  auto rng = make_rng({3});
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor q = oracle::random(3, 2, rng), k = oracle::random(3, 2, rng), v = oracle::random(3, 2, rng);
    Graph g;
    const Tensor got = lsa::attention(g.constant(q), g.constant(k), g.constant(v), 3).value();
    CHECK(oracle::max_abs_diff(got, oracle::attention(q, k, v)) < 1e-12);
  }
}

TEST_CASE("attention rejects mismatched shapes") {
  Graph g;
  CHECK_THROWS_AS(lsa::attention(g.constant(Tensor::zeros(3, 2)), g.constant(Tensor::zeros(3, 3)),
                                 g.constant(Tensor::zeros(3, 2)), 3),
                  std::invalid_argument);
}

TEST_CASE("head count must divide the feature count") {
  CHECK_THROWS_AS((LsaDims{4, 6, 4, 1}.validate()), std::invalid_argument);
  CHECK(LsaDims::for_observation(6, 8).heads == 4);
  CHECK(LsaDims::for_observation(4, 6).heads == 3);
  CHECK(LsaDims::for_observation(4, 6).flat_size() == 24);
}

TEST_CASE("parameters follow the naming scheme with the stated shapes") {
  auto rng = make_rng({4});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims::for_observation(4, 6), rng);
  CHECK(ps.value(ps.require("lsa.block1.head1.WQ")).shape() == Shape{6, 2});
  CHECK(ps.value(ps.require("lsa.block1.head3.WV")).shape() == Shape{6, 2});
  CHECK(ps.value(ps.require("lsa.block1.WO")).shape() == Shape{6, 6});
  CHECK(ps.value(ps.require("lsa.block1.WFF")).shape() == Shape{24, 24});
  CHECK(ps.size() == 3 * 3 + 2);
  const auto bound = LsaEncoder::bind(ps, "lsa.", enc.dims());
  CHECK(bound.blocks()[0].wff == enc.blocks()[0].wff);
}

TEST_CASE("single identity head reduces to plain self-attention") {
  auto rng = make_rng({5});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims{3, 4, 1, 1}, rng);
  set_identity_projections(ps, enc);
  const Tensor o = oracle::random(3, 4, rng);
  Graph g;
  const Tensor got = enc.multi_head(g, ps, g.constant(o)).value();
  CHECK(oracle::max_abs_diff(got, oracle::attention(o, o, o)) < 1e-12);
}

TEST_CASE("multi-head output matches the head-by-head oracle") {
  auto rng = make_rng({6});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims{4, 6, 3, 1}, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor o = oracle::random(4, 6, rng);
    Graph g;
    CHECK(oracle::max_abs_diff(enc.multi_head(g, ps, g.constant(o)).value(), multi_head_oracle(ps, enc, o)) < 1e-12);
  }
}

TEST_CASE("multi-head attention is row-permutation equivariant, the feed-forward is not") {
  auto rng = make_rng({7});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims{3, 6, 3, 1}, rng);
  std::array<std::size_t, 3> perm{0, 1, 2};
  bool ff_broke_equivariance = false;
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor o = oracle::random(3, 6, rng);
    Graph g;
    const Tensor base = enc.multi_head(g, ps, g.constant(o)).value();
    const Tensor base_ff = enc.feed_forward(g, ps, g.constant(base)).value();
    std::sort(perm.begin(), perm.end());
    do {
      const Tensor po = permute_rows(o, perm);
      const Tensor out = enc.multi_head(g, ps, g.constant(po)).value();
      CHECK(oracle::max_abs_diff(out, permute_rows(base, perm)) < 1e-12);
      const Tensor ff = enc.feed_forward(g, ps, g.constant(out)).value();
      if (oracle::max_abs_diff(ff, permute_rows(base_ff, perm)) > 1e-6) ff_broke_equivariance = true;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  CHECK(ff_broke_equivariance);
}

TEST_CASE("attention weights are row-stochastic in every head") {
  auto rng = make_rng({8});
  for (auto [n, x] : {std::pair<std::size_t, std::size_t>{4, 6}, {6, 6}, {6, 8}}) {
    ParamSet ps;
    LsaEncoder enc(ps, "lsa.", LsaDims::for_observation(n, x), rng);
    for (int trial = 0; trial < 10; ++trial) {
      const Tensor o = oracle::random(n, x, rng, -3, 3);
      for (std::size_t h = 0; h < enc.dims().heads; ++h) {
        const Tensor w = enc.attention_weights(ps, o, 0, h);
        for (std::size_t r = 0; r < n; ++r) {
          double total = 0;
          for (std::size_t c = 0; c < n; ++c) total += w(r, c);
          CHECK(std::abs(total - 1.0) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("feed-forward examples") {
  auto rng = make_rng({9});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims{4, 6, 3, 1}, rng);
  const Tensor y = oracle::random(4, 6, rng);
  const auto wff = enc.blocks()[0].wff;
  {
    Graph g;
    CHECK(oracle::max_abs_diff(enc.feed_forward(g, ps, g.constant(y)).value(), feed_forward_oracle(ps, enc, y)) < 1e-12);
  }
  ps.value(wff) = Tensor::identity(24);
  {
    Graph g;
    CHECK(enc.feed_forward(g, ps, g.constant(y)).value() == y);
  }
  Tensor two = Tensor::identity(24);
  for (auto& v : two.storage()) v *= 2;
  ps.value(wff) = two;
  {
    Graph g;
    const Tensor out = enc.feed_forward(g, ps, g.constant(y)).value();
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(out[i] == 2 * y[i]);
  }
}

TEST_CASE("encode examples") {
  auto rng = make_rng({10});
  SUBCASE("zero observation encodes to zero") {
    ParamSet ps;
    LsaEncoder enc(ps, "lsa.", LsaDims::for_observation(6, 6), rng);
    Graph g;
    const Tensor e = enc.encode(g, ps, g.constant(Tensor::zeros(6, 6))).value();
    CHECK(e.shape() == Shape{1, 36});
    for (double v : e.data()) CHECK(v == 0.0);
  }
  SUBCASE("identity parameters give flattened self-attention") {
    ParamSet ps;
    LsaEncoder enc(ps, "lsa.", LsaDims{3, 4, 1, 1}, rng);
    set_identity_projections(ps, enc);
    ps.value(enc.blocks()[0].wff) = Tensor::identity(12);
    const Tensor o = oracle::random(3, 4, rng);
    Graph g;
    const Tensor e = enc.encode(g, ps, g.constant(o)).value();
    const Tensor want = oracle::attention(o, o, o);
    REQUIRE(e.size() == want.size());
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - want[i]) < 1e-12);
  }
  SUBCASE("scenario-5 sized encoder matches the composed oracles") {
    ParamSet ps;
    LsaEncoder enc(ps, "lsa.", LsaDims::for_observation(6, 6), rng);
    const Tensor o = oracle::random(6, 6, rng);
    Graph g;
    const Tensor e = enc.encode(g, ps, g.constant(o)).value();
    const Tensor want = feed_forward_oracle(ps, enc, multi_head_oracle(ps, enc, o));
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - want[i]) < 1e-12);
  }
}

TEST_CASE("stacked observations encode independently") {
  auto rng = make_rng({11});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims::for_observation(4, 6), rng);
  const Tensor a = oracle::random(4, 6, rng), b = oracle::random(4, 6, rng);
  Tensor both = Tensor::zeros(8, 6);
  std::copy(a.data().begin(), a.data().end(), both.data().begin());
  std::copy(b.data().begin(), b.data().end(), both.data().begin() + 24);
  Graph g;
  const Tensor eb = enc.encode(g, ps, g.constant(both)).value();
  const Tensor ea = enc.encode(g, ps, g.constant(a)).value();
  const Tensor e2 = enc.encode(g, ps, g.constant(b)).value();
  CHECK(eb.shape() == Shape{2, 24});
  for (std::size_t i = 0; i < 24; ++i) {
    CHECK(std::abs(eb(0, i) - ea[i]) < 1e-12);
    CHECK(std::abs(eb(1, i) - e2[i]) < 1e-12);
  }
}

TEST_CASE("encode output size is K however many rows are padding") {
  auto rng = make_rng({12});
  ParamSet ps;
  LsaEncoder enc(ps, "lsa.", LsaDims::for_observation(6, 6), rng);
  for (std::size_t filled = 1; filled <= 6; ++filled) {
    Tensor o = Tensor::zeros(6, 6);
    for (std::size_t r = 0; r < filled; ++r) {
      o(r, 0) = 1.0;
      for (std::size_t c = 2; c < 6; ++c) o(r, c) = uniform01(rng) - 0.5;
    }
    Graph g;
    const Tensor e = enc.encode(g, ps, g.constant(o)).value();
    CHECK(e.shape() == Shape{1, 36});
    CHECK(e.all_finite());
  }
  Graph g;
  CHECK_THROWS_AS(enc.encode(g, ps, g.constant(Tensor::zeros(5, 6))), std::invalid_argument);
  CHECK_THROWS_AS(enc.encode(g, ps, g.constant(Tensor::zeros(6, 8))), std::invalid_argument);
}

TEST_CASE("encoder gradients match finite differences for every parameter") {
  auto rng = make_rng({13});
  for (auto [n, x, blocks] : {std::tuple<std::size_t, std::size_t, std::size_t>{4, 6, 1}, {3, 8, 1}, {3, 6, 2}}) {
    ParamSet ps;
    LsaEncoder enc(ps, "lsa.", LsaDims{n, x, x / 2, blocks}, rng);
    const Tensor weights = oracle::random(2, n * x, rng, 0.5, 1.5);
    for (int point = 0; point < 10; ++point) {
      const Tensor o = oracle::random(2 * n, x, rng);
      for (ParamId id = 0; id < ps.size(); ++id) ps.value(id) = oracle::random(ps.value(id).rows(), ps.value(id).cols(), rng);
      const auto r = finite_diff_check(
          [&](Graph& g, const ParamSet& p) {
            return ops::sum(ops::mul(enc.encode(g, p, g.constant(o)), g.constant(weights)));
          },
          ps, 1e-6);
      CHECK(r.max_rel_error < 1e-4);
    }
  }
}
