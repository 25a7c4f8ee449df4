#include <gtest/gtest.h>

#include <random>

#include "fpp/directed.hpp"
#include "fpp/geodesic.hpp"
#include "support.hpp"

using namespace fpp;
using fpp::testing::make_path;

namespace {

constexpr auto kInf = TimeTraits<std::int64_t>::infinity();

ExactEnvironment with_weights(const BoxLattice& box, std::int64_t fill,
                              std::initializer_list<std::tuple<Point, Point, std::int64_t>> edges) {
  std::vector<std::int64_t> w(box.edge_slot_count(), kInf);
  for (std::size_t s = 0; s < w.size(); ++s)
    if (box.edge_slot_valid(s)) w[s] = fill;
  for (const auto& [a, b, v] : edges) w[box.edge_between(a, b)] = v;
  return ExactEnvironment(box, std::move(w));
}

}  // namespace

TEST(Geodesic, UnitSquare) {
  const BoxLattice box({0, 0}, {1, 1});
  const auto env = with_weights(box, 0, {{{0, 0}, {1, 0}, 1}, {{1, 0}, {1, 1}, 1}, {{0, 1}, {1, 1}, 5}, {{0, 0}, {0, 1}, 5}});
  const auto r = geodesic_time(env, {0, 0}, {1, 1});
  EXPECT_EQ(r.time, 2);
  EXPECT_EQ(r.min_hops, 2u);
  EXPECT_EQ(r.geodesic, make_path({{0, 0}, {1, 0}, {1, 1}}));
  EXPECT_EQ(geodesic_time_all_minhops(env, {0, 0}, {1, 1}).size(), 1u);
}

TEST(Geodesic, ConstantWeights) {
  const BoxLattice box({-2, -2}, {6, 5});
  const auto env = ExactEnvironment::constant(box, 1);
  for (const auto& x : {Point{0, 0}, Point{4, 3}, Point{-2, 5}, Point{6, -1}}) {
    const auto r = geodesic_time(env, {0, 0}, x);
    EXPECT_EQ(r.time, l1_norm(x));
    EXPECT_EQ(r.min_hops, static_cast<std::size_t>(l1_norm(x)));
  }
}

TEST(Geodesic, HopTieBreak) {
  // 2x1 box: direct route (0,0)-(1,0)-(2,0) of weights 2,2 against the
  // detour (0,0)-(0,1)-(1,1)-(2,1)-(2,0) of weights 1,1,1,1
  const BoxLattice box({0, 0}, {2, 1});
  const auto env = with_weights(box, 9,
                                {{{0, 0}, {1, 0}, 2},
                                 {{1, 0}, {2, 0}, 2},
                                 {{0, 0}, {0, 1}, 1},
                                 {{0, 1}, {1, 1}, 1},
                                 {{1, 1}, {2, 1}, 1},
                                 {{2, 1}, {2, 0}, 1}});
  const auto r = geodesic_time(env, {0, 0}, {2, 0});
  EXPECT_EQ(r.time, 4);
  EXPECT_EQ(r.min_hops, 2u);
  EXPECT_EQ(r.geodesic, make_path({{0, 0}, {1, 0}, {2, 0}}));
}

TEST(Geodesic, LexicographicFirstStaircase) {
  const BoxLattice box({0, 0}, {1, 1});
  const auto env = ExactEnvironment::constant(box, 1);
  const auto all = geodesic_time_all_minhops(env, {0, 0}, {1, 1});
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(geodesic_time(env, {0, 0}, {1, 1}).geodesic, all.front());
  EXPECT_EQ(all.front(), make_path({{0, 0}, {0, 1}, {1, 1}}));
}

TEST(Geodesic, Unreachable) {
  const BoxLattice box({0, 0}, {2, 2});
  const auto env = with_weights(box, 1, {{{2, 2}, {1, 2}, kInf}, {{2, 2}, {2, 1}, kInf}});
  const auto r = geodesic_time(env, {0, 0}, {2, 2});
  EXPECT_FALSE(r.reachable);
  EXPECT_EQ(r.time, kInf);
  EXPECT_FALSE(reachability(env, {0, 0}, {2, 2}));
  EXPECT_TRUE(geodesic_time_all_minhops(env, {0, 0}, {2, 2}).empty());
}

TEST(Geodesic, ReachabilityInGiantCluster) {
  auto spec = std::make_shared<const DistributionSpec>(std::vector<Atom>{Atom::finite(1, 0.7), Atom::infinity(0.3)},
                                                       std::vector<UniformPiece>{});
  const BoxLattice box({0, 0}, {49, 49});
  const auto env = sample_environment<ExactTime>(spec, box, 1, 0);
  // two vertices in the same finite cluster: pick the ends of the geodesic search
  // from the centre and check against an independent relaxation
  const Point c{25, 25};
  std::size_t agree = 0;
  for (const auto& x : {Point{0, 0}, Point{49, 49}, Point{10, 40}, Point{40, 3}}) {
    const bool r = reachability(env, c, x);
    const auto oracle = fpp::testing::relax_oracle(env, c, x);
    EXPECT_EQ(r, oracle.reachable);
    agree += r;
  }
  EXPECT_GT(agree, 0u);
}

TEST(Geodesic, MatchesEnumerationOnSmallBoxes) {
  std::mt19937_64 gen(11);
  const std::vector<Point> shapes{{1, 1}, {2, 1}, {3, 1}, {2, 2}, {3, 2}, {1, 5}};
  for (int i = 0; i < 120; ++i) {
    const BoxLattice box({0, 0}, shapes[static_cast<std::size_t>(i) % shapes.size()]);
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2, 3, kInf});
    const Point s = box.point(gen() % box.vertex_count());
    const Point t = box.point(gen() % box.vertex_count());
    const auto fast = geodesic_time(env, s, t);
    const auto slow = geodesic_time_enumerate(env, s, t);
    ASSERT_EQ(fast.reachable, slow.reachable);
    if (!fast.reachable) continue;
    EXPECT_EQ(fast.time, slow.time);
    EXPECT_EQ(fast.min_hops, slow.min_hops);
    EXPECT_EQ(fast.geodesic, slow.geodesic);
  }
}

TEST(Geodesic, MatchesRelaxationOnLargerBoxes) {
  std::mt19937_64 gen(12);
  for (int i = 0; i < 30; ++i) {
    const BoxLattice box({-3, -3}, {9, 9});
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2, 4, kInf});
    const Point t{static_cast<std::int64_t>(gen() % 7), static_cast<std::int64_t>(gen() % 7)};
    const auto r = geodesic_time(env, {0, 0}, t);
    const auto o = fpp::testing::relax_oracle(env, {0, 0}, t);
    ASSERT_EQ(r.reachable, o.reachable);
    if (!r.reachable) continue;
    EXPECT_EQ(r.time, o.time);
    EXPECT_EQ(r.min_hops, o.hops);
    EXPECT_EQ(fpp::testing::sum_along(env, r.geodesic), r.time);
    EXPECT_EQ(r.geodesic.edge_count(), r.min_hops);
    EXPECT_TRUE(validate_path(r.geodesic).self_avoiding);
  }
}

TEST(Geodesic, TranslationEquivariance) {
  std::mt19937_64 gen(13);
  for (int i = 0; i < 20; ++i) {
    const BoxLattice box({0, 0}, {8, 6});
    const BoxLattice moved({5, -3}, {13, 3});
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2, 3});
    const ExactEnvironment env2(moved, std::vector<std::int64_t>(env.weights().begin(), env.weights().end()));
    const Point tau{5, -3};
    const Point s{1, 2}, t{7, 5};
    const auto a = geodesic_time(env, s, t);
    const auto b = geodesic_time(env2, s + tau, t + tau);
    EXPECT_EQ(a.time, b.time);
    EXPECT_EQ(a.min_hops, b.min_hops);
    ASSERT_EQ(a.geodesic.vertices.size(), b.geodesic.vertices.size());
    for (std::size_t k = 0; k < a.geodesic.vertices.size(); ++k)
      EXPECT_EQ(a.geodesic.vertices[k] + tau, b.geodesic.vertices[k]);
  }
}

TEST(Geodesic, ThreeDimensions) {
  std::mt19937_64 gen(14);
  for (int i = 0; i < 20; ++i) {
    const BoxLattice box({0, 0, 0}, {1, 1, 2});
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2, 3});
    const auto fast = geodesic_time(env, {0, 0, 0}, {1, 1, 2});
    const auto slow = geodesic_time_enumerate(env, {0, 0, 0}, {1, 1, 2});
    EXPECT_EQ(fast.time, slow.time);
    EXPECT_EQ(fast.geodesic, slow.geodesic);
  }
}

TEST(Geodesic, EnumerationRefusesLargeBoxes) {
  const BoxLattice box({0, 0}, {9, 9});
  const auto env = ExactEnvironment::constant(box, 1);
  EXPECT_THROW(geodesic_time_enumerate(env, {0, 0}, {1, 1}), std::length_error);
}

TEST(Directed, SquareExample) {
  const BoxLattice box({0, 0}, {1, 1});
  const auto env = with_weights(box, 0, {{{0, 0}, {1, 0}, 2}, {{1, 0}, {1, 1}, 4}, {{0, 0}, {0, 1}, 3}, {{0, 1}, {1, 1}, 1}});
  const auto r = directed_time(env, {1, 1});
  EXPECT_EQ(r.time, 4);
  EXPECT_EQ(r.geodesic, make_path({{0, 0}, {0, 1}, {1, 1}}));
  EXPECT_EQ(directed_time_enumerate(env, {1, 1}), 4);
  EXPECT_EQ(directed_time_value(env, {1, 1}), 4);
}

TEST(Directed, ConstantAndOrigin) {
  const BoxLattice box({0, 0, 0}, {4, 3, 2});
  const auto env = ExactEnvironment::constant(box, 3);
  EXPECT_EQ(directed_time(env, {4, 3, 2}).time, 27);
  const auto zero = directed_time(env, {0, 0, 0});
  EXPECT_EQ(zero.time, 0);
  EXPECT_EQ(zero.geodesic.edge_count(), 0u);
}

TEST(Directed, PathCounts) {
  EXPECT_EQ(count_directed_paths({2, 1}), 3u);
  EXPECT_EQ(count_directed_paths({3, 3}), 20u);
  EXPECT_EQ(count_directed_paths({1, 1, 1}), 6u);
}

TEST(Directed, RejectsBadTargets) {
  const BoxLattice box({0, 0}, {3, 3});
  const auto env = ExactEnvironment::constant(box, 1);
  EXPECT_THROW(directed_time(env, {-1, 0}), std::invalid_argument);
  EXPECT_THROW(directed_time(env, {4, 0}), std::out_of_range);
}

TEST(Directed, MatchesIndependentOracles) {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 100; ++i) {
    const Point x{static_cast<std::int64_t>(gen() % 7), static_cast<std::int64_t>(gen() % 7)};
    const BoxLattice box({-1, -1}, x + Point{1, 1});
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2, 3, kInf});
    const auto dp = directed_time(env, x);
    EXPECT_EQ(dp.time, fpp::testing::directed_recursive(env, x));
    EXPECT_EQ(dp.time, directed_time_value(env, x));
    if (l1_norm(x) <= 12) { EXPECT_EQ(dp.time, directed_time_enumerate(env, x)); }
    if (dp.time != kInf) {
      EXPECT_TRUE(validate_path(dp.geodesic).directed);
      EXPECT_EQ(fpp::testing::sum_along(env, dp.geodesic), dp.time);
    }
  }
}

TEST(Directed, NeverBelowUndirected) {
  std::mt19937_64 gen(22);
  for (int i = 0; i < 50; ++i) {
    const BoxLattice box({-3, -3}, {10, 10});
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2});
    const Point x{static_cast<std::int64_t>(gen() % 8), static_cast<std::int64_t>(gen() % 8)};
    EXPECT_LE(geodesic_time(env, {0, 0}, x).time, directed_time(env, x).time);
  }
}

TEST(Directed, ArgminInvariance) {
  std::mt19937_64 gen(23);
  const BoxLattice box({0, 0}, {3, 3});
  for (int i = 0; i < 30; ++i) {
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2});
    EXPECT_TRUE(directed_argmin_invariance_check(env, Rational(1, 2), {2, 2}).holds());
    const auto r = directed_argmin_invariance_check(env, Rational(1), {3, 3});
    EXPECT_TRUE(r.holds());
  }
  const auto flat = ExactEnvironment::constant(box, 1);
  const auto r = directed_argmin_invariance_check(flat, Rational(3, 7), {3, 3});
  EXPECT_TRUE(r.holds());
  EXPECT_EQ(r.optimal_count, 20u);
}
