#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fpp/config.hpp"
#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "support.hpp"

using namespace fpp;
using fpp::testing::make_path;

namespace {

DistributionSpec atoms(std::vector<Atom> a) { return DistributionSpec(std::move(a), {}); }

const CriticalConstants kD2{0.5, 0.6447, "test"};

}  // namespace

TEST(Distribution, RejectsBadLaws) {
  EXPECT_THROW(atoms({Atom::finite(1, 0.5)}), std::invalid_argument);
  EXPECT_THROW(atoms({Atom::finite(-1, 1.0)}), std::invalid_argument);
  EXPECT_NO_THROW(atoms({Atom::finite(1, 0.5), Atom::infinity(0.5)}));
}

TEST(Distribution, SupportQueries) {
  const auto d = atoms({Atom::finite(Rational(3, 2), 0.25), Atom::finite(Rational(1, 3), 0.5), Atom::infinity(0.25)});
  EXPECT_TRUE(d.exact());
  EXPECT_EQ(d.common_denominator(), 6);
  EXPECT_DOUBLE_EQ(d.r(), 1.0 / 3.0);
  EXPECT_EQ(d.r_exact(), Rational(1, 3));
  EXPECT_DOUBLE_EQ(d.mass_infinite(), 0.25);
  EXPECT_DOUBLE_EQ(d.mass_finite(), 0.75);
  EXPECT_DOUBLE_EQ(d.mass_at_r(), 0.5);
}

TEST(CheckUseful, Examples) {
  auto f = check_useful(atoms({Atom::finite(1, 0.4), Atom::finite(2, 0.6)}), kD2);
  EXPECT_TRUE(f.useful_pc && f.useful_directed_pc && f.finite_mass_supercritical);
  f = check_useful(atoms({Atom::finite(0, 0.5), Atom::finite(1, 0.5)}), kD2);
  EXPECT_FALSE(f.useful_pc);
  f = check_useful(atoms({Atom::finite(1, 0.7), Atom::infinity(0.3)}), kD2);
  EXPECT_TRUE(f.finite_mass_supercritical);
  EXPECT_FALSE(f.useful_directed_pc);
}

TEST(CheckUseful, CaseSplitOnR) {
  // r = 0 needs L(0) < p_c; r > 0 only needs L(r) below the oriented threshold
  EXPECT_FALSE(check_useful(atoms({Atom::finite(0, 0.55), Atom::finite(1, 0.45)}), kD2).useful(0.0));
  EXPECT_TRUE(check_useful(atoms({Atom::finite(1, 0.55), Atom::finite(2, 0.45)}), kD2).useful(1.0));
}

TEST(CriticalConstants, HigherDimensionsNeedExplicitValues) {
  const auto j = nlohmann::json::parse(R"({"atoms": [{"value": 1, "probability": 1}]})");
  EXPECT_THROW(critical_from_json(j, 3), std::invalid_argument);
  EXPECT_NO_THROW(critical_from_json(j, 2));
}

TEST(DistributionJson, DecimalsAreExact) {
  const auto j = nlohmann::json::parse(R"({"atoms": [{"value": 0.1, "probability": 0.5}, {"value": "3/4", "probability": "1/2"}]})");
  const auto d = distribution_from_json(j);
  EXPECT_TRUE(d.exact());
  EXPECT_EQ(d.finite_atom_exact_values(), (std::vector<Rational>{Rational(1, 10), Rational(3, 4)}));
}

TEST(Sample, Deterministic) {
  auto spec = fpp::testing::two_point();
  const BoxLattice box({0, 0}, {20, 20});
  const auto a = sample_environment<ExactTime>(spec, box, 9, 4);
  const auto b = sample_environment<ExactTime>(spec, box, 9, 4);
  const auto c = sample_environment<ExactTime>(spec, box, 9, 5);
  EXPECT_TRUE(std::equal(a.weights().begin(), a.weights().end(), b.weights().begin()));
  EXPECT_FALSE(std::equal(a.weights().begin(), a.weights().end(), c.weights().begin()));
}

TEST(Sample, PointMass) {
  const BoxLattice box({0, 0}, {10, 7});
  const auto env = sample_environment<ExactTime>(fpp::testing::point_mass(), box, 1, 0);
  for (std::size_t s = 0; s < box.edge_slot_count(); ++s)
    if (box.edge_slot_valid(s)) { EXPECT_EQ(env.to_real(env.weight(s)), 1.0); }
}

TEST(Sample, TwoPointFrequency) {
  // 10^6 edges, frequency of weight 1 within 0.5 +- 0.01 (about 20 sigma)
  const BoxLattice box({0, 0}, {707, 707});
  ASSERT_GE(box.edge_count(), 1000000u);
  const auto env = sample_environment<ExactTime>(fpp::testing::two_point(), box, 3, 0);
  std::size_t ones = 0, edges = 0;
  for (std::size_t s = 0; s < box.edge_slot_count(); ++s) {
    if (!box.edge_slot_valid(s)) continue;
    ++edges;
    ones += env.weight(s) == env.scale();
  }
  EXPECT_NEAR(static_cast<double>(ones) / static_cast<double>(edges), 0.5, 0.01);
}

TEST(Sample, InfiniteAtomAndUniformPiece) {
  auto spec = std::make_shared<const DistributionSpec>(std::vector<Atom>{Atom::infinity(0.25)},
                                                       std::vector<UniformPiece>{{1.0, 3.0, 0.75}});
  const BoxLattice box({0, 0}, {200, 200});
  const auto env = sample_environment<RealTime>(spec, box, 1, 0);
  std::size_t inf = 0, edges = 0;
  for (std::size_t s = 0; s < box.edge_slot_count(); ++s) {
    if (!box.edge_slot_valid(s)) continue;
    ++edges;
    const double w = env.weight(s);
    if (std::isinf(w)) {
      ++inf;
    } else {
      EXPECT_GE(w, 1.0);
      EXPECT_LE(w, 3.0);
    }
  }
  EXPECT_NEAR(static_cast<double>(inf) / static_cast<double>(edges), 0.25, 0.01);
}

TEST(Shift, SubstitutesEveryEdge) {
  const BoxLattice box({0, 0}, {3, 0 + 1});
  std::vector<std::int64_t> w(box.edge_slot_count(), TimeTraits<std::int64_t>::infinity());
  const std::vector<Point> line{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  const std::int64_t vals[] = {1, 2, 1};
  for (int i = 0; i < 3; ++i) w[box.edge_between(line[i], line[i + 1])] = vals[i];
  const ExactEnvironment env(box, w);
  const auto shifted = shift_environment(env, Rational(1, 2));
  EXPECT_EQ(shifted.scale(), 2);
  const double expect[] = {1.5, 2.5, 1.5};
  for (int i = 0; i < 3; ++i) EXPECT_EQ(shifted.real_weight(line[i], line[i + 1]), expect[i]);
  // the unset vertical edges were infinite and stay infinite
  EXPECT_TRUE(std::isinf(shifted.real_weight({0, 0}, {0, 1})));
  EXPECT_THROW(shift_environment(env, Rational(0)), std::invalid_argument);
  EXPECT_THROW(shift_environment(env, Rational(-1, 2)), std::invalid_argument);
}

TEST(Shift, PathIdentityExample) {
  // |pi|_e = 3, T(pi) = 4, delta = 1/2 -> 5.5
  const BoxLattice box({0, 0}, {3, 1});
  std::vector<std::int64_t> w(box.edge_slot_count(), 7);
  const auto p = make_path({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  w[box.edge_between({0, 0}, {1, 0})] = 1;
  w[box.edge_between({1, 0}, {2, 0})] = 2;
  w[box.edge_between({2, 0}, {3, 0})] = 1;
  const ExactEnvironment env(box, w);
  EXPECT_EQ(env.to_real(path_time(env, p)), 4.0);
  const auto shifted = shift_environment(env, Rational(1, 2));
  EXPECT_EQ(shifted.to_real(path_time(shifted, p)), 5.5);
}

TEST(Shift, RealModeMatchesExactMode) {
  auto spec = std::make_shared<const DistributionSpec>(
      std::vector<Atom>{Atom::finite(Rational(1, 3), 0.5), Atom::finite(Rational(5, 7), 0.5)}, std::vector<UniformPiece>{});
  const BoxLattice box({0, 0}, {6, 6});
  const auto ex = sample_environment<ExactTime>(spec, box, 2, 0);
  const auto re = sample_environment<RealTime>(spec, box, 2, 0);
  const auto exs = shift_environment(ex, Rational(1, 4));
  const auto res = shift_environment(re, Rational(1, 4));
  for (std::size_t s = 0; s < box.edge_slot_count(); ++s)
    if (box.edge_slot_valid(s)) { EXPECT_NEAR(exs.to_real(exs.weight(s)), res.weight(s), 1e-12); }
}

TEST(PathTime, Examples) {
  const BoxLattice box({0, 0}, {3, 1});
  std::vector<std::int64_t> w(box.edge_slot_count(), 5);
  w[box.edge_between({0, 0}, {1, 0})] = 1;
  w[box.edge_between({1, 0}, {2, 0})] = 2;
  w[box.edge_between({2, 0}, {3, 0})] = 3;
  const auto line = make_path({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  ExactEnvironment env(box, w);
  EXPECT_EQ(path_time(env, make_path({{1, 1}})), 0);
  EXPECT_EQ(path_time(env, line), 6);
  w[box.edge_between({1, 0}, {2, 0})] = TimeTraits<std::int64_t>::infinity();
  EXPECT_EQ(path_time(ExactEnvironment(box, w), line), TimeTraits<std::int64_t>::infinity());
  EXPECT_THROW(path_time(env, make_path({{3, 0}, {4, 0}})), std::out_of_range);
}

TEST(Shift, IdentityOnRandomPaths) {
  std::mt19937_64 gen(17);
  const BoxLattice box({-4, -4}, {4, 4});
  for (int trial = 0; trial < 200; ++trial) {
    const auto env = fpp::testing::random_exact_env(box, gen, {1, 2, 5});
    const Rational delta(static_cast<std::int64_t>(gen() % 5 + 1), static_cast<std::int64_t>(gen() % 4 + 1));
    const auto shifted = shift_environment(env, delta);
    const auto base = rescale(env, shifted.scale());
    LatticePath p{{Point{0, 0}}};
    for (int k = 0; k < 12; ++k) {
      Point next = p.vertices.back();
      next[gen() % 2] += (gen() % 2) ? 1 : -1;
      if (!box.contains(next)) break;
      p.vertices.push_back(next);
    }
    const auto units = delta.num() * (shifted.scale() / delta.den());
    EXPECT_EQ(path_time(shifted, p), path_time(base, p) + units * static_cast<std::int64_t>(p.edge_count()));
  }
}

TEST(EdgeOutput, CsvListsEveryEdgeOnce) {
  const BoxLattice box({0, 0}, {2, 1});
  const auto env = sample_environment<ExactTime>(fpp::testing::two_point(), box, 1, 0);
  std::ostringstream os;
  write_edge_csv(os, env);
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  EXPECT_EQ(lines, box.edge_count() + 1);  // header + one row per edge
}
