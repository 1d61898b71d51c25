#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace wdp;

namespace {

struct P2 {
  SmoothToricSurface s = SmoothToricSurface::from_rays({{1, 0}, {0, 1}, {-1, -1}}, "p2");
  DivisorClass h = s.ray_divisor(0);
  KClass o(Int d) const { return line_class(s.form(), d * h); }
};

}  // namespace

TEST(EulerPairing, ProjectivePlane) {
  P2 p;
  const auto& f = p.s.form();
  EXPECT_EQ(euler_pairing(f, p.o(0), p.o(1)), 3);
  EXPECT_EQ(euler_pairing(f, p.o(1), p.o(0)), 0);
  EXPECT_EQ(euler_pairing(f, p.o(0), p.o(0)), 1);
}

TEST(EulerPairing, AgreesWithHonestCohomologyForLineBundles) {
  std::mt19937_64 rng(wdp::testing::kSeed + 10);
  for (const auto& s : wdp::testing::catalog()) {
    for (int k = 0; k < 100; ++k) {
      auto a = wdp::testing::random_divisor(rng, s.num_rays(), -3, 3);
      auto b = wdp::testing::random_divisor(rng, s.num_rays(), -3, 3);
      auto c = cohomology(s, b - a);
      EXPECT_EQ(euler_pairing(s.form(), line_class(s.form(), a), line_class(s.form(), b)),
                c.h0 - c.h1 + c.h2)
          << s.name();
      EXPECT_EQ(euler_pairing(s.form(), line_class(s.form(), a), line_class(s.form(), a)), 1);
    }
  }
}

TEST(EulerPairing, SerreDualityAndBilinearity) {
  std::mt19937_64 rng(wdp::testing::kSeed + 11);
  for (const auto& s : wdp::testing::catalog()) {
    const auto& f = s.form();
    EXPECT_EQ(euler_pairing(f, structure_sheaf(f), structure_sheaf(f)), 1);
    for (int k = 0; k < 1000; ++k) {
      auto e = wdp::testing::random_class(rng, f);
      auto g = wdp::testing::random_class(rng, f);
      auto h = wdp::testing::random_class(rng, f);
      EXPECT_EQ(euler_pairing(f, e, g), euler_pairing(f, g, twist(f, e, s.canonical())));
      EXPECT_EQ(euler_pairing(f, e + h, g), euler_pairing(f, e, g) + euler_pairing(f, h, g));
      EXPECT_EQ(euler_pairing(f, e, g + h), euler_pairing(f, e, g) + euler_pairing(f, e, h));
    }
  }
}

TEST(EulerPairing, SurfaceMismatch) {
  P2 p;
  auto q = wdp::io::load_fan("p1xp1");
  EXPECT_THROW(euler_pairing(p.s.form(), p.o(1), structure_sheaf(q.form())), Error);
}

TEST(Slope, Examples) {
  P2 p;
  EXPECT_EQ(slope(p.s.form(), p.o(0)), Rational(0));
  EXPECT_EQ(slope(p.s.form(), p.o(1)), Rational(3));
  EXPECT_THROW(slope(p.s.form(), zero_class(p.s.form())), Error);

  auto t = wdp::io::load_fan("sigma2");
  auto c0 = t.ray_divisor(Ray{0, 1});
  auto fib = t.ray_divisor(Ray{1, 0});
  EXPECT_EQ(t.intersect(-t.canonical(), c0), 0);
  EXPECT_TRUE(t.equivalent(-t.canonical(), 2 * c0 + 4 * fib));
  std::vector<DivisorClass> ds{zero_divisor(4), fib, c0 + 2 * fib, c0 + 3 * fib};
  std::vector<Rational> expected{0, 2, 4, 6};
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_EQ(slope(t.form(), line_class(t.form(), ds[i])), expected[i]);

  // Denominator divides the rank.
  KClass e{2, fib, 0};
  EXPECT_EQ(slope(t.form(), e), Rational(1));
  KClass g{3, fib, 0};
  EXPECT_EQ(slope(t.form(), g), Rational(2, 3));
}

TEST(Twist, Examples) {
  P2 p;
  const auto& f = p.s.form();
  EXPECT_EQ(twist(f, p.o(0), p.h), (KClass{1, p.h, 3}));
  auto e = p.o(2);
  EXPECT_EQ(twist(f, e, zero_divisor(3)), e);
  // Kernel of O^3 -> O(1): rank 2, c1 = -H, chi = 0; twisted by H it has chi 9 - 6 = 3.
  KClass kernel = 3 * p.o(0) - p.o(1);
  EXPECT_EQ(kernel, (KClass{2, -p.h, 0}));
  EXPECT_EQ(twist(f, kernel, p.h), (KClass{2, p.h, 3}));
}

TEST(Twist, PairingInvarianceAndInverse) {
  std::mt19937_64 rng(wdp::testing::kSeed + 12);
  for (const auto& s : wdp::testing::catalog()) {
    const auto& f = s.form();
    for (int k = 0; k < 200; ++k) {
      auto e = wdp::testing::random_class(rng, f);
      auto g = wdp::testing::random_class(rng, f);
      auto l = wdp::testing::random_divisor(rng, s.num_rays(), -3, 3);
      EXPECT_EQ(euler_pairing(f, twist(f, e, l), twist(f, g, l)), euler_pairing(f, e, g));
      EXPECT_EQ(twist(f, twist(f, e, l), -l), e);
      // Twisting a line bundle class gives the line bundle class of the sum.
      auto d = wdp::testing::random_divisor(rng, s.num_rays(), -3, 3);
      EXPECT_EQ(twist(f, line_class(f, d), l), line_class(f, d + l));
    }
  }
}

TEST(SerreTwist, Examples) {
  P2 p;
  const auto& f = p.s.form();
  auto t = serre_twist(f, p.o(0));
  EXPECT_TRUE(p.s.equivalent(t.c1, 3 * p.h));
  EXPECT_EQ(t.chi, 10);
  EXPECT_EQ(t.chi, h0(p.s, 3 * p.h));

  auto s2 = wdp::io::load_fan("sigma2");
  auto u = serre_twist(s2.form(), structure_sheaf(s2.form()));
  EXPECT_EQ(u.chi, 9);
  auto c0 = s2.ray_divisor(Ray{0, 1});
  auto fib = s2.ray_divisor(Ray{1, 0});
  EXPECT_TRUE(s2.equivalent(u.c1, 2 * c0 + 4 * fib));
}

TEST(SerreTwist, SlopeShiftIsDegree) {
  std::mt19937_64 rng(wdp::testing::kSeed + 13);
  for (const auto& s : wdp::testing::catalog()) {
    const auto& f = s.form();
    for (int k = 0; k < 100; ++k) {
      auto e = wdp::testing::random_class(rng, f);
      if (e.rank == 0) continue;
      if (e.rank < 0) e = -e;
      EXPECT_EQ(slope(f, serre_twist(f, e)) - slope(f, e), Rational(s.degree()));
    }
  }
}

TEST(AbstractSurface, NumericalOperationsWithoutFan) {
  // P^2 blown up in one point, Picard basis (H, E).
  auto j = nlohmann::json::parse(R"({"name": "dp8", "picard_rank": 2,
      "gram": [[1, 0], [0, -1]], "canonical": [-3, 1]})");
  auto a = wdp::io::abstract_surface_from_json(j);
  auto f = a.form();
  EXPECT_EQ(f.ksq(), 8);
  EXPECT_EQ(f.k_rank(), 4u);
  auto o = structure_sheaf(f);
  auto e = line_class(f, DivisorClass{{0, 1}});
  auto h = line_class(f, DivisorClass{{1, 0}});
  EXPECT_EQ(e.chi, 1);
  EXPECT_EQ(h.chi, 3);
  EXPECT_EQ(euler_pairing(f, e, o), 0);
  EXPECT_EQ(slope(f, h), Rational(3));
  EXPECT_EQ(slope(f, e), Rational(1));
  // Same numbers as the toric model.
  auto toric = wdp::io::load_fan("sigma1");
  EXPECT_EQ(toric.degree(), f.ksq());
  EXPECT_EQ(wdp::io::abstract_surface_to_json(a)["picard_rank"], 2);
}
