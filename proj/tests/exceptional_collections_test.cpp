#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace wdp;

namespace {

SmoothToricSurface fan(const std::string& name) { return io::load_fan(name); }

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidInput;
}

// O, H, 2H on P^2 with H the first ray divisor.
ExcCollection beilinson() {
  auto s = fan("p2");
  DivisorClass h = s.ray_divisor(0);
  return verify_line_collection(s, {zero_divisor(3), h, 2 * h});
}

// (O, O(1,0), O(0,1), O(1,1)) with the fibres of the two rulings.
ExcCollection quadric(const SmoothToricSurface& s) {
  DivisorClass a = s.ray_divisor(Ray{1, 0}), b = s.ray_divisor(Ray{0, 1});
  return verify_line_collection(s, {zero_divisor(4), a, b, a + b});
}

std::vector<Rational> slopes(const ExcCollection& c) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c.slope(i));
  return out;
}

// Class lists agree up to linear equivalence of first Chern classes.
bool same_classes(const SmoothToricSurface& s, const std::vector<KClass>& a,
                  const std::vector<KClass>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rank != b[i].rank || a[i].chi != b[i].chi || !s.equivalent(a[i].c1, b[i].c1)) return false;
  }
  return true;
}

std::vector<Rational> ints(std::initializer_list<Int> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST(VerifyLineCollection, Beilinson) {
  auto c = beilinson();
  EXPECT_EQ(c.fullness, Fullness::numerically_consistent);
  EXPECT_EQ(c.trivial_index, std::optional<std::size_t>{0});
  EXPECT_EQ(std::abs(*class_determinant(c.form(), c.classes())), 1);
}

TEST(VerifyLineCollection, Quadric) {
  auto c = quadric(fan("p1xp1"));
  EXPECT_EQ(c.size(), 4u);
  EXPECT_EQ(c.fullness, Fullness::numerically_consistent);
}

TEST(VerifyLineCollection, RejectsBackwardHom) {
  auto s = fan("p2");
  EXPECT_EQ(error_of([&] { verify_line_collection(s, {zero_divisor(3), -1 * s.ray_divisor(0)}); }),
            ErrorCode::NotExceptional);
}

TEST(VerifyLineCollection, ShortCollectionHasUnknownFullness) {
  auto s = fan("p2");
  auto c = verify_line_collection(s, {zero_divisor(3), s.ray_divisor(0)});
  EXPECT_EQ(c.fullness, Fullness::unknown);
}

TEST(VerifyLineCollection, AgreesWithPairing) {
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    auto c = blowup_chain_collection(s);
    auto g = gram_matrix(c.form(), c.classes());
    EXPECT_TRUE(is_unit_upper_triangular(g)) << s.name();
  }
}

TEST(StrongnessReport, Beilinson) {
  auto r = strongness_report(beilinson());
  EXPECT_EQ(*r.at({0, 1}), (Cohomology{3, 0, 0}));
  EXPECT_EQ(*r.at({0, 2}), (Cohomology{6, 0, 0}));
  EXPECT_EQ(*r.at({1, 2}), (Cohomology{3, 0, 0}));
  EXPECT_TRUE(r.at({2, 0})->all_vanish());
}

TEST(StrongnessReport, SecondHirzebruch) {
  auto s = fan("sigma2");
  auto c = *seed_collection(s);
  for (const auto& [key, coh] : strongness_report(c)) {
    ASSERT_TRUE(coh.has_value());
    EXPECT_TRUE(coh->higher_vanish()) << key.first << "," << key.second;
  }
}

TEST(StrongnessReport, SectionPair) {
  auto s = fan("sigma2");
  std::size_t c0 = static_cast<std::size_t>(
      std::find(s.selfint().begin(), s.selfint().end(), Int{-2}) - s.selfint().begin());
  auto c = verify_line_collection(s, {zero_divisor(4), s.ray_divisor(c0)});
  EXPECT_EQ(*strongness_report(c).at({0, 1}), (Cohomology{1, 1, 0}));
}

TEST(StrongnessReport, OpaqueEntriesUnknown) {
  auto c = mutate_left(beilinson(), 0).collection;
  auto r = strongness_report(c);
  EXPECT_FALSE(r.at({0, 1}).has_value());
  EXPECT_TRUE(r.at({1, 2}).has_value());
}

TEST(SeedCollection, Shapes) {
  EXPECT_EQ(seed_collection(fan("p2"))->size(), 3u);
  EXPECT_EQ(seed_collection(fan("p1xp1"))->size(), 4u);
  auto s2 = *seed_collection(fan("sigma2"));
  EXPECT_EQ(slopes(s2), ints({0, 2, 4, 6}));
  EXPECT_EQ(s2.fullness, Fullness::by_construction);
  EXPECT_FALSE(seed_collection(fan("dp6")).has_value());
}

TEST(AugmentBlowup, FirstDelPezzo) {
  auto c = *seed_collection(fan("p2"));
  auto up = blowup(c.surface, 0);
  auto d = augment_blowup(c, up);
  ASSERT_EQ(d.size(), 4u);
  const auto& y = up.surface;
  EXPECT_TRUE(y.equivalent(*d.members[0].line, zero_divisor(4)));
  EXPECT_TRUE(y.equivalent(*d.members[1].line, up.exceptional));
  EXPECT_TRUE(y.equivalent(*d.members[2].line, up.pullback(c.surface.ray_divisor(0))));
  EXPECT_TRUE(y.equivalent(*d.members[3].line, up.pullback(2 * c.surface.ray_divisor(0))));
  EXPECT_EQ(d.fullness, Fullness::by_construction);
  EXPECT_EQ(d.trivial_index, std::optional<std::size_t>{0});
  EXPECT_NO_THROW(verify_line_collection(y, {*d.members[0].line, *d.members[1].line,
                                             *d.members[2].line, *d.members[3].line}));
}

TEST(AugmentBlowup, ThreeTimesGivesHexagon) {
  auto c = *seed_collection(fan("p2"));
  for (int k = 0; k < 3; ++k) {
    auto up = blowup(c.surface, 2 * static_cast<std::size_t>(k));
    c = augment_blowup(c, up);
  }
  EXPECT_EQ(c.size(), 6u);
  EXPECT_EQ(c.surface.degree(), 6);
  EXPECT_EQ(std::abs(*class_determinant(c.form(), c.classes())), 1);
}

TEST(AugmentBlowup, NeedsTrivialFirst) {
  auto c = beilinson();
  std::swap(c.members[0], c.members[1]);
  auto up = blowup(c.surface, 0);
  EXPECT_EQ(error_of([&] { augment_blowup(c, up); }), ErrorCode::FirstMemberNotTrivial);
}

TEST(AugmentBlowup, PreservesPulledBackGram) {
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    auto c = blowup_chain_collection(s);
    for (std::size_t corner = 0; corner < s.num_rays(); ++corner) {
      auto up = blowup(s, corner);
      auto d = augment_blowup(c, up);
      auto g = gram_matrix(c.form(), c.classes());
      auto h = gram_matrix(d.form(), d.classes());
      for (std::size_t i = 1; i < c.size(); ++i)
        for (std::size_t j = 1; j < c.size(); ++j) EXPECT_EQ(g[i][j], h[i + 1][j + 1]);
    }
  }
}

TEST(Mutation, OrthogonalPairTransposes) {
  auto s = fan("p2");
  auto c = beilinson();
  ExcCollection rev{s, {c.members[1], c.members[0]}, Fullness::unknown, 1, {}};
  auto r = mutate_left(rev, 0);
  EXPECT_EQ(r.step.rule, "transposition");
  EXPECT_EQ(r.collection.classes(), (std::vector<KClass>{c.members[0].cls, c.members[1].cls}));
  EXPECT_EQ(r.collection.trivial_index, std::optional<std::size_t>{0});
}

TEST(Mutation, LeftClassArithmetic) {
  auto c = beilinson();
  auto r = mutate_left(c, 0);
  EXPECT_EQ(r.step.rule, "mutation-left");
  const auto& m = r.collection.members[0];
  EXPECT_FALSE(m.is_line());
  EXPECT_EQ(m.cls, (KClass{2, -1 * c.surface.ray_divisor(0), 0}));
  EXPECT_EQ(r.collection.members[1].cls, c.members[0].cls);
  EXPECT_FALSE(m.flags.vector_bundle.holds);  // slopes ascend, so the hypothesis is absent
}

TEST(Mutation, RightUndoesLeft) {
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    auto c = blowup_chain_collection(s);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      auto once = mutate_left(c, i).collection;
      try {
        EXPECT_EQ(mutate_right(once, i).collection.classes(), c.classes()) << s.name() << " " << i;
      } catch (const Error& e) {
        // chi = 0 against an opaque member: the inverse needs data we do not have.
        EXPECT_EQ(e.code(), ErrorCode::HypothesisUnknown);
      }
    }
  }
}

TEST(Mutation, IndexOutOfRange) {
  EXPECT_EQ(error_of([] { mutate_left(beilinson(), 2); }), ErrorCode::IndexOutOfRange);
}

TEST(Mutation, SlopeWindowOnDescendingBundles) {
  auto rot = rotate(beilinson()).collection;  // (O(-1), O, O(1))
  EXPECT_EQ(slopes(rot), ints({-3, 0, 3}));
  // On the degree-5 surface the rotated member sits above O and must be mutated.
  auto w = rotate(blowup_chain_collection(fan("wdp5"))).collection;
  ASSERT_GT(w.slope(0), w.slope(1));
  auto m = mutate_right(w, 0);
  EXPECT_EQ(m.step.rule, "mutation-right");
  const auto& fresh = m.collection.members[1];
  EXPECT_TRUE(fresh.flags.vector_bundle.holds);
  EXPECT_TRUE(fresh.flags.semistable.holds);
  EXPECT_EQ(fresh.cls.rank, 2);
  EXPECT_EQ(m.collection.slope(1), Rational(1, 2));
  EXPECT_LT(w.slope(1), m.collection.slope(1));
  EXPECT_LT(m.collection.slope(1), w.slope(0));
}

TEST(Mutation, OpaquePairWithZeroPairingIsUnknown) {
  auto c = beilinson();
  auto once = mutate_left(c, 0).collection;  // (L, O, O(2))
  auto twice = mutate_left(once, 1).collection;
  // Find an opaque adjacent pair with vanishing pairing, if any, and check the error.
  for (std::size_t i = 0; i + 1 < twice.size(); ++i) {
    const auto& a = twice.members[i];
    const auto& b = twice.members[i + 1];
    if (a.is_line() && b.is_line()) continue;
    if (euler_pairing(twice.form(), a.cls, b.cls) != 0) continue;
    EXPECT_EQ(error_of([&] { mutate_left(twice, i); }), ErrorCode::HypothesisUnknown);
  }
}

TEST(Mutation, DeterminantAndGramInvariant) {
  std::mt19937_64 rng(wdp::testing::kSeed);
  int applied = 0;
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    const auto start = blowup_chain_collection(s);
    const Int det = std::abs(*class_determinant(start.form(), start.classes()));
    EXPECT_EQ(det, 1);
    auto c = start;
    for (int k = 0; k < 100; ++k) {
      // Short walks: coefficients grow exponentially along long ones.
      if (k % 5 == 0) c = start;
      std::uniform_int_distribution<std::size_t> pick(0, c.size() - 2);
      std::size_t i = pick(rng);
      try {
        c = (rng() & 1) ? mutate_left(c, i).collection : mutate_right(c, i).collection;
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::HypothesisUnknown);
        continue;
      }
      ++applied;
      EXPECT_EQ(std::abs(*class_determinant(c.form(), c.classes())), det);
      EXPECT_TRUE(is_unit_upper_triangular(gram_matrix(c.form(), c.classes())));
    }
  }
  EXPECT_GE(applied, 500);
}

TEST(Rotation, TwistsLastMember) {
  auto c = beilinson();
  auto r = rotate(c);
  EXPECT_EQ(r.step.rule, "rotation");
  EXPECT_TRUE(c.surface.equivalent(*r.collection.members[0].line, -1 * c.surface.ray_divisor(0)));
  EXPECT_EQ(r.collection.trivial_index, std::optional<std::size_t>{1});
  EXPECT_TRUE(is_unit_upper_triangular(gram_matrix(c.form(), r.collection.classes())));
}

TEST(Rotation, RefusesToTwistTrivialMember) {
  auto c = beilinson();
  ExcCollection one{c.surface, {c.members[0]}, Fullness::unknown, 0, {}};
  EXPECT_EQ(error_of([&] { rotate(one); }), ErrorCode::TrivialMemberWouldTwist);
}

TEST(SortBySlope, SeedsUnchanged) {
  for (const char* name : {"p2", "sigma2", "p1xp1"}) {
    auto c = *seed_collection(fan(name));
    auto r = sort_by_slope(c);
    EXPECT_TRUE(r.trace.empty()) << name;
    EXPECT_EQ(r.collection.classes(), c.classes());
  }
  EXPECT_EQ(slopes(beilinson()), ints({0, 3, 6}));
}

TEST(SortBySlope, ShuffledQuadric) {
  auto s = fan("p1xp1");
  auto q = quadric(s);
  ExcCollection shuffled{s, {q.members[1], q.members[0], q.members[3], q.members[2]},
                         Fullness::unknown, 1, {}};
  auto r = sort_by_slope(shuffled);
  EXPECT_FALSE(r.trace.empty());
  for (const auto& step : r.trace) EXPECT_EQ(step.rule, "transposition");
  EXPECT_TRUE(slopes_sorted(r.collection));
  EXPECT_TRUE(window_strict(r.collection));
  EXPECT_EQ(slopes(r.collection), ints({0, 2, 2, 4}));
  EXPECT_EQ(r.collection.trivial_index, std::optional<std::size_t>{0});
}

TEST(SortBySlope, HexagonNeedsRotation) {
  auto c = blowup_chain_collection(fan("dp6"));
  EXPECT_FALSE(window_strict(c));
  auto r = sort_by_slope(c);
  EXPECT_TRUE(slopes_sorted(r.collection));
  EXPECT_TRUE(window_strict(r.collection));
  ASSERT_TRUE(r.collection.trivial_index.has_value());
  EXPECT_TRUE(is_trivial_line(r.collection.surface, r.collection.members[*r.collection.trivial_index]));
  for (const auto& m : r.collection.members) EXPECT_TRUE(m.is_line());
}

TEST(SortBySlope, IdempotentAndReplayable) {
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    auto c = blowup_chain_collection(s);
    auto r = sort_by_slope(c);
    EXPECT_TRUE(slopes_sorted(r.collection)) << s.name();
    EXPECT_TRUE(window_strict(r.collection)) << s.name();
    EXPECT_TRUE(sort_by_slope(r.collection).trace.empty()) << s.name();
    EXPECT_EQ(replay(c, r.trace).classes(), r.collection.classes()) << s.name();
    ASSERT_TRUE(r.collection.trivial_index.has_value()) << s.name();
  }
}

TEST(SortBySlope, StepLimitCarriesTrace) {
  auto c = blowup_chain_collection(fan("dp6"));
  try {
    sort_by_slope(c, 1);
    SUCCEED();  // one rotation may already suffice
  } catch (const StepLimitError& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepLimitExceeded);
    EXPECT_LE(e.trace().size(), 1u);
  }
  auto w = blowup_chain_collection(fan("wdp5"));
  try {
    sort_by_slope(w, 1);
    FAIL() << "expected the step cap to trigger";
  } catch (const StepLimitError& e) {
    EXPECT_EQ(e.trace().size(), 2u);  // includes the step that crossed the cap
  }
}

TEST(Search, ProjectivePlaneRadiusTwo) {
  auto s = fan("p2");
  auto found = search_sorted_line_collections(s, 2);
  auto target = beilinson().classes();
  EXPECT_TRUE(std::any_of(found.begin(), found.end(),
                          [&](const ExcCollection& c) { return same_classes(s, c.classes(), target); }));
}

TEST(Search, QuadricRadiusOne) {
  auto s = fan("p1xp1");
  auto found = search_sorted_line_collections(s, 1);
  auto q = quadric(s);
  ExcCollection swapped{s, {q.members[0], q.members[2], q.members[1], q.members[3]},
                        Fullness::unknown, 0, {}};
  EXPECT_TRUE(std::any_of(found.begin(), found.end(), [&](const ExcCollection& c) {
    return same_classes(s, c.classes(), q.classes()) || same_classes(s, c.classes(), swapped.classes());
  }));
}

TEST(Search, ResultsAreSortedFullCollections) {
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    for (const auto& c : search_sorted_line_collections(s, 1, 5)) {
      EXPECT_EQ(c.size(), s.num_rays());
      EXPECT_TRUE(is_trivial_line(s, c.members[0]));
      EXPECT_TRUE(slopes_sorted(c));
      EXPECT_TRUE(window_strict(c));
      EXPECT_EQ(c.fullness, Fullness::numerically_consistent);
    }
  }
}

TEST(Search, RejectsThirdHirzebruch) {
  EXPECT_EQ(error_of([] { search_sorted_line_collections(fan("sigma3"), 1); }),
            ErrorCode::NotWeakDelPezzo);
}

TEST(Mutation, RoundTripAfterRandomWalks) {
  // Walks reach rank-0 members, whose sign must normalize consistently.
  std::mt19937_64 rng(wdp::testing::kSeed);
  int round_trips = 0;
  for (const auto& s : wdp::testing::weak_del_pezzo_catalog()) {
    for (int walk = 0; walk < 20; ++walk) {
      auto c = blowup_chain_collection(s);
      for (int step = 0; step < 4; ++step) {
        std::size_t i = std::uniform_int_distribution<std::size_t>(0, c.size() - 2)(rng);
        try {
          auto back = mutate_right(mutate_left(c, i).collection, i).collection;
          EXPECT_EQ(back.classes(), c.classes()) << s.name();
          ++round_trips;
          c = (rng() & 1) ? mutate_left(c, i).collection : mutate_right(c, i).collection;
        } catch (const Error& e) {
          ASSERT_EQ(e.code(), ErrorCode::HypothesisUnknown);
        }
      }
    }
  }
  EXPECT_GE(round_trips, 300);
}
