#ifndef WDP_COLLECTIONS_HPP
#define WDP_COLLECTIONS_HPP

#include "wdp/ktheory.hpp"
#include "wdp/toric.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wdp {

/// A certified property together with the rule that justified it.
struct Flag {
  bool holds = false;
  std::string rule;

  static Flag yes(std::string rule) { return {true, std::move(rule)}; }
};

struct MemberFlags {
  Flag exceptional;
  Flag vector_bundle;
  Flag semistable;
  Flag indecomposable;
};

/// Either an honest line bundle or an opaque class produced by a mutation.
struct Member {
  std::optional<DivisorClass> line;
  KClass cls;
  std::vector<std::string> provenance;
  MemberFlags flags;

  bool is_line() const { return line.has_value(); }

  static Member make_line(const LatticeForm& form, DivisorClass d) {
    Member m;
    m.cls = line_class(form, d);
    m.line = std::move(d);
    m.flags.exceptional = Flag::yes("line bundle");
    m.flags.vector_bundle = Flag::yes("line bundle");
    m.flags.semistable = Flag::yes("rank one");
    m.flags.indecomposable = Flag::yes("line bundle");
    return m;
  }

  static Member make_opaque(KClass cls, std::vector<std::string> provenance, MemberFlags flags = {}) {
    Member m;
    m.cls = std::move(cls);
    m.provenance = std::move(provenance);
    m.flags = std::move(flags);
    return m;
  }
};

enum class Fullness { by_construction, numerically_consistent, unknown };

inline std::string_view to_string(Fullness f) {
  switch (f) {
    case Fullness::by_construction: return "by-construction";
    case Fullness::numerically_consistent: return "numerically-consistent";
    case Fullness::unknown: return "unknown";
  }
  return "?";
}

inline std::optional<Fullness> fullness_from_string(std::string_view s) {
  for (Fullness f : {Fullness::by_construction, Fullness::numerically_consistent, Fullness::unknown}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

struct ExcCollection {
  SmoothToricSurface surface;
  std::vector<Member> members;
  Fullness fullness = Fullness::unknown;
  std::optional<std::size_t> trivial_index;
  /// Honest RHom(E_i, E_j) dimensions gathered while verifying line members.
  std::map<std::pair<std::size_t, std::size_t>, Cohomology> evidence;

  std::size_t size() const { return members.size(); }
  const LatticeForm& form() const { return surface.form(); }
  Rational slope(std::size_t i) const { return wdp::slope(form(), members.at(i).cls); }

  std::vector<KClass> classes() const {
    std::vector<KClass> out;
    for (const auto& m : members) out.push_back(m.cls);
    return out;
  }
};

inline bool is_trivial_line(const SmoothToricSurface& s, const Member& m) {
  return m.is_line() && s.equivalent(*m.line, zero_divisor(s.num_rays()));
}

/// G_ij = chi(E_i, E_j).
inline IntMat gram_matrix(const LatticeForm& form, const std::vector<KClass>& classes) {
  IntMat g(classes.size(), IntVec(classes.size(), 0));
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = 0; j < classes.size(); ++j)
      g[i][j] = euler_pairing(form, classes[i], classes[j]);
  return g;
}

inline bool is_unit_upper_triangular(const IntMat& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i][i] != 1) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (g[i][j] != 0) return false;
  }
  return true;
}

/// Determinant of the member classes in (rank, Picard coordinates, chi)
/// coordinates; defined only for as many members as the K-group has rank.
inline std::optional<Int> class_determinant(const LatticeForm& form,
                                            const std::vector<KClass>& classes) {
  if (classes.size() != form.k_rank()) return std::nullopt;
  IntMat m;
  for (const auto& c : classes) {
    IntVec row{c.rank};
    for (Int x : form.picard_coordinates(c.c1)) row.push_back(x);
    row.push_back(c.chi);
    m.push_back(std::move(row));
  }
  return determinant(std::move(m));
}

namespace detail {

inline std::optional<std::size_t> find_trivial(const SmoothToricSurface& s,
                                               const std::vector<Member>& members) {
  for (std::size_t i = 0; i < members.size(); ++i)
    if (is_trivial_line(s, members[i])) return i;
  return std::nullopt;
}

inline Fullness numeric_fullness(const SmoothToricSurface& s, const std::vector<KClass>& classes) {
  auto d = class_determinant(s.form(), classes);
  return (d && (*d == 1 || *d == -1)) ? Fullness::numerically_consistent : Fullness::unknown;
}

}  // namespace detail

/// Checks that all cohomology of L_i - L_j vanishes for i < j.
inline ExcCollection verify_line_collection(const SmoothToricSurface& s,
                                            const std::vector<DivisorClass>& divisors) {
  ExcCollection c{s, {}, Fullness::unknown, std::nullopt, {}};
  for (const auto& d : divisors) c.members.push_back(Member::make_line(s.form(), d));
  for (std::size_t j = 0; j < divisors.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      // RHom(L_j, L_i) = H^*(L_i - L_j)
      Cohomology back = cohomology(s, divisors[i] - divisors[j]);
      for (int p = 0; p < 3; ++p) {
        if (back[p] != 0) {
          throw Error(ErrorCode::NotExceptional,
                      "Ext^" + std::to_string(p) + "(E_" + std::to_string(j) + ", E_" +
                          std::to_string(i) + ") has dimension " + std::to_string(back[p]));
        }
      }
      c.evidence[{j, i}] = back;
      c.evidence[{i, j}] = cohomology(s, divisors[j] - divisors[i]);
    }
  }
  c.fullness = detail::numeric_fullness(s, c.classes());
  c.trivial_index = detail::find_trivial(s, c.members);
  return c;
}

/// (hom, ext1, ext2) for every ordered pair; nullopt when a member is opaque.
inline std::map<std::pair<std::size_t, std::size_t>, std::optional<Cohomology>> strongness_report(
    const ExcCollection& c) {
  std::map<std::pair<std::size_t, std::size_t>, std::optional<Cohomology>> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      if (!c.members[i].is_line() || !c.members[j].is_line()) {
        out[{i, j}] = std::nullopt;
      } else if (i > j) {
        out[{i, j}] = Cohomology{};
      } else {
        out[{i, j}] = cohomology(c.surface, *c.members[j].line - *c.members[i].line);
      }
    }
  }
  return out;
}

/// Known full exceptional collections on the minimal weak del Pezzo toric
/// surfaces: P^2, P^1 x P^1 and the second Hirzebruch surface.
inline std::optional<ExcCollection> seed_collection(const SmoothToricSurface& s) {
  const auto& si = s.selfint();
  std::vector<DivisorClass> ds;
  const DivisorClass o = zero_divisor(s.num_rays());
  if (s.num_rays() == 3) {
    DivisorClass h = s.ray_divisor(0);
    ds = {o, h, 2 * h};
  } else if (s.num_rays() == 4 && std::all_of(si.begin(), si.end(), [](Int x) { return x == 0; })) {
    DivisorClass a = s.ray_divisor(0), b = s.ray_divisor(1);
    ds = {o, a, b, a + b};
  } else if (s.num_rays() == 4 && std::count(si.begin(), si.end(), Int{-2}) == 1) {
    std::size_t c = static_cast<std::size_t>(std::find(si.begin(), si.end(), Int{-2}) - si.begin());
    DivisorClass c0 = s.ray_divisor(c), f = s.ray_divisor((c + 1) % 4);
    ds = {o, f, c0 + 2 * f, c0 + 3 * f};
  } else {
    return std::nullopt;
  }
  ExcCollection c = verify_line_collection(s, ds);
  c.fullness = Fullness::by_construction;
  return c;
}

/// (O_Y, O_Y(E), pi^*E_2, ..., pi^*E_n) on the blowup.
inline ExcCollection augment_blowup(const ExcCollection& c, const BlowupResult& up) {
  if (c.members.empty() || !is_trivial_line(c.surface, c.members.front())) {
    throw Error(ErrorCode::FirstMemberNotTrivial, "blowup augmentation needs E_1 = O_X");
  }
  if (up.pullback.old_to_new.size() != c.surface.num_rays()) {
    throw Error(ErrorCode::SurfaceMismatch, "blowup of a different surface");
  }
  const SmoothToricSurface& y = up.surface;
  ExcCollection out{y, {}, Fullness::unknown, std::size_t{0}, {}};
  out.members.push_back(Member::make_line(y.form(), zero_divisor(y.num_rays())));
  out.members.push_back(Member::make_line(y.form(), up.exceptional));
  for (std::size_t i = 1; i < c.size(); ++i) {
    const Member& m = c.members[i];
    if (m.is_line()) {
      out.members.push_back(Member::make_line(y.form(), up.pullback(*m.line)));
    } else {
      Member p = m;
      p.cls = {m.cls.rank, up.pullback(m.cls.c1), m.cls.chi};
      p.provenance.push_back("pullback");
      out.members.push_back(std::move(p));
    }
  }
  if (c.fullness == Fullness::by_construction) out.fullness = Fullness::by_construction;
  return out;
}

// ---------------------------------------------------------------------------
// Mutations

struct TraceStep {
  std::string rule;  // "transposition", "mutation-left", "mutation-right", "rotation"
  std::size_t index = 0;
  std::vector<KClass> classes;  // member classes after the step
};

struct MutationResult {
  ExcCollection collection;
  TraceStep step;
};

/// Honest RHom(E_i, E_j) when both members are line bundles.
inline std::optional<Cohomology> pair_rhom(const ExcCollection& c, std::size_t i, std::size_t j) {
  const Member& a = c.members[i];
  const Member& b = c.members[j];
  if (!a.is_line() || !b.is_line()) return std::nullopt;
  return cohomology(c.surface, *b.line - *a.line);
}

namespace detail {

/// Mutation classes are defined up to shift. Negative rank is flipped; rank 0
/// is flipped when the first nonzero of (-K.c1, Picard coordinates, chi) is
/// negative, so that a class and its negative normalize alike.
inline bool shifted_sign(const LatticeForm& form, const KClass& k) {
  if (k.rank != 0) return k.rank < 0;
  Int deg = -form.intersect(k.c1, form.canonical());
  if (deg != 0) return deg < 0;
  for (Int x : form.picard_coordinates(k.c1))
    if (x != 0) return x < 0;
  return k.chi < 0;
}

enum class Side { left, right };

inline MutationResult mutate(const ExcCollection& c, std::size_t i, Side side) {
  if (i + 1 >= c.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "no adjacent pair at index " + std::to_string(i));
  }
  const LatticeForm& form = c.form();
  const Member& a = c.members[i];
  const Member& b = c.members[i + 1];
  const Int chi = euler_pairing(form, a.cls, b.cls);
  auto rhom = pair_rhom(c, i, i + 1);
  ExcCollection out = c;
  out.evidence.clear();
  TraceStep step;
  step.index = i;

  const bool orthogonal = rhom ? rhom->all_vanish() : false;
  if (!rhom && chi == 0) {
    throw Error(ErrorCode::HypothesisUnknown,
                "RHom between members " + std::to_string(i) + " and " + std::to_string(i + 1) +
                    " is not certified");
  }
  if (orthogonal) {
    std::swap(out.members[i], out.members[i + 1]);
    step.rule = "transposition";
  } else {
    // Left: (A, B) -> (L_A B, A) with [L_A B] = chi(A,B)[A] - [B].
    // Right: (A, B) -> (B, R_B A) with [R_B A] = chi(A,B)[B] - [A].
    const Member& kept = side == Side::left ? a : b;
    const Member& moved = side == Side::left ? b : a;
    KClass cls = chi * kept.cls - moved.cls;
    std::string how = side == Side::left ? "left mutation" : "right mutation";
    std::vector<std::string> prov = moved.provenance;
    prov.push_back(how + " across member " + std::to_string(side == Side::left ? i : i + 1));
    if (shifted_sign(form, cls)) {
      cls = -cls;
      prov.push_back("shift [1]");
    }
    MemberFlags flags;
    flags.exceptional = Flag::yes("mutation of an exceptional pair");
    flags.indecomposable = Flag::yes("exceptional object");
    const bool hypothesis = a.flags.vector_bundle.holds && b.flags.vector_bundle.holds &&
                            a.cls.rank > 0 && b.cls.rank > 0 &&
                            slope(form, a.cls) > slope(form, b.cls);
    if (hypothesis) {
      if (cls.rank <= 0) {
        throw Error(ErrorCode::InternalInconsistency, "mutation of bundles produced rank <= 0");
      }
      Rational mu = slope(form, cls);
      if (!(slope(form, b.cls) < mu && mu < slope(form, a.cls))) {
        throw Error(ErrorCode::InternalInconsistency,
                    "mutated member slope " + to_string(mu) + " outside (" +
                        to_string(slope(form, b.cls)) + ", " + to_string(slope(form, a.cls)) + ")");
      }
      flags.vector_bundle = Flag::yes("Prop-mut: slope-decreasing exceptional pair of bundles");
      flags.semistable = Flag::yes("stability of exceptional bundles");
    }
    Member fresh = Member::make_opaque(std::move(cls), std::move(prov), std::move(flags));
    if (side == Side::left) {
      out.members[i] = std::move(fresh);
      out.members[i + 1] = a;
    } else {
      out.members[i] = b;
      out.members[i + 1] = std::move(fresh);
    }
    step.rule = side == Side::left ? "mutation-left" : "mutation-right";
  }

  if (c.trivial_index) {
    std::size_t t = *c.trivial_index;
    if (orthogonal) {
      if (t == i) out.trivial_index = i + 1;
      else if (t == i + 1) out.trivial_index = i;
    } else if (side == Side::left) {
      if (t == i) out.trivial_index = i + 1;
      else if (t == i + 1) out.trivial_index = std::nullopt;
    } else {
      if (t == i + 1) out.trivial_index = i;
      else if (t == i) out.trivial_index = std::nullopt;
    }
  }
  step.classes = out.classes();
  return {std::move(out), std::move(step)};
}

}  // namespace detail

inline MutationResult mutate_left(const ExcCollection& c, std::size_t i) {
  return detail::mutate(c, i, detail::Side::left);
}

inline MutationResult mutate_right(const ExcCollection& c, std::size_t i) {
  return detail::mutate(c, i, detail::Side::right);
}

/// (E_1, ..., E_n) -> (E_n (x) omega, E_1, ..., E_{n-1}).
inline MutationResult rotate(const ExcCollection& c) {
  if (c.members.empty()) throw Error(ErrorCode::IndexOutOfRange, "empty collection");
  ExcCollection out = c;
  out.evidence.clear();
  Member last = c.members.back();
  if (last.is_line()) {
    last = Member::make_line(c.form(), *last.line + c.surface.canonical());
  } else {
    last.cls = canonical_twist(c.form(), last.cls, 1);
    last.provenance.push_back("helix rotation (twist by K)");
  }
  out.members.pop_back();
  out.members.insert(out.members.begin(), std::move(last));
  if (c.trivial_index) {
    if (*c.trivial_index + 1 == c.size()) {
      throw Error(ErrorCode::TrivialMemberWouldTwist, "rotation would twist the trivial member");
    }
    out.trivial_index = *c.trivial_index + 1;
  }
  TraceStep step{"rotation", c.size() - 1, out.classes()};
  return {std::move(out), std::move(step)};
}

/// Re-applies a recorded step.
inline ExcCollection apply_step(const ExcCollection& c, const TraceStep& s) {
  if (s.rule == "rotation") return rotate(c).collection;
  if (s.rule == "mutation-right") return mutate_right(c, s.index).collection;
  if (s.rule == "mutation-left" || s.rule == "transposition") {
    auto r = mutate_left(c, s.index);
    if (r.step.rule != s.rule) {
      throw Error(ErrorCode::InternalInconsistency, "trace step does not replay");
    }
    return std::move(r.collection);
  }
  throw Error(ErrorCode::InvalidInput, "unknown trace rule " + s.rule);
}

inline ExcCollection replay(ExcCollection c, const std::vector<TraceStep>& trace) {
  for (const auto& s : trace) {
    c = apply_step(c, s);
    if (c.classes() != s.classes) {
      throw Error(ErrorCode::InternalInconsistency, "replayed classes differ from trace");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Slope sorting

class StepLimitError : public Error {
 public:
  StepLimitError(const std::string& what, std::vector<TraceStep> trace)
      : Error(ErrorCode::StepLimitExceeded, what), trace_(std::move(trace)) {}
  const std::vector<TraceStep>& trace() const { return trace_; }

 private:
  std::vector<TraceStep> trace_;
};

struct SortResult {
  ExcCollection collection;
  std::vector<TraceStep> trace;
};

inline bool slopes_sorted(const ExcCollection& c) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (c.slope(i) > c.slope(i + 1)) return false;
  return true;
}

inline bool window_strict(const ExcCollection& c) {
  if (c.members.empty()) return true;
  return c.slope(c.size() - 1) - c.slope(0) < Rational(c.surface.degree());
}

/// Bubble passes by adjacent mutations until slopes ascend, then helix
/// rotations until max slope - min slope < K^2. The trivial member is never
/// replaced: a descending pair whose right member is trivial is resolved by a
/// right mutation, all others by left mutations.
inline SortResult sort_by_slope(const ExcCollection& input, std::size_t max_steps = 0) {
  const std::size_t n = input.size();
  if (max_steps == 0) max_steps = 64 * n * n;
  for (const auto& m : input.members) {
    if (m.cls.rank <= 0) throw Error(ErrorCode::ZeroRank, "member without a slope");
  }
  SortResult r{input, {}};
  auto record = [&](MutationResult&& m) {
    r.collection = std::move(m.collection);
    r.trace.push_back(std::move(m.step));
    if (r.trace.size() > max_steps) {
      throw StepLimitError("slope sorting exceeded " + std::to_string(max_steps) + " steps",
                           r.trace);
    }
  };
  while (true) {
    bool swapped = true;
    while (swapped) {
      swapped = false;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (r.collection.slope(i) <= r.collection.slope(i + 1)) continue;
        const bool right_is_trivial = r.collection.trivial_index == i + 1;
        record(right_is_trivial ? mutate_right(r.collection, i) : mutate_left(r.collection, i));
        swapped = true;
      }
    }
    if (window_strict(r.collection)) break;
    if (r.collection.trivial_index == n - 1) {
      // Move an equal-slope non-trivial member behind the trivial one.
      std::size_t t = n - 1;
      if (t == 0 || r.collection.slope(t - 1) != r.collection.slope(t)) {
        throw Error(ErrorCode::TrivialMemberWouldTwist,
                    "the trivial member has the unique maximal slope");
      }
      auto rhom = pair_rhom(r.collection, t - 1, t);
      if (!rhom || !rhom->all_vanish()) {
        throw Error(ErrorCode::TrivialMemberWouldTwist,
                    "the trivial member cannot be transposed away from the last position");
      }
      record(mutate_left(r.collection, t - 1));
    }
    record(rotate(r.collection));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Direct search over line bundle collections

/// Line bundle collections (O, L_2, ..., L_n) with n = #rays, exceptional,
/// slope-ascending, window-strict and unimodular, in lexicographic order.
/// Divisors range over reduced representatives whose free coefficients lie in
/// [-radius, radius].
inline std::vector<ExcCollection> search_sorted_line_collections(const SmoothToricSurface& s,
                                                                 Int radius,
                                                                 std::size_t limit = 1000) {
  if (classify(s).kind == SurfaceKind::rejected) {
    throw Error(ErrorCode::NotWeakDelPezzo, "search needs a weak del Pezzo surface");
  }
  const std::size_t n = s.num_rays();
  const Int ksq = s.degree();
  std::vector<DivisorClass> cand;
  std::vector<Int> mu;
  {
    IntVec free(n - 2, -radius);
    while (true) {
      DivisorClass d = zero_divisor(n);
      for (std::size_t k = 0; k + 2 < n; ++k) d.coeffs[k + 2] = free[k];
      Int m = -s.intersect(d, s.canonical());
      bool trivial = std::all_of(free.begin(), free.end(), [](Int x) { return x == 0; });
      if (!trivial && m >= 0 && m < ksq) {
        cand.push_back(d);
        mu.push_back(m);
      }
      std::size_t k = free.size();
      while (k > 0 && free[k - 1] == radius) free[--k] = -radius;
      if (k == 0) break;
      ++free[k - 1];
    }
  }
  const std::size_t m = cand.size();
  // backward_free[a][b]: RHom(L_b, L_a) = 0, i.e. a may precede b.
  std::vector<std::vector<char>> precede(m, std::vector<char>(m, 0));
  std::vector<char> after_trivial(m, 0);
  for (std::size_t a = 0; a < m; ++a) {
    after_trivial[a] = cohomology(s, -cand[a]).all_vanish();
    for (std::size_t b = 0; b < m; ++b) {
      if (a != b && mu[a] <= mu[b]) precede[a][b] = cohomology(s, cand[a] - cand[b]).all_vanish();
    }
  }
  std::vector<ExcCollection> out;
  std::vector<std::size_t> chosen;
  std::function<void()> dfs = [&]() {
    if (out.size() >= limit) return;
    if (chosen.size() + 1 == n) {
      std::vector<DivisorClass> ds{zero_divisor(n)};
      for (std::size_t x : chosen) ds.push_back(cand[x]);
      ExcCollection c = verify_line_collection(s, ds);
      if (c.fullness == Fullness::numerically_consistent) out.push_back(std::move(c));
      return;
    }
    for (std::size_t b = 0; b < m; ++b) {
      if (!after_trivial[b]) continue;
      bool ok = true;
      for (std::size_t a : chosen) {
        if (a == b || !precede[a][b]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen.push_back(b);
      dfs();
      chosen.pop_back();
      if (out.size() >= limit) return;
    }
  };
  dfs();
  return out;
}

// ---------------------------------------------------------------------------
// Blowup chains

struct BlowdownStep {
  SmoothToricSurface base;
  std::size_t corner;
};

/// Contracts (-1)-curves until reaching P^2, P^1 x P^1 or a Hirzebruch surface
/// with a (-2)-curve, returning the seed and the blowups that rebuild `s`.
inline std::pair<SmoothToricSurface, std::vector<std::size_t>> blowdown_to_seed(
    const SmoothToricSurface& s) {
  std::vector<std::size_t> corners;
  SmoothToricSurface cur = s;
  while (!seed_collection(cur)) {
    const std::size_t n = cur.num_rays();
    auto it = std::find(cur.selfint().begin(), cur.selfint().end(), Int{-1});
    if (it == cur.selfint().end() || n <= 3) {
      throw Error(ErrorCode::NotWeakDelPezzo, "no blowup chain from a known seed");
    }
    std::size_t i = static_cast<std::size_t>(it - cur.selfint().begin());
    Ray prev = cur.rays()[(i + n - 1) % n];
    std::vector<Ray> rest;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) rest.push_back(cur.rays()[k]);
    SmoothToricSurface down = SmoothToricSurface::from_rays(rest, cur.name() + "-down");
    corners.push_back(*down.index_of(prev));
    cur = std::move(down);
  }
  std::reverse(corners.begin(), corners.end());
  return {cur, corners};
}

/// Full exceptional line bundle collection built by augmenting a seed along a
/// blowup chain.
inline ExcCollection blowup_chain_collection(const SmoothToricSurface& s) {
  auto [seed, corners] = blowdown_to_seed(s);
  ExcCollection c = *seed_collection(seed);
  SmoothToricSurface cur = seed;
  for (std::size_t corner : corners) {
    BlowupResult up = blowup(cur, corner);
    c = augment_blowup(c, up);
    cur = up.surface;
  }
  if (!(cur == s)) throw Error(ErrorCode::InternalInconsistency, "blowup chain misses the fan");
  ExcCollection out = c;
  out.surface = s;
  out.evidence.clear();
  return out;
}

}  // namespace wdp

#endif  // WDP_COLLECTIONS_HPP
