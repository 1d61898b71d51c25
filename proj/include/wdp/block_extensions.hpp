#ifndef WDP_BLOCK_EXTENSIONS_HPP
#define WDP_BLOCK_EXTENSIONS_HPP

#include "wdp/collections.hpp"
#include "wdp/facts.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace wdp {

/// Engine view of a collection: member classes, flags and line divisors.
/// Members flagged exceptional are listed in exceptional-sequence order.
inline EngineInput engine_input(const SmoothToricSurface& s, const std::vector<Member>& members) {
  EngineInput in;
  in.surface = &s;
  in.form = &s.form();
  in.exceptional_sequence = true;
  in.weak_del_pezzo = classify(s).kind != SurfaceKind::rejected;
  for (const auto& m : members) {
    in.objects.push_back({m.cls, m.line, m.flags.exceptional.holds,
                          m.flags.semistable.holds && m.cls.rank > 0,
                          m.flags.indecomposable.holds && m.flags.vector_bundle.holds});
  }
  return in;
}

inline FactSet derive_facts(const ExcCollection& c, const EngineOptions& opt = {}) {
  return derive_facts(engine_input(c.surface, c.members), opt);
}

// ---------------------------------------------------------------------------

/// Maximal run of equal slopes, members [first, last).
struct Block {
  Rational slope;
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first; }
  friend bool operator==(const Block&, const Block&) = default;
};

inline std::vector<Block> partition_blocks(const ExcCollection& c) {
  std::vector<Block> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    Rational mu = c.slope(i);
    if (!out.empty() && mu < out.back().slope) {
      throw Error(ErrorCode::NotSorted, "slope decreases at member " + std::to_string(i));
    }
    if (out.empty() || mu != out.back().slope) out.push_back({mu, i, i});
    out.back().last = i + 1;
  }
  return out;
}

struct HomExt1 {
  Int hom = 0;
  Int ext1 = 0;
  friend bool operator==(const HomExt1&, const HomExt1&) = default;
};

/// (hom, ext1) for every forward pair i < i' inside a block.
inline std::map<std::pair<std::size_t, std::size_t>, HomExt1> intra_block_ext(
    const ExcCollection& c, const Block& b, const FactSet& facts) {
  std::map<std::pair<std::size_t, std::size_t>, HomExt1> out;
  std::string gaps;
  for (std::size_t i = b.first; i < b.last; ++i) {
    for (std::size_t k = i + 1; k < b.last; ++k) {
      auto hom = facts.dim({i, k, 0, 0});
      auto ext1 = facts.dim({i, k, 0, 1});
      if (!hom || !ext1) {
        gaps += " (" + std::to_string(i) + "," + std::to_string(k) + ")";
        continue;
      }
      out[{i, k}] = {*hom, *ext1};
    }
  }
  if (!gaps.empty()) throw Error(ErrorCode::UnknownDimensions, "pairs" + gaps);
  return out;
}

inline std::map<std::pair<std::size_t, std::size_t>, HomExt1> intra_block_ext(
    const ExcCollection& c, const Block& b) {
  return intra_block_ext(c, b, derive_facts(c));
}

// ---------------------------------------------------------------------------

struct Constituent {
  std::size_t member = 0;  // position in the collection
  Int multiplicity = 1;
  KClass cls;              // class of that member when it was used
};

struct ExtendedMember {
  Member base;  // carries the current class and flags
  std::vector<Constituent> filtration;
  /// The result may split as (indecomposable)^m + F^n; m and n are not computed.
  bool may_split = false;

  const KClass& cls() const { return base.cls; }
  bool extended() const { return filtration.size() > 1; }
};

inline ExtendedMember unextended(const Member& m, std::size_t index) {
  return {m, {{index, 1, m.cls}}, false};
}

/// Certified data the caller must supply about a pair (E, F).
struct ExtensionHypotheses {
  std::optional<Int> ext1;  // dim Ext^1(E, F) for extensions, Ext^1(E, F) for coextensions
  bool univan_certified = false;
};

namespace detail {

inline void check_extension(const LatticeForm& form, const KClass& a, const KClass& b, Int d,
                            const ExtensionHypotheses& h) {
  if (d < 0) throw Error(ErrorCode::InvalidInput, "negative multiplicity");
  if (d == 0) return;
  if (!h.univan_certified) {
    throw Error(ErrorCode::HypothesisNotCertified, "vanishing hypotheses for the pair not certified");
  }
  if (!h.ext1 || *h.ext1 != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "d = " + std::to_string(d) + " differs from certified dim Ext^1");
  }
  if (a.rank > 0 && b.rank > 0 && slope(form, a) != slope(form, b)) {
    throw Error(ErrorCode::InvalidInput, "universal extensions are taken inside one slope block");
  }
}

inline MemberFlags extended_flags(const MemberFlags& base) {
  MemberFlags f;
  f.vector_bundle = base.vector_bundle;
  f.semistable = Flag::yes("R-UNIVAN: extension of equal-slope semistable bundles");
  f.indecomposable = Flag::yes("R-UNIVAN: sum of indecomposables of the block slope");
  return f;
}

}  // namespace detail

/// E[-1] -> F^d -> E' -> E: [E'] = [E] + d [F].
inline ExtendedMember universal_extension(const LatticeForm& form, const ExtendedMember& e,
                                          std::size_t f_index, const ExtendedMember& f, Int d,
                                          const ExtensionHypotheses& h) {
  detail::check_extension(form, e.cls(), f.cls(), d, h);
  if (d == 0) return e;
  ExtendedMember out = e;
  out.base.line.reset();
  out.base.cls = e.cls() + d * f.cls();
  out.base.provenance.push_back("universal extension by member " + std::to_string(f_index) +
                                " with multiplicity " + std::to_string(d));
  out.base.flags = detail::extended_flags(e.base.flags);
  if (!f.base.flags.vector_bundle.holds) out.base.flags.vector_bundle = {};
  out.filtration.push_back({f_index, d, f.cls()});
  out.may_split = true;
  return out;
}

/// F -> F' -> E^d -> F[1]: [F'] = [F] + d [E].
inline ExtendedMember universal_coextension(const LatticeForm& form, std::size_t e_index,
                                            const ExtendedMember& e, const ExtendedMember& f, Int d,
                                            const ExtensionHypotheses& h) {
  detail::check_extension(form, e.cls(), f.cls(), d, h);
  if (d == 0) return f;
  ExtendedMember out = f;
  out.base.line.reset();
  out.base.cls = f.cls() + d * e.cls();
  out.base.provenance.push_back("universal coextension by member " + std::to_string(e_index) +
                                " with multiplicity " + std::to_string(d));
  out.base.flags = detail::extended_flags(f.base.flags);
  if (!e.base.flags.vector_bundle.holds) out.base.flags.vector_bundle = {};
  out.filtration.push_back({e_index, d, e.cls()});
  out.may_split = true;
  return out;
}

// ---------------------------------------------------------------------------

struct ExtensionLogEntry {
  std::size_t block = 0;
  std::size_t source = 0;
  std::size_t target = 0;
  Int d = 0;
  KClass new_class;
  std::string rule = "universal-extension";
};

/// Known dimensions of Ext^p(i, j), untwisted, with the rule that produced them.
struct KnownExt {
  Int dim = 0;
  std::string rule;
};
using KnownTable = std::map<std::tuple<std::size_t, std::size_t, int>, KnownExt>;

struct ExtendedCollection {
  ExcCollection sorted;  // input to block processing
  std::vector<ExtendedMember> members;
  std::vector<Block> blocks;
  std::vector<ExtensionLogEntry> log;
  KnownTable known;

  std::size_t size() const { return members.size(); }
  const SmoothToricSurface& surface() const { return sorted.surface; }
  const LatticeForm& form() const { return sorted.form(); }
  Fullness fullness() const { return sorted.fullness; }
  std::optional<std::size_t> trivial_index() const {
    auto t = sorted.trivial_index;
    if (t && members[*t].extended()) return std::nullopt;
    return t;
  }
  Rational slope(std::size_t i) const { return wdp::slope(form(), members.at(i).cls()); }
  std::vector<Member> as_members() const {
    std::vector<Member> out;
    for (const auto& m : members) out.push_back(m.base);
    return out;
  }

  /// R-UNIVAN facts about pairs involving an extended member.
  std::vector<Fact> univan_facts() const {
    std::vector<Fact> out;
    for (const auto& [key, v] : known) {
      auto [i, j, p] = key;
      if (!members[i].extended() && !members[j].extended()) continue;
      out.push_back({{i, j, 0, p}, v.dim, Rule::univan, {}, v.rule});
    }
    return out;
  }
};

struct BlockOptions {
  std::size_t max_rounds = 4;
};

namespace detail {

inline std::optional<Int> lookup(const KnownTable& t, std::size_t i, std::size_t j, int p) {
  auto it = t.find({i, j, p});
  if (it == t.end()) return std::nullopt;
  return it->second.dim;
}

inline bool zero(const KnownTable& t, std::size_t i, std::size_t j, int p) {
  auto v = lookup(t, i, j, p);
  return v && *v == 0;
}

inline bool rhom_zero(const KnownTable& t, std::size_t i, std::size_t j) {
  return zero(t, i, j, 0) && zero(t, i, j, 1) && zero(t, i, j, 2);
}

// Replaces member e by its universal extension by member f and propagates the
// known Ext groups along the triangle F^d -> E' -> E.
inline void propagate_extension(KnownTable& t, std::size_t n, std::size_t e, std::size_t f,
                                const std::string& note) {
  KnownTable old = t;
  for (std::size_t x = 0; x < n; ++x) {
    for (int p = 0; p < 3; ++p) {
      t.erase({e, x, p});
      t.erase({x, e, p});
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (x == e || x == f) continue;
    for (int p = 0; p < 3; ++p) {
      // Ext^p(E', X) sits between Ext^p(F^d, X) and Ext^p(E, X).
      if (zero(old, e, x, p) && zero(old, f, x, p)) {
        t[{e, x, p}] = {0, note + ": filtration"};
      } else if (rhom_zero(old, f, x)) {
        if (auto v = lookup(old, e, x, p)) t[{e, x, p}] = {*v, note + ": RHom(F, X) = 0"};
      }
      if (zero(old, x, e, p) && zero(old, x, f, p)) {
        t[{x, e, p}] = {0, note + ": filtration"};
      } else if (rhom_zero(old, x, f)) {
        if (auto v = lookup(old, x, e, p)) t[{x, e, p}] = {*v, note + ": RHom(X, F) = 0"};
      }
    }
  }
  for (int p = 1; p < 3; ++p) {
    t[{e, e, p}] = {0, note + ": Ext>0(E', E') = 0"};
    t[{f, e, p}] = {0, note + ": Ext>0(F, E') = 0"};
    t[{e, f, p}] = {0, note + ": Ext>0(E', F) = 0"};
  }
}

inline void run_blocks(ExtendedCollection& x, const BlockOptions& opt) {
  const std::size_t n = x.size();
  const LatticeForm& form = x.form();
  for (std::size_t round = 0;; ++round) {
    std::size_t steps = 0;
    for (std::size_t bi = 0; bi < x.blocks.size(); ++bi) {
      const Block& b = x.blocks[bi];
      std::string gaps;
      for (std::size_t target = b.last; target-- > b.first + 1;) {
        for (std::size_t source = b.first; source < target; ++source) {
          auto ext1 = lookup(x.known, source, target, 1);
          if (!ext1) {
            gaps += " (" + std::to_string(source) + "," + std::to_string(target) + ")";
            continue;
          }
          if (*ext1 == 0) continue;
          ExtensionHypotheses h;
          h.ext1 = ext1;
          h.univan_certified = zero(x.known, source, source, 1) && zero(x.known, source, source, 2) &&
                               zero(x.known, target, target, 1) && zero(x.known, target, target, 2) &&
                               zero(x.known, target, source, 1) && zero(x.known, target, source, 2) &&
                               zero(x.known, source, target, 2);
          if (!h.univan_certified) {
            throw Error(ErrorCode::HypothesisNotCertified,
                        "vanishing hypotheses for pair (" + std::to_string(source) + "," +
                            std::to_string(target) + ") not certified");
          }
          x.members[source] =
              universal_extension(form, x.members[source], target, x.members[target], *ext1, h);
          const std::string note = "extension step " + std::to_string(x.log.size());
          propagate_extension(x.known, n, source, target, note);
          x.log.push_back({bi, source, target, *ext1, x.members[source].cls(), "universal-extension"});
          ++steps;
        }
      }
      if (!gaps.empty()) {
        throw Error(ErrorCode::UnknownDimensions, "block " + std::to_string(bi) + " pairs" + gaps);
      }
    }
    if (steps == 0) return;
    if (round + 1 >= opt.max_rounds) {
      throw Error(ErrorCode::NonConvergent, "block processing did not settle");
    }
  }
}

}  // namespace detail

/// Kills every intra-block forward Ext^1 by iterated universal extensions,
/// processing targets right to left and sources left to right.
inline ExtendedCollection process_blocks(const ExcCollection& sorted, const BlockOptions& opt = {}) {
  ExtendedCollection x{sorted, {}, partition_blocks(sorted), {}, {}};
  for (std::size_t i = 0; i < sorted.size(); ++i) x.members.push_back(unextended(sorted.members[i], i));
  FactSet fs = derive_facts(sorted);
  for (const Fact& f : fs.facts()) {
    if (f.key.twist != 0) continue;
    x.known[{f.key.source, f.key.target, f.key.degree}] = {f.dim, std::string(to_string(f.rule))};
  }
  detail::run_blocks(x, opt);
  return x;
}

/// Re-runs the block loop on processed output; performs no steps when the
/// input is already settled.
inline ExtendedCollection process_blocks(const ExtendedCollection& done, const BlockOptions& opt = {}) {
  ExtendedCollection x = done;
  const std::size_t before = x.log.size();
  detail::run_blocks(x, opt);
  if (x.log.size() != before) {
    throw Error(ErrorCode::InternalInconsistency, "processed collection was not settled");
  }
  return x;
}

}  // namespace wdp

#endif  // WDP_BLOCK_EXTENSIONS_HPP
