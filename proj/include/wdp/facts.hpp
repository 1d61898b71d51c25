#ifndef WDP_FACTS_HPP
#define WDP_FACTS_HPP

#include "wdp/ktheory.hpp"
#include "wdp/toric.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wdp {

/// Rules of the vanishing engine, in canonical application order.
enum class Rule { cohom, exc, serre, stab, ext1sym, chi, univan };

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::cohom: return "R-COHOM";
    case Rule::exc: return "R-EXC";
    case Rule::serre: return "R-SERRE";
    case Rule::stab: return "R-STAB";
    case Rule::ext1sym: return "R-EXT1SYM";
    case Rule::chi: return "R-CHI";
    case Rule::univan: return "R-UNIVAN";
  }
  return "?";
}

inline std::optional<Rule> rule_from_string(std::string_view s) {
  for (Rule r : {Rule::cohom, Rule::exc, Rule::serre, Rule::stab, Rule::ext1sym, Rule::chi,
                 Rule::univan}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

/// Ext^degree(object[source], object[target] (x) omega^twist).
struct FactKey {
  std::size_t source = 0;
  std::size_t target = 0;
  int twist = 0;
  int degree = 0;

  friend bool operator==(const FactKey&, const FactKey&) = default;
  friend auto operator<=>(const FactKey&, const FactKey&) = default;
};

inline std::string to_string(const FactKey& k) {
  std::string s = "Ext^" + std::to_string(k.degree) + "(" + std::to_string(k.source) + ", " +
                  std::to_string(k.target);
  if (k.twist != 0) s += " (x) w^" + std::to_string(k.twist);
  return s + ")";
}

struct Fact {
  FactKey key;
  Int dim = 0;  // 0 means the group vanishes
  Rule rule = Rule::cohom;
  std::vector<std::size_t> inputs;  // indices into the owning FactSet
  std::string note;

  bool vanishes() const { return dim == 0; }
};

/// Append-only set of facts; every fact cites earlier facts only, so the
/// justification graph is acyclic by construction.
class FactSet {
 public:
  const std::vector<Fact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }

  const Fact* find(const FactKey& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &facts_[it->second];
  }

  std::optional<std::size_t> index_of(const FactKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool vanishes(const FactKey& key) const {
    const Fact* f = find(key);
    return f != nullptr && f->vanishes();
  }

  std::optional<Int> dim(const FactKey& key) const {
    const Fact* f = find(key);
    if (f == nullptr) return std::nullopt;
    return f->dim;
  }

  /// Returns true when the fact is new. A second derivation of a known fact is
  /// checked for agreement and otherwise ignored.
  bool add(Fact fact) {
    if (fact.dim < 0) {
      throw Error(ErrorCode::InternalInconsistency,
                  "negative dimension derived for " + to_string(fact.key));
    }
    if (const Fact* old = find(fact.key)) {
      if (old->dim != fact.dim) {
        throw Error(ErrorCode::InternalInconsistency,
                    std::string(to_string(fact.rule)) + " derives dim " + std::to_string(fact.dim) +
                        " for " + to_string(fact.key) + " but " + std::string(to_string(old->rule)) +
                        " gave " + std::to_string(old->dim));
      }
      return false;
    }
    for (std::size_t in : fact.inputs) {
      if (in >= facts_.size()) throw Error(ErrorCode::InternalInconsistency, "dangling fact input");
    }
    index_.emplace(fact.key, facts_.size());
    facts_.push_back(std::move(fact));
    return true;
  }

 private:
  std::vector<Fact> facts_;
  std::map<FactKey, std::size_t> index_;
};

/// What the engine knows about one object of a collection.
struct ObjectInfo {
  KClass cls;
  std::optional<DivisorClass> line;  // set for honest line bundles
  bool exceptional = false;
  bool semistable = false;
  bool indecomposable = false;
};

struct EngineOptions {
  bool use_cohomology = true;
  int min_twist = -1;
  int max_twist = 2;
};

struct EngineInput {
  const SmoothToricSurface* surface = nullptr;  // required for R-COHOM
  const LatticeForm* form = nullptr;
  std::vector<ObjectInfo> objects;
  /// Objects form an exceptional sequence in the given order.
  bool exceptional_sequence = false;
  /// The surface is weak del Pezzo, so the slope lemmas apply.
  bool weak_del_pezzo = false;
  std::vector<Fact> seeds;  // R-UNIVAN facts from block processing
};

/// Honest cohomology of Ext^*(O(a), O(b) (x) omega^t) on a toric surface.
inline Cohomology line_ext(const SmoothToricSurface& s, const DivisorClass& a,
                           const DivisorClass& b, int twist) {
  return cohomology(s, b + Int{twist} * s.canonical() - a);
}

/// Monotone forward chaining to a fixed point.
inline FactSet derive_facts(const EngineInput& in, const EngineOptions& opt = {}) {
  if (in.form == nullptr) throw Error(ErrorCode::InvalidInput, "engine needs a lattice form");
  const LatticeForm& form = *in.form;
  const std::size_t n = in.objects.size();
  const Int ksq = form.ksq();
  FactSet fs;

  std::vector<std::optional<Rational>> mu(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (in.objects[i].cls.rank > 0) mu[i] = slope(form, in.objects[i].cls);
  }
  auto twist_ok = [&](int t) { return t >= opt.min_twist && t <= opt.max_twist; };
  auto for_each_pair = [&](auto&& fn) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (int t = opt.min_twist; t <= opt.max_twist; ++t) fn(i, j, t);
  };

  bool changed = true;
  while (changed) {
    changed = false;

    // Seeds first, so block-processing facts keep their own justification.
    for (const Fact& seed : in.seeds) {
      if (seed.key.source >= n || seed.key.target >= n) {
        throw Error(ErrorCode::InvalidInput, "seed fact refers to a missing object");
      }
      Fact f = seed;
      f.rule = Rule::univan;
      f.inputs.clear();
      changed |= fs.add(std::move(f));
    }

    if (opt.use_cohomology && in.surface != nullptr) {
      for_each_pair([&](std::size_t i, std::size_t j, int t) {
        const auto& a = in.objects[i].line;
        const auto& b = in.objects[j].line;
        if (!a || !b) return;
        if (fs.find({i, j, t, 0}) && fs.find({i, j, t, 1}) && fs.find({i, j, t, 2})) return;
        Cohomology c = line_ext(*in.surface, *a, *b, t);
        for (int p = 0; p < 3; ++p) changed |= fs.add({{i, j, t, p}, c[p], Rule::cohom, {}, {}});
      });
    }

    if (in.exceptional_sequence) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          if (!in.objects[i].exceptional || !in.objects[j].exceptional) continue;
          for (int p = 0; p < 3; ++p) {
            Int d = (i == j && p == 0) ? 1 : 0;
            changed |= fs.add({{i, j, 0, p}, d, Rule::exc, {}, {}});
          }
        }
      }
    }

    // Ext^p(A, B w^t) = D Ext^{2-p}(B, A w^{1-t}).
    for_each_pair([&](std::size_t i, std::size_t j, int t) {
      if (!twist_ok(1 - t)) return;
      for (int p = 0; p < 3; ++p) {
        FactKey dual{j, i, 1 - t, 2 - p};
        if (auto idx = fs.index_of(dual); idx && !fs.find({i, j, t, p})) {
          changed |= fs.add({{i, j, t, p}, fs.facts()[*idx].dim, Rule::serre, {*idx}, {}});
        }
      }
    });

    if (in.weak_del_pezzo) {
      // Hom between semistable objects of strictly decreasing slope vanishes.
      for_each_pair([&](std::size_t i, std::size_t j, int t) {
        const auto& a = in.objects[i];
        const auto& b = in.objects[j];
        if (!a.semistable || !b.semistable || !mu[i] || !mu[j]) return;
        if (*mu[i] > *mu[j] - Rational(Int{t} * ksq) && !fs.find({i, j, t, 0})) {
          changed |= fs.add({{i, j, t, 0}, 0, Rule::stab, {}, {}});
        }
      });

      // Ext^1(E1, E2) = 0 if Ext^1(E2, E1) = 0 and mu(E2) > mu(E1), both indecomposable.
      for_each_pair([&](std::size_t i, std::size_t j, int t) {
        const auto& a = in.objects[i];
        const auto& b = in.objects[j];
        if (!a.indecomposable || !b.indecomposable || !mu[i] || !mu[j]) return;
        if (!twist_ok(-t) || fs.find({i, j, t, 1})) return;
        if (!(*mu[j] - Rational(Int{t} * ksq) > *mu[i])) return;
        if (auto idx = fs.index_of({j, i, -t, 1}); idx && fs.facts()[*idx].vanishes()) {
          changed |= fs.add({{i, j, t, 1}, 0, Rule::ext1sym, {*idx}, {}});
        }
      });
    }

    for_each_pair([&](std::size_t i, std::size_t j, int t) {
      std::array<std::optional<std::size_t>, 3> idx{fs.index_of({i, j, t, 0}),
                                                    fs.index_of({i, j, t, 1}),
                                                    fs.index_of({i, j, t, 2})};
      int known = 0;
      for (auto& x : idx) known += x.has_value();
      if (known < 2) return;
      const Int chi = euler_pairing(form, in.objects[i].cls,
                                    canonical_twist(form, in.objects[j].cls, t));
      if (known == 3) {
        Int alt = fs.facts()[*idx[0]].dim - fs.facts()[*idx[1]].dim + fs.facts()[*idx[2]].dim;
        if (alt != chi) {
          throw Error(ErrorCode::InternalInconsistency,
                      "Ext dimensions of " + to_string(FactKey{i, j, t, 0}) +
                          " contradict the Euler pairing");
        }
        return;
      }
      int missing = !idx[0] ? 0 : (!idx[1] ? 1 : 2);
      int a = (missing + 1) % 3, b = (missing + 2) % 3;
      if (!fs.facts()[*idx[a]].vanishes() || !fs.facts()[*idx[b]].vanishes()) return;
      Int d = missing == 1 ? -chi : chi;
      changed |= fs.add({{i, j, t, missing}, d, Rule::chi, {*idx[a], *idx[b]}, {}});
    });

  }
  return fs;
}

}  // namespace wdp

#endif  // WDP_FACTS_HPP
