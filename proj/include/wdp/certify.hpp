#ifndef WDP_CERTIFY_HPP
#define WDP_CERTIFY_HPP

#include "wdp/block_extensions.hpp"

#include <string>
#include <vector>

namespace wdp {

enum class Verdict { tilting, two_tilting, incomplete };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::tilting: return "tilting";
    case Verdict::two_tilting: return "two-tilting";
    case Verdict::incomplete: return "incomplete";
  }
  return "?";
}

struct Window {
  Rational min;
  Rational max;
  Int ksq = 0;

  Rational width() const { return max - min; }
  bool strict() const { return width() < Rational(ksq); }
};

struct Certificate {
  SmoothToricSurface surface;
  std::vector<KClass> classes;
  EngineInput input;  // surface/form pointers refer to `surface`
  FactSet facts;
  Verdict verdict = Verdict::incomplete;
  Window window;
  Fullness fullness = Fullness::unknown;
  std::optional<std::size_t> trivial_index;
  std::vector<FactKey> blocking;
  std::vector<std::string> notes;

  explicit Certificate(SmoothToricSurface s) : surface(std::move(s)) {}
  // Copies re-point the engine input at their own surface; there is no move.
  Certificate(const Certificate& o) : surface(o.surface) { *this = o; }
  Certificate& operator=(const Certificate& o) {
    if (this == &o) return *this;
    surface = o.surface;
    classes = o.classes;
    input = o.input;
    facts = o.facts;
    verdict = o.verdict;
    window = o.window;
    fullness = o.fullness;
    trivial_index = o.trivial_index;
    blocking = o.blocking;
    notes = o.notes;
    rebind();
    return *this;
  }

  std::size_t size() const { return classes.size(); }

 private:
  void rebind() {
    input.surface = &surface;
    input.form = &surface.form();
  }
};

namespace detail {

inline Window window_of(const SmoothToricSurface& s, const std::vector<KClass>& classes) {
  Window w{Rational(0), Rational(0), s.degree()};
  for (std::size_t i = 0; i < classes.size(); ++i) {
    Rational mu = slope(s.form(), classes[i]);
    if (i == 0 || mu < w.min) w.min = mu;
    if (i == 0 || mu > w.max) w.max = mu;
  }
  return w;
}

inline Certificate make_certificate(const SmoothToricSurface& s, const std::vector<Member>& members,
                                    std::vector<Fact> seeds, Fullness fullness,
                                    std::optional<std::size_t> trivial, const EngineOptions& opt) {
  Certificate c(s);
  c.input = engine_input(s, members);
  c.input.surface = &c.surface;
  c.input.form = &c.surface.form();
  c.input.seeds = std::move(seeds);
  for (const auto& m : members) c.classes.push_back(m.cls);
  c.facts = derive_facts(c.input, opt);
  c.fullness = fullness;
  c.trivial_index = trivial;
  c.window = window_of(s, c.classes);
  return c;
}

inline void judge_tilting(Certificate& c) {
  c.blocking.clear();
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      for (int p = 1; p < 3; ++p) {
        FactKey k{i, j, 0, p};
        if (!c.facts.vanishes(k)) c.blocking.push_back(k);
      }
    }
  }
  if (c.fullness == Fullness::unknown) c.notes.push_back("generation is not established");
  c.verdict = c.blocking.empty() && c.fullness != Fullness::unknown ? Verdict::tilting
                                                                    : Verdict::incomplete;
}

}  // namespace detail

/// Certifies Ext^{>0}(E, E) = 0 for the direct sum of the members.
inline Certificate certify_tilting(const ExcCollection& col, const EngineOptions& opt = {}) {
  Certificate c = detail::make_certificate(col.surface, col.members, {}, col.fullness,
                                           col.trivial_index, opt);
  detail::judge_tilting(c);
  return c;
}

inline Certificate certify_tilting(const ExtendedCollection& x, const EngineOptions& opt = {}) {
  Certificate c = detail::make_certificate(x.surface(), x.as_members(), x.univan_facts(),
                                           x.fullness(), x.trivial_index(), opt);
  detail::judge_tilting(c);
  return c;
}

/// Promotes a tilting certificate when max slope - min slope < K^2. The
/// twisted vanishing Ext^{>0}(E, E (x) w^-1) = 0 must also follow from the
/// rules; otherwise the certificate stays tilting with the gaps listed.
inline Certificate certify_two_tilting(const Certificate& tilting) {
  Certificate c = tilting;
  if (c.verdict != Verdict::tilting) return c;
  if (!c.window.strict()) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      Rational mu = slope(c.surface.form(), c.classes[i]);
      if (mu == c.window.min) lo = i;
      if (mu == c.window.max && hi == 0) hi = i;
    }
    throw Error(ErrorCode::WindowViolated,
                "mu(E_" + std::to_string(hi) + ") - mu(E_" + std::to_string(lo) + ") = " +
                    to_string(c.window.width()) + " is not below K^2 = " +
                    std::to_string(c.window.ksq) +
                    (c.window.width() == Rational(c.window.ksq)
                         ? " (equality is necessary for 2-tilting but not sufficient)"
                         : ""));
  }
  c.blocking.clear();
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      for (int p = 1; p < 3; ++p)
        if (!c.facts.vanishes({i, j, -1, p})) c.blocking.push_back({i, j, -1, p});
  if (c.blocking.empty()) c.verdict = Verdict::two_tilting;
  return c;
}

// ---------------------------------------------------------------------------

struct TwistReport {
  bool pass = true;
  std::vector<std::pair<std::size_t, std::size_t>> failures;  // (i, j) with h^{>0}(L_j - L_i - K) != 0
};

/// Honest Ext^{>0}(E, E (x) w^-1) for a collection of line bundles.
inline TwistReport check_twist_vanishing(const SmoothToricSurface& s,
                                         const std::vector<Member>& members,
                                         const Certificate* certificate = nullptr) {
  TwistReport r;
  for (const auto& m : members) {
    if (!m.is_line()) throw Error(ErrorCode::InvalidInput, "twist check needs line bundles");
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      Cohomology h = cohomology(s, *members[j].line - *members[i].line - s.canonical());
      if (!h.higher_vanish()) r.failures.push_back({i, j});
    }
  }
  r.pass = r.failures.empty();
  if (!r.pass && certificate != nullptr && certificate->verdict == Verdict::two_tilting) {
    throw Error(ErrorCode::InternalInconsistency,
                "two-tilting certificate contradicted by cohomology of pair (" +
                    std::to_string(r.failures[0].first) + "," + std::to_string(r.failures[0].second) +
                    ")");
  }
  return r;
}

inline TwistReport check_twist_vanishing(const ExcCollection& c, const Certificate* cert = nullptr) {
  return check_twist_vanishing(c.surface, c.members, cert);
}

// ---------------------------------------------------------------------------

struct AuditReport {
  std::size_t compared = 0;
  std::vector<FactKey> mismatches;
};

/// Derives facts without toric cohomology and compares each against the
/// honest value for line-bundle members.
inline AuditReport soundness_audit(const ExcCollection& c, const EngineOptions& base = {}) {
  EngineOptions opt = base;
  opt.use_cohomology = false;
  FactSet fs = derive_facts(c, opt);
  AuditReport r;
  for (const Fact& f : fs.facts()) {
    const auto& a = c.members[f.key.source];
    const auto& b = c.members[f.key.target];
    if (!a.is_line() || !b.is_line()) continue;
    Cohomology h = line_ext(c.surface, *a.line, *b.line, f.key.twist);
    ++r.compared;
    if (h[f.key.degree] != f.dim) r.mismatches.push_back(f.key);
  }
  return r;
}

/// Re-checks every fact of a certificate against its cited rule and inputs.
/// Returns a description of each fact that fails.
inline std::vector<std::string> check_fact_chain(const Certificate& c) {
  std::vector<std::string> bad;
  const auto& facts = c.facts.facts();
  const LatticeForm& form = c.surface.form();
  const Int ksq = form.ksq();
  auto mu = [&](std::size_t i) { return slope(form, c.classes[i]); };
  auto fail = [&](std::size_t k, const std::string& why) {
    bad.push_back(to_string(facts[k].key) + " [" + std::string(to_string(facts[k].rule)) + "]: " + why);
  };
  for (std::size_t k = 0; k < facts.size(); ++k) {
    const Fact& f = facts[k];
    const auto& [i, j, t, p] = f.key;
    for (std::size_t in : f.inputs) {
      if (in >= k) fail(k, "cites a later fact");
    }
    const auto& oi = c.input.objects[i];
    const auto& oj = c.input.objects[j];
    switch (f.rule) {
      case Rule::cohom:
        if (!oi.line || !oj.line) {
          fail(k, "not a line pair");
        } else if (line_ext(c.surface, *oi.line, *oj.line, t)[p] != f.dim) {
          fail(k, "cohomology disagrees");
        }
        break;
      case Rule::exc:
        if (!c.input.exceptional_sequence || !oi.exceptional || !oj.exceptional || i < j || t != 0 ||
            f.dim != ((i == j && p == 0) ? 1 : 0)) {
          fail(k, "not a backward pair of an exceptional sequence");
        }
        break;
      case Rule::serre:
        if (f.inputs.size() != 1 || facts[f.inputs[0]].key != FactKey{j, i, 1 - t, 2 - p} ||
            facts[f.inputs[0]].dim != f.dim) {
          fail(k, "dual fact missing");
        }
        break;
      case Rule::stab:
        if (!c.input.weak_del_pezzo || p != 0 || f.dim != 0 || !oi.semistable || !oj.semistable ||
            !(mu(i) > mu(j) - Rational(Int{t} * ksq))) {
          fail(k, "slope hypothesis fails");
        }
        break;
      case Rule::ext1sym:
        if (!c.input.weak_del_pezzo || p != 1 || f.dim != 0 || !oi.indecomposable ||
            !oj.indecomposable || !(mu(j) - Rational(Int{t} * ksq) > mu(i)) ||
            f.inputs.size() != 1 || facts[f.inputs[0]].key != FactKey{j, i, -t, 1} ||
            !facts[f.inputs[0]].vanishes()) {
          fail(k, "symmetric Ext^1 hypothesis fails");
        }
        break;
      case Rule::chi: {
        if (f.inputs.size() != 2) {
          fail(k, "needs two inputs");
          break;
        }
        for (std::size_t in : f.inputs) {
          const FactKey& ik = facts[in].key;
          if (ik.source != i || ik.target != j || ik.twist != t || ik.degree == p ||
              !facts[in].vanishes()) {
            fail(k, "inputs are not the other two vanishing degrees");
          }
        }
        Int chi = euler_pairing(form, c.classes[i], canonical_twist(form, c.classes[j], t));
        if (f.dim != (p == 1 ? -chi : chi)) fail(k, "Euler characteristic disagrees");
        break;
      }
      case Rule::univan: {
        bool seeded = false;
        for (const Fact& s : c.input.seeds) seeded |= s.key == f.key && s.dim == f.dim;
        if (!seeded) fail(k, "not among the block-processing facts");
        break;
      }
    }
  }
  return bad;
}

}  // namespace wdp

#endif  // WDP_CERTIFY_HPP
