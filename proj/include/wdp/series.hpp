#ifndef WDP_SERIES_HPP
#define WDP_SERIES_HPP

#include "wdp/certify.hpp"

#include <string>
#include <vector>

namespace wdp {

struct HilbertPrefix {
  std::string label;
  std::vector<Int> coeffs;
  std::string certificate;  // id of the certificate that justifies the numbers, if any
  std::string method;       // "lattice" or "chi"
};

/// Stable digest of the facts and verdict of a certificate.
inline std::string certificate_id(const Certificate& c) {
  std::string s = std::string(to_string(c.verdict)) + "|" + c.surface.form().id();
  for (const auto& k : c.classes) {
    s += "|" + std::to_string(k.rank) + ":" + std::to_string(k.chi);
    for (Int x : k.c1.coeffs) s += "," + std::to_string(x);
  }
  for (const Fact& f : c.facts.facts()) {
    s += "|" + to_string(f.key) + "=" + std::to_string(f.dim) + std::string(to_string(f.rule));
    for (auto in : f.inputs) s += "," + std::to_string(in);
  }
  return hex_digest(s);
}

/// dim Gamma(X, omega^-n) for n = 0..n_max.
inline HilbertPrefix anticanonical_hilbert(const SmoothToricSurface& s, std::size_t n_max) {
  if (classify(s).kind == SurfaceKind::rejected) {
    throw Error(ErrorCode::NotWeakDelPezzo, s.name() + " is not weak del Pezzo");
  }
  HilbertPrefix h{"R(" + s.name() + ")", {}, "", "lattice"};
  for (std::size_t n = 0; n <= n_max; ++n) {
    h.coeffs.push_back(h0(s, -static_cast<Int>(n) * s.canonical()));
  }
  return h;
}

namespace detail {

inline void require_two_tilting(const Certificate& c) {
  if (c.verdict != Verdict::two_tilting) {
    throw Error(ErrorCode::NotCertified,
                "certificate verdict is " + std::string(to_string(c.verdict)) + ", not two-tilting");
  }
}

}  // namespace detail

/// dim Hom(T, T (x) omega^-n) as a sum of Euler pairings; equal to the Hom
/// dimension because the certificate gives the higher vanishing.
inline HilbertPrefix pi3_hilbert(const Certificate& c, std::size_t n_max) {
  detail::require_two_tilting(c);
  const LatticeForm& form = c.surface.form();
  HilbertPrefix h{"Pi3(" + c.surface.name() + ")", {}, certificate_id(c), "chi"};
  for (std::size_t n = 0; n <= n_max; ++n) {
    Int sum = 0;
    for (const auto& a : c.classes)
      for (const auto& b : c.classes)
        sum += euler_pairing(form, a, canonical_twist(form, b, -static_cast<int>(n)));
    h.coeffs.push_back(sum);
  }
  return h;
}

/// The same numbers by lattice counts, for collections of line bundles.
inline HilbertPrefix pi3_hilbert_lattice(const SmoothToricSurface& s,
                                         const std::vector<Member>& members, std::size_t n_max) {
  HilbertPrefix h{"Pi3(" + s.name() + ")", {}, "", "lattice"};
  for (const auto& m : members) {
    if (!m.is_line()) throw Error(ErrorCode::InvalidInput, "lattice sum needs line bundles");
  }
  for (std::size_t n = 0; n <= n_max; ++n) {
    Int sum = 0;
    const DivisorClass shift = -static_cast<Int>(n) * s.canonical();
    for (const auto& a : members)
      for (const auto& b : members) sum += h0(s, *b.line - *a.line + shift);
    h.coeffs.push_back(sum);
  }
  return h;
}

/// Graded pieces Gamma(X, E_i (x) omega^-n) of each summand of the module.
/// Line summands are counted; other summands use chi, which needs the trivial
/// member for the vanishing Ext^{>0}(O, E_i (x) omega^-n) = 0.
inline std::vector<HilbertPrefix> module_hilbert(const Certificate& c,
                                                 const std::vector<Member>& members,
                                                 std::size_t n_max) {
  detail::require_two_tilting(c);
  if (members.size() != c.size()) throw Error(ErrorCode::DimensionMismatch, "member count");
  const SmoothToricSurface& s = c.surface;
  const LatticeForm& form = s.form();
  std::vector<HilbertPrefix> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Member& m = members[i];
    HilbertPrefix h{"M" + std::to_string(i) + "(" + s.name() + ")", {}, certificate_id(c),
                    m.is_line() ? "lattice" : "chi"};
    if (!m.is_line() && !c.trivial_index) {
      throw Error(ErrorCode::NotCertified, "no trivial member certifies chi = h0 for summand " +
                                               std::to_string(i));
    }
    for (std::size_t n = 0; n <= n_max; ++n) {
      if (m.is_line()) {
        h.coeffs.push_back(h0(s, *m.line - static_cast<Int>(n) * s.canonical()));
      } else {
        h.coeffs.push_back(canonical_twist(form, m.cls, -static_cast<int>(n)).chi);
      }
    }
    out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GrowthCheck {
  bool pass = true;
  std::vector<Int> residuals;           // a_n - a_0 - n(n+1)/2 r^2 K^2
  std::optional<std::size_t> first_bad;
};

inline GrowthCheck check_growth_law(const HilbertPrefix& p, Int rank, Int ksq) {
  GrowthCheck g;
  if (p.coeffs.size() < 3) {
    g.pass = false;
    return g;
  }
  for (std::size_t n = 0; n < p.coeffs.size(); ++n) {
    const Int k = static_cast<Int>(n);
    Int r = p.coeffs[n] - p.coeffs[0] - k * (k + 1) / 2 * rank * rank * ksq;
    g.residuals.push_back(r);
    if (r != 0 && !g.first_bad) g.first_bad = n;
  }
  g.pass = !g.first_bad.has_value();
  return g;
}

enum class Symmetry { pass, fail, inconclusive };

inline std::string_view to_string(Symmetry s) {
  switch (s) {
    case Symmetry::pass: return "pass";
    case Symmetry::fail: return "fail";
    case Symmetry::inconclusive: return "inconclusive";
  }
  return "?";
}

struct GorensteinCheck {
  Symmetry status = Symmetry::inconclusive;
  std::vector<Int> numerator;  // head of (1 - t)^3 H(t) up to its last nonzero term
};

/// Multiplies the prefix by (1 - t)^3 and tests the numerator for symmetry.
/// At least three trailing zeros are required before calling it terminated.
inline GorensteinCheck gorenstein_symmetry(const HilbertPrefix& p) {
  GorensteinCheck g;
  const auto& a = p.coeffs;
  if (a.size() < 6) return g;
  auto at = [&](std::size_t n, std::size_t back) -> Int { return n >= back ? a[n - back] : 0; };
  std::vector<Int> h;
  for (std::size_t n = 0; n < a.size(); ++n) {
    h.push_back(at(n, 0) - 3 * at(n, 1) + 3 * at(n, 2) - at(n, 3));
  }
  std::size_t len = h.size();
  while (len > 0 && h[len - 1] == 0) --len;
  g.numerator.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(len));
  if (h.size() - len < 3) return g;
  g.status = std::equal(g.numerator.begin(), g.numerator.end(), g.numerator.rbegin())
                 ? Symmetry::pass
                 : Symmetry::fail;
  return g;
}

}  // namespace wdp

#endif  // WDP_SERIES_HPP
