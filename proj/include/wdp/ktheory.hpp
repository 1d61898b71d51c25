#ifndef WDP_KTHEORY_HPP
#define WDP_KTHEORY_HPP

#include "wdp/lattice.hpp"

#include <string>

namespace wdp {

/// Numerical K-theory class (rank, c1, chi). The second Chern character is
/// never materialised, so every coordinate stays integral.
struct KClass {
  Int rank = 0;
  DivisorClass c1;
  Int chi = 0;

  friend bool operator==(const KClass&, const KClass&) = default;

  friend KClass operator+(const KClass& a, const KClass& b) {
    return {a.rank + b.rank, a.c1 + b.c1, a.chi + b.chi};
  }
  friend KClass operator-(const KClass& a, const KClass& b) {
    return {a.rank - b.rank, a.c1 - b.c1, a.chi - b.chi};
  }
  friend KClass operator-(const KClass& a) { return {-a.rank, -a.c1, -a.chi}; }
  friend KClass operator*(Int k, const KClass& a) { return {k * a.rank, k * a.c1, k * a.chi}; }
};

inline void check_class(const LatticeForm& form, const KClass& e) {
  if (e.c1.size() != form.dimension()) {
    throw Error(ErrorCode::SurfaceMismatch, "class c1 has " + std::to_string(e.c1.size()) +
                                                " coordinates, surface has " +
                                                std::to_string(form.dimension()));
  }
}

inline KClass zero_class(const LatticeForm& form) {
  return {0, zero_divisor(form.dimension()), 0};
}

inline KClass line_class(const LatticeForm& form, const DivisorClass& d) {
  form.check(d);
  Int twice = form.intersect(d, d - form.canonical());
  return {1, d, 1 + twice / 2};
}

inline KClass structure_sheaf(const LatticeForm& form) {
  return line_class(form, zero_divisor(form.dimension()));
}

/// chi(E, F) = sum (-1)^p dim Ext^p(E, F), by Riemann-Roch in (rank, c1, chi)
/// coordinates:
///   r_E chi_F + r_F chi_E - r_E r_F - c1E.c1F + r_F (c1E.K).
inline Int euler_pairing(const LatticeForm& form, const KClass& e, const KClass& f) {
  check_class(form, e);
  check_class(form, f);
  return e.rank * f.chi + f.rank * e.chi - e.rank * f.rank - form.intersect(e.c1, f.c1) +
         f.rank * form.intersect(e.c1, form.canonical());
}

/// mu(E) = -(c1(E).K) / rank(E).
inline Rational slope(const LatticeForm& form, const KClass& e) {
  check_class(form, e);
  if (e.rank == 0) throw Error(ErrorCode::ZeroRank, "slope of a rank-zero class");
  return Rational(-form.intersect(e.c1, form.canonical()), e.rank);
}

/// E tensored with O(L).
inline KClass twist(const LatticeForm& form, const KClass& e, const DivisorClass& l) {
  check_class(form, e);
  form.check(l);
  Int twice = form.intersect(l, l - form.canonical());
  return {e.rank, e.c1 + e.rank * l, e.chi + form.intersect(e.c1, l) + e.rank * (twice / 2)};
}

/// E tensored with the anticanonical bundle.
inline KClass serre_twist(const LatticeForm& form, const KClass& e) {
  return twist(form, e, -form.canonical());
}

/// E tensored with omega^t, i.e. twisted by t K.
inline KClass canonical_twist(const LatticeForm& form, const KClass& e, Int t) {
  return twist(form, e, t * form.canonical());
}

}  // namespace wdp

#endif  // WDP_KTHEORY_HPP
