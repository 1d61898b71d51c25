#ifndef WDP_LATTICE_HPP
#define WDP_LATTICE_HPP

#include "wdp/core.hpp"

#include <string>
#include <utility>

namespace wdp {

/// A divisor written in the coordinates of some generating set (torus-invariant
/// prime divisors on a toric surface, or a Picard basis on an abstract lattice
/// surface). Plain `==` compares coefficients; linear equivalence is a question
/// for the surface.
struct DivisorClass {
  IntVec coeffs;

  std::size_t size() const { return coeffs.size(); }
  Int operator[](std::size_t i) const { return coeffs[i]; }

  friend bool operator==(const DivisorClass&, const DivisorClass&) = default;
  friend auto operator<=>(const DivisorClass&, const DivisorClass&) = default;

  friend DivisorClass operator+(const DivisorClass& a, const DivisorClass& b) {
    return {a.coeffs + b.coeffs};
  }
  friend DivisorClass operator-(const DivisorClass& a, const DivisorClass& b) {
    return {a.coeffs - b.coeffs};
  }
  friend DivisorClass operator-(const DivisorClass& a) { return {-a.coeffs}; }
  friend DivisorClass operator*(Int k, const DivisorClass& a) { return {k * a.coeffs}; }
};

inline DivisorClass zero_divisor(std::size_t n) { return {IntVec(n, 0)}; }

/// Intersection data needed by numerical K-theory: a symmetric Gram matrix on
/// the divisor generators, the canonical class, and a linear projection of the
/// generators onto a Z-basis of the Picard lattice.
class LatticeForm {
 public:
  LatticeForm() = default;
  LatticeForm(std::string id, IntMat gram, DivisorClass canonical, IntMat pic_projection)
      : id_(std::move(id)),
        gram_(std::move(gram)),
        canonical_(std::move(canonical)),
        pic_projection_(std::move(pic_projection)) {}

  const std::string& id() const { return id_; }
  std::size_t dimension() const { return gram_.size(); }
  std::size_t picard_rank() const { return pic_projection_.size(); }
  /// Rank of the numerical Grothendieck group: rank, Picard lattice, chi.
  std::size_t k_rank() const { return picard_rank() + 2; }
  const IntMat& gram() const { return gram_; }
  const DivisorClass& canonical() const { return canonical_; }

  void check(const DivisorClass& d) const {
    if (d.size() != dimension()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "divisor has " + std::to_string(d.size()) + " coefficients, expected " +
                      std::to_string(dimension()));
    }
  }

  Int intersect(const DivisorClass& a, const DivisorClass& b) const {
    check(a);
    check(b);
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) s += a[i] * gram_[i][j] * b[j];
    }
    return s;
  }

  Int ksq() const { return intersect(canonical_, canonical_); }

  IntVec picard_coordinates(const DivisorClass& d) const {
    check(d);
    IntVec out;
    out.reserve(picard_rank());
    for (const auto& row : pic_projection_) out.push_back(dot(row, d.coeffs));
    return out;
  }

  friend bool operator==(const LatticeForm& a, const LatticeForm& b) {
    return a.id_ == b.id_ && a.gram_ == b.gram_ && a.canonical_ == b.canonical_;
  }

 private:
  std::string id_;
  IntMat gram_;
  DivisorClass canonical_;
  IntMat pic_projection_;
};

/// A surface known only through its Picard lattice, intersection form and
/// canonical class. Supports numerical K-theory but not honest cohomology.
struct AbstractLatticeSurface {
  std::string name;
  IntMat gram;
  DivisorClass canonical;

  LatticeForm form() const {
    IntMat identity(gram.size(), IntVec(gram.size(), 0));
    for (std::size_t i = 0; i < gram.size(); ++i) identity[i][i] = 1;
    return LatticeForm("abstract:" + name, gram, canonical, identity);
  }
};

}  // namespace wdp

#endif  // WDP_LATTICE_HPP
