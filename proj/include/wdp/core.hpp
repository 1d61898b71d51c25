#ifndef WDP_CORE_HPP
#define WDP_CORE_HPP

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wdp {

using Int = long long;
using Rational = boost::rational<Int>;
using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;

enum class ErrorCode {
  NonPrimitiveRay,
  NotSmooth,
  NotComplete,
  WrongOrientation,
  InvalidCone,
  DimensionMismatch,
  SurfaceMismatch,
  ZeroRank,
  NotExceptional,
  FirstMemberNotTrivial,
  IndexOutOfRange,
  HypothesisUnknown,
  StepLimitExceeded,
  TrivialMemberWouldTwist,
  NotSorted,
  UnknownDimensions,
  HypothesisNotCertified,
  NonConvergent,
  WindowViolated,
  NotCertified,
  NotWeakDelPezzo,
  InvalidInput,
  InternalInconsistency,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPrimitiveRay: return "NonPrimitiveRay";
    case ErrorCode::NotSmooth: return "NotSmooth";
    case ErrorCode::NotComplete: return "NotComplete";
    case ErrorCode::WrongOrientation: return "WrongOrientation";
    case ErrorCode::InvalidCone: return "InvalidCone";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SurfaceMismatch: return "SurfaceMismatch";
    case ErrorCode::ZeroRank: return "ZeroRank";
    case ErrorCode::NotExceptional: return "NotExceptional";
    case ErrorCode::FirstMemberNotTrivial: return "FirstMemberNotTrivial";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::HypothesisUnknown: return "HypothesisUnknown";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::TrivialMemberWouldTwist: return "TrivialMemberWouldTwist";
    case ErrorCode::NotSorted: return "NotSorted";
    case ErrorCode::UnknownDimensions: return "UnknownDimensions";
    case ErrorCode::HypothesisNotCertified: return "HypothesisNotCertified";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::WindowViolated: return "WindowViolated";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::NotWeakDelPezzo: return "NotWeakDelPezzo";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

/// All failures raised by the library carry a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int ceil_div(Int a, Int b) { return -floor_div(-a, b); }

inline Int floor(const Rational& r) { return floor_div(r.numerator(), r.denominator()); }
inline Int ceil(const Rational& r) { return ceil_div(r.numerator(), r.denominator()); }

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Int dot(const IntVec& a, const IntVec& b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline IntVec operator+(IntVec a, const IntVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline IntVec operator-(IntVec a, const IntVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline IntVec operator*(Int k, IntVec a) {
  for (auto& x : a) x *= k;
  return a;
}

inline IntVec operator-(IntVec a) {
  for (auto& x : a) x = -x;
  return a;
}

/// Exact determinant of a square integer matrix (fraction-free Bareiss elimination).
inline Int determinant(IntMat m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Int sign = 1;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// 64-bit FNV-1a, used for stable content digests in reports.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex_digest(std::string_view data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(data);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace wdp

#endif  // WDP_CORE_HPP
