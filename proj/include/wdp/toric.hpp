#ifndef WDP_TORIC_HPP
#define WDP_TORIC_HPP

#include "wdp/lattice.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wdp {

struct Ray {
  Int x = 0;
  Int y = 0;

  friend bool operator==(const Ray&, const Ray&) = default;
  friend auto operator<=>(const Ray&, const Ray&) = default;
  friend Ray operator+(Ray a, Ray b) { return {a.x + b.x, a.y + b.y}; }
};

inline Int det(Ray a, Ray b) { return a.x * b.y - a.y * b.x; }

inline std::string to_string(Ray r) {
  return "(" + std::to_string(r.x) + "," + std::to_string(r.y) + ")";
}

namespace detail {

// Counterclockwise order starting at `start` (which sorts first).
inline bool angle_less(Ray start, Ray a, Ray b) {
  auto half = [&](Ray v) {
    Int d = det(start, v);
    if (d > 0) return 0;
    if (d == 0 && start.x * v.x + start.y * v.y > 0) return 0;
    return 1;
  };
  int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  if (a == start) return b != start;
  if (b == start) return false;
  return det(a, b) > 0;
}

}  // namespace detail

/// Input order handling for fans.
enum class RayOrder {
  /// Any cyclic order; rays are re-sorted counterclockwise.
  any,
  /// Rays must already be listed counterclockwise (a clockwise listing is
  /// rejected with WrongOrientation).
  counterclockwise,
};

/// A smooth complete toric surface. Rays are stored counterclockwise starting
/// from the lexicographically smallest ray. Immutable after construction.
class SmoothToricSurface {
 public:
  static SmoothToricSurface from_rays(std::span<const Ray> input, std::string name = {},
                                      RayOrder order = RayOrder::any) {
    if (input.size() < 3) {
      throw Error(ErrorCode::NotComplete, "a complete fan needs at least 3 rays");
    }
    for (Ray r : input) {
      if (std::gcd(std::llabs(r.x), std::llabs(r.y)) != 1) {
        throw Error(ErrorCode::NonPrimitiveRay, "ray " + to_string(r) + " is not primitive");
      }
    }
    if (order == RayOrder::counterclockwise) {
      bool all_negative = true;
      for (std::size_t i = 0; i < input.size(); ++i) {
        if (det(input[i], input[(i + 1) % input.size()]) >= 0) all_negative = false;
      }
      if (all_negative) {
        throw Error(ErrorCode::WrongOrientation, "rays are listed clockwise");
      }
    }
    std::vector<Ray> rays(input.begin(), input.end());
    const Ray start = *std::min_element(rays.begin(), rays.end());
    std::sort(rays.begin(), rays.end(),
              [&](Ray a, Ray b) { return detail::angle_less(start, a, b); });
    if (std::adjacent_find(rays.begin(), rays.end()) != rays.end()) {
      throw Error(ErrorCode::NotSmooth, "duplicate ray");
    }
    if (order == RayOrder::counterclockwise) {
      // The given listing must be a rotation of the sorted one.
      auto it = std::find(input.begin(), input.end(), start);
      for (std::size_t i = 0; i < rays.size(); ++i) {
        Ray given = input[(static_cast<std::size_t>(it - input.begin()) + i) % input.size()];
        if (given != rays[i]) {
          throw Error(ErrorCode::WrongOrientation, "rays are not in counterclockwise order");
        }
      }
    }
    const std::size_t n = rays.size();
    for (std::size_t i = 0; i < n; ++i) {
      Ray a = rays[i], b = rays[(i + 1) % n];
      Int d = det(a, b);
      if (d <= 0) {
        throw Error(ErrorCode::NotComplete,
                    "rays " + to_string(a) + " and " + to_string(b) + " leave a gap of angle >= pi");
      }
      if (d != 1) {
        throw Error(ErrorCode::NotSmooth, "cone " + to_string(a) + "," + to_string(b) +
                                              " has determinant " + std::to_string(d));
      }
    }
    return SmoothToricSurface(std::move(rays), std::move(name));
  }

  static SmoothToricSurface from_rays(std::initializer_list<Ray> rays, std::string name = {}) {
    return from_rays(std::span<const Ray>(rays.begin(), rays.size()), std::move(name));
  }

  const std::string& name() const { return name_; }
  const std::vector<Ray>& rays() const { return rays_; }
  std::size_t num_rays() const { return rays_.size(); }
  const IntVec& selfint() const { return selfint_; }
  const DivisorClass& canonical() const { return form_.canonical(); }
  /// K^2.
  Int degree() const { return degree_; }
  const LatticeForm& form() const { return form_; }

  std::optional<std::size_t> index_of(Ray r) const {
    auto it = std::find(rays_.begin(), rays_.end(), r);
    if (it == rays_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - rays_.begin());
  }

  DivisorClass ray_divisor(std::size_t i) const {
    DivisorClass d = zero_divisor(num_rays());
    d.coeffs.at(i) = 1;
    return d;
  }

  DivisorClass ray_divisor(Ray r) const {
    auto i = index_of(r);
    if (!i) throw Error(ErrorCode::InvalidInput, "no ray " + to_string(r) + " in fan");
    return ray_divisor(*i);
  }

  /// div(chi^m) = sum_i <m, v_i> D_i.
  DivisorClass principal(Int mx, Int my) const {
    DivisorClass d = zero_divisor(num_rays());
    for (std::size_t i = 0; i < num_rays(); ++i) d.coeffs[i] = mx * rays_[i].x + my * rays_[i].y;
    return d;
  }

  Int intersect(const DivisorClass& a, const DivisorClass& b) const {
    return form_.intersect(a, b);
  }

  /// The unique representative of the class of `d` with zero coefficients on
  /// the first two rays (which form a lattice basis).
  DivisorClass reduce(const DivisorClass& d) const {
    form_.check(d);
    auto [mx, my] = solve_character(d[0], d[1]);
    return d - principal(mx, my);
  }

  bool equivalent(const DivisorClass& a, const DivisorClass& b) const {
    form_.check(a);
    form_.check(b);
    DivisorClass diff = a - b;
    auto [mx, my] = solve_character(diff[0], diff[1]);
    return diff == principal(mx, my);
  }

  friend bool operator==(const SmoothToricSurface& a, const SmoothToricSurface& b) {
    return a.rays_ == b.rays_;
  }

 private:
  SmoothToricSurface(std::vector<Ray> rays, std::string name)
      : name_(std::move(name)), rays_(std::move(rays)) {
    const std::size_t n = rays_.size();
    selfint_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      Ray prev = rays_[(i + n - 1) % n], next = rays_[(i + 1) % n], v = rays_[i];
      Ray sum = prev + next;
      if (det(v, sum) != 0) {
        throw Error(ErrorCode::NotComplete,
                    "neighbours of ray " + to_string(v) + " do not satisfy the cyclic relation");
      }
      // v is primitive, so sum = a v with a integral.
      Int a = v.x != 0 ? sum.x / v.x : sum.y / v.y;
      if (a * v.x != sum.x || a * v.y != sum.y) {
        throw Error(ErrorCode::NotComplete, "non-integral cyclic relation at " + to_string(v));
      }
      selfint_[i] = -a;
    }
    IntMat gram(n, IntVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      gram[i][i] = selfint_[i];
      gram[i][(i + 1) % n] = 1;
      gram[(i + 1) % n][i] = 1;
    }
    DivisorClass k{IntVec(n, -1)};
    // Picard coordinates: coefficients of reduce(d) on rays 2..n-1.
    // reduce(d)_k = d_k - <m(d), v_k> where m(d) solves <m, v_0> = d_0, <m, v_1> = d_1.
    // With det(v_0, v_1) = 1: m = d_0 * (v1.y, -v1.x) + d_1 * (-v0.y, v0.x).
    IntMat proj;
    const Ray v0 = rays_[0], v1 = rays_[1];
    for (std::size_t kk = 2; kk < n; ++kk) {
      IntVec row(n, 0);
      row[kk] = 1;
      Ray vk = rays_[kk];
      row[0] -= v1.y * vk.x - v1.x * vk.y;
      row[1] -= -v0.y * vk.x + v0.x * vk.y;
      proj.push_back(std::move(row));
    }
    std::string id = "toric:";
    for (Ray r : rays_) id += to_string(r);
    form_ = LatticeForm(std::move(id), std::move(gram), std::move(k), std::move(proj));
    degree_ = form_.ksq();
    if (degree_ != 12 - static_cast<Int>(n)) {
      throw Error(ErrorCode::InternalInconsistency, "K^2 != 12 - #rays");
    }
  }

  std::pair<Int, Int> solve_character(Int d0, Int d1) const {
    const Ray v0 = rays_[0], v1 = rays_[1];
    return {d0 * v1.y - d1 * v0.y, -d0 * v1.x + d1 * v0.x};
  }

  std::string name_;
  std::vector<Ray> rays_;
  IntVec selfint_;
  LatticeForm form_;
  Int degree_ = 0;
};

inline SmoothToricSurface validate_fan(std::span<const Ray> rays, std::string name = {},
                                       RayOrder order = RayOrder::any) {
  return SmoothToricSurface::from_rays(rays, std::move(name), order);
}

inline Int intersect(const SmoothToricSurface& s, const DivisorClass& a, const DivisorClass& b) {
  return s.intersect(a, b);
}

// ---------------------------------------------------------------------------
// Blowups

/// Total transform along a toric blowup at a torus-fixed point.
struct PullbackMap {
  std::vector<std::size_t> old_to_new;
  std::size_t exceptional_index = 0;
  std::size_t corner_a = 0;  // old indices of the rays spanning the blown-up cone
  std::size_t corner_b = 0;

  DivisorClass operator()(const DivisorClass& d) const {
    if (d.size() != old_to_new.size()) {
      throw Error(ErrorCode::DimensionMismatch, "pullback of divisor on a different surface");
    }
    DivisorClass out = zero_divisor(old_to_new.size() + 1);
    for (std::size_t i = 0; i < d.size(); ++i) out.coeffs[old_to_new[i]] = d[i];
    out.coeffs[exceptional_index] = d[corner_a] + d[corner_b];
    return out;
  }
};

struct BlowupResult {
  SmoothToricSurface surface;
  DivisorClass exceptional;
  PullbackMap pullback;
};

/// Star subdivision of the cone spanned by rays `corner` and `corner + 1`.
inline BlowupResult blowup(const SmoothToricSurface& base, std::size_t corner,
                           std::string name = {}) {
  const std::size_t n = base.num_rays();
  if (corner >= n) {
    throw Error(ErrorCode::InvalidCone, "cone index " + std::to_string(corner) + " out of range");
  }
  const std::size_t a = corner, b = (corner + 1) % n;
  std::vector<Ray> rays = base.rays();
  const Ray w = rays[a] + rays[b];
  rays.push_back(w);
  if (name.empty()) name = base.name() + "+bl" + std::to_string(corner);
  SmoothToricSurface up = SmoothToricSurface::from_rays(rays, std::move(name));
  PullbackMap map;
  for (Ray r : base.rays()) map.old_to_new.push_back(*up.index_of(r));
  map.exceptional_index = *up.index_of(w);
  map.corner_a = a;
  map.corner_b = b;
  DivisorClass e = up.ray_divisor(map.exceptional_index);
  return {std::move(up), std::move(e), std::move(map)};
}

// ---------------------------------------------------------------------------
// Classification

enum class SurfaceKind { del_pezzo, weak_del_pezzo, rejected };

inline std::string_view to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::del_pezzo: return "del-pezzo";
    case SurfaceKind::weak_del_pezzo: return "weak-del-pezzo";
    case SurfaceKind::rejected: return "rejected";
  }
  return "?";
}

struct WeakDPVerdict {
  SurfaceKind kind = SurfaceKind::rejected;
  Int degree = 0;
  std::vector<std::size_t> minus2curves;
  std::string reason;
  std::optional<std::size_t> offending_ray;
};

/// -K is nef iff every D_i^2 >= -2, ample iff every D_i^2 >= -1; big given nef iff K^2 > 0.
inline WeakDPVerdict classify(const SmoothToricSurface& s) {
  WeakDPVerdict v;
  v.degree = s.degree();
  for (std::size_t i = 0; i < s.num_rays(); ++i) {
    if (s.selfint()[i] < -2) {
      v.kind = SurfaceKind::rejected;
      v.offending_ray = i;
      v.reason = "-K is not nef: ray " + to_string(s.rays()[i]) + " has self-intersection " +
                 std::to_string(s.selfint()[i]);
      v.minus2curves.clear();
      return v;
    }
    if (s.selfint()[i] == -2) v.minus2curves.push_back(i);
  }
  if (s.degree() <= 0) {
    v.kind = SurfaceKind::rejected;
    v.reason = "-K is not big: K^2 = " + std::to_string(s.degree());
    v.minus2curves.clear();
    return v;
  }
  v.kind = v.minus2curves.empty() ? SurfaceKind::del_pezzo : SurfaceKind::weak_del_pezzo;
  return v;
}

// ---------------------------------------------------------------------------
// Line bundle cohomology

/// Number of lattice points m with <m, v_i> >= -d_i for all rays.
inline Int h0(const SmoothToricSurface& s, const DivisorClass& d) {
  s.form().check(d);
  const auto& rays = s.rays();
  const std::size_t n = rays.size();
  auto feasible = [&](const Rational& x, const Rational& y) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rays[i].x * x + rays[i].y * y < Rational(-d[i])) return false;
    }
    return true;
  };
  // A nonempty bounded polygon is the hull of its vertices, each of which lies
  // on two independent boundary lines.
  bool any = false;
  Rational xmin, xmax, ymin, ymax;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Int dt = det(rays[i], rays[j]);
      if (dt == 0) continue;
      Rational x(-d[i] * rays[j].y + d[j] * rays[i].y, dt);
      Rational y(-d[j] * rays[i].x + d[i] * rays[j].x, dt);
      if (!feasible(x, y)) continue;
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (!any) return 0;
  Int count = 0;
  for (Int x = ceil(xmin); x <= floor(xmax); ++x) {
    for (Int y = ceil(ymin); y <= floor(ymax); ++y) {
      bool inside = true;
      for (std::size_t i = 0; i < n && inside; ++i) {
        inside = rays[i].x * x + rays[i].y * y >= -d[i];
      }
      if (inside) ++count;
    }
  }
  return count;
}

/// chi(O(D)) = 1 + D.(D - K)/2.
inline Int euler_characteristic(const SmoothToricSurface& s, const DivisorClass& d) {
  Int twice = s.intersect(d, d - s.canonical());
  return 1 + twice / 2;
}

struct Cohomology {
  Int h0 = 0;
  Int h1 = 0;
  Int h2 = 0;

  bool higher_vanish() const { return h1 == 0 && h2 == 0; }
  bool all_vanish() const { return h0 == 0 && h1 == 0 && h2 == 0; }
  Int operator[](int p) const { return p == 0 ? h0 : (p == 1 ? h1 : h2); }
  friend bool operator==(const Cohomology&, const Cohomology&) = default;
};

inline Cohomology cohomology(const SmoothToricSurface& s, const DivisorClass& d) {
  Cohomology c;
  c.h0 = h0(s, d);
  c.h2 = h0(s, s.canonical() - d);
  c.h1 = c.h0 + c.h2 - euler_characteristic(s, d);
  if (c.h1 < 0) {
    throw Error(ErrorCode::InternalInconsistency, "negative h1 for divisor");
  }
  return c;
}

}  // namespace wdp

#endif  // WDP_TORIC_HPP
