#pragma once

// Geodesic zipper: conformal map of a Jordan polygon (nodes z_0..z_n, counterclockwise)
// onto the upper half-plane, built as a composition of explicit square-root maps.

#include <petalkit/core.hpp>

#include <vector>

namespace petalkit {

class GeodesicZipper {
 public:
  GeodesicZipper() = default;

  /// `interior` is any point strictly inside the polygon; it fixes the final orientation.
  GeodesicZipper(std::vector<cplx> nodes, cplx interior) : nodes_(std::move(nodes)) {
    fit(interior);
  }

  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<cplx>& params() const { return a_; }

  /// Polygon interior -> upper half-plane.
  cplx to_halfplane(cplx z) const {
    cplx u = first(z);
    for (const cplx& a : a_) u = zip(a, u);
    return finish(u);
  }

  /// Upper half-plane -> polygon interior.
  cplx from_halfplane(cplx v) const {
    cplx t = sign_ > 0 ? std::sqrt(v) : -std::sqrt(-v);
    cplx u = zeta0_inf_ ? t : t / (1.0 + t / zeta0_);
    for (auto it = a_.rbegin(); it != a_.rend(); ++it) u = unzip(*it, u);
    const cplx m = -u * u;
    return (nodes_[1] - m * nodes_[0]) / (1.0 - m);
  }

  // Restores a fitted state without refitting (deserialization).
  void restore(std::vector<cplx> nodes, std::vector<cplx> a, double zeta0, bool zeta0_inf,
               double sign) {
    nodes_ = std::move(nodes);
    a_ = std::move(a);
    zeta0_ = zeta0;
    zeta0_inf_ = zeta0_inf;
    sign_ = sign;
  }
  double zeta0() const { return zeta0_; }
  bool zeta0_infinite() const { return zeta0_inf_; }
  double sign() const { return sign_; }

 private:
  std::vector<cplx> nodes_;
  std::vector<cplx> a_;
  double zeta0_ = 0;
  bool zeta0_inf_ = true;
  double sign_ = 1;

  static double c_of(cplx a) {
    return std::abs(a.real()) < 1e-300 ? inf : std::norm(a) / a.real();
  }

  cplx first(cplx z) const {
    return I * std::sqrt((z - nodes_[1]) / (z - nodes_[0]));
  }

  // H minus the geodesic arc [0,a] onto H, a -> 0.
  static cplx zip(cplx a, cplx z) {
    const double c = c_of(a);
    const double d = std::norm(a) / a.imag();
    const cplx w = std::isinf(c) ? z : z / (1.0 - z / c);
    return sqrt_upper(w * w + d * d, w.real());
  }

  static cplx unzip(cplx a, cplx u) {
    const double c = c_of(a);
    const double d = std::norm(a) / a.imag();
    const cplx w = sqrt_upper(u * u - d * d, u.real());
    return std::isinf(c) ? w : w / (1.0 + w / c);
  }

  cplx finish(cplx u) const {
    const cplx t = zeta0_inf_ ? u : u / (1.0 - u / zeta0_);
    return sign_ * t * t;
  }

  void fit(cplx interior) {
    const std::size_t n = nodes_.size();
    if (n < 3) throw numeric_error("zipper: need at least three boundary nodes");
    std::vector<cplx> U(n);
    for (std::size_t k = 2; k < n; ++k) U[k] = first(nodes_[k]);
    double z0 = 0;
    bool z0inf = true;
    a_.clear();
    a_.reserve(n - 2);
    for (std::size_t k = 2; k < n; ++k) {
      const cplx a = U[k];
      if (!(a.imag() > 0) || !finite(a))
        throw numeric_error("zipper: node " + std::to_string(k) +
                            " left the half-plane (self-intersecting or crowded polygon)");
      a_.push_back(a);
      for (std::size_t j = k + 1; j < n; ++j) U[j] = zip(a, U[j]);
      const double c = c_of(a);
      const double d = std::norm(a) / a.imag();
      if (z0inf) {
        if (!std::isinf(c)) {
          z0 = (c > 0 ? -1.0 : 1.0) * std::sqrt(c * c + d * d);
          z0inf = false;
        }
      } else {
        const double w = z0 / (1.0 - z0 / c);
        z0 = (w < 0 ? -1.0 : 1.0) * std::sqrt(w * w + d * d);
      }
    }
    zeta0_ = z0;
    zeta0_inf_ = z0inf;
    sign_ = 1;
    cplx u = first(interior);
    for (const cplx& a : a_) u = zip(a, u);
    const cplx t = zeta0_inf_ ? u : u / (1.0 - u / zeta0_);
    sign_ = t.real() >= 0 ? 1.0 : -1.0;
  }
};

}  // namespace petalkit
