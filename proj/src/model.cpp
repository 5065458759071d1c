#include "fkpp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fkpp/error.hpp"

namespace fkpp {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ModelParams validate_params(double p, double q, double A, double B, double K) {
  if (!positive_finite(A) || !positive_finite(B) || !positive_finite(K)) {
    std::ostringstream os;
    os << "coefficients must be positive and finite (A=" << A << ", B=" << B << ", K=" << K << ")";
    throw Error(ErrorCode::NonPositiveCoefficient, os.str());
  }
  if (!std::isfinite(p) || !std::isfinite(q) || !(q > 0.0) || !(p > q) || !(p > 1.0)) {
    std::ostringstream os;
    os << "require p > q > 0 and p > 1 (p=" << p << ", q=" << q << ")";
    throw Error(ErrorCode::ExponentOrderViolation, os.str());
  }
  return ModelParams{p, q, A, B, K};
}

ScalingCoefficients rescale(const ModelParams& m) {
  const double c = std::pow(m.B / m.A, 1.0 / (m.p - m.q));
  const double c1p = std::pow(c, 1.0 - m.p);
  return ScalingCoefficients{std::sqrt(m.K * c1p / m.A), c1p / m.A, c};
}

Grid1D::Grid1D(double half_width, std::size_t n) : half_width_(half_width), n_(n), dx_(0.0) {
  if (!positive_finite(half_width)) {
    throw Error(ErrorCode::InvalidGrid, "half-width must be positive and finite");
  }
  if (n < 3 || n % 2 == 0) {
    throw Error(ErrorCode::InvalidGrid, "point count must be odd and at least 3, got " +
                                            std::to_string(n));
  }
  dx_ = 2.0 * half_width / static_cast<double>(n - 1);
}

double Grid1D::x(std::size_t i) const {
  if (i == 0) return -half_width_;
  if (i == n_ - 1) return half_width_;
  const auto c = static_cast<std::ptrdiff_t>(center());
  return static_cast<double>(static_cast<std::ptrdiff_t>(i) - c) * dx_;
}

std::size_t Grid1D::nearest(double x) const {
  const double s = std::round((x + half_width_) / dx_);
  if (!(s > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(s), n_ - 1);
}

Profile::Profile(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::InvalidProfile, "value count does not match grid size");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidProfile, "non-finite profile value");
  }
}

double Profile::at(double x) const {
  const double L = grid_.half_width();
  if (x < -L || x > L) return 0.0;
  const double s = (x + L) / grid_.dx();
  auto i = static_cast<std::size_t>(s);
  if (i >= grid_.size() - 1) return values_.back();
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

Profile Profile::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& e : v) e *= factor;
  return Profile(grid_, std::move(v));
}

double trapezoid(const Grid1D& grid, std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * grid.dx();
}

Norms norms(const Profile& profile) {
  Norms n;
  std::vector<double> absval(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    absval[i] = std::abs(profile[i]);
    n.sup = std::max(n.sup, absval[i]);
  }
  n.l1 = trapezoid(profile.grid(), absval);
  return n;
}

Profile map_profile_between_frames(const Profile& profile, const ScalingCoefficients& coeffs,
                                   FrameDirection direction) {
  const double space = direction == FrameDirection::ToNormalized ? 1.0 / coeffs.a : coeffs.a;
  const Grid1D target(profile.grid().half_width() * space, profile.grid().size());
  return map_profile_between_frames(profile, coeffs, direction, target);
}

Profile map_profile_between_frames(const Profile& profile, const ScalingCoefficients& coeffs,
                                   FrameDirection direction, const Grid1D& target) {
  const bool to_norm = direction == FrameDirection::ToNormalized;
  const double space = to_norm ? 1.0 / coeffs.a : coeffs.a;
  const double expected = profile.grid().half_width() * space;
  if (target.size() != profile.grid().size() ||
      std::abs(target.half_width() - expected) > 1e-12 * expected) {
    throw Error(ErrorCode::GridMismatch, "target grid is not the scale image of the source grid");
  }
  std::vector<double> v(profile.values().begin(), profile.values().end());
  for (double& e : v) e = to_norm ? e / coeffs.c : e * coeffs.c;
  return Profile(target, std::move(v));
}

}  // namespace fkpp
