#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fkpp {

/**
 * Exponents and coefficients of u_t = K u_xx - B u^q + A u^p.
 *
 * Invariants: p > q > 0, p > 1, and A, B, K finite and positive.
 * Absorption exponents q in (0, 1) are accepted but only meaningful for
 * the time-only ODE (see ode_only()).
 */
struct ModelParams {
  double p{3.0};
  double q{1.0};
  double A{1.0};
  double B{1.0};
  double K{1.0};

  bool ode_only() const { return q < 1.0; }
  bool normalized() const { return A == 1.0 && B == 1.0 && K == 1.0; }
};

ModelParams validate_params(double p, double q, double A, double B, double K);

/// Validated parameters of the normalized equation u_t = u_xx - u^q + u^p.
inline ModelParams normalized_params(double p, double q) {
  return validate_params(p, q, 1.0, 1.0, 1.0);
}

/// Space (a), time (b) and amplitude (c) scales mapping the general
/// equation to the normalized one: u(x, t) = c * ubar(x / a, t / b).
struct ScalingCoefficients {
  double a{1.0};
  double b{1.0};
  double c{1.0};
};

ScalingCoefficients rescale(const ModelParams& params);

/**
 * Uniform grid on [-L, L] with an odd number of nodes, so that x = 0 is a
 * node. Coordinates are generated symmetrically about the center node so
 * that x(center + k) == -x(center - k) holds exactly.
 */
class Grid1D {
 public:
  Grid1D(double half_width, std::size_t n);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  std::size_t center() const { return (n_ - 1) / 2; }
  double x(std::size_t i) const;

  /// Index of the node closest to x (clamped to the grid).
  std::size_t nearest(double x) const;

  bool operator==(const Grid1D& other) const {
    return half_width_ == other.half_width_ && n_ == other.n_;
  }

 private:
  double half_width_;
  std::size_t n_;
  double dx_;
};

/// Node values of a function sampled on a Grid1D. All values finite.
class Profile {
 public:
  Profile(Grid1D grid, std::vector<double> values);

  template <typename F>
  static Profile sample(const Grid1D& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.x(i));
    return Profile(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Piecewise-linear interpolation; zero outside [-L, L].
  double at(double x) const;

  Profile scaled(double factor) const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

struct Norms {
  double sup{0.0};
  double l1{0.0};
};

/// Sup-norm and trapezoid-rule L1 norm.
Norms norms(const Profile& profile);

/// Trapezoid rule over the grid of arbitrary node values.
double trapezoid(const Grid1D& grid, std::span<const double> values);

enum class FrameDirection { ToNormalized, FromNormalized };

/// Maps a snapshot between original and normalized variables. The target
/// grid is the scale image of the source grid (half-width L/a or a*L).
Profile map_profile_between_frames(const Profile& profile, const ScalingCoefficients& coeffs,
                                   FrameDirection direction);

/// As above, but checks that `target` is the scale image of the source grid.
Profile map_profile_between_frames(const Profile& profile, const ScalingCoefficients& coeffs,
                                   FrameDirection direction, const Grid1D& target);

/// Timestamped scalar samples.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;

  void push(double time, double value) {
    t.push_back(time);
    v.push_back(value);
  }
  std::size_t size() const { return t.size(); }
};

}  // namespace fkpp
