#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fkpp/model.hpp"

namespace fkpp {

// ---------------------------------------------------------------------------
// Solutions depending only on time: h' = h^p - h^q.
// ---------------------------------------------------------------------------

/// h(t; C) = [1 + C e^{(p-1)t}]^{-1/(p-1)}, the explicit family for q = 1.
double time_solution_q1(double C, double p, double t);

/// Blow-up time ln(-1/C)/(p-1) of time_solution_q1 for C < 0.
double blowup_time_q1(double C, double p);

/// Shift constant C such that time_solution_q1(C, p, 0) == h0.
inline double q1_constant_from_initial(double h0, double p);

enum class EventKind { None, BlowUp, Extinct };

struct TrajectoryEvent {
  EventKind kind{EventKind::None};
  double time{0.0};  ///< T (blow-up) or T_e (extinction); unused for None.
};

/// Accepted samples of h(t). Strictly monotone; positive before the event.
struct TimeTrajectory {
  std::vector<double> times;
  std::vector<double> values;
  TrajectoryEvent event;
};

struct OdeOptions {
  double abs_tol{1e-10};
  double rel_tol{1e-10};
  double blowup_level{1e8};
  double max_step{0.05};
  double initial_step{1e-3};
};

/**
 * Adaptive RK4 (step doubling with local extrapolation) for h' = h^p - h^q.
 *
 * Blow-up is declared once h exceeds options.blowup_level; T is then
 * obtained by extrapolating h^{1-p} linearly to zero with its exact local
 * slope. For q < 1 and h0 < 1 the working variable is z = h^{1-q}, which
 * satisfies the smooth equation z' = (1-q)(z^{(p-q)/(1-q)} - 1); extinction
 * is reached by halving the remaining distance to z = 0 and extrapolating.
 * If the horizon is reached first the trajectory carries EventKind::None.
 */
TimeTrajectory integrate_time_ode(double h0, double p, double q, double t_max,
                                  const OdeOptions& options = {});

enum class BracketKind { BlowUp, Decay, Extinction };

struct BracketReport {
  BracketKind kind{BracketKind::BlowUp};
  bool pass{false};
  /// Smallest relative distance of h to either bound (negative on violation).
  double worst_margin{0.0};
  double worst_time{0.0};
  std::size_t checked{0};
  /// Samples too close to the event time to resolve T - t in double precision.
  std::size_t skipped{0};
};

/// Relative slack granted to each comparison, above the integrator tolerance.
inline constexpr double kBracketSlack = 1e-8;

/**
 * Pointwise check of the two-sided rate bounds along a time trajectory:
 * blow-up rate for h0 > 1, algebraic decay for h0 < 1 with 1 < q < p, and
 * finite-time extinction for h0 < 1 with q < 1. The sample at t = 0 is
 * excluded for the decay bounds, which are both equal to h0 there.
 */
BracketReport bracket_check(const TimeTrajectory& trajectory, double p, double q, double h0);

// ---------------------------------------------------------------------------
// Stationary profiles.
// ---------------------------------------------------------------------------

enum class StationaryRegime { QEqualsOne, QGreaterThanOne };

/**
 * Even (for C = 0), peaked stationary solution sampled on a grid together
 * with its derivative. For q = 1 the profile is available in closed form at
 * any x; for q > 1 off-node values use cubic Hermite interpolation of the
 * stored nodes and, beyond the grid, the algebraic tail matched at x = L.
 */
class StationaryProfile {
 public:
  StationaryProfile(StationaryRegime regime, double p, double q, double shift, double peak,
                    Profile values, Profile derivative);

  StationaryRegime regime() const { return regime_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double shift() const { return shift_; }
  double peak() const { return peak_; }
  const Profile& profile() const { return values_; }
  const Profile& derivative() const { return derivative_; }
  const Grid1D& grid() const { return values_.grid(); }

  double value(double x) const;
  double slope(double x) const;

  /// Whether value(x) is backed by data (closed form or inside the grid).
  bool covers(double x) const;

  Profile sample_on(const Grid1D& grid) const;

 private:
  StationaryRegime regime_;
  double p_;
  double q_;
  double shift_;
  double peak_;
  Profile values_;
  Profile derivative_;
};

/// g(x; C) = {(p+1)/2 [1 - tanh^2(C + (p-1)x/2)]}^{1/(p-1)} and g' = -tanh(.) g.
double stationary_q1_value(double C, double p, double x);
double stationary_q1_slope(double C, double p, double x);

StationaryProfile stationary_q1(double C, double p, const Grid1D& grid);

/// ((p+1)/(q+1))^{1/(p-q)} for 1 < q < p.
double stationary_peak_qgt1(double p, double q);

/// Right-hand side of the first integral: 2 psi^{q+1}/(q+1) - 2 psi^{p+1}/(p+1).
double first_integral_radicand(double psi, double p, double q);

/**
 * Integrates psi' = -sqrt(first_integral_radicand(psi)) outward from the peak
 * (started at x = dx/4 by the second-order Taylor step), fills x > 0, and
 * extends to x < 0 by reflection. Derivatives are stored from the first-order
 * relation.
 */
StationaryProfile compute_stationary_qgt1(double p, double q, const Grid1D& grid);

struct AsymptoticConstants {
  /// For q = 1, K(C, p) = (2(p+1))^{1/(p-1)} e^{2C/(p-1)} with
  /// g ~ K e^{-|x|} as x -> -inf (the x -> +inf constant is K(-C, p)).
  /// For q > 1, L(q) with |x|^{2/(q-1)} psi -> L.
  double tail_amplitude{0.0};
  /// Limit of x psi'(x) / psi(x) for q > 1; the exponential rate -1 for q = 1.
  double log_slope_limit{0.0};
};

AsymptoticConstants asymptotic_constants_q1(double C, double p);
AsymptoticConstants asymptotic_constants_qgt1(double q);
AsymptoticConstants asymptotic_constants(const StationaryProfile& sp);

/// Tail-normalized amplitude: e^{|x|} g(x) for q = 1, |x|^{2/(q-1)} psi(x) for q > 1.
double tail_amplitude_at(const StationaryProfile& sp, double x);

/// x psi'(x) / psi(x).
double log_slope_at(const StationaryProfile& sp, double x);

struct AsymptoticsReport {
  bool pass{false};
  double tolerance{0.0};
  std::size_t checked{0};
  double worst_amplitude_error{0.0};  ///< max relative error against tail_amplitude
  double worst_slope_error{0.0};      ///< max relative error against log_slope_limit
  double x_start{0.0};                ///< inner edge of the checked tail window
};

/// Relative tail level at +-L below which the domain counts as large enough.
inline constexpr double kTailLevel = 1e-2;

/**
 * Checks the tail limits on the outer 10% of grid nodes. For q > 1 only the
 * x > 0 side is checked (the profile is even); for q = 1 both sides are
 * checked, each against its own constant. Throws DomainTooSmall when the
 * profile at +-L is not below kTailLevel * peak.
 */
AsymptoticsReport verify_profile_asymptotics(const StationaryProfile& sp,
                                             const AsymptoticConstants& ac,
                                             double tolerance = 0.05);

inline double q1_constant_from_initial(double h0, double p) {
  // h0^{-(p-1)} = 1 + C
  return std::pow(h0, -(p - 1.0)) - 1.0;
}

}  // namespace fkpp
