#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "fkpp/model.hpp"
#include "fkpp/tridiagonal.hpp"

namespace fkpp {

/**
 * Time-stepping controls for evolve().
 *
 * Invariants: theta in [0.5, 1], dt0 > 0, sigma in (0, 1],
 * 0 < decay_threshold < 1 < blowup_threshold, t_max > 0.
 */
struct SolverConfig {
  double theta{1.0};
  double dt0{0.01};
  double sigma{0.1};
  double blowup_threshold{1e6};
  double decay_threshold{1e-4};
  double t_max{50.0};
  double snapshot_interval{1.0};

  void validate() const;
};

namespace outcome {
struct BlowUp {
  double T_est{0.0};
};
struct Decay {
  double final_sup{0.0};
};
struct Extinct {
  double T_e{0.0};
};
struct Undetermined {};
}  // namespace outcome

using Outcome =
    std::variant<outcome::BlowUp, outcome::Decay, outcome::Extinct, outcome::Undetermined>;

std::string_view outcome_name(const Outcome& o);

struct DiagnosticSample {
  double t{0.0};
  double sup_norm{0.0};
  double mass{0.0};
  double energy{0.0};
};

struct Snapshot {
  double t{0.0};
  Profile u;
};

struct EvolutionRecord {
  ModelParams params;
  SolverConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticSample> diagnostics;
  Outcome outcome{outcome::Undetermined{}};
  std::size_t steps{0};

  TimeSeries sup_series() const;
  TimeSeries energy_series() const;
};

/**
 * One step of the IMEX scheme on a homogeneous Dirichlet grid:
 *   (I - theta dt D) u^{n+1} = u^n + (1 - theta) dt D u^n + dt (u^p - u^q)
 * with D the centered second difference. Negative round-off is clamped to
 * zero before the powers are taken and after the solve.
 */
class ImexStepper {
 public:
  ImexStepper(const Grid1D& grid, const ModelParams& params, double theta);

  /// Reaction-limited step min(dt0, sigma / (1 + p sup^{p-1})).
  double step_size(double sup, double dt0, double sigma) const;

  void advance(std::vector<double>& u, double dt);

 private:
  Grid1D grid_;
  ModelParams params_;
  double theta_;
  TridiagonalSolver solver_;
  std::vector<double> lower_, diag_, upper_, rhs_, x_;
};

/// Evolves u0 (normalized equation) until blow-up, decay, extinction or t_max.
EvolutionRecord evolve(const Profile& u0, const ModelParams& params, const SolverConfig& cfg);

/**
 * E(u) = 1/2 int u_x^2 + 1/(q+1) int u^{q+1} - 1/(p+1) int u^{p+1}.
 * Gradient term from cell differences (u_{i+1} - u_i)/dx summed over cells,
 * the other terms by the trapezoid rule. With homogeneous Dirichlet data this
 * is the exact discrete Lyapunov functional of the theta = 1 scheme.
 */
double energy(const Profile& u, double p, double q);

struct BlowupEstimate {
  double T_est{0.0};
  /// Slope of log ||u||_inf against log(T_est - t).
  double exponent{0.0};
  std::size_t samples{0};
};

/// Linear least-squares fit of z = ||u||_inf^{-(p-1)} against t over the
/// samples with sup-norm in [10, blowup_threshold], weighted by 1/z^2;
/// needs at least 10 of them.
BlowupEstimate estimate_blowup_time(const EvolutionRecord& record, double p);

/// Heat kernel M e^{-x^2/4t} / sqrt(4 pi t).
double heat_kernel(double x, double t, double mass);

/// t^{1/2} sup_x |e^t u(x,t) - heat_kernel(x, t, M)| at every snapshot with t > 0.
TimeSeries heat_kernel_gap(const EvolutionRecord& record, double mass);

/// Mass of w = e^t u at the last snapshot.
double renormalized_mass(const EvolutionRecord& record);

struct ComparisonReport {
  bool pass{false};
  double max_violation{0.0};
  double t_end{0.0};
  std::size_t steps{0};
};

inline constexpr double kComparisonTolerance = 1e-8;

/**
 * Evolves u0 <= v0 with an identical step sequence (the step is set by the
 * larger sup-norm) and records max over time of sup_x (u - v)^+. Stops when
 * either run reaches the blow-up threshold, both fall below the decay
 * threshold, or at t_max.
 */
ComparisonReport comparison_check(const Profile& u0, const Profile& v0, const ModelParams& params,
                                  const SolverConfig& cfg);

}  // namespace fkpp
