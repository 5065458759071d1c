#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fkpp/exact.hpp"
#include "fkpp/model.hpp"
#include "fkpp/pde.hpp"

namespace fkpp {

enum class Direction { Subsolution, Supersolution };

/// Tail radius and interior floor of the base profile (q > 1 only).
struct TailSupport {
  double R0{0.0};
  double L0{0.0};
};

/**
 * Self-similar comparison function
 *   W(x, t) = (t + T)^{s delta} base((t + T)^{s gamma} x),  s = +1 (sub) / -1 (super),
 * with W(x, 0) = kappa base(T^{s gamma} x).
 */
struct SeparatrixCandidate {
  Direction direction{Direction::Subsolution};
  StationaryRegime regime{StationaryRegime::QEqualsOne};
  double kappa{1.0};
  double delta{0.0};
  double gamma{0.0};
  double T{1.0};
  /// Open upper bound on delta from the parameter rules.
  double delta_bound{0.0};
  StationaryProfile base;
  std::optional<TailSupport> aux;

  double p() const { return base.p(); }
  double q() const { return base.q(); }
  double sign() const { return direction == Direction::Subsolution ? 1.0 : -1.0; }
};

inline constexpr double kMaxTimeShift = 1e12;
inline constexpr double kMinDelta = 1e-6;

/// delta / gamma = 1/(p-1) + 1/(q-1) for q > 1.
double exponent_ratio(double p, double q);

/// Scans the base profile outward-in for the last radius where
/// -x psi'(x)/psi(x) <= ratio and interpolates the crossing; returns {R0, psi(R0)}.
TailSupport tail_support(const StationaryProfile& base, double ratio);

/**
 * Picks delta as half its admissible bound, then gamma and T from the regime
 * rules (kappa > 1 for a subsolution, 0 < kappa < 1 for a supersolution).
 * When T = kappa^{+-1/delta} would exceed kMaxTimeShift, delta is raised to
 * the smallest admissible value giving T = kMaxTimeShift; if that is not
 * below the bound, BoundCollapse is thrown.
 */
SeparatrixCandidate build_candidate(Direction direction, double kappa,
                                    const StationaryProfile& base);

double evaluate_candidate(const SeparatrixCandidate& c, double x, double t);

Profile sample_candidate(const SeparatrixCandidate& c, const Grid1D& grid, double t);

/// The three groups of N[W] = W_t - W_xx + W^q - W^p.
struct ResidualTerms {
  double time_term{0.0};  ///< W_t
  double p_term{0.0};     ///< p-power terms of -W_xx - W^p
  double q_term{0.0};     ///< q-power terms of -W_xx + W^q
  double total() const { return time_term + p_term + q_term; }
  double scale() const;
};

/// Residual from analytic derivatives: the chain rule through the
/// self-similar form plus base'' = base^q - base^p and the first integral.
ResidualTerms candidate_residual(const SeparatrixCandidate& c, double x, double t);

struct LatticeSpec {
  std::size_t nx{41};
  std::size_t nt{21};
  double x_max{15.0};
  double t_max{10.0};
};

struct ResidualSample {
  double x{0.0};
  double t{0.0};
  ResidualTerms terms;
};

struct ResidualReport {
  bool pass{false};
  std::vector<ResidualSample> samples;
  /// Largest signed violation relative to the local scale (<= 0 when passing).
  double worst_relative{0.0};
  /// max |p_term| over the lattice.
  double max_abs_p_term{0.0};
};

inline constexpr double kResidualTolerance = 1e-10;

/// Sign check on the uniform lattice [-x_max, x_max] x [0, t_max].
ResidualReport residual_sign_check(const SeparatrixCandidate& c, const LatticeSpec& lattice);

/// Energy of W(., t) sampled on `grid`.
double candidate_energy(const SeparatrixCandidate& c, const Grid1D& grid, double t);

/// The same energy from the scaling law and three integrals of the base profile.
double candidate_energy_scaling(const SeparatrixCandidate& c, double t);

struct EnergyCrossing {
  bool found{false};
  double t{0.0};
  double energy{0.0};
  bool stays_negative{false};
};

/// First sampled t at which energy(W(., t)) < 0 and whether it stays negative
/// at every later sample.
EnergyCrossing first_negative_energy(const SeparatrixCandidate& c, const Grid1D& grid,
                                     const std::vector<double>& times);

enum class RateModel { Exponential, Power, PowerToBlowup };

struct RateFit {
  RateModel model{RateModel::Exponential};
  double exponent{0.0};
  double amplitude{0.0};
  double t_start{0.0};
  double t_end{0.0};
  double residual{0.0};
  std::size_t samples{0};
};

/**
 * Least squares on (t, log v) for Exponential, (log t, log v) for Power,
 * and (log(T - t), log v) for PowerToBlowup (T = blowup_time).
 */
RateFit fit_rate(const TimeSeries& series, RateModel model, double t_start, double t_end,
                 double blowup_time = 0.0);

/// inf and sup of u0 / base over the interior 90% of the grid.
struct DataRatio {
  double inf{0.0};
  double sup{0.0};
};
DataRatio data_ratio(const Profile& u0, const StationaryProfile& base);

struct FitWindow {
  double t_start{-1.0};  ///< negative: start of the second half of the run
  double t_end{-1.0};    ///< negative: end of the run
};

struct Classification {
  Outcome outcome;
  std::optional<RateFit> decay_fit;
  std::optional<BlowupEstimate> blowup_fit;
  EvolutionRecord record;
};

/// Runs evolve and attaches rate fits: exponential for q = 1 decay, power for
/// q > 1 decay, blow-up time and exponent for blow-up.
Classification classify(const Profile& u0, const ModelParams& params, const SolverConfig& cfg,
                        const FitWindow& window = {});

struct BisectionStep {
  std::size_t iter{0};
  double kappa_lo{0.0};
  double kappa_hi{0.0};
  double kappa{0.0};
  Outcome verdict;
};

struct BisectionResult {
  double threshold{0.0};
  double width{0.0};
  std::vector<BisectionStep> history;
};

/**
 * Bisection on the amplitude kappa of u0 = kappa base. Undetermined verdicts
 * are retried once with doubled t_max and then counted on the blow-up side.
 * Throws BadBracket unless kappa_lo decays and kappa_hi blows up.
 */
BisectionResult kappa_bisection(const StationaryProfile& base, const Grid1D& grid,
                                const ModelParams& params, const SolverConfig& cfg,
                                double kappa_lo, double kappa_hi, std::size_t iters);

}  // namespace fkpp
