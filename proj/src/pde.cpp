#include "fkpp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fkpp/detail/linear_fit.hpp"
#include "fkpp/error.hpp"

namespace fkpp {

namespace {

// x^e with fast paths for the small integer exponents used in practice.
class Power {
 public:
  explicit Power(double e) : e_(e), k_(std::round(e) == e && e >= 1 && e <= 5 ? int(e) : 0) {}

  double operator()(double x) const {
    switch (k_) {
      case 1: return x;
      case 2: return x * x;
      case 3: return x * x * x;
      case 4: { const double s = x * x; return s * s; }
      case 5: { const double s = x * x; return s * s * x; }
      default: return std::pow(x, e_);
    }
  }

 private:
  double e_;
  int k_;
};

double sup_of(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(theta >= 0.5 && theta <= 1.0)) fail("theta must lie in [0.5, 1]");
  if (!(dt0 > 0.0) || !std::isfinite(dt0)) fail("dt0 must be positive");
  if (!(sigma > 0.0 && sigma <= 1.0)) fail("sigma must lie in (0, 1]");
  if (!(decay_threshold > 0.0 && decay_threshold < 1.0)) fail("decay_threshold must lie in (0, 1)");
  if (!(blowup_threshold > 1.0) || !std::isfinite(blowup_threshold)) {
    fail("blowup_threshold must exceed 1");
  }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) fail("t_max must be positive");
  if (!(snapshot_interval > 0.0)) fail("snapshot_interval must be positive");
}

std::string_view outcome_name(const Outcome& o) {
  struct {
    std::string_view operator()(const outcome::BlowUp&) const { return "BlowUp"; }
    std::string_view operator()(const outcome::Decay&) const { return "Decay"; }
    std::string_view operator()(const outcome::Extinct&) const { return "Extinct"; }
    std::string_view operator()(const outcome::Undetermined&) const { return "Undetermined"; }
  } visitor;
  return std::visit(visitor, o);
}

TimeSeries EvolutionRecord::sup_series() const {
  TimeSeries s;
  for (const auto& d : diagnostics) s.push(d.t, d.sup_norm);
  return s;
}

TimeSeries EvolutionRecord::energy_series() const {
  TimeSeries s;
  for (const auto& d : diagnostics) s.push(d.t, d.energy);
  return s;
}

// ---------------------------------------------------------------------------

ImexStepper::ImexStepper(const Grid1D& grid, const ModelParams& params, double theta)
    : grid_(grid), params_(params), theta_(theta) {
  const std::size_t m = grid.size() - 2;
  lower_.resize(m);
  diag_.resize(m);
  upper_.resize(m);
  rhs_.resize(m);
  x_.resize(m);
}

double ImexStepper::step_size(double sup, double dt0, double sigma) const {
  return std::min(dt0, sigma / (1.0 + params_.p * std::pow(sup, params_.p - 1.0)));
}

void ImexStepper::advance(std::vector<double>& u, double dt) {
  const std::size_t n = grid_.size();
  const std::size_t m = n - 2;
  const double r = dt / (grid_.dx() * grid_.dx());
  const Power pw(params_.p), qw(params_.q);

  for (double& v : u) v = std::max(v, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double lap = u[i - 1] - 2.0 * u[i] + u[i + 1];
    rhs_[k] = u[i] + (1.0 - theta_) * r * lap + dt * (pw(u[i]) - qw(u[i]));
    lower_[k] = -theta_ * r;
    upper_[k] = -theta_ * r;
    diag_[k] = 1.0 + 2.0 * theta_ * r;
  }
  solver_.solve(lower_, diag_, upper_, rhs_, x_);
  u[0] = 0.0;
  u[n - 1] = 0.0;
  for (std::size_t k = 0; k < m; ++k) u[k + 1] = std::max(x_[k], 0.0);
}

double energy(const Profile& u, double p, double q) {
  const Grid1D& g = u.grid();
  const double dx = g.dx();
  const Power p1(p + 1.0), q1(q + 1.0);
  double grad = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double d = (u[i + 1] - u[i]) / dx;
    grad += d * d;
  }
  grad *= 0.5 * dx;
  std::vector<double> pot(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = std::max(u[i], 0.0);
    pot[i] = q1(v) / (q + 1.0) - p1(v) / (p + 1.0);
  }
  return grad + trapezoid(g, pot);
}

namespace {

DiagnosticSample diagnose(const Grid1D& grid, const std::vector<double>& u, double t,
                          const ModelParams& params) {
  const Profile prof(grid, u);
  const Norms nm = norms(prof);
  return {t, nm.sup, nm.l1, energy(prof, params.p, params.q)};
}

// Sup-norm nonincreasing over the last 20% of the elapsed time.
bool decay_trend(const std::vector<DiagnosticSample>& d) {
  const double t_end = d.back().t;
  const double t_start = 0.8 * t_end;
  double prev = -1.0;
  for (const auto& s : d) {
    if (s.t < t_start) continue;
    if (prev >= 0.0 && s.sup_norm > prev * (1.0 + 1e-12)) return false;
    prev = s.sup_norm;
  }
  return true;
}

void check_initial(const Profile& u0) {
  for (double v : u0.values()) {
    if (v < 0.0) throw Error(ErrorCode::NegativeInput, "initial data must be nonnegative");
  }
}

}  // namespace

EvolutionRecord evolve(const Profile& u0, const ModelParams& params, const SolverConfig& cfg) {
  cfg.validate();
  check_initial(u0);

  const Grid1D& grid = u0.grid();
  EvolutionRecord rec;
  rec.params = params;
  rec.config = cfg;

  std::vector<double> u(u0.values().begin(), u0.values().end());
  u.front() = 0.0;
  u.back() = 0.0;

  ImexStepper stepper(grid, params, cfg.theta);
  double t = 0.0;
  std::size_t next_snap = 1;
  const double snap_eps = 1e-9 * cfg.snapshot_interval;
  rec.diagnostics.push_back(diagnose(grid, u, t, params));
  rec.snapshots.push_back({t, Profile(grid, u)});

  const bool extinction_regime = params.q < 1.0;
  for (;;) {
    const double M = rec.diagnostics.back().sup_norm;
    if (M >= cfg.blowup_threshold && rec.diagnostics.size() < 2) {
      rec.outcome = outcome::BlowUp{t};
      break;
    }
    if (M >= cfg.blowup_threshold) {
      const auto& a = rec.diagnostics[rec.diagnostics.size() - 2];
      const auto& b = rec.diagnostics.back();
      const double za = std::pow(a.sup_norm, 1.0 - params.p);
      const double zb = std::pow(b.sup_norm, 1.0 - params.p);
      rec.outcome = outcome::BlowUp{b.t - zb * (b.t - a.t) / (zb - za)};
      break;
    }
    if (extinction_regime && M == 0.0) {
      rec.outcome = outcome::Extinct{t};
      break;
    }
    if (!extinction_regime && M <= cfg.decay_threshold && decay_trend(rec.diagnostics)) {
      rec.outcome = outcome::Decay{M};
      break;
    }
    if (t >= cfg.t_max) {
      rec.outcome = outcome::Undetermined{};
      break;
    }

    const double t_snap = static_cast<double>(next_snap) * cfg.snapshot_interval;
    const double target = std::min(t_snap, cfg.t_max);
    double dt = stepper.step_size(M, cfg.dt0, cfg.sigma);
    // Land exactly on the next output time instead of a round-off short of it.
    const bool lands = target - t <= dt + snap_eps;
    if (lands) dt = target - t;
    stepper.advance(u, dt);
    ++rec.steps;
    t = lands ? target : t + dt;

    for (double v : u) {
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite state at t=" << t << " below the blow-up threshold; reduce dt0 or sigma";
        throw Error(ErrorCode::NonFiniteState, os.str());
      }
    }
    rec.diagnostics.push_back(diagnose(grid, u, t, params));
    if (t == t_snap) {
      rec.snapshots.push_back({t, Profile(grid, u)});
      ++next_snap;
    }
  }
  if (rec.snapshots.back().t != t) rec.snapshots.push_back({t, Profile(grid, u)});
  return rec;
}

BlowupEstimate estimate_blowup_time(const EvolutionRecord& record, double p) {
  if (!std::holds_alternative<outcome::BlowUp>(record.outcome)) {
    throw Error(ErrorCode::InsufficientWindow, "record does not end in blow-up");
  }
  std::vector<double> t, z, w, logm;
  for (const auto& d : record.diagnostics) {
    if (d.sup_norm >= 10.0 && d.sup_norm <= record.config.blowup_threshold) {
      t.push_back(d.t);
      z.push_back(std::pow(d.sup_norm, 1.0 - p));
      w.push_back(1.0 / (z.back() * z.back()));
      logm.push_back(std::log(d.sup_norm));
    }
  }
  if (t.size() < 10) {
    throw Error(ErrorCode::InsufficientWindow,
                "fewer than 10 samples with sup-norm in [10, blow-up threshold]");
  }
  // Relative residuals, so the samples nearest T carry the fit.
  const auto line = detail::fit_line_weighted(t, z, w);
  BlowupEstimate est;
  est.T_est = -line.intercept / line.slope;
  est.samples = t.size();

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (est.T_est - t[i] > 0.0) {
      lx.push_back(std::log(est.T_est - t[i]));
      ly.push_back(logm[i]);
    }
  }
  if (lx.size() < 2) throw Error(ErrorCode::InsufficientWindow, "no samples before T_est");
  est.exponent = detail::fit_line(lx, ly).slope;
  return est;
}

double heat_kernel(double x, double t, double mass) {
  return mass * std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

TimeSeries heat_kernel_gap(const EvolutionRecord& record, double mass) {
  if (record.params.q != 1.0) {
    throw Error(ErrorCode::WrongRegime, "the heat-kernel gap applies to q = 1 only");
  }
  TimeSeries out;
  for (const auto& s : record.snapshots) {
    if (!(s.t > 0.0)) continue;
    const double e = std::exp(s.t);
    double gap = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      const double x = s.u.grid().x(i);
      gap = std::max(gap, std::abs(e * s.u[i] - heat_kernel(x, s.t, mass)));
    }
    out.push(s.t, std::sqrt(s.t) * gap);
  }
  return out;
}

double renormalized_mass(const EvolutionRecord& record) {
  const Snapshot& last = record.snapshots.back();
  return std::exp(last.t) * norms(last.u).l1;
}

ComparisonReport comparison_check(const Profile& u0, const Profile& v0, const ModelParams& params,
                                  const SolverConfig& cfg) {
  cfg.validate();
  check_initial(u0);
  check_initial(v0);
  if (!(u0.grid() == v0.grid())) {
    throw Error(ErrorCode::GridMismatch, "comparison requires a common grid");
  }
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (u0[i] > v0[i]) {
      std::ostringstream os;
      os << "u0 > v0 at x=" << u0.grid().x(i);
      throw Error(ErrorCode::NotOrdered, os.str());
    }
  }

  const Grid1D& grid = u0.grid();
  std::vector<double> u(u0.values().begin(), u0.values().end());
  std::vector<double> v(v0.values().begin(), v0.values().end());
  u.front() = u.back() = v.front() = v.back() = 0.0;
  ImexStepper su(grid, params, cfg.theta), sv(grid, params, cfg.theta);

  ComparisonReport rep;
  double t = 0.0;
  for (;;) {
    double viol = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) viol = std::max(viol, u[i] - v[i]);
    rep.max_violation = std::max(rep.max_violation, viol);

    const double mu = sup_of(u), mv = sup_of(v);
    const double M = std::max(mu, mv);
    if (M >= cfg.blowup_threshold || M <= cfg.decay_threshold || t >= cfg.t_max) break;
    for (double x : u) {
      if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteState, "non-finite state");
    }
    const double dt = std::min(su.step_size(M, cfg.dt0, cfg.sigma), cfg.t_max - t);
    su.advance(u, dt);
    sv.advance(v, dt);
    t += dt;
    ++rep.steps;
  }
  rep.t_end = t;
  rep.pass = rep.max_violation <= kComparisonTolerance;
  return rep;
}

}  // namespace fkpp
