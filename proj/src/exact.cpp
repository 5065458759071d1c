#include "fkpp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "fkpp/error.hpp"

namespace fkpp {

double time_solution_q1(double C, double p, double t) {
  const double base = 1.0 + C * std::exp((p - 1.0) * t);
  if (!(base > 0.0)) {
    std::ostringstream os;
    os << "1 + C e^{(p-1)t} = " << base << " <= 0 at t=" << t;
    throw Error(ErrorCode::EvaluatedAtOrPastBlowup, os.str());
  }
  return std::pow(base, -1.0 / (p - 1.0));
}

double blowup_time_q1(double C, double p) {
  if (!(C < 0.0)) throw Error(ErrorCode::NoBlowup, "solutions with C >= 0 are global");
  return std::log(-1.0 / C) / (p - 1.0);
}

// ---------------------------------------------------------------------------
// Time ODE
// ---------------------------------------------------------------------------

namespace {

using Rhs = std::function<double(double)>;

double rk4(const Rhs& f, double y, double h) {
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * h * k1);
  const double k3 = f(y + 0.5 * h * k2);
  const double k4 = f(y + h * k3);
  return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

struct StepResult {
  bool accepted{false};
  double y{0.0};
  double next_h{0.0};
};

// Step doubling: one full step against two half steps, with the Richardson
// combination as the propagated value.
StepResult attempt(const Rhs& f, double y, double h, const OdeOptions& opt) {
  const double full = rk4(f, y, h);
  const double half = rk4(f, rk4(f, y, 0.5 * h), 0.5 * h);
  const double err = std::abs(half - full) / 15.0;
  const double tol = opt.abs_tol + opt.rel_tol * std::abs(half);
  StepResult r;
  if (!std::isfinite(full) || !std::isfinite(half)) {
    r.next_h = 0.25 * h;
    return r;
  }
  const double ratio = err > 0.0 ? tol / err : 1e6;
  r.next_h = h * std::clamp(0.9 * std::pow(ratio, 0.2), 0.2, 4.0);
  r.accepted = err <= tol;
  r.y = half + (half - full) / 15.0;
  return r;
}

void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

}  // namespace

TimeTrajectory integrate_time_ode(double h0, double p, double q, double t_max,
                                  const OdeOptions& opt) {
  require(std::isfinite(h0) && h0 > 0.0 && h0 != 1.0, ErrorCode::InvalidInitial,
          "h0 must be positive and different from the constant solution 1");
  require(p > q && q > 0.0 && p > 1.0, ErrorCode::ExponentOrderViolation,
          "require p > q > 0 and p > 1");
  require(t_max > 0.0, ErrorCode::InvalidInitial, "horizon must be positive");

  TimeTrajectory tr;
  tr.times.push_back(0.0);
  tr.values.push_back(h0);

  const bool growing = h0 > 1.0;
  const bool extinction_variable = !growing && q < 1.0;
  constexpr double kMinStep = 1e-300;

  if (extinction_variable) {
    // z = h^{1-q}; z' = -(1-q)(1 - z^r), r = (p-q)/(1-q).
    const double a = 1.0 - q;
    const double r = (p - q) / a;
    const Rhs f = [a, r](double z) { return -a * (1.0 - std::pow(std::max(z, 0.0), r)); };
    double z = std::pow(h0, a);
    const double z_stop = 1e-12 * z;
    double t = 0.0;
    double h = opt.initial_step;
    while (t < t_max) {
      if (z <= z_stop) {
        tr.event = {EventKind::Extinct, t + z / -f(z)};
        return tr;
      }
      // Never cover more than half of the remaining distance to z = 0.
      const double step = std::min({h, opt.max_step, t_max - t, 0.5 * z / -f(z)});
      const StepResult s = attempt(f, z, step, opt);
      if (!s.accepted || !(s.y < z) || !(s.y > 0.0)) {
        h = std::min(s.next_h, 0.5 * step);
        require(h > kMinStep, ErrorCode::NonFiniteState, "step size underflow");
        continue;
      }
      t += step;
      z = s.y;
      h = s.next_h;
      tr.times.push_back(t);
      tr.values.push_back(std::pow(z, 1.0 / a));
    }
    return tr;
  }

  const Rhs f = [p, q](double y) { return std::pow(y, p) - std::pow(y, q); };
  double y = h0;
  double t = 0.0;
  double h = opt.initial_step;
  while (t < t_max) {
    const double step = std::min({h, opt.max_step, t_max - t});
    const StepResult s = attempt(f, y, step, opt);
    const bool monotone = growing ? s.y > y : (s.y < y && s.y > 0.0);
    if (!s.accepted || !monotone) {
      h = std::min(s.next_h, 0.5 * step);
      require(h > kMinStep, ErrorCode::NonFiniteState, "step size underflow");
      continue;
    }
    t += step;
    y = s.y;
    h = s.next_h;
    tr.times.push_back(t);
    tr.values.push_back(y);
    if (growing && y > opt.blowup_level) {
      // (h^{1-p})' = -(p-1)(1 - h^{q-p}); extrapolate to zero.
      const double z = std::pow(y, 1.0 - p);
      const double rate = (p - 1.0) * (1.0 - std::pow(y, q - p));
      tr.event = {EventKind::BlowUp, t + z / rate};
      return tr;
    }
  }
  return tr;
}

BracketReport bracket_check(const TimeTrajectory& tr, double p, double q, double h0) {
  BracketReport rep;
  std::function<std::pair<double, double>(double)> bounds;
  bool need_event = false;
  bool skip_initial = false;

  if (h0 > 1.0) {
    rep.kind = BracketKind::BlowUp;
    need_event = true;
    const double e = -1.0 / (p - 1.0);
    const double lo_c = std::pow(p - 1.0, e);
    const double hi_c = std::pow((p - 1.0) * (1.0 - std::pow(h0, q - p)), e);
    const double T = tr.event.time;
    bounds = [=](double t) {
      const double s = std::pow(T - t, e);
      return std::make_pair(lo_c * s, hi_c * s);
    };
  } else if (h0 < 1.0 && q > 1.0) {
    rep.kind = BracketKind::Decay;
    skip_initial = true;
    const double e = -1.0 / (q - 1.0);
    const double z0 = std::pow(h0, 1.0 - q);
    const double slow = (q - 1.0) * (1.0 - std::pow(h0, p - q));
    bounds = [=](double t) {
      return std::make_pair(std::pow((q - 1.0) * t + z0, e), std::pow(slow * t + z0, e));
    };
  } else if (h0 < 1.0 && q < 1.0) {
    rep.kind = BracketKind::Extinction;
    need_event = true;
    const double e = 1.0 / (1.0 - q);
    const double lo_c = std::pow((1.0 - q) * (1.0 - std::pow(h0, p - q)), e);
    const double hi_c = std::pow(1.0 - q, e);
    const double T = tr.event.time;
    bounds = [=](double t) {
      const double s = std::pow(T - t, e);
      return std::make_pair(lo_c * s, hi_c * s);
    };
  } else {
    throw Error(ErrorCode::RegimeViolation,
                "no rate bracket for h0 < 1 with q = 1 (the closed form applies instead)");
  }

  if (need_event) {
    const EventKind wanted = rep.kind == BracketKind::BlowUp ? EventKind::BlowUp
                                                              : EventKind::Extinct;
    if (tr.event.kind != wanted) {
      throw Error(ErrorCode::MissingEvent, "trajectory ends without the event the bracket needs");
    }
  }

  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double T = tr.event.time;
  const double resolvable = 1e-6 * std::max(std::abs(T), 1.0);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i];
    if (skip_initial && t == 0.0) continue;
    if (need_event && !(T - t > resolvable)) {
      ++rep.skipped;
      continue;
    }
    const double h = tr.values[i];
    const auto [lo, hi] = bounds(t);
    const double margin = std::min((h - lo) / h, (hi - h) / h);
    ++rep.checked;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_time = t;
    }
  }
  rep.pass = rep.checked > 0 && rep.worst_margin > -kBracketSlack;
  return rep;
}

// ---------------------------------------------------------------------------
// Stationary profiles
// ---------------------------------------------------------------------------

StationaryProfile::StationaryProfile(StationaryRegime regime, double p, double q, double shift,
                                     double peak, Profile values, Profile derivative)
    : regime_(regime),
      p_(p),
      q_(q),
      shift_(shift),
      peak_(peak),
      values_(std::move(values)),
      derivative_(std::move(derivative)) {
  if (!(values_.grid() == derivative_.grid())) {
    throw Error(ErrorCode::GridMismatch, "profile and derivative grids differ");
  }
}

bool StationaryProfile::covers(double x) const {
  return regime_ == StationaryRegime::QEqualsOne || std::abs(x) <= grid().half_width();
}

double StationaryProfile::value(double x) const {
  if (regime_ == StationaryRegime::QEqualsOne) return stationary_q1_value(shift_, p_, x);

  const Grid1D& g = grid();
  const double ax = std::abs(x);
  const double L = g.half_width();
  if (ax >= L) {
    // Algebraic tail matched at the last node.
    return values_[g.size() - 1] * std::pow(L / ax, 2.0 / (q_ - 1.0));
  }
  // Cubic Hermite on the x >= 0 half, using node values and slopes.
  const double s = ax / g.dx();
  const auto k = std::min(static_cast<std::size_t>(s), g.center() - 1);
  const std::size_t i = g.center() + k;
  const double h = g.dx();
  const double w = s - static_cast<double>(k);
  const double w2 = w * w;
  const double w3 = w2 * w;
  const double h00 = 2.0 * w3 - 3.0 * w2 + 1.0;
  const double h10 = w3 - 2.0 * w2 + w;
  const double h01 = -2.0 * w3 + 3.0 * w2;
  const double h11 = w3 - w2;
  const double v = h00 * values_[i] + h10 * h * derivative_[i] + h01 * values_[i + 1] +
                   h11 * h * derivative_[i + 1];
  // Keep the interpolant within the (monotone) node bracket.
  return std::clamp(v, values_[i + 1], values_[i]);
}

double StationaryProfile::slope(double x) const {
  if (regime_ == StationaryRegime::QEqualsOne) return stationary_q1_slope(shift_, p_, x);
  if (x == 0.0) return 0.0;
  const double r = std::max(first_integral_radicand(value(x), p_, q_), 0.0);
  return x > 0.0 ? -std::sqrt(r) : std::sqrt(r);
}

Profile StationaryProfile::sample_on(const Grid1D& grid) const {
  if (grid == this->grid()) return values_;
  return Profile::sample(grid, [this](double x) { return value(x); });
}

namespace {

// sech^2 without overflow for large |theta|.
double sech2(double theta) {
  const double e = std::exp(-2.0 * std::abs(theta));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

double stationary_q1_value(double C, double p, double x) {
  const double theta = C + 0.5 * (p - 1.0) * x;
  return std::pow(0.5 * (p + 1.0) * sech2(theta), 1.0 / (p - 1.0));
}

double stationary_q1_slope(double C, double p, double x) {
  const double theta = C + 0.5 * (p - 1.0) * x;
  return -std::tanh(theta) * stationary_q1_value(C, p, x);
}

StationaryProfile stationary_q1(double C, double p, const Grid1D& grid) {
  if (!(p > 1.0)) throw Error(ErrorCode::ExponentOrderViolation, "require p > 1");
  const std::size_t n = grid.size();
  std::vector<double> v(n), d(n);
  if (C == 0.0) {
    const std::size_t c = grid.center();
    for (std::size_t k = 0; k <= c; ++k) {
      const double x = grid.x(c + k);
      v[c + k] = v[c - k] = stationary_q1_value(0.0, p, x);
      d[c + k] = stationary_q1_slope(0.0, p, x);
      d[c - k] = -d[c + k];
    }
    d[c] = 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = stationary_q1_value(C, p, grid.x(i));
      d[i] = stationary_q1_slope(C, p, grid.x(i));
    }
  }
  const double peak = stationary_q1_value(C, p, 0.0);
  return StationaryProfile(StationaryRegime::QEqualsOne, p, 1.0, C, peak,
                           Profile(grid, std::move(v)), Profile(grid, std::move(d)));
}

double stationary_peak_qgt1(double p, double q) {
  if (!(q > 1.0 && q < p)) {
    throw Error(ErrorCode::RegimeViolation, "stationary peak formula requires 1 < q < p");
  }
  return std::pow((p + 1.0) / (q + 1.0), 1.0 / (p - q));
}

double first_integral_radicand(double psi, double p, double q) {
  return 2.0 * std::pow(psi, q + 1.0) / (q + 1.0) - 2.0 * std::pow(psi, p + 1.0) / (p + 1.0);
}

namespace {

// One RK4 substep of psi' = -sqrt(R(psi)); returns false on a negative radicand.
bool profile_rk4(double p, double q, double scale, double& psi, double h) {
  auto f = [&](double y, double& out) {
    double r = first_integral_radicand(y, p, q);
    if (r < 0.0) {
      if (r < -1e-14 * scale) return false;
      r = 0.0;
    }
    out = -std::sqrt(r);
    return true;
  };
  double k1, k2, k3, k4;
  if (!f(psi, k1) || !f(psi + 0.5 * h * k1, k2) || !f(psi + 0.5 * h * k2, k3) ||
      !f(psi + h * k3, k4)) {
    return false;
  }
  psi += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  return psi > 0.0;
}

// Advances psi across [x0, x0 + len], refining the substep on failure.
double advance_profile(double p, double q, double scale, double psi, double len) {
  for (int substeps = 8; substeps <= (8 << 12); substeps *= 2) {
    double y = psi;
    const double h = len / substeps;
    bool ok = true;
    for (int s = 0; s < substeps && ok; ++s) ok = profile_rk4(p, q, scale, y, h);
    if (ok) return y;
  }
  throw Error(ErrorCode::NegativeRadicand,
              "first-integral radicand went negative; reduce the grid spacing");
}

}  // namespace

StationaryProfile compute_stationary_qgt1(double p, double q, const Grid1D& grid) {
  const double peak = stationary_peak_qgt1(p, q);
  const std::size_t n = grid.size();
  const std::size_t c = grid.center();
  const double dx = grid.dx();
  const double scale = std::pow(peak, q + 1.0);

  std::vector<double> v(n), d(n);
  v[c] = peak;
  d[c] = 0.0;

  // Second-order Taylor start: psi'' = psi^q - psi^p at the peak.
  const double x0 = 0.25 * dx;
  double psi = peak + 0.5 * (std::pow(peak, q) - std::pow(peak, p)) * x0 * x0;
  psi = advance_profile(p, q, scale, psi, grid.x(c + 1) - x0);
  for (std::size_t k = 1; k <= c; ++k) {
    if (k > 1) psi = advance_profile(p, q, scale, psi, grid.x(c + k) - grid.x(c + k - 1));
    v[c + k] = v[c - k] = psi;
    const double slope = -std::sqrt(std::max(first_integral_radicand(psi, p, q), 0.0));
    d[c + k] = slope;
    d[c - k] = -slope;
  }
  return StationaryProfile(StationaryRegime::QGreaterThanOne, p, q, 0.0, peak,
                           Profile(grid, std::move(v)), Profile(grid, std::move(d)));
}

AsymptoticConstants asymptotic_constants_q1(double C, double p) {
  return {std::pow(2.0 * (p + 1.0), 1.0 / (p - 1.0)) * std::exp(2.0 * C / (p - 1.0)), -1.0};
}

AsymptoticConstants asymptotic_constants_qgt1(double q) {
  if (!(q > 1.0)) throw Error(ErrorCode::RegimeViolation, "algebraic tail requires q > 1");
  const double e = 2.0 / (q - 1.0);
  return {std::pow(e * std::sqrt(0.5 * (q + 1.0)), e), -e};
}

AsymptoticConstants asymptotic_constants(const StationaryProfile& sp) {
  return sp.regime() == StationaryRegime::QEqualsOne ? asymptotic_constants_q1(sp.shift(), sp.p())
                                                     : asymptotic_constants_qgt1(sp.q());
}

double tail_amplitude_at(const StationaryProfile& sp, double x) {
  const double v = sp.value(x);
  if (sp.regime() == StationaryRegime::QEqualsOne) return std::exp(std::abs(x)) * v;
  return std::pow(std::abs(x), 2.0 / (sp.q() - 1.0)) * v;
}

double log_slope_at(const StationaryProfile& sp, double x) {
  return x * sp.slope(x) / sp.value(x);
}

AsymptoticsReport verify_profile_asymptotics(const StationaryProfile& sp,
                                             const AsymptoticConstants& ac, double tolerance) {
  const Grid1D& g = sp.grid();
  const std::size_t n = g.size();
  const double L = g.half_width();
  if (!(std::max(sp.value(L), sp.value(-L)) < kTailLevel * sp.peak())) {
    std::ostringstream os;
    os << "profile at |x|=L=" << L << " is not below " << kTailLevel << " of the peak";
    throw Error(ErrorCode::DomainTooSmall, os.str());
  }

  AsymptoticsReport rep;
  rep.tolerance = tolerance;
  const std::size_t half = g.center();
  const std::size_t window = std::max<std::size_t>(1, half / 10);
  rep.x_start = g.x(n - window);

  auto relerr = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  const bool q1 = sp.regime() == StationaryRegime::QEqualsOne;
  for (std::size_t k = 0; k < window; ++k) {
    const double x = g.x(n - 1 - k);
    double amp = 0.0;
    double slope = 0.0;
    if (q1) {
      // g'/g -> -1 on the right; e^{|x|} g -> K(-C,p) on the right, K(C,p) on the left.
      const AsymptoticConstants right = asymptotic_constants_q1(-sp.shift(), sp.p());
      amp = std::max(relerr(tail_amplitude_at(sp, x), right.tail_amplitude),
                     relerr(tail_amplitude_at(sp, -x), ac.tail_amplitude));
      slope = std::max(relerr(sp.slope(x) / sp.value(x), ac.log_slope_limit),
                       relerr(sp.slope(-x) / sp.value(-x), -ac.log_slope_limit));
    } else {
      amp = relerr(tail_amplitude_at(sp, x), ac.tail_amplitude);
      slope = relerr(log_slope_at(sp, x), ac.log_slope_limit);
    }
    rep.worst_amplitude_error = std::max(rep.worst_amplitude_error, amp);
    rep.worst_slope_error = std::max(rep.worst_slope_error, slope);
    ++rep.checked;
  }
  rep.pass = rep.worst_amplitude_error <= tolerance && rep.worst_slope_error <= tolerance;
  return rep;
}

}  // namespace fkpp
