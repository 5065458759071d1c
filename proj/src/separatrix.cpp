#include "fkpp/separatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fkpp/detail/linear_fit.hpp"
#include "fkpp/error.hpp"

namespace fkpp {

double exponent_ratio(double p, double q) { return 1.0 / (p - 1.0) + 1.0 / (q - 1.0); }

TailSupport tail_support(const StationaryProfile& base, double ratio) {
  const Grid1D& g = base.grid();
  const std::size_t c = g.center();
  auto r = [&](std::size_t i) {
    const double x = g.x(i);
    return -x * base.slope(x) / base.value(x);
  };
  std::size_t last = c;
  for (std::size_t i = c + 1; i < g.size(); ++i) {
    if (base.value(g.x(i)) <= 0.0) break;
    if (r(i) <= ratio) last = i;
  }
  if (last + 1 >= g.size()) {
    throw Error(ErrorCode::DomainTooSmall, "log-slope ratio never exceeds delta/gamma on the grid");
  }
  const double r0 = r(last), r1 = r(last + 1);
  const double x0 = g.x(last), x1 = g.x(last + 1);
  const double w = (r1 > r0) ? (ratio - r0) / (r1 - r0) : 0.0;
  TailSupport ts;
  ts.R0 = x0 + std::clamp(w, 0.0, 1.0) * (x1 - x0);
  ts.L0 = base.value(ts.R0);
  return ts;
}

namespace {

// Rejects a shift T that would overflow; otherwise raises delta to hit the cap.
void apply_time_cap(SeparatrixCandidate& c) {
  const double lk = std::abs(std::log(c.kappa));
  if (lk / c.delta > std::log(kMaxTimeShift)) {
    const double needed = lk / std::log(kMaxTimeShift);
    if (!(needed < c.delta_bound)) {
      std::ostringstream os;
      os << "kappa=" << c.kappa << " needs delta>=" << needed << " for T<=" << kMaxTimeShift
         << " but the bound is " << c.delta_bound;
      throw Error(ErrorCode::BoundCollapse, os.str());
    }
    c.delta = needed;
  }
  if (c.delta < kMinDelta) {
    std::ostringstream os;
    os << "delta=" << c.delta << " below " << kMinDelta << " (kappa=" << c.kappa
       << ", bound=" << c.delta_bound << ")";
    throw Error(ErrorCode::BoundCollapse, os.str());
  }
}

}  // namespace

SeparatrixCandidate build_candidate(Direction direction, double kappa,
                                    const StationaryProfile& base) {
  const bool sub = direction == Direction::Subsolution;
  if (sub ? !(kappa > 1.0) : !(kappa > 0.0 && kappa < 1.0)) {
    std::ostringstream os;
    os << "kappa=" << kappa << (sub ? " must exceed 1" : " must lie in (0, 1)");
    throw Error(ErrorCode::KappaOnWrongSide, os.str());
  }
  if (base.shift() != 0.0) {
    throw Error(ErrorCode::InvalidProfile, "candidates are built on the even profile only");
  }
  const double p = base.p(), q = base.q();
  SeparatrixCandidate c{direction, base.regime(), kappa, 0.0, 0.0, 1.0, 0.0, base, std::nullopt};

  if (base.regime() == StationaryRegime::QEqualsOne) {
    c.delta_bound = sub ? std::pow(kappa, 0.5 * (p - 1.0)) - 1.0 : 1.0 - std::pow(kappa, p - 1.0);
  } else {
    const double rho = exponent_ratio(p, q);
    const TailSupport ts = tail_support(base, rho);
    c.aux = ts;
    const double e = (p - 1.0) * (p - q) / (p + q - 2.0);
    const double floor_term = std::pow(ts.L0, p - 1.0);
    c.delta_bound = sub ? (std::pow(kappa, e) - 1.0) * floor_term
                        : std::min(0.5 * rho, (1.0 - std::pow(kappa, e)) * floor_term);
  }
  if (!(c.delta_bound > 0.0)) {
    throw Error(ErrorCode::BoundCollapse, "admissible delta interval is empty");
  }
  c.delta = 0.5 * c.delta_bound;
  apply_time_cap(c);

  if (base.regime() == StationaryRegime::QEqualsOne) {
    c.gamma = sub ? c.delta * (p - 1.0) / 4.0 : c.delta * (p - 1.0) / 2.0;
  } else {
    c.gamma = c.delta / exponent_ratio(p, q);
  }
  c.T = std::pow(kappa, (sub ? 1.0 : -1.0) / c.delta);
  return c;
}

double evaluate_candidate(const SeparatrixCandidate& c, double x, double t) {
  const double tau = c.T + t;
  const double s = c.sign();
  return std::pow(tau, s * c.delta) * c.base.value(std::pow(tau, s * c.gamma) * x);
}

Profile sample_candidate(const SeparatrixCandidate& c, const Grid1D& grid, double t) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = evaluate_candidate(c, grid.x(i), t);
  return Profile(grid, std::move(v));
}

double ResidualTerms::scale() const {
  return std::max({std::abs(time_term), std::abs(p_term), std::abs(q_term)});
}

ResidualTerms candidate_residual(const SeparatrixCandidate& c, double x, double t) {
  const double p = c.p(), q = c.q();
  const double s = c.sign();
  const double tau = c.T + t;
  const double zeta = std::pow(tau, s * c.gamma) * x;
  const double psi = c.base.value(zeta);
  const double dpsi = c.base.slope(zeta);

  ResidualTerms r;
  r.time_term = s * std::pow(tau, s * c.delta - 1.0) * (c.delta * psi + c.gamma * zeta * dpsi);
  r.p_term = std::pow(tau, s * (c.delta + 2.0 * c.gamma)) *
             (1.0 - std::pow(tau, s * (c.delta * (p - 1.0) - 2.0 * c.gamma))) * std::pow(psi, p);
  r.q_term = std::pow(tau, s * q * c.delta) *
             (1.0 - std::pow(tau, s * (2.0 * c.gamma - c.delta * (q - 1.0)))) * std::pow(psi, q);
  return r;
}

ResidualReport residual_sign_check(const SeparatrixCandidate& c, const LatticeSpec& lattice) {
  if (lattice.nx < 2 || lattice.nt < 2) {
    throw Error(ErrorCode::InvalidConfig, "lattice needs at least two points per axis");
  }
  const double s = c.sign();
  ResidualReport rep;
  rep.pass = true;
  rep.worst_relative = -std::numeric_limits<double>::infinity();
  rep.samples.reserve(lattice.nx * lattice.nt);
  for (std::size_t j = 0; j < lattice.nt; ++j) {
    const double t = lattice.t_max * static_cast<double>(j) / static_cast<double>(lattice.nt - 1);
    const double zoom = std::pow(c.T + t, s * c.gamma);
    for (std::size_t i = 0; i < lattice.nx; ++i) {
      const double x = -lattice.x_max + 2.0 * lattice.x_max * static_cast<double>(i) /
                                            static_cast<double>(lattice.nx - 1);
      if (!c.base.covers(zoom * x)) {
        std::ostringstream os;
        os << "zeta=" << zoom * x << " at (x,t)=(" << x << "," << t
           << ") lies outside the computed profile";
        throw Error(ErrorCode::SampleOutsideProfile, os.str());
      }
      const ResidualTerms r = candidate_residual(c, x, t);
      // Positive means the inequality is violated in the candidate's direction.
      const double signed_n = s * r.total();
      const double scale = r.scale();
      if (signed_n > kResidualTolerance * scale) rep.pass = false;
      if (scale > 0.0) rep.worst_relative = std::max(rep.worst_relative, signed_n / scale);
      rep.max_abs_p_term = std::max(rep.max_abs_p_term, std::abs(r.p_term));
      rep.samples.push_back({x, t, r});
    }
  }
  if (!std::isfinite(rep.worst_relative)) rep.worst_relative = 0.0;
  return rep;
}

double candidate_energy(const SeparatrixCandidate& c, const Grid1D& grid, double t) {
  return energy(sample_candidate(c, grid, t), c.p(), c.q());
}

double candidate_energy_scaling(const SeparatrixCandidate& c, double t) {
  const double p = c.p(), q = c.q();
  const Profile& psi = c.base.profile();
  const Profile& dpsi = c.base.derivative();
  const Grid1D& g = psi.grid();
  std::vector<double> f1(g.size()), fq(g.size()), fp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    f1[i] = dpsi[i] * dpsi[i];
    fq[i] = std::pow(psi[i], q + 1.0);
    fp[i] = std::pow(psi[i], p + 1.0);
  }
  const double tau = c.T + t;
  const double s = c.sign();
  const double d = c.delta, gm = c.gamma;
  return 0.5 * std::pow(tau, s * (2.0 * d + gm)) * trapezoid(g, f1) +
         std::pow(tau, s * (d * (q + 1.0) - gm)) / (q + 1.0) * trapezoid(g, fq) -
         std::pow(tau, s * (d * (p + 1.0) - gm)) / (p + 1.0) * trapezoid(g, fp);
}

EnergyCrossing first_negative_energy(const SeparatrixCandidate& c, const Grid1D& grid,
                                     const std::vector<double>& times) {
  EnergyCrossing out;
  for (double t : times) {
    const double e = candidate_energy(c, grid, t);
    if (!out.found) {
      if (e < 0.0) {
        out.found = true;
        out.t = t;
        out.energy = e;
        out.stays_negative = true;
      }
    } else if (!(e < 0.0)) {
      out.stays_negative = false;
    }
  }
  return out;
}

RateFit fit_rate(const TimeSeries& series, RateModel model, double t_start, double t_end,
                 double blowup_time) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.t[i], v = series.v[i];
    if (t < t_start || t > t_end) continue;
    if (!(v > 0.0)) continue;
    double x = 0.0;
    switch (model) {
      case RateModel::Exponential:
        x = t;
        break;
      case RateModel::Power:
        if (!(t > 0.0)) continue;
        x = std::log(t);
        break;
      case RateModel::PowerToBlowup:
        if (!(blowup_time - t > 0.0)) continue;
        x = std::log(blowup_time - t);
        break;
    }
    xs.push_back(x);
    ys.push_back(std::log(v));
  }
  if (xs.size() < 10) {
    std::ostringstream os;
    os << xs.size() << " usable samples in [" << t_start << ", " << t_end << "], need 10";
    throw Error(ErrorCode::InsufficientWindow, os.str());
  }
  const auto f = detail::fit_line(xs, ys);
  RateFit r;
  r.model = model;
  r.exponent = f.slope;
  r.amplitude = std::exp(f.intercept);
  r.t_start = t_start;
  r.t_end = t_end;
  r.residual = f.rms;
  r.samples = xs.size();
  return r;
}

DataRatio data_ratio(const Profile& u0, const StationaryProfile& base) {
  const Grid1D& g = u0.grid();
  const double reach = 0.9 * g.half_width();
  DataRatio r{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    if (std::abs(x) > reach) continue;
    const double b = base.value(x);
    if (!(b > 0.0)) continue;
    const double k = u0[i] / b;
    r.inf = std::min(r.inf, k);
    r.sup = std::max(r.sup, k);
  }
  if (!std::isfinite(r.inf)) r.inf = 0.0;
  return r;
}

Classification classify(const Profile& u0, const ModelParams& params, const SolverConfig& cfg,
                        const FitWindow& window) {
  Classification out{outcome::Undetermined{}, std::nullopt, std::nullopt,
                     evolve(u0, params, cfg)};
  out.outcome = out.record.outcome;
  const double t_end_run = out.record.diagnostics.back().t;
  const double t0 = window.t_start >= 0.0 ? window.t_start : 0.5 * t_end_run;
  const double t1 = window.t_end >= 0.0 ? window.t_end : t_end_run;

  if (std::holds_alternative<outcome::Decay>(out.outcome)) {
    const RateModel m = params.q == 1.0 ? RateModel::Exponential : RateModel::Power;
    try {
      out.decay_fit = fit_rate(out.record.sup_series(), m, t0, t1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientWindow) throw;
    }
  } else if (std::holds_alternative<outcome::BlowUp>(out.outcome)) {
    try {
      out.blowup_fit = estimate_blowup_time(out.record, params.p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientWindow) throw;
    }
  }
  return out;
}

namespace {

enum class Side { Decay, BlowUp };

Side verdict_side(const Outcome& o) {
  return std::holds_alternative<outcome::Decay>(o) || std::holds_alternative<outcome::Extinct>(o)
             ? Side::Decay
             : Side::BlowUp;
}

Outcome run_amplitude(const Profile& base, double kappa, const ModelParams& params,
                      const SolverConfig& cfg) {
  Outcome o = evolve(base.scaled(kappa), params, cfg).outcome;
  if (std::holds_alternative<outcome::Undetermined>(o)) {
    SolverConfig longer = cfg;
    longer.t_max *= 2.0;
    o = evolve(base.scaled(kappa), params, longer).outcome;
  }
  return o;
}

}  // namespace

BisectionResult kappa_bisection(const StationaryProfile& base, const Grid1D& grid,
                                const ModelParams& params, const SolverConfig& cfg,
                                double kappa_lo, double kappa_hi, std::size_t iters) {
  if (!(kappa_lo > 0.0 && kappa_lo < kappa_hi)) {
    throw Error(ErrorCode::BadBracket, "need 0 < kappa_lo < kappa_hi");
  }
  const Profile sampled = base.sample_on(grid);
  const Outcome lo = run_amplitude(sampled, kappa_lo, params, cfg);
  const Outcome hi = run_amplitude(sampled, kappa_hi, params, cfg);
  if (verdict_side(lo) != Side::Decay || !std::holds_alternative<outcome::BlowUp>(hi)) {
    std::ostringstream os;
    os << "kappa_lo=" << kappa_lo << " gives " << outcome_name(lo) << ", kappa_hi=" << kappa_hi
       << " gives " << outcome_name(hi);
    throw Error(ErrorCode::BadBracket, os.str());
  }

  BisectionResult res;
  for (std::size_t k = 0; k < iters; ++k) {
    const double mid = 0.5 * (kappa_lo + kappa_hi);
    const Outcome o = run_amplitude(sampled, mid, params, cfg);
    res.history.push_back({k, kappa_lo, kappa_hi, mid, o});
    if (verdict_side(o) == Side::Decay) {
      kappa_lo = mid;
    } else {
      kappa_hi = mid;
    }
  }
  res.threshold = 0.5 * (kappa_lo + kappa_hi);
  res.width = kappa_hi - kappa_lo;
  return res;
}

}  // namespace fkpp
