#include "fkpp/cli.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "fkpp/exact.hpp"
#include "fkpp/pde.hpp"
#include "fkpp/separatrix.hpp"
#include "json.hpp"

namespace fkpp::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 8> kSubcommands{
    "stationary", "time-ode", "evolve", "classify", "bisect", "verify-candidate", "gap", "rescale"};

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) os_ << ',';
      os_ << format_number(v);
      first = false;
    }
    os_ << '\n';
  }

  // For rows carrying one text field at the end.
  void row(std::initializer_list<double> values, std::string_view tail) {
    for (double v : values) os_ << format_number(v) << ',';
    os_ << tail << '\n';
  }

  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ModelParams normalized_model(const ExperimentConfig& cfg) {
  const ModelParams m = cfg.model();
  if (!m.normalized()) {
    throw Error(ErrorCode::InvalidConfig,
                "this subcommand works on the normalized equation (A = B = K = 1); "
                "use 'rescale' to obtain the scales");
  }
  return m;
}

StationaryProfile base_profile(const ExperimentConfig& cfg, const ModelParams& m,
                               const Grid1D& grid) {
  if (m.q == 1.0) return stationary_q1(cfg.number_or("experiment", "C", 0.0), m.p, grid);
  if (m.q < 1.0) {
    throw Error(ErrorCode::RegimeViolation, "no stationary profile for q < 1");
  }
  return compute_stationary_qgt1(m.p, m.q, grid);
}

Json outcome_json(const Outcome& o) {
  Json j;
  j["variant"] = std::string(outcome_name(o));
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, outcome::BlowUp>) j["T_est"] = v.T_est;
        if constexpr (std::is_same_v<V, outcome::Decay>) j["final_sup"] = v.final_sup;
        if constexpr (std::is_same_v<V, outcome::Extinct>) j["T_e"] = v.T_e;
      },
      o);
  return j;
}

Json solver_json(const SolverConfig& c) {
  return Json{{"theta", c.theta},
              {"dt0", c.dt0},
              {"sigma", c.sigma},
              {"blowup_threshold", c.blowup_threshold},
              {"decay_threshold", c.decay_threshold},
              {"t_max", c.t_max},
              {"snapshot_interval", c.snapshot_interval}};
}

std::string_view rate_model_name(RateModel m) {
  switch (m) {
    case RateModel::Exponential: return "exponential";
    case RateModel::Power: return "power";
    case RateModel::PowerToBlowup: return "power_to_blowup";
  }
  return "?";
}

std::string_view event_name(EventKind k) {
  switch (k) {
    case EventKind::None: return "None";
    case EventKind::BlowUp: return "BlowUp";
    case EventKind::Extinct: return "Extinct";
  }
  return "?";
}

std::string_view bracket_name(BracketKind k) {
  switch (k) {
    case BracketKind::BlowUp: return "blowup";
    case BracketKind::Decay: return "decay";
    case BracketKind::Extinction: return "extinction";
  }
  return "?";
}

std::string diagnostics_csv(const EvolutionRecord& rec) {
  Csv csv{"t", "sup_norm", "mass", "energy"};
  for (const auto& d : rec.diagnostics) csv.row({d.t, d.sup_norm, d.mass, d.energy});
  return csv.str();
}

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", i);
  return buf;
}

// --- subcommands -----------------------------------------------------------

RunResult cmd_stationary(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  const Grid1D grid = cfg.grid();
  const StationaryProfile sp = base_profile(cfg, m, grid);
  const AsymptoticConstants ac = asymptotic_constants(sp);
  const AsymptoticsReport rep =
      verify_profile_asymptotics(sp, ac, cfg.number_or("experiment", "tolerance", 0.05));

  Csv csv{"x", "value", "derivative"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv.row({grid.x(i), sp.profile()[i], sp.derivative()[i]});
  }
  Json j{{"p", m.p},
         {"q", m.q},
         {"C", sp.shift()},
         {"peak", sp.peak()},
         {"tail_amplitude", ac.tail_amplitude},
         {"log_slope_limit", ac.log_slope_limit},
         {"pass", rep.pass},
         {"tolerance", rep.tolerance},
         {"checked", rep.checked},
         {"worst_amplitude_error", rep.worst_amplitude_error},
         {"worst_slope_error", rep.worst_slope_error},
         {"x_start", rep.x_start}};
  RunResult r;
  r.status = rep.pass ? kExitOk : kExitFailedCheck;
  r.files = {{"profile.csv", csv.str()}, {"asymptotics.json", dump(j)}};
  r.summary = std::string("asymptotics ") + (rep.pass ? "pass" : "FAIL");
  return r;
}

RunResult cmd_time_ode(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  const double h0 = cfg.number("experiment", "h0");
  const double t_end = cfg.number("experiment", "t_end");
  const TimeTrajectory tr = integrate_time_ode(h0, m.p, m.q, t_end);

  Csv csv{"t", "h"};
  for (std::size_t i = 0; i < tr.times.size(); ++i) csv.row({tr.times[i], tr.values[i]});

  Json j;
  j["h0"] = h0;
  j["event"] = Json{{"kind", std::string(event_name(tr.event.kind))}, {"time", tr.event.time}};
  bool pass = true;
  try {
    const BracketReport b = bracket_check(tr, m.p, m.q, h0);
    pass = b.pass;
    j["bracket"] = Json{{"kind", std::string(bracket_name(b.kind))},
                        {"pass", b.pass},
                        {"worst_margin", b.worst_margin},
                        {"worst_time", b.worst_time},
                        {"checked", b.checked},
                        {"skipped", b.skipped}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RegimeViolation) throw;
    j["bracket"] = nullptr;
  }
  RunResult r;
  r.status = pass ? kExitOk : kExitFailedCheck;
  r.files = {{"trajectory.csv", csv.str()}, {"bracket.json", dump(j)}};
  r.summary = std::string("event ") + std::string(event_name(tr.event.kind)) +
              (pass ? ", bracket pass" : ", bracket FAIL");
  return r;
}

RunResult cmd_evolve(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  const Grid1D grid = cfg.grid();
  const SolverConfig solver = cfg.solver();
  const double kappa = cfg.number_or("experiment", "kappa", 1.0);
  const StationaryProfile sp = base_profile(cfg, m, grid);
  const EvolutionRecord rec = evolve(sp.profile().scaled(kappa), m, solver);

  RunResult r;
  r.files.push_back({"diagnostics.csv", diagnostics_csv(rec)});
  Json snaps = Json::array();
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    const Snapshot& s = rec.snapshots[k];
    Csv csv{"x", "u"};
    for (std::size_t i = 0; i < grid.size(); ++i) csv.row({grid.x(i), s.u[i]});
    r.files.push_back({snapshot_name(k), csv.str()});
    snaps.push_back(Json{{"file", snapshot_name(k)}, {"t", s.t}});
  }
  Json j = outcome_json(rec.outcome);
  j["kappa"] = kappa;
  j["steps"] = rec.steps;
  j["t_end"] = rec.diagnostics.back().t;
  j["solver"] = solver_json(solver);
  j["snapshots"] = snaps;
  r.files.push_back({"outcome.json", dump(j)});
  r.summary = std::string(outcome_name(rec.outcome));
  return r;
}

RunResult cmd_classify(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  const Grid1D grid = cfg.grid();
  const SolverConfig solver = cfg.solver();
  const double kappa = cfg.number("experiment", "kappa");
  const StationaryProfile sp = base_profile(cfg, m, grid);
  const Profile u0 = sp.profile().scaled(kappa);
  const FitWindow window{cfg.number_or("experiment", "fit_start", -1.0),
                         cfg.number_or("experiment", "fit_end", -1.0)};
  const Classification c = classify(u0, m, solver, window);
  const DataRatio ratio = data_ratio(u0, sp);

  Json j = outcome_json(c.outcome);
  j["kappa"] = kappa;
  j["steps"] = c.record.steps;
  j["t_end"] = c.record.diagnostics.back().t;
  j["data_ratio"] = Json{{"inf", ratio.inf}, {"sup", ratio.sup}};
  j["predicted"] = ratio.inf > 1.0 ? "BlowUp" : ratio.sup < 1.0 ? "Decay" : "Indeterminate";
  if (c.decay_fit) {
    const RateFit& f = *c.decay_fit;
    j["decay_fit"] = Json{{"model", std::string(rate_model_name(f.model))},
                          {"exponent", f.exponent},
                          {"amplitude", f.amplitude},
                          {"t_start", f.t_start},
                          {"t_end", f.t_end},
                          {"residual", f.residual},
                          {"samples", f.samples}};
  } else {
    j["decay_fit"] = nullptr;
  }
  if (c.blowup_fit) {
    j["blowup_fit"] = Json{{"T_est", c.blowup_fit->T_est},
                           {"exponent", c.blowup_fit->exponent},
                           {"samples", c.blowup_fit->samples}};
  } else {
    j["blowup_fit"] = nullptr;
  }
  j["solver"] = solver_json(solver);

  RunResult r;
  r.files = {{"outcome.json", dump(j)}};
  r.summary = std::string(outcome_name(c.outcome));
  return r;
}

RunResult cmd_bisect(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  const Grid1D grid = cfg.grid();
  const SolverConfig solver = cfg.solver();
  const double lo = cfg.number("experiment", "kappa_lo");
  const double hi = cfg.number("experiment", "kappa_hi");
  const std::size_t iters = cfg.count("experiment", "iters");
  const StationaryProfile sp = base_profile(cfg, m, grid);
  const BisectionResult res = kappa_bisection(sp, grid, m, solver, lo, hi, iters);

  Csv csv{"iter", "kappa_lo", "kappa_hi", "verdict"};
  for (const auto& s : res.history) {
    csv.row({static_cast<double>(s.iter), s.kappa_lo, s.kappa_hi},
            std::string(outcome_name(s.verdict)));
  }
  Json j{{"threshold", res.threshold},
         {"width", res.width},
         {"iters", iters},
         {"bracket", Json::array({lo, hi})},
         {"solver", solver_json(solver)}};
  RunResult r;
  r.files = {{"bisection.csv", csv.str()}, {"threshold.json", dump(j)}};
  r.summary = "kappa* = " + format_number(res.threshold);
  return r;
}

RunResult cmd_verify_candidate(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  const Grid1D grid = cfg.grid();
  const double kappa = cfg.number("experiment", "kappa");
  const bool sub = cfg.flag_or("experiment", "subsolution", kappa > 1.0);
  LatticeSpec lattice;
  lattice.nx = cfg.count_or("experiment", "lattice_nx", lattice.nx);
  lattice.nt = cfg.count_or("experiment", "lattice_nt", lattice.nt);
  lattice.x_max = cfg.number_or("experiment", "lattice_x_max", lattice.x_max);
  lattice.t_max = cfg.number_or("experiment", "lattice_t_max", lattice.t_max);

  const StationaryProfile sp = base_profile(cfg, m, grid);
  const SeparatrixCandidate c =
      build_candidate(sub ? Direction::Subsolution : Direction::Supersolution, kappa, sp);
  const ResidualReport rep = residual_sign_check(c, lattice);

  Csv csv{"x", "t", "residual"};
  for (const auto& s : rep.samples) csv.row({s.x, s.t, s.terms.total()});
  Json j{{"direction", sub ? "subsolution" : "supersolution"},
         {"regime", m.q == 1.0 ? "q=1" : "q>1"},
         {"kappa", c.kappa},
         {"delta", c.delta},
         {"gamma", c.gamma},
         {"T", c.T},
         {"delta_bound", c.delta_bound}};
  if (c.aux) {
    j["R0"] = c.aux->R0;
    j["L0"] = c.aux->L0;
  }
  j["pass"] = rep.pass;
  j["worst_relative"] = rep.worst_relative;
  j["max_abs_p_term"] = rep.max_abs_p_term;
  j["lattice"] = Json{{"nx", lattice.nx},
                      {"nt", lattice.nt},
                      {"x_max", lattice.x_max},
                      {"t_max", lattice.t_max}};
  RunResult r;
  r.status = rep.pass ? kExitOk : kExitFailedCheck;
  r.files = {{"residual.csv", csv.str()}, {"candidate.json", dump(j)}};
  r.summary = std::string(sub ? "subsolution " : "supersolution ") + (rep.pass ? "pass" : "FAIL");
  return r;
}

RunResult cmd_gap(const ExperimentConfig& cfg) {
  const ModelParams m = normalized_model(cfg);
  if (m.q != 1.0) throw Error(ErrorCode::WrongRegime, "the heat-kernel gap applies to q = 1 only");
  const Grid1D grid = cfg.grid();
  const SolverConfig solver = cfg.solver();
  const double kappa = cfg.number_or("experiment", "kappa", 0.9);
  const StationaryProfile sp = base_profile(cfg, m, grid);
  const Profile u0 = sp.profile().scaled(kappa);
  const EvolutionRecord rec = evolve(u0, m, solver);
  const double m_initial = norms(u0).l1;
  const double m_measured = renormalized_mass(rec);
  const TimeSeries a = heat_kernel_gap(rec, m_initial);
  const TimeSeries b = heat_kernel_gap(rec, m_measured);

  Csv csv{"t", "gap_initial_mass", "gap_measured_mass"};
  for (std::size_t i = 0; i < a.size(); ++i) csv.row({a.t[i], a.v[i], b.v[i]});
  RunResult r;
  r.files = {{"gap.csv", csv.str()}};
  r.summary = std::string(outcome_name(rec.outcome)) + ", masses " + format_number(m_initial) +
              " / " + format_number(m_measured);
  return r;
}

RunResult cmd_rescale(const ExperimentConfig& cfg) {
  const ScalingCoefficients s = rescale(cfg.model());
  RunResult r;
  r.files = {{"coefficients.json", dump(Json{{"a", s.a}, {"b", s.b}, {"c", s.c}})}};
  r.summary = "a=" + format_number(s.a) + " b=" + format_number(s.b) + " c=" + format_number(s.c);
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

std::span<const std::string_view> subcommands() { return kSubcommands; }

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunResult execute(std::string_view sub, const ExperimentConfig& config) {
  if (sub == "stationary") return cmd_stationary(config);
  if (sub == "time-ode") return cmd_time_ode(config);
  if (sub == "evolve") return cmd_evolve(config);
  if (sub == "classify") return cmd_classify(config);
  if (sub == "bisect") return cmd_bisect(config);
  if (sub == "verify-candidate") return cmd_verify_candidate(config);
  if (sub == "gap") return cmd_gap(config);
  if (sub == "rescale") return cmd_rescale(config);
  throw Error(ErrorCode::InvalidConfig, "unknown subcommand '" + std::string(sub) + "'");
}

void commit_files(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  const std::string suffix = ".tmp" + std::to_string(::getpid());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& f : files) {
    const fs::path tmp = dir / (f.name + suffix);
    temps.push_back(tmp);
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << f.content;
    os.close();
    if (!os) {
      cleanup();
      throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    fs::rename(temps[i], dir / files[i].name, ec);
    if (ec) {
      cleanup();
      throw Error(ErrorCode::Io, "cannot rename into " + (dir / files[i].name).string());
    }
  }
}

int run(std::string_view sub, const RunOptions& options, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  try {
    std::ifstream in(options.config_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + options.config_path.string());
    std::stringstream text;
    text << in.rdbuf();
    const ExperimentConfig cfg = parse_config(text.str());

    RunResult r = execute(sub, cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    Json meta{{"subcommand", std::string(sub)},
              {"config", options.config_path.string()},
              {"seed", options.seed ? Json(*options.seed) : Json(nullptr)},
              {"status", r.status},
              {"created_utc", utc_timestamp()},
              {"wall_seconds", wall}};
    Json names = Json::array();
    for (const auto& f : r.files) names.push_back(f.name);
    meta["files"] = names;
    r.files.push_back({"meta.json", dump(meta)});
    commit_files(options.out_dir, r.files);
    if (!options.quiet) out << sub << ": " << r.summary << '\n';
    return r.status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace fkpp::cli
