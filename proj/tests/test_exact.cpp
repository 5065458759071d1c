#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fkpp/error.hpp"
#include "fkpp/exact.hpp"

using namespace fkpp;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::Io;
}

// Extinction time of h' = h^p - h^q from h0 < 1 (q < 1), by Simpson's rule in
// w = h^{1-q}, where the integrand 1/((1-q)(1 - h^{p-q})) is smooth.
double extinction_time(double h0, double p, double q) {
  const double w0 = std::pow(h0, 1.0 - q);
  const int n = 20000;
  const double hw = w0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = i * hw;
    const double h = std::pow(w, 1.0 / (1.0 - q));
    const double f = 1.0 / ((1.0 - q) * (1.0 - std::pow(h, p - q)));
    s += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return s * hw / 3.0;
}

}  // namespace

TEST_CASE("closed-form time solutions for q = 1") {
  CHECK(time_solution_q1(0.0, 3.0, 2.0) == 1.0);
  CHECK(time_solution_q1(-0.5, 3.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  // h' = h^3 - h at an interior time, by central differences
  const double C = 0.7, t = 0.4, e = 1e-5;
  const double h = time_solution_q1(C, 3.0, t);
  const double dh = (time_solution_q1(C, 3.0, t + e) - time_solution_q1(C, 3.0, t - e)) / (2 * e);
  CHECK(dh == doctest::Approx(h * h * h - h).epsilon(1e-8));

  CHECK(blowup_time_q1(-0.5, 3.0) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-15));
  CHECK(code_of([] { blowup_time_q1(0.2, 3.0); }) == ErrorCode::NoBlowup);
  CHECK(code_of([] { time_solution_q1(-0.5, 3.0, 0.4); }) == ErrorCode::EvaluatedAtOrPastBlowup);
  CHECK(q1_constant_from_initial(0.5, 3.0) == doctest::Approx(3.0));
}

TEST_CASE("adaptive integrator against closed forms") {
  for (double h0 : {0.2, 0.5, 0.9}) {
    const auto tr = integrate_time_ode(h0, 3.0, 1.0, 5.0);
    const double C = std::pow(h0, -2.0) - 1.0;
    double gap = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      gap = std::max(gap, std::abs(tr.values[i] - 1.0 / std::sqrt(1.0 + C * std::exp(2 * tr.times[i]))));
    }
    CHECK(gap < 1e-8);
    CHECK(tr.event.kind == EventKind::None);
  }
  // p = 5: h = [1 + C e^{4t}]^{-1/4}, C = -1/2 blows up at ln(2)/4
  const auto b = integrate_time_ode(std::pow(2.0, 0.25), 5.0, 1.0, 3.0);
  CHECK(b.event.kind == EventKind::BlowUp);
  CHECK(b.event.time == doctest::Approx(std::log(2.0) / 4.0).epsilon(1e-8));
}

TEST_CASE("trajectory is monotone and positive") {
  const auto up = integrate_time_ode(1.5, 3.0, 2.0, 10.0);
  const auto down = integrate_time_ode(0.5, 3.0, 2.0, 10.0);
  for (std::size_t i = 1; i < up.values.size(); ++i) CHECK(up.values[i] > up.values[i - 1]);
  for (std::size_t i = 1; i < down.values.size(); ++i) {
    CHECK(down.values[i] < down.values[i - 1]);
    CHECK(down.values[i] > 0.0);
  }
  CHECK(code_of([] { integrate_time_ode(-1.0, 3.0, 2.0, 1.0); }) == ErrorCode::InvalidInitial);
  CHECK(code_of([] { integrate_time_ode(1.0, 3.0, 2.0, 1.0); }) == ErrorCode::InvalidInitial);
}

TEST_CASE("finite-time extinction for q < 1") {
  for (auto [p, q, h0] : {std::tuple{2.0, 0.5, 0.5}, std::tuple{3.0, 0.3, 0.8}}) {
    const auto tr = integrate_time_ode(h0, p, q, 100.0);
    REQUIRE(tr.event.kind == EventKind::Extinct);
    CHECK(tr.event.time == doctest::Approx(extinction_time(h0, p, q)).epsilon(1e-7));
  }
}

TEST_CASE("rate brackets") {
  const auto b = bracket_check(integrate_time_ode(2.0, 3.0, 2.0, 10.0), 3.0, 2.0, 2.0);
  CHECK(b.kind == BracketKind::BlowUp);
  CHECK(b.pass);
  const auto d = bracket_check(integrate_time_ode(0.5, 3.0, 2.0, 50.0), 3.0, 2.0, 0.5);
  CHECK(d.kind == BracketKind::Decay);
  CHECK(d.pass);
  const auto e = bracket_check(integrate_time_ode(0.5, 2.0, 0.5, 50.0), 2.0, 0.5, 0.5);
  CHECK(e.kind == BracketKind::Extinction);
  CHECK(e.pass);

  // A trajectory of a different equation must fall outside the bounds.
  auto wrong = integrate_time_ode(0.5, 3.0, 1.5, 50.0);
  CHECK_FALSE(bracket_check(wrong, 3.0, 2.0, 0.5).pass);

  CHECK(code_of([] { bracket_check(integrate_time_ode(0.5, 3.0, 1.0, 5.0), 3.0, 1.0, 0.5); }) ==
        ErrorCode::RegimeViolation);
  CHECK(code_of([] { bracket_check(integrate_time_ode(2.0, 3.0, 2.0, 0.01), 3.0, 2.0, 2.0); }) ==
        ErrorCode::MissingEvent);
}

TEST_CASE("stationary profile, q = 1") {
  const Grid1D g(20.0, 2001);
  const auto sp = stationary_q1(0.0, 3.0, g);
  CHECK(sp.peak() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // p = 3: g = sqrt(2) sech(x)
  for (double x : {-3.3, 0.0, 0.7, 12.5}) {
    CHECK(sp.value(x) == doctest::Approx(std::sqrt(2.0) / std::cosh(x)).epsilon(1e-13));
    CHECK(sp.slope(x) == doctest::Approx(-std::sqrt(2.0) * std::tanh(x) / std::cosh(x)).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < g.size(); i += 50) {
    CHECK(sp.profile()[i] == sp.profile()[g.size() - 1 - i]);
  }
  // Shifted member: g(x; C) = g(x + 2C/(p-1); 0)
  CHECK(stationary_q1_value(0.4, 3.0, 1.0) == doctest::Approx(stationary_q1_value(0.0, 3.0, 1.4)));
}

TEST_CASE("stationary profile, q > 1") {
  const Grid1D g(60.0, 6001);
  const auto sp = compute_stationary_qgt1(3.0, 2.0, g);
  CHECK(sp.peak() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(stationary_peak_qgt1(5.0, 2.0) == doctest::Approx(std::pow(2.0, 1.0 / 3.0)));
  // p = 3, q = 2 has the explicit profile 12 / (2x^2 + 9).
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    CHECK(sp.profile()[i] == doctest::Approx(12.0 / (2 * x * x + 9)).epsilon(1e-6));
  }
  for (double x : {0.33, 4.01, 59.9, 70.0}) {
    const double exact = 12.0 / (2 * x * x + 9);
    CHECK(sp.value(x) == doctest::Approx(exact).epsilon(1e-5));
    CHECK(sp.slope(x) == doctest::Approx(-48.0 * x / std::pow(2 * x * x + 9, 2)).epsilon(1e-5));
  }
  CHECK(sp.covers(59.0));
  CHECK_FALSE(sp.covers(61.0));
  CHECK(first_integral_radicand(sp.peak(), 3.0, 2.0) == doctest::Approx(0.0));
  CHECK(code_of([] { stationary_peak_qgt1(3.0, 1.0); }) == ErrorCode::RegimeViolation);
}

TEST_CASE("tail constants") {
  // q = 2: |x|^2 psi -> (2 sqrt(3/2))^2 = 6 and x psi'/psi -> -2.
  const auto a = asymptotic_constants_qgt1(2.0);
  CHECK(a.tail_amplitude == doctest::Approx(6.0));
  CHECK(a.log_slope_limit == doctest::Approx(-2.0));
  // p = 3, C = 0: sqrt(2) sech(x) ~ 2 sqrt(2) e^{-|x|}
  const auto k = asymptotic_constants_q1(0.0, 3.0);
  CHECK(k.tail_amplitude == doctest::Approx(2.0 * std::sqrt(2.0)));

  const Grid1D g(30.0, 3001);
  const auto shifted = stationary_q1(0.5, 3.0, g);
  const auto rep = verify_profile_asymptotics(shifted, asymptotic_constants(shifted));
  CHECK(rep.pass);
  CHECK(rep.checked > 0);

  const auto psi = compute_stationary_qgt1(3.0, 2.0, Grid1D(60.0, 6001));
  CHECK(verify_profile_asymptotics(psi, asymptotic_constants(psi)).pass);
  CHECK(code_of([] {
          const auto small = compute_stationary_qgt1(3.0, 2.0, Grid1D(5.0, 501));
          verify_profile_asymptotics(small, asymptotic_constants(small));
        }) == ErrorCode::DomainTooSmall);
}
