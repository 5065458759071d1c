#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fkpp/error.hpp"
#include "fkpp/model.hpp"

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

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(validate_params(3, 2, 2, 8, 1));
  CHECK(code_of([] { validate_params(3, 2, 0, 1, 1); }) == ErrorCode::NonPositiveCoefficient);
  CHECK(code_of([] { validate_params(3, 2, 1, -1, 1); }) == ErrorCode::NonPositiveCoefficient);
  CHECK(code_of([] { validate_params(2, 3, 1, 1, 1); }) == ErrorCode::ExponentOrderViolation);
  CHECK(code_of([] { validate_params(0.8, 0.5, 1, 1, 1); }) == ErrorCode::ExponentOrderViolation);
  CHECK(normalized_params(3, 1).normalized());
  CHECK(normalized_params(2, 0.5).ode_only());
}

TEST_CASE("rescaling coefficients") {
  // u = c v(x/a, t/b) turns K u_xx - B u^q + A u^p into the normalized equation when
  // c^{p-q} = B/A, b = c^{1-p}/A and a^2 = K b.
  const auto s = rescale(validate_params(3, 2, 2, 8, 1));
  CHECK(s.c == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s.b == doctest::Approx(0.03125).epsilon(1e-14));
  CHECK(s.a == doctest::Approx(0.17677669529663688).epsilon(1e-14));

  const auto one = rescale(normalized_params(5, 1.5));
  CHECK(one.a == 1.0);
  CHECK(one.b == 1.0);
  CHECK(one.c == 1.0);

  // Generic case: plug the coefficients back into the three balance conditions.
  const ModelParams m = validate_params(4, 1.5, 0.7, 3.1, 2.3);
  const auto g = rescale(m);
  CHECK(m.B * std::pow(g.c, m.q - 1) * g.b == doctest::Approx(1.0));
  CHECK(m.A * std::pow(g.c, m.p - 1) * g.b == doctest::Approx(1.0));
  CHECK(m.K * g.b / (g.a * g.a) == doctest::Approx(1.0));
}

TEST_CASE("grid layout") {
  const Grid1D g(10.0, 201);
  CHECK(g.dx() == doctest::Approx(0.1));
  CHECK(g.x(0) == -10.0);
  CHECK(g.x(200) == 10.0);
  CHECK(g.x(g.center()) == 0.0);
  for (std::size_t k = 0; k <= g.center(); ++k) CHECK(g.x(g.center() + k) == -g.x(g.center() - k));
  CHECK(g.nearest(0.149) == g.center() + 1);
  CHECK(g.nearest(-100.0) == 0);
  CHECK(g == Grid1D(10.0, 201));
  CHECK_FALSE(g == Grid1D(10.0, 401));

  CHECK(code_of([] { Grid1D(10.0, 200); }) == ErrorCode::InvalidGrid);
  CHECK(code_of([] { Grid1D(10.0, 1); }) == ErrorCode::InvalidGrid);
  CHECK(code_of([] { Grid1D(-1.0, 11); }) == ErrorCode::InvalidGrid);
}

TEST_CASE("profile sampling, interpolation and norms") {
  const Grid1D g(8.0, 1601);
  const Profile gauss = Profile::sample(g, [](double x) { return std::exp(-x * x); });
  const Norms n = norms(gauss);
  CHECK(n.sup == 1.0);
  CHECK(n.l1 == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));

  const Profile line = Profile::sample(g, [](double x) { return 2.0 * x + 1.0; });
  CHECK(line.at(0.123) == doctest::Approx(1.246).epsilon(1e-12));
  CHECK(line.at(9.0) == 0.0);
  CHECK(gauss.scaled(3.0)[g.center()] == 3.0);

  CHECK(code_of([&] { Profile(g, std::vector<double>(10, 0.0)); }) == ErrorCode::InvalidProfile);
  std::vector<double> bad(g.size(), 0.0);
  bad[3] = std::nan("");
  CHECK(code_of([&] { Profile(g, bad); }) == ErrorCode::InvalidProfile);
}

TEST_CASE("frame mapping round trip") {
  const ModelParams m = validate_params(3, 2, 2, 8, 1);
  const auto s = rescale(m);
  const Grid1D g(20.0, 2001);
  const Profile u = Profile::sample(g, [](double x) { return 1.0 / (1.0 + x * x); });

  const Profile v = map_profile_between_frames(u, s, FrameDirection::ToNormalized);
  // v(y) = u(a y) / c on the grid of half-width L / a
  CHECK(v.grid().half_width() == doctest::Approx(20.0 / s.a));
  const double y = v.grid().x(v.grid().center() + 17);
  CHECK(v.at(y) == doctest::Approx(1.0 / (1.0 + s.a * s.a * y * y) / s.c).epsilon(1e-12));

  const Profile back = map_profile_between_frames(v, s, FrameDirection::FromNormalized);
  for (std::size_t i = 0; i < g.size(); i += 97) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));

  CHECK(code_of([&] {
          map_profile_between_frames(u, s, FrameDirection::ToNormalized, Grid1D(3.0, 31));
        }) == ErrorCode::GridMismatch);
}

TEST_CASE("trapezoid rule is exact for linear data") {
  const Grid1D g(1.0, 11);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = 3.0 + g.x(i);
  CHECK(trapezoid(g, f) == doctest::Approx(6.0).epsilon(1e-14));
}
