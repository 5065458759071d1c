#include "fkpp/tridiagonal.hpp"

#include "fkpp/error.hpp"

namespace fkpp {

void TridiagonalSolver::solve(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n || n == 0) {
    throw Error(ErrorCode::InvalidConfig, "tridiagonal system size mismatch");
  }
  c_prime_.resize(n);

  // Forward sweep
  double denom = diag[0];
  c_prime_[0] = upper[0] / denom;
  x[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c_prime_[i - 1];
    c_prime_[i] = upper[i] / denom;
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom;
  }

  // Back substitution
  for (std::size_t i = n - 1; i > 0; --i) x[i - 1] -= c_prime_[i - 1] * x[i];
}

}  // namespace fkpp
