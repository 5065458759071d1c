#pragma once

#include <span>
#include <vector>

namespace fkpp {

/**
 * Thomas elimination for a tridiagonal system. Row i reads
 * lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]; lower[0] and
 * upper[n-1] are ignored. No pivoting: intended for diagonally dominant
 * systems such as (I - theta dt D) with D the discrete Laplacian.
 */
class TridiagonalSolver {
 public:
  void solve(std::span<const double> lower, std::span<const double> diag,
             std::span<const double> upper, std::span<const double> rhs, std::span<double> x);

 private:
  std::vector<double> c_prime_;
};

}  // namespace fkpp
