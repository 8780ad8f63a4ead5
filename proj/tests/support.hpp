#pragma once

#include <cmath>
#include <random>

#include "qad/matcore.hpp"

namespace qad::test {

inline ComplexMatrix ginibre(std::mt19937_64& rng, int rows, int cols)
{
  std::normal_distribution<double> g;
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = Complex(g(rng), g(rng));
    }
  }
  return m;
}

/// Random mixed state of the given rank (full rank by default).
inline DensityOperator random_state(std::mt19937_64& rng, int dim, int rank = 0)
{
  const ComplexMatrix g = ginibre(rng, dim, rank > 0 ? rank : dim);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(0.5 * (rho + rho.adjoint()));
}

inline PureStateVector random_pure(std::mt19937_64& rng, int dim)
{
  return PureStateVector::normalized(ginibre(rng, dim, 1).col(0));
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int dim)
{
  const ComplexMatrix g = ginibre(rng, dim, dim);
  return 0.5 * (g + g.adjoint());
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b)
{
  return (a - b).cwiseAbs().maxCoeff();
}

inline ComplexMatrix diag(std::initializer_list<double> values)
{
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

} // namespace qad::test
