#pragma once

// Dense complex linear algebra and the handful of quantum-information
// primitives the rest of the library is built on.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qad {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised for inputs that violate an operation's precondition.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces something the model cannot contain
/// (a state with a clearly negative eigenvalue, a non-finite entry, ...).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double hermitian = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double psd_floor = 1e-9;   // eigenvalues in [-floor, 0) are clipped
inline constexpr double psd_corrupt = 1e-6; // psd_sqrt refuses below -corrupt
inline constexpr double norm = 1e-9;
inline constexpr double povm_completeness = 1e-8;
inline constexpr double prior_sum = 1e-12;
} // namespace tol

bool all_finite(const ComplexMatrix& m);
double hermitian_deviation(const ComplexMatrix& m);

/// Unit-norm state vector.
class PureStateVector {
public:
  explicit PureStateVector(ComplexVector amplitudes);

  /// Normalizes `v` first; throws if it is (numerically) zero.
  static PureStateVector normalized(const ComplexVector& v);
  static PureStateVector basis(Eigen::Index dim, Eigen::Index index);

  Eigen::Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

private:
  ComplexVector amplitudes_;
};

/// Positive, unit-trace Hermitian operator with the dimensions of the
/// subsystems it is defined on (product equals the matrix dimension).
class DensityOperator {
public:
  /// Validates Hermiticity, unit trace and positivity. The stored matrix
  /// is the Hermitian part of `m`.
  DensityOperator(ComplexMatrix m, std::vector<int> subsystem_dims);
  /// Single-subsystem convenience.
  explicit DensityOperator(ComplexMatrix m);

  static DensityOperator from_pure(const PureStateVector& psi, std::vector<int> subsystem_dims);
  static DensityOperator from_pure(const PureStateVector& psi);
  static DensityOperator maximally_mixed(std::vector<int> subsystem_dims);

  const ComplexMatrix& matrix() const { return matrix_; }
  const std::vector<int>& subsystem_dims() const { return dims_; }
  Eigen::Index dim() const { return matrix_.rows(); }

private:
  ComplexMatrix matrix_;
  std::vector<int> dims_;
};

/// Positive operator-valued measure; effect i is outcome i.
class Povm {
public:
  explicit Povm(std::vector<ComplexMatrix> effects);

  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  std::size_t size() const { return effects_.size(); }
  Eigen::Index dim() const { return effects_.front().rows(); }

private:
  std::vector<ComplexMatrix> effects_;
};

struct EigenSystem {
  RealVector values;    // ascending
  ComplexMatrix vectors; // orthonormal columns, same order as values
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Reduced state on the subsystems listed in `keep` (any order; the result
/// keeps them in their original order).
DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep);

/// Symmetrizes (h + h†)/2 before decomposing.
EigenSystem hermitian_eigensystem(const ComplexMatrix& h);

ComplexMatrix psd_sqrt(const DensityOperator& rho);
ComplexMatrix psd_sqrt(const ComplexMatrix& psd);

/// Root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), clamped to [0, 1].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& a);

/// Minimum error for telling rho0 (prior p0) from rho1 (prior p1):
/// (1 - ||p0 rho0 - p1 rho1||_1) / 2.
double helstrom_error(double p0, const DensityOperator& rho0, double p1, const DensityOperator& rho1);

/// Pretty-good measurement E_i = S^{-1/2} p_i rho_i S^{-1/2}, S = sum p_i rho_i,
/// with the inverse taken on the support of S. If S is rank deficient a
/// trailing null effect completes the identity.
Povm square_root_measurement(std::span<const double> priors, std::span<const DensityOperator> states);

/// 1 - sum_i p_i Tr(E_i rho_i), clamped to [0, 1]. Extra effects beyond the
/// hypothesis count are "no guess" outcomes and always count as errors.
double discrimination_error(std::span<const double> priors, std::span<const DensityOperator> states,
                            const Povm& povm);

} // namespace qad
