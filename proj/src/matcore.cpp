#include "qad/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace qad {

namespace {

int product(const std::vector<int>& dims)
{
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

void require_square(const ComplexMatrix& m, const char* what)
{
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": expected a nonempty square matrix");
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what)
{
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

void require_priors(std::span<const double> priors, const char* what)
{
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument(std::string(what) + ": prior outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::prior_sum) {
    throw InvalidArgument(std::string(what) + ": priors do not sum to 1");
  }
}

// Inverse square root on the support of a PSD matrix. Returns the projector
// onto the kernel in `kernel` (zero matrix when full rank).
ComplexMatrix pinv_sqrt(const ComplexMatrix& s, ComplexMatrix& kernel)
{
  const EigenSystem es = hermitian_eigensystem(s);
  const double top = es.values.maxCoeff();
  if (!(top > 0.0)) {
    throw InvalidArgument("square_root_measurement: average state is zero");
  }
  const double cutoff = 1e-12 * top;
  const Eigen::Index d = s.rows();
  RealVector inv(d);
  RealVector null(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = es.values(i);
    const bool in_support = v > cutoff;
    inv(i) = in_support ? 1.0 / std::sqrt(v) : 0.0;
    null(i) = in_support ? 0.0 : 1.0;
  }
  kernel = es.vectors * null.asDiagonal() * es.vectors.adjoint();
  return es.vectors * inv.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m)
{
  return 0.5 * (m + m.adjoint());
}

} // namespace

bool all_finite(const ComplexMatrix& m)
{
  return m.allFinite();
}

double hermitian_deviation(const ComplexMatrix& m)
{
  if (m.rows() != m.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// --- PureStateVector --------------------------------------------------------

PureStateVector::PureStateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes))
{
  if (amplitudes_.size() == 0 || !amplitudes_.allFinite()) {
    throw InvalidArgument("PureStateVector: empty or non-finite amplitudes");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > tol::norm) {
    throw InvalidArgument("PureStateVector: amplitudes are not unit norm");
  }
}

PureStateVector PureStateVector::normalized(const ComplexVector& v)
{
  const double nrm = v.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw NumericError("PureStateVector: cannot normalize a zero or non-finite vector");
  }
  return PureStateVector(v / nrm);
}

PureStateVector PureStateVector::basis(Eigen::Index dim, Eigen::Index index)
{
  if (index < 0 || index >= dim) {
    throw InvalidArgument("PureStateVector::basis: index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return PureStateVector(std::move(v));
}

// --- DensityOperator --------------------------------------------------------

DensityOperator::DensityOperator(ComplexMatrix m, std::vector<int> subsystem_dims)
    : dims_(std::move(subsystem_dims))
{
  require_square(m, "DensityOperator");
  if (!m.allFinite()) {
    throw InvalidArgument("DensityOperator: non-finite entries");
  }
  if (dims_.empty() || std::any_of(dims_.begin(), dims_.end(), [](int d) { return d < 1; }) ||
      product(dims_) != m.rows()) {
    throw InvalidArgument("DensityOperator: subsystem dimensions do not match the matrix");
  }
  if (hermitian_deviation(m) > tol::hermitian) {
    throw InvalidArgument("DensityOperator: matrix is not Hermitian");
  }
  matrix_ = hermitian_part(m);
  if (std::abs(matrix_.trace().real() - 1.0) > tol::trace) {
    throw InvalidArgument("DensityOperator: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol::psd_floor) {
    throw InvalidArgument("DensityOperator: matrix is not positive semidefinite");
  }
}

DensityOperator::DensityOperator(ComplexMatrix m)
    : DensityOperator(m, std::vector<int>{static_cast<int>(m.rows())})
{
}

DensityOperator DensityOperator::from_pure(const PureStateVector& psi, std::vector<int> subsystem_dims)
{
  const ComplexVector& v = psi.amplitudes();
  return DensityOperator(v * v.adjoint(), std::move(subsystem_dims));
}

DensityOperator DensityOperator::from_pure(const PureStateVector& psi)
{
  return from_pure(psi, {static_cast<int>(psi.dim())});
}

DensityOperator DensityOperator::maximally_mixed(std::vector<int> subsystem_dims)
{
  const int d = product(subsystem_dims);
  return DensityOperator(ComplexMatrix::Identity(d, d) / static_cast<double>(d), std::move(subsystem_dims));
}

// --- Povm -------------------------------------------------------------------

Povm::Povm(std::vector<ComplexMatrix> effects) : effects_(std::move(effects))
{
  if (effects_.empty()) {
    throw InvalidArgument("Povm: no effects");
  }
  const Eigen::Index d = effects_.front().rows();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& e : effects_) {
    require_square(e, "Povm");
    require_same_dim(e.rows(), d, "Povm");
    if (hermitian_deviation(e) > tol::hermitian) {
      throw InvalidArgument("Povm: effect is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(e), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol::psd_floor) {
      throw InvalidArgument("Povm: effect is not positive semidefinite");
    }
    total += e;
  }
  if ((total - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::povm_completeness) {
    throw InvalidArgument("Povm: effects do not sum to the identity");
  }
}

// --- operations -------------------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b)
{
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep)
{
  const auto& dims = rho.subsystem_dims();
  const int parties = static_cast<int>(dims.size());
  if (keep.empty()) {
    throw InvalidArgument("partial_trace: nothing to keep");
  }
  std::vector<bool> kept(parties, false);
  for (int k : keep) {
    if (k < 0 || k >= parties) {
      throw InvalidArgument("partial_trace: subsystem index " + std::to_string(k) + " out of range");
    }
    if (kept[k]) {
      throw InvalidArgument("partial_trace: repeated subsystem index");
    }
    kept[k] = true;
  }

  std::vector<int> kept_dims;
  int kept_dim = 1;
  int traced_dim = 1;
  for (int s = 0; s < parties; ++s) {
    if (kept[s]) {
      kept_dims.push_back(dims[s]);
      kept_dim *= dims[s];
    } else {
      traced_dim *= dims[s];
    }
  }

  // full index of (kept multi-index, traced multi-index), subsystem 0 most significant
  const Eigen::Index total = rho.dim();
  std::vector<Eigen::Index> full(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rest = i;
    Eigen::Index k_idx = 0, k_stride = 1;
    Eigen::Index t_idx = 0, t_stride = 1;
    for (int s = parties - 1; s >= 0; --s) {
      const Eigen::Index digit = rest % dims[s];
      rest /= dims[s];
      if (kept[s]) {
        k_idx += digit * k_stride;
        k_stride *= dims[s];
      } else {
        t_idx += digit * t_stride;
        t_stride *= dims[s];
      }
    }
    full[static_cast<std::size_t>(k_idx * traced_dim + t_idx)] = i;
  }

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (Eigen::Index a = 0; a < kept_dim; ++a) {
    for (Eigen::Index b = 0; b < kept_dim; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index t = 0; t < traced_dim; ++t) {
        acc += m(full[a * traced_dim + t], full[b * traced_dim + t]);
      }
      out(a, b) = acc;
    }
  }
  return DensityOperator(std::move(out), std::move(kept_dims));
}

EigenSystem hermitian_eigensystem(const ComplexMatrix& h)
{
  require_square(h, "hermitian_eigensystem");
  if (hermitian_deviation(h) > tol::hermitian) {
    throw InvalidArgument("hermitian_eigensystem: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian_eigensystem: decomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& psd)
{
  const EigenSystem es = hermitian_eigensystem(psd);
  RealVector roots(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double v = es.values(i);
    if (v < -tol::psd_corrupt) {
      throw NumericError("psd_sqrt: eigenvalue " + std::to_string(v) + " signals a corrupted state");
    }
    roots(i) = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return es.vectors * roots.asDiagonal() * es.vectors.adjoint();
}

ComplexMatrix psd_sqrt(const DensityOperator& rho)
{
  return psd_sqrt(rho.matrix());
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma)
{
  require_same_dim(rho.dim(), sigma.dim(), "fidelity");
  const ComplexMatrix root = psd_sqrt(rho);
  const ComplexMatrix inner = hermitian_part(root * sigma.matrix() * root);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(inner, Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    f += std::sqrt(std::max(0.0, solver.eigenvalues()(i)));
  }
  return std::clamp(f, 0.0, 1.0);
}

double trace_norm(const ComplexMatrix& a)
{
  require_square(a, "trace_norm");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermitian_deviation(a) <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

double helstrom_error(double p0, const DensityOperator& rho0, double p1, const DensityOperator& rho1)
{
  const double priors[] = {p0, p1};
  require_priors(priors, "helstrom_error");
  require_same_dim(rho0.dim(), rho1.dim(), "helstrom_error");
  const double tn = trace_norm(p0 * rho0.matrix() - p1 * rho1.matrix());
  return std::clamp(0.5 * (1.0 - tn), 0.0, std::min(p0, p1));
}

Povm square_root_measurement(std::span<const double> priors, std::span<const DensityOperator> states)
{
  if (priors.size() != states.size() || states.empty()) {
    throw InvalidArgument("square_root_measurement: need one prior per state");
  }
  require_priors(priors, "square_root_measurement");
  const Eigen::Index d = states.front().dim();
  ComplexMatrix average = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    require_same_dim(states[i].dim(), d, "square_root_measurement");
    average += priors[i] * states[i].matrix();
  }

  ComplexMatrix kernel;
  const ComplexMatrix inv_root = pinv_sqrt(average, kernel);
  std::vector<ComplexMatrix> effects;
  effects.reserve(states.size() + 1);
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    effects.push_back(hermitian_part(inv_root * (priors[i] * states[i].matrix()) * inv_root));
    total += effects.back();
  }
  if (kernel.cwiseAbs().maxCoeff() > 0.0) {
    // whatever is left of the identity: the kernel projector up to rounding
    effects.push_back(hermitian_part(ComplexMatrix::Identity(d, d) - total));
  }
  return Povm(std::move(effects));
}

double discrimination_error(std::span<const double> priors, std::span<const DensityOperator> states,
                            const Povm& povm)
{
  if (priors.size() != states.size() || states.empty()) {
    throw InvalidArgument("discrimination_error: need one prior per state");
  }
  if (povm.size() < states.size()) {
    throw InvalidArgument("discrimination_error: fewer effects than hypotheses");
  }
  double success = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    require_same_dim(states[i].dim(), povm.dim(), "discrimination_error");
    success += priors[i] * (povm.effects()[i].cwiseProduct(states[i].matrix().transpose())).sum().real();
  }
  return std::clamp(1.0 - success, 0.0, 1.0);
}

} // namespace qad
