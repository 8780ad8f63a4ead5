#include "qad/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qad {

ChannelParams make_params(int n, double beta0)
{
  if (n < 2) {
    throw InvalidArgument("make_params: dimension n must be at least 2");
  }
  const double floor = 1.0 / n;
  if (!std::isfinite(beta0) || beta0 < floor - 1e-12 || beta0 > 1.0 + 1e-12) {
    throw InvalidArgument("make_params: beta0 = " + std::to_string(beta0) + " outside [1/n, 1] for n = " +
                          std::to_string(n));
  }
  beta0 = std::clamp(beta0, floor, 1.0);
  ChannelParams p;
  p.n = n;
  p.beta0 = beta0;
  p.lambda = std::clamp((beta0 - floor) / (1.0 - floor), 0.0, 1.0);
  p.q = (1.0 - beta0) / (n - 1);
  return p;
}

ChannelParams params_from_lambda(int n, double lambda)
{
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("params_from_lambda: lambda outside [0, 1]");
  }
  return make_params(n, lambda + (1.0 - lambda) / n);
}

PureStateVector maximally_entangled(int n)
{
  ComplexVector v = ComplexVector::Zero(n * n);
  for (int i = 0; i < n; ++i) {
    v(i * n + i) = 1.0 / std::sqrt(static_cast<double>(n));
  }
  return PureStateVector(std::move(v));
}

ComplexMatrix isotropic_matrix(const ChannelParams& params)
{
  const int d = params.n * params.n;
  const ComplexVector phi = maximally_entangled(params.n).amplitudes();
  return params.lambda * (phi * phi.adjoint()) + ((1.0 - params.lambda) / d) * ComplexMatrix::Identity(d, d);
}

DensityOperator isotropic_state(const ChannelParams& params)
{
  return DensityOperator(isotropic_matrix(params), {params.n, params.n});
}

TripartiteState purify(const DensityOperator& rho_ab)
{
  const auto& dims = rho_ab.subsystem_dims();
  if (dims.size() != 2 || dims[0] != dims[1]) {
    throw InvalidArgument("purify: expected a two-qunit state with dims [n, n]");
  }
  const int n = dims[0];
  const int d = n * n;
  const EigenSystem es = hermitian_eigensystem(rho_ab.matrix());
  if (es.values.minCoeff() < -tol::psd_floor) {
    throw InvalidArgument("purify: state is not positive semidefinite");
  }

  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int k = 0; k < d; ++k) {
    const double weight = std::sqrt(std::max(0.0, es.values(k)));
    if (weight == 0.0) {
      continue;
    }
    for (int ab = 0; ab < d; ++ab) {
      psi(static_cast<Eigen::Index>(ab) * d + k) += weight * es.vectors(ab, k);
    }
  }
  return {n, PureStateVector::normalized(psi)};
}

Eigen::MatrixXd joint_statistics(const ChannelParams& params)
{
  const int n = params.n;
  const double off = params.q / n;
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, n, off);
  p.diagonal().setConstant(params.beta0 / n);
  return p;
}

EveConditional::EveConditional(int n, std::vector<std::optional<EveOutcome>> table)
    : n_(n), table_(std::move(table))
{
  if (n_ < 2 || table_.size() != static_cast<std::size_t>(n_) * n_) {
    throw InvalidArgument("EveConditional: table must have n^2 entries");
  }
  double total = 0.0;
  for (const auto& entry : table_) {
    total += entry ? entry->probability : 0.0;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("EveConditional: probabilities do not sum to 1");
  }
}

const std::optional<EveOutcome>& EveConditional::at(int a, int b) const
{
  if (a < 0 || a >= n_ || b < 0 || b >= n_) {
    throw InvalidArgument("EveConditional: symbol out of range");
  }
  return table_[static_cast<std::size_t>(a) * n_ + b];
}

double EveConditional::probability(int a, int b) const
{
  const auto& entry = at(a, b);
  return entry ? entry->probability : 0.0;
}

EveConditional eve_conditionals(const TripartiteState& state)
{
  const int n = state.n;
  const int eve = n * n;
  const ComplexVector& psi = state.vector.amplitudes();
  if (psi.size() != static_cast<Eigen::Index>(eve) * eve) {
    throw InvalidArgument("eve_conditionals: state does not live on dims [n, n, n^2]");
  }

  std::vector<std::optional<EveOutcome>> table(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const ComplexVector slice = psi.segment(static_cast<Eigen::Index>(a * n + b) * eve, eve);
      const double p = slice.squaredNorm();
      if (p < kZeroProbability) {
        continue;
      }
      PureStateVector v = PureStateVector::normalized(slice);
      DensityOperator rho = DensityOperator::from_pure(v);
      table[static_cast<std::size_t>(a) * n + b] = EveOutcome{p, std::move(v), std::move(rho)};
    }
  }
  return EveConditional(n, std::move(table));
}

} // namespace qad
