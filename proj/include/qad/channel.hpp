#pragma once

// The noisy qunit channel: an isotropic two-qunit state shared by Alice and
// Bob, purified into a third system that the eavesdropper holds.

#include <optional>
#include <vector>

#include "qad/matcore.hpp"

namespace qad {

/// (n, beta0) plus the two quantities derived from them.
///   beta0  probability that Alice's and Bob's symbols agree
///   lambda isotropic mixing weight, beta0 = lambda + (1 - lambda) / n
///   q      probability of each particular wrong symbol, (1 - beta0) / (n - 1)
struct ChannelParams {
  int n = 2;
  double beta0 = 1.0;
  double lambda = 1.0;
  double q = 0.0;

  /// q / beta0, the per-symbol odds of a specific error against agreement.
  double error_ratio() const { return q / beta0; }
};

/// Throws InvalidArgument unless n >= 2 and 1/n <= beta0 <= 1.
ChannelParams make_params(int n, double beta0);

/// Channel parameters from the isotropic weight instead of beta0.
ChannelParams params_from_lambda(int n, double lambda);

/// |Phi> = sum_i |ii> / sqrt(n).
PureStateVector maximally_entangled(int n);

/// lambda |Phi><Phi| + (1 - lambda) I / n^2 on dims [n, n].
DensityOperator isotropic_state(const ChannelParams& params);

/// The matrix of isotropic_state without the density-operator validation
/// (which costs an n^2 x n^2 eigendecomposition).
ComplexMatrix isotropic_matrix(const ChannelParams& params);

/// Pure state on (Alice, Bob, Eve) with dims [n, n, n^2].
struct TripartiteState {
  int n = 2;
  PureStateVector vector;
};

/// Spectral purification sum_k sqrt(mu_k) |v_k>_AB |k>_E, Eve's basis
/// indexed by the eigenbasis of rho_ab (ascending eigenvalue order).
TripartiteState purify(const DensityOperator& rho_ab);

/// P(a, b) as an n x n table, rows Alice, columns Bob.
Eigen::MatrixXd joint_statistics(const ChannelParams& params);

/// Eve's state once Alice and Bob have obtained (a, b) in the computational
/// basis. The conditional state of a purification is pure, so the vector is
/// kept alongside its density operator.
struct EveOutcome {
  double probability = 0.0;
  PureStateVector vector;
  DensityOperator state;
};

class EveConditional {
public:
  EveConditional(int n, std::vector<std::optional<EveOutcome>> table);

  int n() const { return n_; }
  /// Empty for outcomes of probability zero.
  const std::optional<EveOutcome>& at(int a, int b) const;
  double probability(int a, int b) const;

private:
  int n_;
  std::vector<std::optional<EveOutcome>> table_;
};

EveConditional eve_conditionals(const TripartiteState& state);

/// Outcomes below this probability are treated as impossible.
inline constexpr double kZeroProbability = 1e-14;

} // namespace qad
