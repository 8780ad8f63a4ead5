#pragma once

// Eve's view of an accepted advantage-distillation block and her two attack
// classes.
//
// For one raw symbol Eve holds the conditional state |e_{x,y}> of her
// purifying system, where x is Alice's and y Bob's symbol. Once the block is
// accepted and the announcements m_i are public, hypothesis c (the secret)
// fixes x_i = m_i + c, and acceptance forces one common offset k = y_i - x_i
// for the whole block. Offset 0 (Bob right) has per-round weight beta0 and
// every other offset weight q, so for hypothesis c Eve holds
//
//     rho_c = sum_k W_k (x)_i |e_{m_i+c, m_i+c+k}><...|,
//     W_k = w_k^N / sum_j w_j^N.
//
// The incoherent attack measures every ancilla on its own and combines the
// outcomes classically; the coherent attack measures the N ancillas of the
// block jointly.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qad/channel.hpp"

namespace qad {

enum class AttackKind { incoherent, coherent };

std::string_view to_string(AttackKind kind);
std::optional<AttackKind> parse_attack_kind(std::string_view text);

/// Raised when a requested computation exceeds a dimension guard. The
/// message names the guard.
class GuardExceeded : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

namespace guard {
/// Classical outcome strings enumerated by the incoherent attack: n^N.
inline constexpr double max_outcome_strings = 1e6;
/// Eve's block Hilbert space when block vectors are materialized: n^(2N).
inline constexpr long max_block_dim = 1L << 14;
/// Largest block dimension materialized as a dense density matrix.
inline constexpr long max_dense_state_dim = 1L << 10;
} // namespace guard

/// Eve's single-round state for secret c and Bob offset k, given the
/// announcement.
struct RoundState {
  int secret = 0;
  int offset = 0;
  double weight = 0.0; // P(offset | Alice's symbol): beta0 or q
  PureStateVector vector;
  DensityOperator state;
};

struct RoundEnsemble {
  int n = 2;
  int announcement = 0;
  /// Offsets of probability zero (q = 0) are left out.
  std::vector<RoundState> states;
  /// beta0 = 1/n: Bob's symbols carry no information, every offset weighs the same.
  bool degenerate = false;

  /// sum_k weight_k |e_{c,k}><e_{c,k}|, Eve's round state for secret c.
  DensityOperator hypothesis_state(int secret) const;
  /// The component of secret c with Bob's offset k, if possible.
  const RoundState* find(int secret, int offset) const;
};

RoundEnsemble eve_round_states(const ChannelParams& params, int announced);

/// One offset sector of a block hypothesis: a product of N round vectors.
struct BlockComponent {
  int offset = 0;
  double weight = 0.0; // W_k, shared by all hypotheses
  PureStateVector vector;
};

struct EveBlockHypothesis {
  int secret = 0;
  double prior = 0.0;
  std::vector<BlockComponent> components;

  Eigen::Index dim() const { return components.front().vector.dim(); }
  /// Dense sum_k W_k |v_k><v_k|; throws GuardExceeded above max_dense_state_dim.
  DensityOperator block_state() const;
};

/// Materialized product vectors for the canonical announcements (all zero).
/// Throws GuardExceeded if n^(2N) > 2^14.
std::vector<EveBlockHypothesis> coherent_block_states(const ChannelParams& params, int block_size);
std::vector<EveBlockHypothesis> coherent_block_states(const ChannelParams& params,
                                                      std::span<const int> announcements);

struct AttackReport {
  AttackKind kind = AttackKind::incoherent;
  int block_size = 0;
  double eve_error = 0.0;
  long dims_used = 0;
  std::string notes;
};

/// Per-ancilla square-root measurement followed by maximum-likelihood
/// combination over all n^N outcome strings. Throws GuardExceeded if
/// n^N > 10^6.
AttackReport incoherent_attack_error(const ChannelParams& params, int block_size);
AttackReport incoherent_attack_error(const ChannelParams& params, std::span<const int> announcements);

/// Joint measurement on the block: Helstrom for n = 2, square-root
/// measurement for n > 2. The block states are reduced exactly to the span
/// of their n^2 component vectors, whose overlaps are products of round
/// overlaps; no dimension guard applies since nothing of size n^(2N) is
/// built. dims_used still reports n^(2N).
AttackReport coherent_attack_error(const ChannelParams& params, int block_size);
AttackReport coherent_attack_error(const ChannelParams& params, std::span<const int> announcements);

/// Same as coherent_attack_error but on the materialized n^(2N) dense block
/// states (guarded at 2^10). Used to cross-check the reduced computation.
AttackReport coherent_attack_error_dense(const ChannelParams& params, int block_size);

AttackReport attack_error(const ChannelParams& params, AttackKind kind, int block_size);

/// Least-squares fit of ln(error) against N.
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<int> block_sizes; // points that entered the fit
  bool dropped_first = false;
};

/// `errors[i]` is the error at N = i + 1. Points with error <= 1e-12 are
/// ignored. N = 1 is dropped when its residual against the fit of the
/// remaining points exceeds ten times their RMS residual. Throws NumericError
/// with fewer than two usable points.
ExponentFit fit_error_exponent(std::span<const double> errors);

/// Plain least-squares slope of ln(errors[N - 1]) over the listed block sizes.
double least_squares_slope(std::span<const double> errors, std::span<const int> block_sizes);

/// Slope of ln(eve_error) over N = 1..max_block_size (at least 3).
double eve_error_exponent(const ChannelParams& params, AttackKind kind, int max_block_size);
ExponentFit eve_error_fit(const ChannelParams& params, AttackKind kind, int max_block_size);

} // namespace qad
