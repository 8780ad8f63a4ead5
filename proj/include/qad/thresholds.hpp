#pragma once

// Tolerable-noise thresholds on beta0: closed forms for the two attack
// classes, the entanglement-distillability threshold of the isotropic
// state, and numerical recovery from Bob's and Eve's error exponents.

#include <optional>
#include <vector>

#include "qad/adversary.hpp"

namespace qad {

/// 2 / (2 + (n - 1)): tolerable noise when Eve measures her ancillas one by one.
double threshold_incoherent_closed(int n);

/// 2 / (2 + (3 - sqrt 5)(n - 1)): tolerable noise against a collective
/// measurement on each accepted block.
double threshold_coherent_closed(int n);

/// Singlet fraction <Phi| rho |Phi> of the isotropic state with this beta0,
/// read off the constructed state.
double singlet_fraction(int n, double beta0);

/// beta0 at which the singlet fraction crosses 1/n, found by root-finding
/// and checked against 2 / (n + 1) to 1e-10 (NumericError otherwise).
double quantum_distillability_threshold(int n);

/// Least-squares slope of ln bob_error_after_ad over N = 1..max_block_size,
/// through the same estimator as eve_error_exponent. Tends to
/// bob_error_exponent as the range grows.
double bob_error_fit_slope(const ChannelParams& params, int max_block_size);

/// Bob's error decays faster than Eve's iff this is negative. Both slopes
/// are least-squares fits of the exact errors over the block sizes selected
/// by Eve's fit, so the acceptance transient shared by the two errors cancels.
double exponent_gap(const ChannelParams& params, AttackKind kind, int max_block_size);

/// Bisection on beta0 for the sign change of exponent_gap. The bracket is
/// verified first; NumericError if it shows no sign change.
double find_threshold_numeric(int n, AttackKind kind, int max_block_size, double tol);

struct ThresholdRecord {
  int n = 2;
  double beta_inc_closed = 0.0;
  double beta_coh_closed = 0.0;
  std::optional<double> beta_inc_numeric;
  std::optional<double> beta_coh_numeric;
  double beta_quantum = 0.0;
};

/// Block sizes and tolerance used for numeric columns. Numeric thresholds
/// are only attempted for n in {2, 3}.
struct NumericSettings {
  int incoherent_max_block = 6;
  int coherent_max_block_n2 = 6;
  int coherent_max_block_n3 = 4;
  double tol = 1e-3;
};

std::vector<ThresholdRecord> figure_table(int n_min, int n_max, bool include_numeric,
                                          const NumericSettings& settings = {});

} // namespace qad
