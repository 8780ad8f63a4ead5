#include "qad/thresholds.hpp"

#include <cmath>
#include <map>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "qad/distill.hpp"

namespace qad {

namespace {

void require_dimension(int n)
{
  if (n < 2) {
    throw InvalidArgument("dimension n must be at least 2");
  }
}

} // namespace

double threshold_incoherent_closed(int n)
{
  require_dimension(n);
  return 2.0 / (2.0 + (n - 1));
}

double threshold_coherent_closed(int n)
{
  require_dimension(n);
  return 2.0 / (2.0 + (3.0 - std::sqrt(5.0)) * (n - 1));
}

double singlet_fraction(int n, double beta0)
{
  const ComplexMatrix rho = isotropic_matrix(make_params(n, beta0));
  const ComplexVector phi = maximally_entangled(n).amplitudes();
  return phi.dot(rho * phi).real();
}

double quantum_distillability_threshold(int n)
{
  require_dimension(n);
  const double target = 1.0 / n;
  auto excess = [&](double beta0) { return singlet_fraction(n, beta0) - target; };

  boost::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(excess, 1.0 / n, 1.0,
                                                          boost::math::tools::eps_tolerance<double>(50), max_iter);
  const double root = 0.5 * (lo + hi);
  const double expected = 2.0 / (n + 1.0);
  if (std::abs(root - expected) > 1e-10) {
    throw NumericError("quantum_distillability_threshold: root " + std::to_string(root) +
                       " disagrees with 2/(n+1) for n = " + std::to_string(n));
  }
  return root;
}

namespace {

std::vector<double> bob_errors(const ChannelParams& params, int max_block_size)
{
  std::vector<double> errors;
  for (int N = 1; N <= max_block_size; ++N) {
    errors.push_back(bob_error_after_ad(params, N));
  }
  return errors;
}

} // namespace

double bob_error_fit_slope(const ChannelParams& params, int max_block_size)
{
  if (max_block_size < 3) {
    throw InvalidArgument("bob_error_fit_slope: need N_max >= 3");
  }
  return fit_error_exponent(bob_errors(params, max_block_size)).slope;
}

double exponent_gap(const ChannelParams& params, AttackKind kind, int max_block_size)
{
  const ExponentFit eve = eve_error_fit(params, kind, max_block_size);
  const double bob = least_squares_slope(bob_errors(params, max_block_size), eve.block_sizes);
  return bob - eve.slope;
}

double find_threshold_numeric(int n, AttackKind kind, int max_block_size, double tol)
{
  require_dimension(n);
  if (!(tol >= 1e-4)) {
    throw InvalidArgument("find_threshold_numeric: tol must be at least 1e-4");
  }
  if (kind == AttackKind::coherent && n > 3) {
    throw GuardExceeded("find_threshold_numeric: coherent thresholds are limited to n in {2, 3}");
  }

  std::map<double, double> memo;
  auto gap = [&](double beta0) {
    auto it = memo.find(beta0);
    if (it == memo.end()) {
      it = memo.emplace(beta0, exponent_gap(make_params(n, beta0), kind, max_block_size)).first;
    }
    return it->second;
  };

  // bracket expressed through the isotropic weight, away from both extremes
  const double lo = params_from_lambda(n, 0.05).beta0;
  const double hi = params_from_lambda(n, 0.95).beta0;
  const double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (!(g_lo > 0.0 && g_hi < 0.0)) {
    throw NumericError("find_threshold_numeric: no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "] (gaps " + std::to_string(g_lo) + ", " + std::to_string(g_hi) +
                       ")");
  }

  boost::uintmax_t max_iter = 60;
  const auto [a, b] = boost::math::tools::bisect(
      gap, lo, hi, [tol](double x, double y) { return std::abs(y - x) <= tol; }, max_iter);
  return 0.5 * (a + b);
}

std::vector<ThresholdRecord> figure_table(int n_min, int n_max, bool include_numeric,
                                          const NumericSettings& settings)
{
  require_dimension(n_min);
  if (n_max < n_min) {
    throw InvalidArgument("figure_table: n_max below n_min");
  }
  std::vector<ThresholdRecord> rows;
  for (int n = n_min; n <= n_max; ++n) {
    ThresholdRecord r;
    r.n = n;
    r.beta_inc_closed = threshold_incoherent_closed(n);
    r.beta_coh_closed = threshold_coherent_closed(n);
    r.beta_quantum = quantum_distillability_threshold(n);
    if (include_numeric && n <= 3) {
      r.beta_inc_numeric =
          find_threshold_numeric(n, AttackKind::incoherent, settings.incoherent_max_block, settings.tol);
      const int coherent_block = n == 2 ? settings.coherent_max_block_n2 : settings.coherent_max_block_n3;
      r.beta_coh_numeric = find_threshold_numeric(n, AttackKind::coherent, coherent_block, settings.tol);
    }
    rows.push_back(r);
  }
  return rows;
}

} // namespace qad
