#include "qad/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qad {

namespace {

int mod(int a, int n)
{
  const int r = a % n;
  return r < 0 ? r + n : r;
}

// Saturates at LONG_MAX.
long ipow(long base, int exp)
{
  long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<long>::max() / base) {
      return std::numeric_limits<long>::max();
    }
    r *= base;
  }
  return r;
}

void require_block_size(int block_size)
{
  if (block_size < 1) {
    throw InvalidArgument("block size N must be at least 1");
  }
}

void require_announcements(std::span<const int> announcements, int n)
{
  require_block_size(static_cast<int>(announcements.size()));
  for (int m : announcements) {
    if (m < 0 || m >= n) {
      throw InvalidArgument("announcement outside Z_n");
    }
  }
}

void guard_block_dim(const ChannelParams& params, int block_size)
{
  // n^(2N) <= 2^14, checked without overflow
  const double log_dim = 2.0 * block_size * std::log2(static_cast<double>(params.n));
  if (log_dim > 14.0 + 1e-9) {
    throw GuardExceeded("coherent attack guard n^(2N) <= 2^14 exceeded (n = " + std::to_string(params.n) +
                        ", N = " + std::to_string(block_size) + ")");
  }
}

void guard_outcome_strings(const ChannelParams& params, int block_size)
{
  if (block_size * std::log10(static_cast<double>(params.n)) > std::log10(guard::max_outcome_strings) + 1e-9) {
    throw GuardExceeded("incoherent attack guard n^N <= 10^6 exceeded (n = " + std::to_string(params.n) +
                        ", N = " + std::to_string(block_size) + ")");
  }
}

EveConditional conditionals_for(const ChannelParams& params)
{
  return eve_conditionals(purify(isotropic_state(params)));
}

RoundEnsemble round_ensemble(const ChannelParams& params, const EveConditional& table, int announced)
{
  const int n = params.n;
  RoundEnsemble ens;
  ens.n = n;
  ens.announcement = announced;
  ens.degenerate = std::abs(params.beta0 - 1.0 / n) < 1e-12;
  for (int c = 0; c < n; ++c) {
    const int x = mod(announced + c, n);
    for (int k = 0; k < n; ++k) {
      const auto& entry = table.at(x, mod(x + k, n));
      if (!entry) {
        continue;
      }
      // P(y | x) = n P(x, y) since Alice's symbol is uniform
      ens.states.push_back(RoundState{c, k, n * entry->probability, entry->vector, entry->state});
    }
  }
  return ens;
}

// Common block weights W_k for the offsets present in the ensemble.
std::map<int, double> block_offset_weights(const RoundEnsemble& ens, int block_size)
{
  std::map<int, double> w;
  for (const auto& rs : ens.states) {
    if (rs.secret == 0) {
      w[rs.offset] = std::pow(rs.weight, block_size);
    }
  }
  double total = 0.0;
  for (const auto& [k, v] : w) {
    total += v;
  }
  for (auto& [k, v] : w) {
    v /= total;
  }
  return w;
}

// Hypothesis states expressed in an orthonormal basis of the span of all
// component vectors. `gram` lists the components hypothesis by hypothesis,
// weights[h] holding the mixture weights of hypothesis h. Every block state
// is a mixture of its component vectors, so the reduction is exact.
std::vector<DensityOperator> states_from_gram(const ComplexMatrix& gram,
                                              const std::vector<std::vector<double>>& weights)
{
  const EigenSystem es = hermitian_eigensystem(gram);
  const double cutoff = 1e-12 * es.values.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    if (es.values(i) > cutoff) {
      keep.push_back(i);
    }
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  ComplexMatrix proj(r, gram.rows()); // Lambda^{-1/2} U^dagger restricted to the support
  for (Eigen::Index a = 0; a < r; ++a) {
    proj.row(a) = es.vectors.col(keep[a]).adjoint() / std::sqrt(es.values(keep[a]));
  }
  const ComplexMatrix coords = proj * gram;

  std::vector<DensityOperator> out;
  out.reserve(weights.size());
  Eigen::Index col = 0;
  for (const auto& w : weights) {
    ComplexMatrix rho = ComplexMatrix::Zero(r, r);
    for (double wk : w) {
      const ComplexVector y = coords.col(col++);
      rho += wk * (y * y.adjoint());
    }
    out.emplace_back(rho / rho.trace().real());
  }
  return out;
}

// Square-root measurement error for hypotheses that are mixtures of pure
// components, straight from their Gram matrix. With u_i = sqrt(w_i) v_i and
// rho = sum_i u_i u_i^dagger, the measurement gives
// P(i detected as hypothesis of j) through U^dagger rho^{-1/2} U = (U^dagger U)^{1/2},
// so no inverse of a badly conditioned rho is needed.
double srm_error_from_gram(const ComplexMatrix& gram, const std::vector<std::vector<double>>& weights,
                           const std::vector<double>& priors)
{
  std::vector<double> w;
  std::vector<std::size_t> owner;
  for (std::size_t h = 0; h < weights.size(); ++h) {
    for (double wk : weights[h]) {
      w.push_back(priors[h] * wk);
      owner.push_back(h);
    }
  }
  const auto m = static_cast<Eigen::Index>(w.size());
  ComplexMatrix weighted(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      weighted(i, j) = std::sqrt(w[i] * w[j]) * gram(i, j);
    }
  }
  const ComplexMatrix root = psd_sqrt(weighted);
  double success = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (owner[i] == owner[j]) {
        success += std::norm(root(i, j));
      }
    }
  }
  return 1.0 - success;
}

double discriminate(const std::vector<double>& priors, const std::vector<DensityOperator>& states)
{
  if (states.size() == 2) {
    return helstrom_error(priors[0], states[0], priors[1], states[1]);
  }
  const Povm povm = square_root_measurement(priors, states);
  return discrimination_error(priors, states, povm);
}

double clamp_error(double e, int n)
{
  return std::clamp(e, 0.0, 1.0 - 1.0 / n);
}

std::vector<int> canonical_announcements(int block_size)
{
  require_block_size(block_size);
  return std::vector<int>(static_cast<std::size_t>(block_size), 0);
}

} // namespace

std::string_view to_string(AttackKind kind)
{
  return kind == AttackKind::incoherent ? "incoherent" : "coherent";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text)
{
  if (text == "incoherent") {
    return AttackKind::incoherent;
  }
  if (text == "coherent") {
    return AttackKind::coherent;
  }
  return std::nullopt;
}

DensityOperator RoundEnsemble::hypothesis_state(int secret) const
{
  const int d = n * n;
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (const auto& rs : states) {
    if (rs.secret == secret) {
      rho += rs.weight * rs.state.matrix();
    }
  }
  return DensityOperator(rho / rho.trace().real());
}

const RoundState* RoundEnsemble::find(int secret, int offset) const
{
  for (const auto& rs : states) {
    if (rs.secret == secret && rs.offset == offset) {
      return &rs;
    }
  }
  return nullptr;
}

RoundEnsemble eve_round_states(const ChannelParams& params, int announced)
{
  if (announced < 0 || announced >= params.n) {
    throw InvalidArgument("eve_round_states: announcement outside Z_n");
  }
  return round_ensemble(params, conditionals_for(params), announced);
}

DensityOperator EveBlockHypothesis::block_state() const
{
  const Eigen::Index d = dim();
  if (d > guard::max_dense_state_dim) {
    throw GuardExceeded("dense block state guard dim <= 2^10 exceeded (dim = " + std::to_string(d) + ")");
  }
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (const auto& c : components) {
    rho += c.weight * (c.vector.amplitudes() * c.vector.amplitudes().adjoint());
  }
  return DensityOperator(rho / rho.trace().real());
}

std::vector<EveBlockHypothesis> coherent_block_states(const ChannelParams& params, int block_size)
{
  const auto m = canonical_announcements(block_size);
  return coherent_block_states(params, m);
}

std::vector<EveBlockHypothesis> coherent_block_states(const ChannelParams& params,
                                                      std::span<const int> announcements)
{
  const int n = params.n;
  require_announcements(announcements, n);
  const int block_size = static_cast<int>(announcements.size());
  guard_block_dim(params, block_size);

  const EveConditional table = conditionals_for(params);
  std::vector<RoundEnsemble> rounds;
  rounds.reserve(announcements.size());
  for (int a : announcements) {
    rounds.push_back(round_ensemble(params, table, a));
  }
  const auto weights = block_offset_weights(rounds.front(), block_size);

  std::vector<EveBlockHypothesis> hyps;
  for (int c = 0; c < n; ++c) {
    EveBlockHypothesis h;
    h.secret = c;
    h.prior = 1.0 / n;
    for (const auto& [k, w] : weights) {
      ComplexVector v = rounds.front().find(c, k)->vector.amplitudes();
      for (std::size_t i = 1; i < rounds.size(); ++i) {
        v = kron(v, rounds[i].find(c, k)->vector.amplitudes());
      }
      h.components.push_back(BlockComponent{k, w, PureStateVector::normalized(v)});
    }
    hyps.push_back(std::move(h));
  }
  return hyps;
}

AttackReport incoherent_attack_error(const ChannelParams& params, int block_size)
{
  const auto m = canonical_announcements(block_size);
  return incoherent_attack_error(params, m);
}

AttackReport incoherent_attack_error(const ChannelParams& params, std::span<const int> announcements)
{
  const int n = params.n;
  require_announcements(announcements, n);
  const int block_size = static_cast<int>(announcements.size());
  guard_outcome_strings(params, block_size);

  const EveConditional table = conditionals_for(params);
  const std::vector<double> priors(static_cast<std::size_t>(n), 1.0 / n);

  // likelihood[i][o] holds P(outcome o | secret c, offset k) at index c * n + k
  std::vector<std::vector<std::vector<double>>> likelihood;
  std::map<int, double> weights;
  std::map<int, std::vector<std::vector<double>>> per_announcement;
  for (int a : announcements) {
    auto it = per_announcement.find(a);
    if (it == per_announcement.end()) {
      const RoundEnsemble ens = round_ensemble(params, table, a);
      if (weights.empty()) {
        weights = block_offset_weights(ens, block_size);
      }
      std::vector<DensityOperator> hyp;
      for (int c = 0; c < n; ++c) {
        hyp.push_back(ens.hypothesis_state(c));
      }
      const Povm povm = square_root_measurement(priors, hyp);
      std::vector<std::vector<double>> rows;
      for (const auto& effect : povm.effects()) {
        std::vector<double> row(static_cast<std::size_t>(n) * n, 0.0);
        double live = 0.0;
        for (const auto& rs : ens.states) {
          const ComplexVector& v = rs.vector.amplitudes();
          const double p = std::max(0.0, v.dot(effect * v).real());
          row[static_cast<std::size_t>(rs.secret) * n + rs.offset] = p;
          live = std::max(live, p);
        }
        if (live > 1e-15) {
          rows.push_back(std::move(row));
        }
      }
      it = per_announcement.emplace(a, std::move(rows)).first;
    }
    likelihood.push_back(it->second);
  }

  std::vector<double> offset_weight(static_cast<std::size_t>(n), 0.0);
  for (const auto& [k, w] : weights) {
    offset_weight[k] = w;
  }

  // Depth-first walk over outcome strings carrying running products per (c, k).
  double error = 0.0;
  std::vector<std::vector<double>> stack(static_cast<std::size_t>(block_size) + 1,
                                         std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
  for (int ck = 0; ck < n * n; ++ck) {
    stack[0][ck] = offset_weight[ck % n];
  }
  std::vector<double> posterior(static_cast<std::size_t>(n));
  auto walk = [&](auto&& self, int depth) -> void {
    if (depth == block_size) {
      const auto& prod = stack[depth];
      for (int c = 0; c < n; ++c) {
        double p = 0.0;
        for (int k = 0; k < n; ++k) {
          p += prod[c * n + k];
        }
        posterior[c] = p;
      }
      const auto best = std::max_element(posterior.begin(), posterior.end()) - posterior.begin();
      for (int c = 0; c < n; ++c) {
        if (c != best) {
          error += posterior[c] / n;
        }
      }
      return;
    }
    for (const auto& row : likelihood[depth]) {
      for (int ck = 0; ck < n * n; ++ck) {
        stack[depth + 1][ck] = stack[depth][ck] * row[ck];
      }
      self(self, depth + 1);
    }
  };
  walk(walk, 0);

  AttackReport rep;
  rep.kind = AttackKind::incoherent;
  rep.block_size = block_size;
  rep.eve_error = clamp_error(error, n);
  rep.dims_used = static_cast<long>(n) * n;
  rep.notes = "per-ancilla square-root measurement, maximum-likelihood over " +
              std::to_string(ipow(n, block_size)) + " outcome strings";
  return rep;
}

AttackReport coherent_attack_error(const ChannelParams& params, int block_size)
{
  const auto m = canonical_announcements(block_size);
  return coherent_attack_error(params, m);
}

AttackReport coherent_attack_error(const ChannelParams& params, std::span<const int> announcements)
{
  const int n = params.n;
  require_announcements(announcements, n);
  const int block_size = static_cast<int>(announcements.size());

  const EveConditional table = conditionals_for(params);
  std::vector<RoundEnsemble> rounds;
  for (int a : announcements) {
    rounds.push_back(round_ensemble(params, table, a));
  }
  const auto offsets = block_offset_weights(rounds.front(), block_size);

  // Components (c, k) in hypothesis order. Their block overlaps are products
  // of round overlaps, so the n^(2N)-dimensional vectors are never formed.
  std::vector<std::pair<int, int>> comps;
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    for (const auto& [k, w] : offsets) {
      comps.emplace_back(c, k);
      weights[c].push_back(w);
    }
  }
  const auto m = static_cast<Eigen::Index>(comps.size());
  ComplexMatrix gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      Complex g = 1.0;
      for (const auto& round : rounds) {
        g *= round.find(comps[i].first, comps[i].second)
                 ->vector.amplitudes()
                 .dot(round.find(comps[j].first, comps[j].second)->vector.amplitudes());
      }
      gram(i, j) = g;
      gram(j, i) = std::conj(g);
    }
  }
  const std::vector<double> priors(static_cast<std::size_t>(n), 1.0 / n);

  AttackReport rep;
  rep.kind = AttackKind::coherent;
  rep.block_size = block_size;
  rep.dims_used = ipow(n, 2 * block_size);
  if (n == 2) {
    const auto reduced = states_from_gram(gram, weights);
    rep.eve_error = clamp_error(discriminate(priors, reduced), n);
    rep.notes = "Helstrom measurement on the block, support rank " + std::to_string(reduced.front().dim());
  } else {
    rep.eve_error = clamp_error(srm_error_from_gram(gram, weights, priors), n);
    rep.notes = "square-root measurement on the block, from the " + std::to_string(m) + "-component Gram matrix";
  }
  return rep;
}

AttackReport coherent_attack_error_dense(const ChannelParams& params, int block_size)
{
  const auto hyps = coherent_block_states(params, block_size);
  std::vector<DensityOperator> states;
  std::vector<double> priors;
  for (const auto& h : hyps) {
    states.push_back(h.block_state());
    priors.push_back(h.prior);
  }
  AttackReport rep;
  rep.kind = AttackKind::coherent;
  rep.block_size = block_size;
  rep.eve_error = clamp_error(discriminate(priors, states), params.n);
  rep.dims_used = ipow(params.n, 2 * block_size);
  rep.notes = "dense block states";
  return rep;
}

AttackReport attack_error(const ChannelParams& params, AttackKind kind, int block_size)
{
  return kind == AttackKind::incoherent ? incoherent_attack_error(params, block_size)
                                        : coherent_attack_error(params, block_size);
}

ExponentFit fit_error_exponent(std::span<const double> errors)
{
  struct Point {
    double x, y;
  };
  std::vector<Point> pts;
  std::vector<int> sizes;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > 1e-12) {
      pts.push_back({static_cast<double>(i + 1), std::log(errors[i])});
      sizes.push_back(static_cast<int>(i + 1));
    }
  }

  auto fit = [](std::span<const Point> p) {
    double mx = 0.0, my = 0.0;
    for (const auto& q : p) {
      mx += q.x;
      my += q.y;
    }
    mx /= p.size();
    my /= p.size();
    double sxx = 0.0, sxy = 0.0;
    for (const auto& q : p) {
      sxx += (q.x - mx) * (q.x - mx);
      sxy += (q.x - mx) * (q.y - my);
    }
    const double slope = sxy / sxx;
    return std::pair{slope, my - slope * mx};
  };

  if (pts.size() < 2) {
    throw NumericError("fit_error_exponent: fewer than two usable points");
  }

  ExponentFit out;
  std::span<const Point> used(pts);
  if (pts.size() >= 4 && sizes.front() == 1) {
    const std::span<const Point> rest = used.subspan(1);
    const auto [slope, intercept] = fit(rest);
    double ss = 0.0;
    for (const auto& q : rest) {
      const double r = q.y - (intercept + slope * q.x);
      ss += r * r;
    }
    const double rms = std::sqrt(ss / rest.size());
    const double first = std::abs(pts.front().y - (intercept + slope * pts.front().x));
    if (first > 10.0 * rms && first > 1e-9) {
      used = rest;
      sizes.erase(sizes.begin());
      out.dropped_first = true;
    }
  }
  std::tie(out.slope, out.intercept) = fit(used);
  out.block_sizes = std::move(sizes);
  return out;
}

double least_squares_slope(std::span<const double> errors, std::span<const int> block_sizes)
{
  if (block_sizes.size() < 2) {
    throw NumericError("least_squares_slope: fewer than two points");
  }
  double mx = 0.0, my = 0.0;
  for (int N : block_sizes) {
    if (N < 1 || static_cast<std::size_t>(N) > errors.size() || !(errors[N - 1] > 0.0)) {
      throw NumericError("least_squares_slope: no positive error at N = " + std::to_string(N));
    }
    mx += N;
    my += std::log(errors[N - 1]);
  }
  mx /= block_sizes.size();
  my /= block_sizes.size();
  double sxx = 0.0, sxy = 0.0;
  for (int N : block_sizes) {
    sxx += (N - mx) * (N - mx);
    sxy += (N - mx) * (std::log(errors[N - 1]) - my);
  }
  return sxy / sxx;
}

ExponentFit eve_error_fit(const ChannelParams& params, AttackKind kind, int max_block_size)
{
  if (max_block_size < 3) {
    throw InvalidArgument("eve_error_exponent: need N_max >= 3");
  }
  std::vector<double> errors;
  for (int N = 1; N <= max_block_size; ++N) {
    errors.push_back(attack_error(params, kind, N).eve_error);
  }
  return fit_error_exponent(errors);
}

double eve_error_exponent(const ChannelParams& params, AttackKind kind, int max_block_size)
{
  return eve_error_fit(params, kind, max_block_size).slope;
}

} // namespace qad
