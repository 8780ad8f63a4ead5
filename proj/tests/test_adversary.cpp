#include <doctest.h>

#include <cmath>
#include <vector>

#include "qad/adversary.hpp"
#include "qad/distill.hpp"
#include "support.hpp"

using namespace qad;

namespace {

double grid_beta(int n, int i, int points = 9)
{
  // interior of (1/n, 1), evenly spaced
  return 1.0 / n + (i + 1) * (1.0 - 1.0 / n) / (points + 1);
}

// Overlap of two sector vectors of a block hypothesis.
double component_overlap(const BlockComponent& a, const BlockComponent& b)
{
  return std::abs(a.vector.amplitudes().dot(b.vector.amplitudes()));
}

} // namespace

TEST_SUITE("adversary")
{
  TEST_CASE("attack kind names")
  {
    CHECK(to_string(AttackKind::coherent) == "coherent");
    CHECK(parse_attack_kind("incoherent") == AttackKind::incoherent);
    CHECK_FALSE(parse_attack_kind("both").has_value());
  }

  TEST_CASE("round ensembles at the extremes")
  {
    for (int n : {2, 3}) {
      const auto clean = eve_round_states(make_params(n, 1.0), 0);
      CHECK_FALSE(clean.degenerate);
      CHECK(clean.states.size() == static_cast<std::size_t>(n));
      for (int c = 1; c < n; ++c) {
        CHECK(fidelity(clean.hypothesis_state(0), clean.hypothesis_state(c)) == doctest::Approx(1.0));
      }

      const auto noise = eve_round_states(make_params(n, 1.0 / n), 1);
      CHECK(noise.degenerate);
      for (int c = 1; c < n; ++c) {
        CHECK(fidelity(noise.hypothesis_state(0), noise.hypothesis_state(c)) < 1e-6);
      }
    }
  }

  TEST_CASE("round ensemble weights")
  {
    const auto p = make_params(3, 0.6);
    const auto ens = eve_round_states(p, 2);
    CHECK(ens.states.size() == 9);
    for (int c = 0; c < 3; ++c) {
      double total = 0.0;
      for (int k = 0; k < 3; ++k) {
        const auto* s = ens.find(c, k);
        REQUIRE(s != nullptr);
        CHECK(s->weight == doctest::Approx(k == 0 ? p.beta0 : p.q));
        total += s->weight;
      }
      CHECK(total == doctest::Approx(1.0));
      CHECK(ens.hypothesis_state(c).matrix().trace().real() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("round fidelity regression, n = 2, beta0 = 0.75")
  {
    // Eve's conditionals overlap only on Bob-correct pairs, <e_00|e_11> =
    // lambda / beta0 = 2/3; the wrong-offset components are orthogonal to
    // everything. The hypothesis fidelity is therefore beta0 * 2/3 = lambda.
    const auto p = make_params(2, 0.75);
    const auto ens = eve_round_states(p, 0);
    const double s = std::abs(ens.find(0, 0)->vector.amplitudes().dot(ens.find(1, 0)->vector.amplitudes()));
    CHECK(s == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(ens.find(0, 1)->vector.amplitudes().dot(ens.find(1, 1)->vector.amplitudes())) < 1e-10);

    const double f = fidelity(ens.hypothesis_state(0), ens.hypothesis_state(1));
    CHECK(f > 0.0);
    CHECK(f < 1.0);
    CHECK(f == doctest::Approx(0.5).epsilon(1e-8));
  }

  TEST_CASE("block states")
  {
    const auto p = make_params(2, 0.75);
    const auto one = coherent_block_states(p, 1);
    const auto ens = eve_round_states(p, 0);
    REQUIRE(one.size() == 2);
    for (int c = 0; c < 2; ++c) {
      CHECK(one[c].prior == doctest::Approx(0.5));
      CHECK(qad::test::max_abs_diff(one[c].block_state().matrix(), ens.hypothesis_state(c).matrix()) < 1e-12);
    }

    for (int N = 1; N <= 3; ++N) {
      const auto clean = coherent_block_states(make_params(3, 1.0), N);
      for (int c = 1; c < 3; ++c) {
        CHECK(fidelity(clean[0].block_state(), clean[c].block_state()) == doctest::Approx(1.0));
      }
    }
  }

  TEST_CASE("block fidelity is multiplicative within each offset sector")
  {
    for (int n : {2, 3}) {
      for (double f : {0.2, 0.5, 0.8}) {
        const auto p = make_params(n, 1.0 / n + f * (1.0 - 1.0 / n));
        const auto round = coherent_block_states(p, 1);
        for (int N = 2; N <= (n == 2 ? 7 : 3); ++N) {
          const auto block = coherent_block_states(p, N);
          for (int c = 1; c < n; ++c) {
            for (std::size_t k = 0; k < block[0].components.size(); ++k) {
              const double single = component_overlap(round[0].components[k], round[c].components[k]);
              const double joint = component_overlap(block[0].components[k], block[c].components[k]);
              CHECK(std::abs(joint - std::pow(single, N)) <= 1e-8);
            }
          }
        }
      }
    }
  }

  TEST_CASE("aggregate block fidelity, n = 2")
  {
    // the Bob-correct sector carries all the overlap: F = W_0 s^N
    const auto p = make_params(2, 0.75);
    const double s = 2.0 / 3.0;
    for (int N = 1; N <= 5; ++N) {
      const auto block = coherent_block_states(p, N);
      const double w0 = std::pow(p.beta0, N) / (std::pow(p.beta0, N) + std::pow(p.q, N));
      CHECK(fidelity(block[0].block_state(), block[1].block_state()) ==
            doctest::Approx(w0 * std::pow(s, N)).epsilon(1e-8));
    }
  }

  TEST_CASE("coherent error for qubits in closed form")
  {
    // The wrong-offset sector is perfectly distinguishable; the Bob-correct
    // sector is a pure pair with overlap s^N, s = lambda / beta0.
    for (double beta0 : {0.55, 2.0 / 3.0, 0.75, 0.9, 0.97}) {
      const auto p = make_params(2, beta0);
      const double s = p.lambda / p.beta0;
      for (int N = 1; N <= 9; ++N) {
        const double w0 = 1.0 / (1.0 + std::pow(p.q / p.beta0, N));
        const double expected = w0 * 0.5 * (1.0 - std::sqrt(1.0 - std::pow(s, 2 * N)));
        CAPTURE(beta0);
        CAPTURE(N);
        CHECK(coherent_attack_error(p, N).eve_error == doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("attack regression fixtures")
  {
    const auto p = make_params(2, 0.75);
    CHECK(incoherent_attack_error(p, 4).eve_error == doctest::Approx(0.0439619313567496).epsilon(1e-10));
    CHECK(coherent_attack_error(p, 4).eve_error == doctest::Approx(0.009731523631577643).epsilon(1e-10));
  }

  TEST_CASE("attack errors at the extremes")
  {
    for (int n : {2, 3}) {
      for (int N = 1; N <= 4; ++N) {
        for (auto kind : {AttackKind::incoherent, AttackKind::coherent}) {
          CAPTURE(n);
          CAPTURE(N);
          CHECK(attack_error(make_params(n, 1.0), kind, N).eve_error == doctest::Approx((n - 1.0) / n));
          CHECK(attack_error(make_params(n, 1.0 / n), kind, N).eve_error == doctest::Approx(0.0));
        }
      }
    }
  }

  TEST_CASE("single round: both attacks coincide")
  {
    for (int n : {2, 3}) {
      for (int i = 0; i < 9; ++i) {
        const auto p = make_params(n, grid_beta(n, i));
        const double inc = incoherent_attack_error(p, 1).eve_error;
        if (n == 2) {
          CHECK(coherent_attack_error(p, 1).eve_error == doctest::Approx(inc).epsilon(1e-9));
        } else {
          CHECK(coherent_attack_error(p, 1).eve_error <= inc + 1e-9);
        }
      }
    }
  }

  TEST_CASE("reduced coherent computation agrees with dense block states")
  {
    struct Case {
      int n;
      int max_block;
    };
    for (const Case c : {Case{2, 4}, Case{3, 3}}) {
      for (double f : {0.15, 0.5, 0.85}) {
        const auto p = make_params(c.n, 1.0 / c.n + f * (1.0 - 1.0 / c.n));
        for (int N = 1; N <= c.max_block; ++N) {
          CHECK(coherent_attack_error(p, N).eve_error ==
                doctest::Approx(coherent_attack_error_dense(p, N).eve_error).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("coherent attack stays well conditioned")
  {
    // offset-sector weights span many orders of magnitude here
    for (double beta0 : {0.9, 0.99, 0.999}) {
      for (int N : {5, 8, 12}) {
        const auto rep = coherent_attack_error(make_params(3, beta0), N);
        CHECK(rep.eve_error > 0.0);
        CHECK(rep.eve_error <= 2.0 / 3.0 + 1e-12);
      }
    }
  }

  TEST_CASE("coherent attack never does worse")
  {
    for (int n : {2, 3}) {
      bool strict = false;
      for (int i = 0; i < 9; ++i) {
        const auto p = make_params(n, grid_beta(n, i));
        for (int N = 1; N <= 5; ++N) {
          const double inc = incoherent_attack_error(p, N).eve_error;
          const double coh = coherent_attack_error(p, N).eve_error;
          CHECK(coh <= inc + 1e-9);
          strict = strict || coh < inc - 1e-9;
        }
      }
      CHECK(strict);
    }
  }

  TEST_CASE("errors are bounded and grow with beta0")
  {
    for (int n : {2, 3}) {
      for (auto kind : {AttackKind::incoherent, AttackKind::coherent}) {
        for (int N : {1, 3, 4}) {
          double prev = 0.0;
          for (int i = -1; i <= 9; ++i) {
            const double beta0 = i < 0 ? 1.0 / n : (i == 9 ? 1.0 : grid_beta(n, i));
            const auto rep = attack_error(make_params(n, beta0), kind, N);
            CHECK(rep.eve_error >= 0.0);
            CHECK(rep.eve_error <= (n - 1.0) / n + 1e-12);
            CHECK(rep.eve_error >= prev - 1e-12);
            prev = rep.eve_error;
          }
        }
      }
    }
  }

  TEST_CASE("announcement shifts leave the errors unchanged")
  {
    const auto p2 = make_params(2, 0.8);
    const std::vector<int> a2 = {1, 0, 1, 1};
    CHECK(std::abs(incoherent_attack_error(p2, a2).eve_error - incoherent_attack_error(p2, 4).eve_error) <= 1e-9);
    CHECK(std::abs(coherent_attack_error(p2, a2).eve_error - coherent_attack_error(p2, 4).eve_error) <= 1e-9);

    const auto p3 = make_params(3, 0.55);
    for (const std::vector<int>& a3 : {std::vector<int>{2, 1}, std::vector<int>{1, 1, 2}}) {
      const int N = static_cast<int>(a3.size());
      CHECK(std::abs(incoherent_attack_error(p3, a3).eve_error - incoherent_attack_error(p3, N).eve_error) <= 1e-9);
      CHECK(std::abs(coherent_attack_error(p3, a3).eve_error - coherent_attack_error(p3, N).eve_error) <= 1e-9);
    }

    const std::vector<int> bad = {0, 2};
    CHECK_THROWS_AS(incoherent_attack_error(p2, bad), InvalidArgument);
  }

  TEST_CASE("dimension guards")
  {
    const auto p = make_params(2, 0.8);
    CHECK_NOTHROW(coherent_block_states(p, 7));
    CHECK_THROWS_AS(coherent_block_states(p, 8), GuardExceeded);
    CHECK_THROWS_AS(coherent_block_states(make_params(3, 0.6), 5), GuardExceeded);
    CHECK_THROWS_AS(coherent_attack_error_dense(make_params(3, 0.6), 4), GuardExceeded);
    // the reduced computation never builds n^(2N)-dimensional objects
    const auto big = coherent_attack_error(make_params(3, 0.6), 12);
    CHECK(big.dims_used == 282429536481L);
    CHECK(big.eve_error > 0.0);
    CHECK_THROWS_AS(incoherent_attack_error(p, 20), GuardExceeded);
    CHECK_THROWS_AS(coherent_block_states(p, 6)[0].block_state(), GuardExceeded);
    CHECK_THROWS_AS(incoherent_attack_error(p, 0), InvalidArgument);

    const auto rep = coherent_attack_error(p, 3);
    CHECK(rep.dims_used == 64);
    CHECK(rep.kind == AttackKind::coherent);
    CHECK(rep.block_size == 3);
  }

  TEST_CASE("exponent fit")
  {
    const std::vector<double> exact = {std::exp(-1.0), std::exp(-2.0), std::exp(-3.0), std::exp(-4.0)};
    const auto fit = fit_error_exponent(exact);
    CHECK(fit.slope == doctest::Approx(-1.0));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(fit.dropped_first);
    CHECK(fit.block_sizes == std::vector<int>{1, 2, 3, 4});

    // transient at N = 1 is dropped
    const std::vector<double> transient = {0.9, std::exp(-2.0), std::exp(-3.0), std::exp(-4.0), std::exp(-5.0)};
    const auto dropped = fit_error_exponent(transient);
    CHECK(dropped.dropped_first);
    CHECK(dropped.slope == doctest::Approx(-1.0));

    // zero errors are skipped
    const std::vector<double> zeros = {0.1, 0.0, 0.001};
    CHECK(fit_error_exponent(zeros).slope == doctest::Approx(std::log(0.01) / 2.0));

    const std::vector<double> unusable = {0.2, 0.0, 1e-13};
    CHECK_THROWS_AS(fit_error_exponent(unusable), NumericError);

    const std::vector<int> sizes = {2, 4};
    CHECK(least_squares_slope(exact, sizes) == doctest::Approx(-1.0));
  }

  TEST_CASE("Eve's exponents")
  {
    CHECK(eve_error_exponent(make_params(2, 1.0), AttackKind::coherent, 4) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(eve_error_exponent(make_params(3, 1.0), AttackKind::incoherent, 4) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(eve_error_exponent(make_params(2, 0.8), AttackKind::coherent, 2), InvalidArgument);

    // incoherent at the closed-form threshold decays like Bob's error
    const double inc = eve_error_exponent(make_params(2, 2.0 / 3.0), AttackKind::incoherent, 6);
    CHECK(std::abs(inc - std::log(0.5)) <= 0.05);

    // coherent decays like the squared overlap of the Bob-correct sector
    for (double beta0 : {0.7, 0.75, 0.8, 0.85}) {
      const auto p = make_params(2, beta0);
      const double s = p.lambda / p.beta0;
      const double coh = eve_error_exponent(p, AttackKind::coherent, 6);
      CAPTURE(beta0);
      CHECK(std::abs(coh - 2.0 * std::log(s)) <= 0.05);
    }
  }
}
