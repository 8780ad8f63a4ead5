#include <doctest.h>

#include <cmath>

#include "qad/channel.hpp"
#include "support.hpp"

using namespace qad;
using qad::test::max_abs_diff;

namespace {

DensityOperator tripartite_density(const TripartiteState& s)
{
  return DensityOperator::from_pure(s.vector, {s.n, s.n, s.n * s.n});
}

DensityOperator eve_reduced(const TripartiteState& s)
{
  const int keep[] = {2};
  return partial_trace(tripartite_density(s), keep);
}

// Pairwise overlap of Eve's conditional states read straight off rho_AB:
// <e_ab|e_a'b'> is proportional to <a'b'|rho|ab>.
double overlap_from_rho(const DensityOperator& rho, int n, int a, int b, int a2, int b2)
{
  const auto& m = rho.matrix();
  const int i = a * n + b;
  const int j = a2 * n + b2;
  return std::abs(m(j, i)) / std::sqrt(m(i, i).real() * m(j, j).real());
}

const double kBetaGrid[] = {0.0, 0.1, 0.25, 0.4, 0.5, 0.65, 0.8, 0.9, 1.0}; // fraction of [1/n, 1]

} // namespace

TEST_SUITE("channel")
{
  TEST_CASE("make_params")
  {
    const auto clean = make_params(2, 1.0);
    CHECK(clean.lambda == doctest::Approx(1.0));
    CHECK(clean.q == doctest::Approx(0.0));

    const auto noise = make_params(2, 0.5);
    CHECK(noise.lambda == doctest::Approx(0.0));
    CHECK(noise.q == doctest::Approx(0.5));

    const auto third = make_params(2, 2.0 / 3.0);
    CHECK(third.lambda == doctest::Approx(1.0 / 3.0));
    CHECK(third.q == doctest::Approx(1.0 / 3.0));

    for (int n = 2; n <= 6; ++n) {
      for (double f : kBetaGrid) {
        const double beta0 = 1.0 / n + f * (1.0 - 1.0 / n);
        const auto p = make_params(n, beta0);
        CHECK(std::abs(p.beta0 - (p.lambda + (1.0 - p.lambda) / n)) <= 1e-12);
        CHECK(p.lambda >= 0.0);
        CHECK(p.lambda <= 1.0);
      }
    }

    CHECK_THROWS_AS(make_params(2, 0.49), InvalidArgument);
    CHECK_THROWS_AS(make_params(3, 1.01), InvalidArgument);
    CHECK_THROWS_AS(make_params(1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_params(2, std::nan("")), InvalidArgument);
  }

  TEST_CASE("isotropic state")
  {
    const auto phi = maximally_entangled(3).amplitudes();
    const auto pure = isotropic_state(make_params(3, 1.0));
    CHECK(max_abs_diff(pure.matrix(), phi * phi.adjoint()) < 1e-12);

    const auto mixed = isotropic_state(make_params(3, 1.0 / 3.0));
    CHECK(max_abs_diff(mixed.matrix(), ComplexMatrix::Identity(9, 9) / 9.0) < 1e-12);

    const auto mid = isotropic_state(make_params(2, 0.8));
    CHECK(mid.matrix()(0, 0).real() == doctest::Approx(0.4));

    // diagonal statistics reproduce beta0
    for (int n = 2; n <= 5; ++n) {
      for (double f : kBetaGrid) {
        const auto p = make_params(n, 1.0 / n + f * (1.0 - 1.0 / n));
        const auto rho = isotropic_state(p);
        double agree = 0.0;
        for (int a = 0; a < n; ++a) {
          agree += rho.matrix()(a * n + a, a * n + a).real();
        }
        CHECK(std::abs(agree - p.beta0) <= 1e-12);
      }
    }
  }

  TEST_CASE("purification")
  {
    const auto pure = purify(isotropic_state(make_params(2, 1.0)));
    const auto eve_pure = hermitian_eigensystem(eve_reduced(pure).matrix()).values;
    CHECK(eve_pure(eve_pure.size() - 1) == doctest::Approx(1.0));
    CHECK(eve_pure.head(eve_pure.size() - 1).cwiseAbs().maxCoeff() < 1e-12);

    const auto noisy = purify(isotropic_state(make_params(3, 1.0 / 3.0)));
    CHECK(max_abs_diff(eve_reduced(noisy).matrix(), ComplexMatrix::Identity(9, 9) / 9.0) < 1e-12);

    for (int n = 2; n <= 4; ++n) {
      for (double f : {0.15, 0.55, 0.85}) {
        const auto rho = isotropic_state(make_params(n, 1.0 / n + f * (1.0 - 1.0 / n)));
        const auto psi = purify(rho);
        const int keep_ab[] = {0, 1};
        CHECK(max_abs_diff(partial_trace(tripartite_density(psi), keep_ab).matrix(), rho.matrix()) <= 1e-9);
      }
    }

    // works for any two-qunit state, not only isotropic ones
    std::mt19937_64 rng(41);
    const auto generic = qad::test::random_state(rng, 9);
    const DensityOperator rho(generic.matrix(), {3, 3});
    const int keep_ab[] = {0, 1};
    CHECK(max_abs_diff(partial_trace(tripartite_density(purify(rho)), keep_ab).matrix(), rho.matrix()) <= 1e-9);

    CHECK_THROWS_AS(purify(DensityOperator::maximally_mixed({2, 3})), InvalidArgument);
  }

  TEST_CASE("joint statistics")
  {
    const auto clean = joint_statistics(make_params(4, 1.0));
    CHECK(clean.diagonal().minCoeff() == doctest::Approx(0.25));
    CHECK(clean.sum() == doctest::Approx(1.0));
    CHECK((clean - Eigen::MatrixXd(clean.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

    const auto noise = joint_statistics(make_params(3, 1.0 / 3.0));
    CHECK((noise.array() - 1.0 / 9.0).abs().maxCoeff() < 1e-15);

    const auto p = joint_statistics(make_params(3, 0.6));
    CHECK(p(1, 1) == doctest::Approx(0.2));
    CHECK(p(0, 2) == doctest::Approx(0.4 / 6.0));
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.trace() == doctest::Approx(0.6).epsilon(1e-15));
  }

  TEST_CASE("Eve conditionals at the extremes")
  {
    for (int n : {2, 3}) {
      const auto clean = eve_conditionals(purify(isotropic_state(make_params(n, 1.0))));
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          CHECK(clean.at(a, b).has_value() == (a == b));
        }
      }
      for (int a = 1; a < n; ++a) {
        CHECK(fidelity(clean.at(0, 0)->state, clean.at(a, a)->state) == doctest::Approx(1.0));
      }

      const auto noise = eve_conditionals(purify(isotropic_state(make_params(n, 1.0 / n))));
      for (int i = 0; i < n * n; ++i) {
        for (int j = i + 1; j < n * n; ++j) {
          const auto& ei = noise.at(i / n, i % n)->vector.amplitudes();
          const auto& ej = noise.at(j / n, j % n)->vector.amplitudes();
          CHECK(std::abs(ei.dot(ej)) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("Eve conditional fidelity regression")
  {
    // lambda / beta0 = 0.6 / 0.8, read off <11|rho|00>
    const auto p = make_params(2, 0.8);
    const auto rho = isotropic_state(p);
    const double oracle = overlap_from_rho(rho, 2, 0, 0, 1, 1);
    CHECK(oracle == doctest::Approx(0.75).epsilon(1e-12));

    const auto table = eve_conditionals(purify(rho));
    const double f = fidelity(table.at(0, 0)->state, table.at(1, 1)->state);
    CHECK(f > 0.0);
    CHECK(f < 1.0);
    CHECK(f == doctest::Approx(oracle).epsilon(1e-8));
  }

  TEST_CASE("all conditional overlaps agree with rho_AB")
  {
    for (int n : {2, 3}) {
      const auto rho = isotropic_state(make_params(n, 1.0 / n + 0.6 * (1.0 - 1.0 / n)));
      const auto table = eve_conditionals(purify(rho));
      for (int i = 0; i < n * n; ++i) {
        for (int j = 0; j < n * n; ++j) {
          const auto& vi = table.at(i / n, i % n)->vector.amplitudes();
          const auto& vj = table.at(j / n, j % n)->vector.amplitudes();
          CHECK(std::abs(vi.dot(vj)) == doctest::Approx(overlap_from_rho(rho, n, i / n, i % n, j / n, j % n)));
        }
      }
    }
  }

  TEST_CASE("conditional probabilities and mixture reconstruct the channel")
  {
    for (int n = 2; n <= 5; ++n) {
      for (double f : kBetaGrid) {
        const auto p = make_params(n, 1.0 / n + f * (1.0 - 1.0 / n));
        const auto psi = purify(isotropic_state(p));
        const auto table = eve_conditionals(psi);
        const auto stats = joint_statistics(p);

        double agree = 0.0;
        ComplexMatrix mixture = ComplexMatrix::Zero(n * n, n * n);
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            CHECK(std::abs(table.probability(a, b) - stats(a, b)) <= 1e-9);
            if (const auto& e = table.at(a, b)) {
              mixture += e->probability * e->state.matrix();
            }
          }
          agree += table.probability(a, a);
        }
        CHECK(std::abs(agree - p.beta0) <= 1e-9);
        CHECK(max_abs_diff(mixture, eve_reduced(psi).matrix()) <= 1e-9);
      }
    }
  }

  TEST_CASE("cyclic relabeling leaves the conditional table invariant")
  {
    for (int n : {2, 3, 4}) {
      const auto table = eve_conditionals(purify(isotropic_state(make_params(n, 1.0 / n + 0.45 * (1.0 - 1.0 / n)))));
      for (int shift = 1; shift < n; ++shift) {
        for (int i = 0; i < n * n; ++i) {
          const int a = i / n, b = i % n;
          const int sa = (a + shift) % n, sb = (b + shift) % n;
          CHECK(std::abs(table.probability(a, b) - table.probability(sa, sb)) <= 1e-9);
          for (int j = 0; j < n * n; ++j) {
            const int c = j / n, d = j % n;
            const int sc = (c + shift) % n, sd = (d + shift) % n;
            const double f = fidelity(table.at(a, b)->state, table.at(c, d)->state);
            const double fs = fidelity(table.at(sa, sb)->state, table.at(sc, sd)->state);
            CHECK(std::abs(f - fs) <= 1e-7);
          }
        }
      }
    }
  }
}
