#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "supportgraph/blockmat.hpp"
#include "supportgraph/errors.hpp"
#include "supportgraph/random.hpp"

using namespace supportgraph;

namespace {

SymBlock friction_block(const std::vector<double>& u, double g_par, double g_perp) {
  const SymBlock uu = SymBlock::outer(u);
  return g_par * uu + g_perp * (SymBlock::identity(3) - uu);
}

std::vector<double> unit_vector(SplitMix64& rng) {
  std::vector<double> u(3);
  double n = 0.0;
  do {
    for (double& x : u) x = rng.normal();
    n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  } while (n < 1e-6);
  for (double& x : u) x /= n;
  return u;
}

double reconstruction_error(const SymBlock& s, const SmallEigen& e) {
  const std::size_t d = s.dim();
  double err = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      err += (v - s(i, j)) * (v - s(i, j));
    }
  return std::sqrt(err);
}

double orthonormality_error(const Block& q) {
  const std::size_t d = q.dim();
  double worst = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += q(k, a) * q(k, b);
      worst = std::max(worst, std::abs(v - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

}  // namespace

TEST_SUITE("blockmat") {
  TEST_CASE("symmetric storage mirrors every write") {
    SymBlock s(3);
    s.set(0, 2, 4.5);
    CHECK(s(2, 0) == 4.5);
    SplitMix64 rng(3);
    const SymBlock r = oracle::random_symmetric(rng, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(r(i, j) == r(j, i));
  }

  TEST_CASE("eigenvalues of a diagonal block") {
    const std::vector<double> diag = {8, 2, 8};
    const SmallEigen e = sym_eigen(SymBlock::diagonal(diag));
    REQUIRE(e.values.size() == 3);
    CHECK(e.values[0] == doctest::Approx(2.0));
    CHECK(e.values[1] == doctest::Approx(8.0));
    CHECK(e.values[2] == doctest::Approx(8.0));
  }

  TEST_CASE("friction block along x has the parallel coefficient on u") {
    const SymBlock y = friction_block({1, 0, 0}, 2e6, 8e6);
    const SmallEigen e = sym_eigen(y);
    CHECK(e.values[0] == doctest::Approx(2e6).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(8e6).epsilon(1e-14));
    CHECK(e.values[2] == doctest::Approx(8e6).epsilon(1e-14));
    // Eigenvector of the smallest value is +-u.
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.vectors(1, 0)) < 1e-12);
    CHECK(std::abs(e.vectors(2, 0)) < 1e-12);
  }

  TEST_CASE("eigenvalues match characteristic polynomial roots") {
    SplitMix64 rng(101);
    for (int trial = 0; trial < 25; ++trial) {
      const SymBlock s = oracle::random_symmetric(rng, 3, 5.0);
      const SmallEigen e = sym_eigen(s);
      auto roots = oracle::charpoly_eigenvalues(oracle::to_matrix(s));
      std::sort(roots.begin(), roots.end());
      REQUIRE(roots.size() == 3);
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(e.values[k] - roots[k]) <= 1e-10);
    }
  }

  TEST_CASE("eigen decomposition reconstructs and is orthonormal") {
    SplitMix64 rng(7);
    for (std::size_t d : {1u, 2u, 3u, 5u, 8u}) {
      for (int trial = 0; trial < 10; ++trial) {
        const SymBlock s = oracle::random_symmetric(rng, d, std::pow(10.0, trial % 7));
        const SmallEigen e = sym_eigen(s);
        CHECK(reconstruction_error(s, e) <= 1e-12 * std::max(1.0, s.frobenius_norm()));
        CHECK(orthonormality_error(e.vectors) <= 1e-12);
        CHECK(std::is_sorted(e.values.begin(), e.values.end()));
      }
    }
  }

  TEST_CASE("repeated eigenvalues stay orthonormal") {
    const SmallEigen e = sym_eigen(SymBlock::identity(4, 3.0));
    for (double v : e.values) CHECK(v == doctest::Approx(3.0));
    CHECK(orthonormality_error(e.vectors) <= 1e-14);
  }

  TEST_CASE("non-finite entries are rejected") {
    SymBlock s(3);
    s.set(1, 1, std::nan(""));
    CHECK_THROWS_AS(sym_eigen(s), InputError);
  }

  TEST_CASE("friction block spectrum for random directions") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto u = unit_vector(rng);
      const double gp = rng.uniform(0.1, 10.0), gq = rng.uniform(0.1, 10.0);
      const SymBlock y = friction_block(u, gp, gq);
      const SmallEigen e = sym_eigen(y);
      std::vector<double> want = {gp, gq, gq};
      std::sort(want.begin(), want.end());
      for (std::size_t k = 0; k < 3; ++k) CHECK(e.values[k] == doctest::Approx(want[k]).epsilon(1e-12));
      CHECK(lambda_max(y) == doctest::Approx(std::max(gp, gq)).epsilon(1e-12));
      const double cond = std::max(gp, gq) / std::min(gp, gq);
      CHECK(std::abs(condition_number(y) - cond) <= 1e-10 * cond);
    }
  }

  TEST_CASE("psd test") {
    CHECK(is_psd(SymBlock::identity(3), 0.0));
    CHECK_FALSE(is_psd(SymBlock::identity(3, -1.0), 1e-12));
    CHECK(is_psd(SymBlock(3), 0.0));
    // Rank one is PSD; a slightly negative direction is not.
    const std::vector<double> u = {1, 2, 3};
    const SymBlock r1 = SymBlock::outer(u);
    CHECK(is_psd(r1, 1e-12));
    CHECK_FALSE(is_psd(r1 - SymBlock::identity(3, 1e-6), 1e-12));
  }

  TEST_CASE("psd is monotone under the Loewner order") {
    SplitMix64 rng(19);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const SymBlock a = oracle::random_symmetric(rng, 3, 2.0);
      const SymBlock b = oracle::random_symmetric(rng, 3, 2.0);
      if (!is_psd(a - b, 0.0)) continue;
      ++checked;
      CHECK(lambda_min(a) >= lambda_min(b) - 1e-12);
    }
    CHECK(checked > 0);
  }

  TEST_CASE("Loewner sandwich of the extreme eigenvalues") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const SymBlock s = oracle::random_symmetric(rng, 3, 3.0);
      CHECK(is_psd(SymBlock::identity(3, lambda_max(s)) - s, 1e-12));
      CHECK(is_psd(s - SymBlock::identity(3, lambda_min(s)), 1e-12));
    }
  }

  TEST_CASE("small solves") {
    const std::vector<double> ones = {1, 1, 1};
    auto x = solve_block(SymBlock::identity(3, 2.0), ones);
    for (double v : x) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    const std::vector<double> diag = {2, 8, 8};
    x = solve_block(SymBlock::diagonal(diag), diag);
    for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("random SPD solve passes the multiply-back check") {
    SplitMix64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
      const SymBlock s = oracle::random_spd(rng, 3);
      std::vector<double> b(3);
      for (double& v : b) v = rng.normal();
      const auto x = solve_block(s, b);
      const auto sx = oracle::matvec(oracle::to_matrix(s), x);
      double r = 0.0, bn = 0.0;
      for (int k = 0; k < 3; ++k) {
        r += (sx[k] - b[k]) * (sx[k] - b[k]);
        bn += b[k] * b[k];
      }
      CHECK(std::sqrt(r) <= 1e-10 * std::sqrt(bn));
    }
  }

  TEST_CASE("singular or indefinite blocks are refused") {
    const std::vector<double> b = {1, 1, 1};
    CHECK_THROWS_AS(solve_block(SymBlock(3), b), SingularBlock);
    CHECK_THROWS_AS(solve_block(SymBlock::identity(3, -1.0), b), SingularBlock);
    const std::vector<double> u = {1, 0, 0};
    CHECK_THROWS_AS(solve_block(SymBlock::outer(u), b), SingularBlock);
  }

  TEST_CASE("Cholesky inverse and block solve") {
    SplitMix64 rng(31);
    const SymBlock s = oracle::random_spd(rng, 4);
    const BlockCholesky c(s);
    const Block prod = s.block() * c.inverse().block();
    CHECK((prod - Block::identity(4)).frobenius_norm() < 1e-10);
    Block rhs(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) rhs(i, j) = rng.normal();
    CHECK((s.block() * c.solve(rhs) - rhs).frobenius_norm() < 1e-10 * rhs.frobenius_norm());
  }

  TEST_CASE("congruence matches the explicit triple product") {
    SplitMix64 rng(37);
    Block a(3);
    for (double& v : a.data()) v = rng.normal();
    const SymBlock s = oracle::random_spd(rng, 3);
    const SymBlock c = congruence(a, s);
    const Block direct = a * s.block() * a.transposed();
    CHECK((c.block() - direct).frobenius_norm() < 1e-12 * direct.frobenius_norm());
  }

  TEST_CASE("block arithmetic") {
    Block a = Block::identity(2, 2.0);
    a(0, 1) = 1.0;
    CHECK(a.transposed()(1, 0) == 1.0);
    const Block b = a * a;
    CHECK(b(0, 0) == 4.0);
    CHECK(b(0, 1) == 4.0);
    CHECK(b(1, 1) == 4.0);
    CHECK((a - a).is_zero());
  }
}
