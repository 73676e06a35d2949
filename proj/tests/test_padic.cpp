#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <set>

#include "ultracoral/padic.hpp"

using namespace ultracoral;

TEST_CASE("valuation by repeated division") {
  CHECK(valuation(12, 2) == 2);
  CHECK(valuation(0, 3) == kValuationInfinity);
  CHECK(valuation(7, 7) == 1);
  CHECK(valuation(-2, 2) == 1);
  CHECK(valuation(1, 5) == 0);
  CHECK_THROWS_AS(valuation(4, 4), std::invalid_argument);
}

TEST_CASE("ultrametric norm examples") {
  CHECK(ultrametric_norm(1, 3, 2).value() == 0.5);
  CHECK(ultrametric_norm(5, 5, 3).value() == 0.0);
  CHECK(ultrametric_norm(0, 4, 2).value() == 0.25);
  UltrametricNorm norm = ultrametric_norm(0, 4, 2);
  CHECK(norm.p == 2);
  CHECK(norm.val == 2);
  CHECK(!norm.zero);
}

TEST_CASE("divergence level matches digit prefixes and the norm") {
  CHECK(divergence_level(0, 1, 2, 3) == 0);
  CHECK(divergence_level(1, 3, 2, 3) == 1);
  CHECK(divergence_level(2, 2, 2, 3) == 3);

  for (long long p : {2ll, 3ll}) {
    int m = p == 2 ? 4 : 3;
    IndexLattice lattice(p, m);
    for (long long i = 0; i < lattice.size; ++i) {
      auto di = lattice.digits(i);
      for (long long j = 0; j < lattice.size; ++j) {
        if (i == j) continue;
        auto dj = lattice.digits(j);
        int first_diff = m;
        for (int k = 0; k < m; ++k) {
          if (di[static_cast<std::size_t>(k)] != dj[static_cast<std::size_t>(k)]) {
            first_diff = k;
            break;
          }
        }
        int k = divergence_level(i, j, p, m);
        CHECK(k == first_diff);
        double expected = 1.0;
        for (int l = 0; l < k; ++l) expected /= static_cast<double>(p);
        CHECK(ultrametric_norm(i, j, p).value() == expected);
      }
    }
  }
}

TEST_CASE("digits round-trip") {
  IndexLattice lattice(3, 4);
  for (long long i = 0; i < lattice.size; ++i)
    CHECK(lattice.from_digits(lattice.digits(i)) == i);
}

TEST_CASE("ball membership and the partition property") {
  IndexLattice l22(2, 2);
  CHECK(ball_members(l22, 0, 1) == std::vector<long long>{0, 2});
  CHECK(ball_members(l22, 1, 0) == std::vector<long long>{0, 1, 2, 3});
  CHECK(ball_members(l22, 3, 2) == std::vector<long long>{3});
  CHECK_THROWS_AS(ball_members(l22, 0, 3), std::out_of_range);

  for (long long p : {2ll, 3ll}) {
    IndexLattice lattice(p, 3);
    for (int k = 0; k <= 3; ++k) {
      std::set<long long> seen;
      long long pk = 1;
      for (int l = 0; l < k; ++l) pk *= p;
      for (long long center = 0; center < pk; ++center) {
        auto members = ball_members(lattice, center, k);
        CHECK(static_cast<long long>(members.size()) == lattice.size / pk);
        for (long long j : members) {
          CHECK(!seen.count(j));  // balls at one level are disjoint
          seen.insert(j);
        }
      }
      CHECK(static_cast<long long>(seen.size()) == lattice.size);
    }
  }
}

TEST_CASE("ultrametric inequality holds exhaustively") {
  IndexLattice lattice(2, 6);
  std::vector<double> norm(static_cast<std::size_t>(lattice.size * lattice.size));
  for (long long i = 0; i < lattice.size; ++i)
    for (long long j = 0; j < lattice.size; ++j)
      norm[static_cast<std::size_t>(i * lattice.size + j)] =
          ultrametric_norm(i, j, 2).value();
  auto at = [&](long long i, long long j) {
    return norm[static_cast<std::size_t>(i * lattice.size + j)];
  };
  for (long long i = 0; i < lattice.size; ++i)
    for (long long j = 0; j < lattice.size; ++j)
      for (long long k = 0; k < lattice.size; ++k)
        CHECK(at(i, k) <= std::max(at(i, j), at(j, k)));
}

TEST_CASE("kozyrev vectors match the stated patterns") {
  IndexLattice l21(2, 1);
  auto v1 = kozyrev_vector(l21, 0, 1, 0);
  CHECK(v1[0] == std::complex<double>(1.0, 0.0));
  CHECK(v1[1] == std::complex<double>(-1.0, 0.0));

  IndexLattice l22(2, 2);
  auto v2 = kozyrev_vector(l22, 0, 1, 0);
  CHECK(v2[0].real() == 1.0);
  CHECK(v2[1].real() == -1.0);
  CHECK(v2[2].real() == 1.0);
  CHECK(v2[3].real() == -1.0);

  auto v3 = kozyrev_vector(l22, -1, 1, 0);
  CHECK(v3[0] == std::complex<double>(1.0, 0.0));
  CHECK(v3[1] == std::complex<double>(0.0, 0.0));
  CHECK(v3[2] == std::complex<double>(-1.0, 0.0));
  CHECK(v3[3] == std::complex<double>(0.0, 0.0));
}

TEST_CASE("kozyrev vector validation") {
  IndexLattice l22(2, 2);
  CHECK_THROWS_AS(kozyrev_vector(l22, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(kozyrev_vector(l22, -2, 1, 0), std::invalid_argument);  // 1-r > m
  CHECK_THROWS_AS(kozyrev_vector(l22, 0, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(kozyrev_vector(l22, -1, 1, 2), std::invalid_argument);
}

TEST_CASE("kozyrev vectors are orthogonal to constants and to each other") {
  for (long long p : {2ll, 3ll}) {
    int m = p == 2 ? 5 : 3;
    IndexLattice lattice(p, m);
    struct Tagged {
      int r;
      int j;
      long long ball;
      std::vector<std::complex<double>> v;
    };
    std::vector<Tagged> all;
    for (int r = 0; 1 - r <= m; --r) {
      long long balls = 1;
      for (int l = 0; l < -r; ++l) balls *= p;
      for (int j = 1; j < p; ++j)
        for (long long b = 0; b < balls; ++b)
          all.push_back({r, j, b, kozyrev_vector(lattice, r, j, b)});
    }
    // multiplicity count: they plus the constant span the whole space
    CHECK(static_cast<long long>(all.size()) == lattice.size - 1);

    auto inner = [](const std::vector<std::complex<double>>& a,
                    const std::vector<std::complex<double>>& b) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
      return acc;
    };
    std::vector<std::complex<double>> ones(static_cast<std::size_t>(lattice.size),
                                           {1.0, 0.0});
    for (std::size_t a = 0; a < all.size(); ++a) {
      CHECK(std::abs(inner(all[a].v, ones)) < 1e-12);
      for (std::size_t b = a + 1; b < all.size(); ++b)
        CHECK(std::abs(inner(all[a].v, all[b].v)) < 1e-12);
    }
  }
}

TEST_CASE("lattice validation") {
  CHECK_THROWS_AS(IndexLattice(4, 2), std::invalid_argument);
  CHECK_THROWS_AS(IndexLattice(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(IndexLattice(2, -1), std::invalid_argument);
  CHECK_THROWS_AS(IndexLattice(2, 21), std::invalid_argument);  // 2^21 over the cap
  IndexLattice ok(2, 20);
  CHECK(ok.size == (1ll << 20));
}
