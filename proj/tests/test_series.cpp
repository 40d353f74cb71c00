#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geoobs/errors.hpp"
#include "geoobs/series.hpp"

using namespace geoobs;

namespace {

BivariateSeries poly(int order, std::initializer_list<Term> terms) {
  return BivariateSeries::from_terms(order, terms);
}

// Plain univariate truncated product, written independently of the library.
std::vector<double> naive_mul(const std::vector<double>& a, const std::vector<double>& b,
                              int order) {
  std::vector<double> r(order + 1, 0.0);
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) r[i + j] += a[i] * b[j];
  return r;
}

// F(x, phi(x)) via brute-force powers of phi, independent of compose_y.
std::vector<double> naive_substitute(const BivariateSeries& F, const UnivariateSeries& phi,
                                     int order) {
  std::vector<double> p(order + 1, 0.0);
  for (int k = 0; k <= std::min(order, phi.order()); ++k) p[k] = phi[k];
  std::vector<double> out(order + 1, 0.0);
  for (const auto& t : F.terms()) {
    std::vector<double> pw(order + 1, 0.0);
    pw[0] = 1.0;
    for (int r = 0; r < t.j; ++r) pw = naive_mul(pw, p, order);
    for (int k = 0; k + t.i <= order; ++k) out[k + t.i] += t.c * pw[k];
  }
  return out;
}

}  // namespace

TEST_CASE("eval examples") {
  CHECK(poly(4, {{2, 0, 1.0}, {0, 2, -1.0}}).eval(1.0, 2.0) == doctest::Approx(-3.0));
  CHECK(BivariateSeries(5).eval(0.3, -0.7) == 0.0);
  CHECK(poly(4, {{3, 0, 1.0}, {1, 1, 2.0}}).eval(2.0, 0.5) == doctest::Approx(10.0));
}

TEST_CASE("stored zeros are normalized away and truncation drops high terms") {
  auto s = poly(3, {{1, 0, 0.0}, {2, 1, 4.0}, {3, 1, 9.0}});
  auto ts = s.terms();
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].i == 2);
  CHECK(ts[0].j == 1);
  CHECK(ts[0].c == 4.0);
}

TEST_CASE("duplicate terms are rejected") {
  CHECK_THROWS_AS(poly(4, {{1, 1, 1.0}, {1, 1, 2.0}}), Error);
  CHECK_THROWS_AS(poly(4, {{-1, 1, 1.0}}), Error);
}

TEST_CASE("partial examples") {
  auto s = poly(6, {{2, 1, 1.0}});
  auto dx = partial(s, Axis::X);
  auto dy = partial(s, Axis::Y);
  CHECK(dx.order() == 5);
  CHECK(dx == poly(5, {{1, 1, 2.0}}));
  CHECK(dy == poly(5, {{2, 0, 1.0}}));
  CHECK(partial(poly(3, {{0, 0, 5.0}}), Axis::X).terms().empty());
}

TEST_CASE("mixed partials commute exactly") {
  // short mantissas so (c*i)*j and (c*j)*i are both exact
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> K(-(1 << 20), 1 << 20);
  for (int trial = 0; trial < 20; ++trial) {
    BivariateSeries s(8);
    for (int d = 0; d <= 8; ++d)
      for (int j = 0; j <= d; ++j) s.set(d - j, j, std::ldexp(K(rng), -20));
    CHECK(partial(partial(s, Axis::X), Axis::Y) == partial(partial(s, Axis::Y), Axis::X));
  }
}

TEST_CASE("compose_y examples") {
  auto g = poly(8, {{0, 1, 0.5}, {2, 0, 1.0}});
  auto r0 = compose_y(g, UnivariateSeries(8));
  CHECK(r0[2] == doctest::Approx(1.0));
  CHECK(r0.leading_exponent() == 2);

  auto r1 = compose_y(poly(8, {{0, 2, 1.0}}), UnivariateSeries(8, {0.0, 1.0}));
  CHECK(r1[2] == doctest::Approx(1.0));
  CHECK(r1[1] == 0.0);

  auto r2 = compose_y(g, UnivariateSeries(8, {0, 0, 0, 1.0}));
  CHECK(r2[2] == doctest::Approx(1.0));
  CHECK(r2[3] == doctest::Approx(0.5));
  for (int k : {0, 1, 4, 5, 6, 7, 8}) CHECK(r2[k] == 0.0);

  CHECK_THROWS_AS(compose_y(g, UnivariateSeries(8, {0.1, 1.0})), Error);
}

TEST_CASE("solve_implicit examples") {
  auto phi0 = solve_implicit(poly(10, {{0, 1, 1.0}}), 10);
  CHECK(!phi0.leading_exponent().has_value());

  auto phi1 = solve_implicit(poly(10, {{0, 1, 1.0}, {3, 0, -1.0}}), 10);
  CHECK(phi1[3] == doctest::Approx(1.0));
  CHECK(phi1.leading_exponent() == 3);

  // y = x^2 + y^2 -> phi = (1 - sqrt(1 - 4x^2))/2 = x^2 + x^4 + 2x^6 + ...
  auto F = poly(12, {{0, 1, 1.0}, {2, 0, -1.0}, {0, 2, -1.0}});
  auto phi = solve_implicit(F, 6);
  CHECK(phi[2] == doctest::Approx(1.0));
  CHECK(phi[4] == doctest::Approx(1.0));
  CHECK(phi[6] == doctest::Approx(2.0));
  auto back = naive_substitute(F, phi, 6);
  for (double c : back) CHECK(std::abs(c) < 1e-14);

  CHECK_THROWS_AS(solve_implicit(poly(6, {{2, 0, 1.0}, {0, 2, 1.0}}), 6), Error);
}

TEST_CASE("randomized implicit solves back-substitute to zero") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const int order = 12;
    // every other coefficient bounded by |F_y|, which keeps phi representable in doubles
    double fy = 0.1 + 0.9 * std::abs(U(rng));
    BivariateSeries F(order);
    for (int d = 1; d <= order; ++d)
      for (int j = 0; j <= d; ++j) F.set(d - j, j, fy * U(rng));
    F.set(0, 1, U(rng) < 0 ? -fy : fy);
    auto phi = solve_implicit(F, order);
    CHECK(phi[0] == 0.0);
    auto r = compose_y(F, phi);
    auto naive = naive_substitute(F, phi, order);
    for (int k = 0; k <= order; ++k) {
      CHECK(std::abs(r[k]) < 1e-9);
      CHECK(std::abs(naive[k]) < 1e-9);
    }
  }
}

TEST_CASE("transform examples") {
  using std::numbers::pi;
  auto saddle = poly(6, {{2, 0, 1.0}, {0, 2, -1.0}});
  auto t = transform(saddle, Rotation2::from_angle(pi / 4));
  CHECK(t.coeff(1, 1) == doctest::Approx(-2.0));
  CHECK(std::abs(t.coeff(2, 0)) < 1e-15);
  CHECK(std::abs(t.coeff(0, 2)) < 1e-15);

  auto id = transform(saddle, Rotation2{});
  CHECK(id == saddle);

  auto q = transform(poly(6, {{2, 0, 1.0}}), Rotation2::from_angle(pi / 2));
  CHECK(q.coeff(0, 2) == doctest::Approx(1.0));
  CHECK(std::abs(q.coeff(2, 0)) < 1e-15);
}

TEST_CASE("transform with shift and affine adjustment") {
  // (x+1)^2 - 1 - 2x = x^2
  auto s = poly(4, {{2, 0, 1.0}});
  auto t = transform(s, Rotation2{}, {1.0, 0.0}, {-1.0, -2.0, 0.0});
  CHECK(t == poly(4, {{2, 0, 1.0}}));
}

TEST_CASE("transform round trip restores coefficients") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    BivariateSeries s(10);
    for (int d = 0; d <= 10; ++d)
      for (int j = 0; j <= d; ++j) s.set(d - j, j, U(rng));
    auto R = Rotation2::from_angle(3 * U(rng));
    auto back = transform(transform(s, R), R.inverse());
    for (int d = 0; d <= 10; ++d)
      for (int j = 0; j <= d; ++j) {
        double c = s.coeff(d - j, j);
        CHECK(std::abs(back.coeff(d - j, j) - c) <= 1e-12 * std::max(1.0, std::abs(c)));
      }
  }
}

TEST_CASE("eval of product equals product of evals") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    BivariateSeries a(12), b(12);
    for (int d = 0; d <= 6; ++d)
      for (int j = 0; j <= d; ++j) {
        a.set(d - j, j, U(rng));
        b.set(d - j, j, U(rng));
      }
    double x = 0.5 * U(rng), y = 0.5 * U(rng);
    double lhs = (a * b).eval(x, y), rhs = a.eval(x, y) * b.eval(x, y);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("rotation validation") {
  CHECK_THROWS_AS(Rotation2::from_matrix(1, 0, 0, -1), Error);
  auto r = Rotation2::from_matrix(0, -1, 1, 0);
  CHECK(r.s == doctest::Approx(1.0));
}
