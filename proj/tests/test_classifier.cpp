#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "geoobs/classifier.hpp"
#include "geoobs/errors.hpp"

using namespace geoobs;
using std::numbers::pi;

namespace {

BivariateSeries poly(std::initializer_list<Term> terms, int order = kDefaultOrder) {
  return BivariateSeries::from_terms(order, terms);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

// hand-written asymptote-frame series mapped back to the original chart
BivariateSeries from_asymptote_frame(const BivariateSeries& G, double th0) {
  return transform(G, Rotation2::from_angle(th0).inverse());
}

}  // namespace

TEST_CASE("hessian_classify examples") {
  auto c = hessian_classify(poly({{2, 0, 3.0}, {1, 1, 1.0}, {0, 2, 3.0}}));
  CHECK(c.shape == Shape::ConvexUp);
  CHECK(2 * c.a == doctest::Approx(7.0));
  CHECK(2 * c.b == doctest::Approx(5.0));

  auto s = hessian_classify(poly({{2, 0, 1.0}, {0, 2, -1.0}}));
  CHECK(s.shape == Shape::Saddle);
  CHECK(s.a == doctest::Approx(1.0));
  CHECK(s.b == doctest::Approx(1.0));

  CHECK(hessian_classify(poly({{3, 0, 1.0}})).shape == Shape::DegenerateHigherOrder);
  CHECK(hessian_classify(poly({{2, 0, -1.0}, {0, 2, -2.0}})).shape == Shape::ConcaveDown);
  CHECK(hessian_classify(poly({{2, 0, 1.0}})).shape == Shape::ConvexUp);
}

TEST_CASE("hessian rotation diagonalizes") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 50; ++t) {
    auto g = poly({{2, 0, U(rng)}, {1, 1, U(rng)}, {0, 2, U(rng)}, {3, 0, U(rng)}});
    auto c = hessian_classify(g);
    auto d = transform(g, c.rotation);
    CHECK(std::abs(d.coeff(1, 1)) < 1e-10);
    if (c.shape == Shape::Saddle) {
      CHECK(d.coeff(2, 0) == doctest::Approx(c.a));
      CHECK(d.coeff(0, 2) == doctest::Approx(-c.b));
      CHECK(c.a > 0);
      CHECK(c.b > 0);
    }
    // shape survives a random rotation of the chart
    auto r = transform(g, Rotation2::from_angle(3 * U(rng)));
    CHECK(hessian_classify(r).shape == c.shape);
  }
}

TEST_CASE("theta0 examples") {
  CHECK(theta0(1, 1) == doctest::Approx(pi / 4));
  CHECK(theta0(3, 1) == doctest::Approx(pi / 3));
  CHECK(theta0(1, 3) == doctest::Approx(pi / 6));
  CHECK(code_of([] { theta0(0, 1); }) == ErrorCode::NonPositiveInput);
  CHECK(code_of([] { theta0(1, -1); }) == ErrorCode::NonPositiveInput);
}

TEST_CASE("wedge_decompose examples") {
  auto w = wedge_decompose(poly({{2, 0, 1.0}, {0, 2, -1.0}}));
  CHECK(w.degree == 2);
  REQUIRE(w.boundary_slopes.size() == 2);
  CHECK(w.boundary_slopes[0] == doctest::Approx(-1.0));
  CHECK(w.boundary_slopes[1] == doctest::Approx(1.0));
  REQUIRE(w.sectors.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(w.sectors[i].sign != FormSign::Mixed);
    CHECK(w.sectors[i].sign != w.sectors[(i + 1) % 4].sign);
  }

  auto w3 = wedge_decompose(poly({{3, 0, 1.0}, {1, 2, -3.0}}));
  CHECK(w3.degree == 3);
  CHECK(w3.vertical);
  REQUIRE(w3.boundary_slopes.size() == 2);
  CHECK(w3.boundary_slopes[1] == doctest::Approx(1 / std::sqrt(3.0)));
  CHECK(w3.sectors.size() == 6);

  auto wd = wedge_decompose(poly({{2, 0, 1.0}, {0, 2, 1.0}}));
  CHECK(wd.boundary_slopes.empty());
  REQUIRE(wd.sectors.size() == 1);
  CHECK(wd.sectors[0].sign == FormSign::Positive);

  CHECK(code_of([] { wedge_decompose(BivariateSeries(6)); }) == ErrorCode::ZeroForm);
}

TEST_CASE("wedge slopes match constructed roots") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 60; ++t) {
    const int k = 2 + t % 5;
    const int r = static_cast<int>(U(rng) * (k + 1)) % (k + 1);
    int nreal = r;  // remaining degree must be even
    if ((k - nreal) % 2 != 0) nreal = nreal > 0 ? nreal - 1 : 1;
    // distinct ray angles in (-pi/2, pi/2], well separated
    std::vector<double> ang;
    while (static_cast<int>(ang.size()) < nreal) {
      double a = -pi / 2 + pi * U(rng);
      bool ok = std::all_of(ang.begin(), ang.end(), [&](double b) {
        double d = std::abs(a - b);
        return std::min(d, pi - d) > 0.1;
      });
      if (ok) ang.push_back(a);
    }
    BivariateSeries f = poly({{0, 0, 1.0}}, k);
    for (double a : ang) f = f * poly({{1, 0, std::sin(a)}, {0, 1, -std::cos(a)}}, k);
    for (int q = 0; q < (k - nreal) / 2; ++q) {
      double s = 0.5 + U(rng), c = 0.3 * (U(rng) - 0.5);
      f = f * poly({{2, 0, 1.0}, {1, 1, c}, {0, 2, s}}, k);
    }
    auto w = wedge_decompose(f);
    CHECK(w.degree == k);
    CHECK(static_cast<int>(w.sectors.size()) <= 2 * k);
    std::vector<double> expect;
    bool vertical = false;
    for (double a : ang) {
      if (std::abs(std::cos(a)) < 1e-12) {
        vertical = true;
        continue;
      }
      expect.push_back(std::tan(a));
    }
    std::sort(expect.begin(), expect.end());
    CHECK(w.vertical == vertical);
    REQUIRE(w.boundary_slopes.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
      CHECK(std::abs(w.boundary_slopes[i] - expect[i]) <= 1e-9 * std::max(1.0, std::abs(expect[i])));
    CHECK(w.sectors.size() == (nreal == 0 ? 1u : 2u * nreal));
  }
}

TEST_CASE("saddle_case constructed Case1 and Case2") {
  const double th0 = pi / 4;
  auto g1 = from_asymptote_frame(poly({{1, 1, -2.0}, {3, 0, 1.0}}), th0);
  auto c1 = saddle_case(g1, -0.05);
  CHECK(c1.theta0 == doctest::Approx(th0));
  CHECK(c1.leading == doctest::Approx(1.0));
  CHECK(c1.leading_exponent == 3);
  CHECK(c1.a2 > 0);
  CHECK(c1.saddle_case == SaddleCase::Case1);
  CHECK(c1.predicted_max_switch_points == 1);

  auto g2 = from_asymptote_frame(poly({{1, 1, -2.0}, {3, 0, -1.0}}), th0);
  auto c2 = saddle_case(g2, 0.05);
  CHECK(c2.leading == doctest::Approx(-1.0));
  CHECK(c2.a2 < 0);
  CHECK(c2.saddle_case == SaddleCase::Case2);
  CHECK(c2.predicted_max_switch_points == 0);

  CHECK(saddle_case(g1, 0.05).saddle_case == SaddleCase::Case3);
  CHECK(saddle_case(g2, -0.05).saddle_case == SaddleCase::Case4);
}

TEST_CASE("saddle_case errors") {
  CHECK(code_of([] { saddle_case(poly({{2, 0, 1.0}, {0, 2, 1.0}}), 0.0); }) == ErrorCode::NotASaddle);
  auto g = poly({{2, 0, 1.0}, {0, 2, -1.0}, {3, 0, 0.3}});
  CHECK(code_of([&] { saddle_case(g, pi / 2); }) == ErrorCode::DeltaOutOfRange);
  CHECK(code_of([&] { saddle_case(g, -pi / 2 + 1e-7); }) == ErrorCode::DeltaOutOfRange);
  CHECK_NOTHROW(saddle_case(g, pi / 2 - 1e-3));
  // pure quadratic saddle has no pure-x term along the asymptote
  CHECK(code_of([] { saddle_case(poly({{2, 0, 1.0}, {0, 2, -1.0}}), 0.1); }) ==
        ErrorCode::AsymptoteDegenerate);
}

TEST_CASE("a2 vanishes at delta = 0 and changes sign") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.2, 2.0), V(-1, 1);
  for (int t = 0; t < 30; ++t) {
    double a = U(rng), b = U(rng), phi = 3 * V(rng);
    auto base = poly({{2, 0, a}, {0, 2, -b}, {3, 0, V(rng)}, {2, 1, V(rng)}, {0, 3, V(rng)}, {1, 2, V(rng)}});
    auto g = transform(base, Rotation2::from_angle(phi));
    auto c0 = saddle_case(g, 0.0);
    CHECK(std::abs(c0.a2) < 1e-12);
    double lim = delta_limit(c0.theta0);
    double d = 0.5 * lim;
    CHECK(saddle_case(g, d).a2 * saddle_case(g, -d).a2 < 0);
  }
}

TEST_CASE("a2 matches the closed form on pure quadratic saddles") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> U(0.2, 2.0), V(-1, 1);
  for (int t = 0; t < 30; ++t) {
    double a = U(rng), b = U(rng);
    // a cubic along the asymptote keeps the case defined; it does not touch u^2
    auto g = transform(poly({{2, 0, a}, {0, 2, -b}}), Rotation2::from_angle(3 * V(rng)));
    auto h = hessian_classify(g);
    const double th0 = theta0(h.a, h.b);
    auto Gt = transform(transform(g, h.rotation), Rotation2::from_angle(th0));
    Gt.set(3, 0, 1.0);
    auto g2 = transform(transform(Gt, Rotation2::from_angle(th0).inverse()), h.rotation.inverse());
    for (double d : {-0.4, -0.1, 0.05, 0.3}) {
      if (std::abs(d) >= delta_limit(th0)) continue;
      auto c = saddle_case(g2, d);
      double closed = h.b * std::pow(std::cos(th0 + d), 2) / std::pow(std::cos(th0), 2) - h.b;
      CHECK(std::abs(c.a2 - closed) < 1e-10);
    }
  }
}

TEST_CASE("classify_two_surfaces examples") {
  Surface g(poly({{0, 1, 0.5}, {2, 0, 1.0}}));
  Surface h(poly({{0, 1, -0.5}, {2, 0, 1.0}, {3, 0, 1.0}}));
  auto c = classify_two_surfaces(g, h, Vec3::Zero());
  CHECK(c.curve.M == 3);
  CHECK(c.curve.aM == doctest::Approx(1.0));
  CHECK(c.nf1.N == 2);
  CHECK(c.nf2.N == 2);
  CHECK(c.nf1.a00 == doctest::Approx(1.0));
  CHECK(c.nf2.a00 == doctest::Approx(1.0));
  CHECK(c.label == CaseLabel::MainAlternating);

  Surface f1(poly({{0, 1, 0.5}, {1, 1, 1.0}}));
  auto t1 = classify_two_surfaces(f1, Surface(poly({{0, 1, -0.5}, {2, 0, 1.0}})), Vec3::Zero());
  CHECK(t1.label == CaseLabel::TrivialOneFlat);
  CHECK(t1.prediction.find("does not touch S1") != std::string::npos);

  auto t0 = classify_two_surfaces(g, Surface(poly({{0, 1, -0.5}, {2, 0, 1.0}})), Vec3::Zero());
  CHECK(t0.label == CaseLabel::TrivialPhiZero);

  auto tb = classify_two_surfaces(f1, Surface(poly({{0, 1, -0.5}})), Vec3::Zero());
  CHECK(tb.label == CaseLabel::TrivialBothFlat);
}

TEST_CASE("classify_two_surfaces reduction labels") {
  // N = 2, Ntilde = 3: phi leading term -a00/(2k) x^2, so M = 2 = min(N, Ntilde)
  auto c = classify_two_surfaces(Surface(poly({{0, 1, 0.5}, {2, 0, 1.0}})),
                                 Surface(poly({{0, 1, -0.5}, {3, 0, 1.0}})), Vec3::Zero());
  CHECK(c.nf1.N == 2);
  CHECK(c.nf2.N == 3);
  CHECK(c.curve.M == 2);
  CHECK(c.curve.aM == doctest::Approx(-1.0));
  CHECK(c.label == CaseLabel::NneqNtilde_Reduces);

  auto n = classify_two_surfaces(Surface(poly({{0, 1, 0.5}, {2, 0, -1.0}})),
                                 Surface(poly({{0, 1, -0.5}, {2, 0, -1.0}, {3, 0, 2.0}})), Vec3::Zero());
  CHECK(n.label == CaseLabel::NegativeLeading_Reduces);
}

TEST_CASE("classification is total on random transversal pairs") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 30; ++t) {
    BivariateSeries G(8), H(8);
    for (int d = 2; d <= 5; ++d)
      for (int j = 0; j <= d; ++j) {
        G.set(d - j, j, U(rng));
        H.set(d - j, j, U(rng));
      }
    G.set(1, 0, 0.3 * U(rng));
    G.set(0, 1, 0.3 + 0.3 * U(rng));
    H.set(0, 1, -0.3 + 0.3 * U(rng));
    auto c = classify_two_surfaces(Surface(G), Surface(H), Vec3::Zero());
    CHECK(!to_string(c.label).empty());
    CHECK(!c.prediction.empty());
  }
}

TEST_CASE("predict_bound examples") {
  CHECK(predict_bound(hessian_classify(poly({{2, 0, 1.0}, {0, 2, 1.0}}))).bound == 1);
  CHECK(predict_bound(hessian_classify(poly({{2, 0, -1.0}, {0, 2, -1.0}}))).bound == 0);
  auto s = hessian_classify(poly({{2, 0, 1.0}, {0, 2, -1.0}}));
  auto p = predict_bound(s);
  CHECK(p.bound == 2);
  CHECK(p.quantity == "intervals");
  auto g = from_asymptote_frame(poly({{1, 1, -2.0}, {3, 0, 1.0}}), pi / 4);
  for (double d : {-0.1, 0.1}) CHECK(predict_bound(saddle_case(g, d)).bound == 2);
  Surface a(poly({{0, 1, 0.5}, {2, 0, 1.0}}));
  Surface b(poly({{0, 1, -0.5}, {2, 0, 1.0}, {3, 0, 1.0}}));
  CHECK(!predict_bound(classify_two_surfaces(a, b, Vec3::Zero())).bound.has_value());
}
