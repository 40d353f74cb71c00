#include "geoobs/series.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "geoobs/errors.hpp"

namespace geoobs {

UnivariateSeries::UnivariateSeries(int order) {
  if (order < 0) throw Error(ErrorCode::InvalidInput, "series order must be >= 0");
  c_.assign(order + 1, 0.0);
}

UnivariateSeries::UnivariateSeries(int order, std::vector<double> coeffs) : UnivariateSeries(order) {
  for (int k = 0; k <= order && k < static_cast<int>(coeffs.size()); ++k) c_[k] = coeffs[k];
}

void UnivariateSeries::set(int k, double c) {
  if (k >= 0 && k <= order()) c_[k] = c;
}

std::optional<int> UnivariateSeries::leading_exponent(double threshold) const {
  for (int k = 0; k <= order(); ++k)
    if (std::abs(c_[k]) > threshold) return k;
  return std::nullopt;
}

double UnivariateSeries::eval(double x) const {
  double r = 0.0;
  for (int k = order(); k >= 0; --k) r = r * x + c_[k];
  return r;
}

UnivariateSeries operator*(const UnivariateSeries& a, const UnivariateSeries& b) {
  const int n = std::min(a.order(), b.order());
  UnivariateSeries r(n);
  for (int i = 0; i <= n; ++i) {
    if (a.c_[i] == 0.0) continue;
    for (int j = 0; i + j <= n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return r;
}

UnivariateSeries operator+(const UnivariateSeries& a, const UnivariateSeries& b) {
  const int n = std::min(a.order(), b.order());
  UnivariateSeries r(n);
  for (int i = 0; i <= n; ++i) r.c_[i] = a.c_[i] + b.c_[i];
  return r;
}

BivariateSeries::BivariateSeries(int order) : order_(order) {
  if (order < 0) throw Error(ErrorCode::InvalidInput, "series order must be >= 0");
  c_.assign(static_cast<std::size_t>(order + 1) * (order + 2) / 2, 0.0);
}

BivariateSeries BivariateSeries::from_terms(int order, std::span<const Term> terms) {
  BivariateSeries s(order);
  std::set<std::pair<int, int>> seen;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0)
      throw Error(ErrorCode::InvalidInput, "negative exponent in series term");
    if (!std::isfinite(t.c))
      throw Error(ErrorCode::InvalidInput, "non-finite series coefficient");
    if (!seen.insert({t.i, t.j}).second)
      throw Error(ErrorCode::InvalidInput,
                  "duplicate series term (" + std::to_string(t.i) + "," + std::to_string(t.j) + ")");
    s.set(t.i, t.j, t.c);
  }
  return s;
}

double BivariateSeries::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > order_) return 0.0;
  return c_[index(i, j)];
}

void BivariateSeries::set(int i, int j, double c) {
  if (i < 0 || j < 0 || i + j > order_) return;
  c_[index(i, j)] = c;
}

void BivariateSeries::add(int i, int j, double c) {
  if (i < 0 || j < 0 || i + j > order_) return;
  c_[index(i, j)] += c;
}

std::vector<Term> BivariateSeries::terms() const {
  std::vector<Term> out;
  for (int d = 0; d <= order_; ++d)
    for (int i = 0; i <= d; ++i) {
      double c = c_[index(i, d - i)];
      if (c != 0.0) out.push_back({i, d - i, c});
    }
  return out;
}

double BivariateSeries::eval(double x, double y) const {
  std::vector<double> px(order_ + 1, 1.0), py(order_ + 1, 1.0);
  for (int k = 1; k <= order_; ++k) {
    px[k] = px[k - 1] * x;
    py[k] = py[k - 1] * y;
  }
  double r = 0.0;
  for (int d = 0; d <= order_; ++d)
    for (int i = 0; i <= d; ++i) {
      double c = c_[index(i, d - i)];
      if (c != 0.0) r += c * px[i] * py[d - i];
    }
  return r;
}

BivariateSeries BivariateSeries::truncated(int order) const {
  BivariateSeries r(order);
  for (int d = 0; d <= std::min(order, order_); ++d)
    for (int j = 0; j <= d; ++j) r.c_[index(d - j, j)] = c_[index(d - j, j)];
  return r;
}

std::vector<double> BivariateSeries::homogeneous(int d) const {
  std::vector<double> h(d + 1, 0.0);
  for (int j = 0; j <= d; ++j) h[j] = coeff(d - j, j);
  return h;
}

bool BivariateSeries::is_zero(double threshold) const {
  return std::all_of(c_.begin(), c_.end(), [&](double c) { return std::abs(c) <= threshold; });
}

BivariateSeries& BivariateSeries::operator+=(const BivariateSeries& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

BivariateSeries& BivariateSeries::operator-=(const BivariateSeries& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

BivariateSeries& BivariateSeries::operator*=(double k) {
  for (double& c : c_) c *= k;
  return *this;
}

BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b) {
  const int n = std::min(a.order_, b.order_);
  BivariateSeries r(n);
  for (int da = 0; da <= n; ++da)
    for (int ja = 0; ja <= da; ++ja) {
      double ca = a.c_[BivariateSeries::index(da - ja, ja)];
      if (ca == 0.0) continue;
      for (int db = 0; da + db <= n; ++db)
        for (int jb = 0; jb <= db; ++jb) {
          double cb = b.c_[BivariateSeries::index(db - jb, jb)];
          if (cb != 0.0) r.c_[BivariateSeries::index(da - ja + db - jb, ja + jb)] += ca * cb;
        }
    }
  return r;
}

Rotation2 Rotation2::from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

Rotation2 Rotation2::from_matrix(double m00, double m01, double m10, double m11) {
  const double tol = 1e-12;
  bool ortho = std::abs(m00 * m00 + m10 * m10 - 1) < tol && std::abs(m01 * m01 + m11 * m11 - 1) < tol &&
               std::abs(m00 * m01 + m10 * m11) < tol;
  if (!ortho || m00 * m11 - m01 * m10 < 0)
    throw Error(ErrorCode::InvalidInput, "rotation must be orthogonal with determinant +1");
  return {m00, m10};
}

Rotation2 Rotation2::then(const Rotation2& r) const {
  return {r.c * c - r.s * s, r.s * c + r.c * s};
}

BivariateSeries partial(const BivariateSeries& s, Axis axis) {
  BivariateSeries r(std::max(0, s.order() - 1));
  if (s.order() == 0) return r;
  for (const auto& t : s.terms()) {
    if (axis == Axis::X && t.i > 0) r.set(t.i - 1, t.j, t.c * t.i);
    if (axis == Axis::Y && t.j > 0) r.set(t.i, t.j - 1, t.c * t.j);
  }
  return r;
}

UnivariateSeries compose_y(const BivariateSeries& s, const UnivariateSeries& u) {
  if (u[0] != 0.0)
    throw Error(ErrorCode::NonzeroConstantTerm, "compose_y needs u(0) = 0");
  const int n = std::min(s.order(), u.order());
  // Horner in u over the x-polynomials Q_j(x) = sum_i c_ij x^i
  UnivariateSeries acc(n);
  for (int j = n; j >= 0; --j) {
    acc = acc * u;
    UnivariateSeries q(n);
    for (int i = 0; i + j <= n; ++i) q.set(i, s.coeff(i, j));
    acc = acc + q;
  }
  return acc;
}

UnivariateSeries solve_implicit(const BivariateSeries& F, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidInput, "order must be >= 0");
  if (std::abs(F.coeff(0, 0)) > kZeroThreshold)
    throw Error(ErrorCode::NonzeroConstantTerm, "solve_implicit needs F(0,0) = 0");
  const double fy = F.coeff(0, 1);
  if (std::abs(fy) < kZeroThreshold)
    throw Error(ErrorCode::SingularJacobian, "dF/dy(0,0) vanishes");
  const int n = std::min(order, F.order());
  UnivariateSeries phi(order);
  const auto Ft = F.truncated(n);
  for (int d = 1; d <= n; ++d) {
    // phi_d enters [F(x,phi)]_d only through fy * phi_d
    double r = compose_y(Ft, phi)[d];
    phi.set(d, -r / fy);
  }
  return phi;
}

BivariateSeries compose(const BivariateSeries& s, const BivariateSeries& X, const BivariateSeries& Y,
                        int order) {
  const int n = std::min({order, X.order(), Y.order()});
  const int m = s.order();  // shifted arguments pull high terms down, so no early truncation
  BivariateSeries acc(n);
  for (int i = m; i >= 0; --i) {
    BivariateSeries p(n);
    for (int j = m - i; j >= 0; --j) {
      p = p * Y;
      p.add(0, 0, s.coeff(i, j));
    }
    acc = acc * X + p;
  }
  return acc;
}

BivariateSeries transform(const BivariateSeries& s, const Rotation2& rot, std::array<double, 2> shift,
                          Affine add) {
  const int n = s.order();
  BivariateSeries X(n), Y(n);
  X.set(0, 0, shift[0]);
  X.set(1, 0, rot.c);
  X.set(0, 1, -rot.s);
  Y.set(0, 0, shift[1]);
  Y.set(1, 0, rot.s);
  Y.set(0, 1, rot.c);
  auto r = compose(s, X, Y, n);
  r.add(0, 0, add.c0);
  r.add(1, 0, add.cx);
  r.add(0, 1, add.cy);
  return r;
}

}  // namespace geoobs
