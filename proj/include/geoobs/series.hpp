#pragma once

#include <array>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace geoobs {

inline constexpr double kZeroThreshold = 1e-11;
inline constexpr int kDefaultOrder = 12;

enum class Axis { X, Y };

struct Term {
  int i = 0;
  int j = 0;
  double c = 0.0;
};

class UnivariateSeries {
 public:
  explicit UnivariateSeries(int order = kDefaultOrder);
  // coefficients beyond `order` are dropped, missing ones are zero
  UnivariateSeries(int order, std::vector<double> coeffs);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return k >= 0 && k <= order() ? c_[k] : 0.0; }
  void set(int k, double c);
  std::span<const double> coefficients() const { return c_; }

  std::optional<int> leading_exponent(double threshold = kZeroThreshold) const;
  double eval(double x) const;

  friend UnivariateSeries operator*(const UnivariateSeries& a, const UnivariateSeries& b);
  friend UnivariateSeries operator+(const UnivariateSeries& a, const UnivariateSeries& b);
  friend bool operator==(const UnivariateSeries&, const UnivariateSeries&) = default;

 private:
  std::vector<double> c_;
};

// Truncated series in (x, y), dense triangular storage by total degree.
class BivariateSeries {
 public:
  explicit BivariateSeries(int order = kDefaultOrder);
  // throws on negative exponents or duplicate (i, j); terms above order are dropped
  static BivariateSeries from_terms(int order, std::span<const Term> terms);
  static BivariateSeries from_terms(int order, std::initializer_list<Term> terms) {
    return from_terms(order, std::span<const Term>(terms.begin(), terms.size()));
  }

  int order() const { return order_; }
  double coeff(int i, int j) const;
  void set(int i, int j, double c);  // silently ignored when i + j > order
  void add(int i, int j, double c);

  // nonzero terms, ascending total degree then ascending i
  std::vector<Term> terms() const;
  double eval(double x, double y) const;
  BivariateSeries truncated(int order) const;
  // homogeneous part of total degree d, coefficient of x^(d-j) y^j at index j
  std::vector<double> homogeneous(int d) const;
  bool is_zero(double threshold = 0.0) const;

  BivariateSeries& operator+=(const BivariateSeries& o);
  BivariateSeries& operator-=(const BivariateSeries& o);
  BivariateSeries& operator*=(double k);
  friend BivariateSeries operator+(BivariateSeries a, const BivariateSeries& b) { return a += b; }
  friend BivariateSeries operator-(BivariateSeries a, const BivariateSeries& b) { return a -= b; }
  friend BivariateSeries operator*(BivariateSeries a, double k) { return a *= k; }
  friend BivariateSeries operator*(double k, BivariateSeries a) { return a *= k; }
  friend BivariateSeries operator-(BivariateSeries a) { return a *= -1.0; }
  friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b);
  friend bool operator==(const BivariateSeries&, const BivariateSeries&) = default;

 private:
  static std::size_t index(int i, int j) {
    const int d = i + j;
    return static_cast<std::size_t>(d) * (d + 1) / 2 + j;
  }
  int order_;
  std::vector<double> c_;
};

struct Rotation2 {
  double c = 1.0;
  double s = 0.0;

  static Rotation2 from_angle(double theta);
  // rows (m00 m01; m10 m11); throws unless orthogonal with det +1
  static Rotation2 from_matrix(double m00, double m01, double m10, double m11);
  Rotation2 inverse() const { return {c, -s}; }
  Rotation2 then(const Rotation2& r) const;  // apply *this first, then r
  std::array<double, 2> apply(double x, double y) const { return {c * x - s * y, s * x + c * y}; }
};

// z-adjustment c0 + cx*x + cy*y added after substitution
struct Affine {
  double c0 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

BivariateSeries partial(const BivariateSeries& s, Axis axis);
UnivariateSeries compose_y(const BivariateSeries& s, const UnivariateSeries& u);
UnivariateSeries solve_implicit(const BivariateSeries& F, int order);
BivariateSeries transform(const BivariateSeries& s, const Rotation2& rot,
                          std::array<double, 2> shift = {0.0, 0.0}, Affine add = {});

// s(X(u,v), Y(u,v)) truncated to `order`
BivariateSeries compose(const BivariateSeries& s, const BivariateSeries& X,
                        const BivariateSeries& Y, int order);

}  // namespace geoobs
