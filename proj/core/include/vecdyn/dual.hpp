#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <ostream>

namespace vecdyn {

/// Forward-mode scalar: carries a value and one directional derivative.
/// All core kinematics/dynamics are generic over the scalar, so seeding the
/// inputs with tangents yields a Jacobian-vector product in a single pass.
struct Dual {
  double value = 0.0;
  double tangent = 0.0;

  Dual() = default;
  Dual(double value) : value(value) {}  // NOLINT: implicit lift of constants
  Dual(double value, double tangent) : value(value), tangent(tangent) {}

  Dual& operator+=(const Dual& o) {
    value += o.value;
    tangent += o.tangent;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    tangent -= o.tangent;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    tangent = tangent * o.value + value * o.tangent;
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    tangent = (tangent * o.value - value * o.tangent) / (o.value * o.value);
    value /= o.value;
    return *this;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  return {a.value + b.value, a.tangent + b.tangent};
}
inline Dual operator-(const Dual& a, const Dual& b) {
  return {a.value - b.value, a.tangent - b.tangent};
}
inline Dual operator-(const Dual& a) { return {-a.value, -a.tangent}; }
inline Dual operator+(const Dual& a) { return a; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.value * b.value, a.tangent * b.value + a.value * b.tangent};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  return {a.value / b.value,
          (a.tangent * b.value - a.value * b.tangent) / (b.value * b.value)};
}

inline Dual operator+(const Dual& a, double b) { return {a.value + b, a.tangent}; }
inline Dual operator+(double a, const Dual& b) { return {a + b.value, b.tangent}; }
inline Dual operator-(const Dual& a, double b) { return {a.value - b, a.tangent}; }
inline Dual operator-(double a, const Dual& b) { return {a - b.value, -b.tangent}; }
inline Dual operator*(const Dual& a, double b) { return {a.value * b, a.tangent * b}; }
inline Dual operator*(double a, const Dual& b) { return {a * b.value, a * b.tangent}; }
inline Dual operator/(const Dual& a, double b) { return {a.value / b, a.tangent / b}; }
inline Dual operator/(double a, const Dual& b) {
  return {a / b.value, -a * b.tangent / (b.value * b.value)};
}

// Comparisons act on values only, which is what pivoting expects.
inline bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.value != b.value; }
inline bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
inline bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }
inline bool operator==(const Dual& a, double b) { return a.value == b; }
inline bool operator!=(const Dual& a, double b) { return a.value != b; }
inline bool operator<(const Dual& a, double b) { return a.value < b; }
inline bool operator>(const Dual& a, double b) { return a.value > b; }
inline bool operator<=(const Dual& a, double b) { return a.value <= b; }
inline bool operator>=(const Dual& a, double b) { return a.value >= b; }
inline bool operator==(double a, const Dual& b) { return a == b.value; }
inline bool operator!=(double a, const Dual& b) { return a != b.value; }
inline bool operator<(double a, const Dual& b) { return a < b.value; }
inline bool operator>(double a, const Dual& b) { return a > b.value; }
inline bool operator<=(double a, const Dual& b) { return a <= b.value; }
inline bool operator>=(double a, const Dual& b) { return a >= b.value; }

inline Dual sin(const Dual& x) {
  return {std::sin(x.value), std::cos(x.value) * x.tangent};
}
inline Dual cos(const Dual& x) {
  return {std::cos(x.value), -std::sin(x.value) * x.tangent};
}
inline Dual tan(const Dual& x) {
  const double t = std::tan(x.value);
  return {t, (1.0 + t * t) * x.tangent};
}
inline Dual asin(const Dual& x) {
  return {std::asin(x.value), x.tangent / std::sqrt(1.0 - x.value * x.value)};
}
inline Dual acos(const Dual& x) {
  return {std::acos(x.value), -x.tangent / std::sqrt(1.0 - x.value * x.value)};
}
inline Dual atan(const Dual& x) {
  return {std::atan(x.value), x.tangent / (1.0 + x.value * x.value)};
}
inline Dual atan2(const Dual& y, const Dual& x) {
  const double d = x.value * x.value + y.value * y.value;
  return {std::atan2(y.value, x.value),
          (x.value * y.tangent - y.value * x.tangent) / d};
}
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value);
  return {e, e * x.tangent};
}
inline Dual log(const Dual& x) { return {std::log(x.value), x.tangent / x.value}; }
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value);
  return {s, x.tangent / (2.0 * s)};
}
inline Dual abs(const Dual& x) { return x.value < 0.0 ? -x : x; }
inline Dual fabs(const Dual& x) { return abs(x); }
inline Dual pow(const Dual& x, double p) {
  return {std::pow(x.value, p), p * std::pow(x.value, p - 1.0) * x.tangent};
}
inline Dual pow(const Dual& x, int p) { return pow(x, static_cast<double>(p)); }
inline Dual hypot(const Dual& x, const Dual& y) { return sqrt(x * x + y * y); }
inline Dual fmax(const Dual& a, const Dual& b) { return a.value >= b.value ? a : b; }
inline Dual fmin(const Dual& a, const Dual& b) { return a.value <= b.value ? a : b; }
inline Dual floor(const Dual& x) { return {std::floor(x.value), 0.0}; }
inline Dual ceil(const Dual& x) { return {std::ceil(x.value), 0.0}; }

inline bool isfinite(const Dual& x) {
  return std::isfinite(x.value) && std::isfinite(x.tangent);
}
inline bool isnan(const Dual& x) { return std::isnan(x.value); }
inline bool isinf(const Dual& x) { return std::isinf(x.value); }

inline std::ostream& operator<<(std::ostream& os, const Dual& x) {
  return os << x.value << "+" << x.tangent << "ε";
}

}  // namespace vecdyn

namespace std {

template <>
struct numeric_limits<vecdyn::Dual> : numeric_limits<double> {};

}  // namespace std

namespace Eigen {

template <>
struct NumTraits<vecdyn::Dual> : NumTraits<double> {
  using Real = vecdyn::Dual;
  using NonInteger = vecdyn::Dual;
  using Nested = vecdyn::Dual;
  using Literal = double;

  static inline Real epsilon() {
    return vecdyn::Dual(std::numeric_limits<double>::epsilon());
  }
  static inline Real dummy_precision() { return vecdyn::Dual(1e-12); }
  static inline Real highest() {
    return vecdyn::Dual(std::numeric_limits<double>::max());
  }
  static inline Real lowest() {
    return vecdyn::Dual(-std::numeric_limits<double>::max());
  }

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    ReadCost = 1,
    AddCost = 1,
    MulCost = 3,
    RequireInitialization = 1,
  };
};

// Allow mixed double/Dual expressions; constants stay constant (zero tangent).
template <typename BinaryOp>
struct ScalarBinaryOpTraits<vecdyn::Dual, double, BinaryOp> {
  using ReturnType = vecdyn::Dual;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, vecdyn::Dual, BinaryOp> {
  using ReturnType = vecdyn::Dual;
};

}  // namespace Eigen
