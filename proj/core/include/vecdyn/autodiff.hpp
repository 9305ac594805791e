#pragma once

#include <utility>

#include "vecdyn/dual.hpp"
#include "vecdyn/errors.hpp"
#include "vecdyn/spatial.hpp"

namespace vecdyn {

using DualVector = VecX<Dual>;

/// Seeds a dual vector with values x and tangents v.
inline DualVector seed(const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  DualVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = Dual(x[i], v[i]);
  }
  return out;
}

inline Eigen::VectorXd values(const DualVector& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = x[i].value;
  }
  return out;
}

inline Eigen::VectorXd tangents(const DualVector& x) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = x[i].tangent;
  }
  return out;
}

/// Jacobian-vector product of a vector function in one forward pass:
/// returns (fn(x), D fn(x) · v). No Jacobian is materialized; fn must be
/// callable on dual vectors (all library operations are).
template <typename Fn>
std::pair<Eigen::VectorXd, Eigen::VectorXd> jvp(Fn&& fn, const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& v) {
  if (x.size() != v.size()) {
    throw DimensionError("jvp: tangent has size " + std::to_string(v.size()) +
                         ", input has size " + std::to_string(x.size()));
  }
  const DualVector out = fn(seed(x, v));
  return {values(out), tangents(out)};
}

/// Scalar-output variant of jvp.
template <typename Fn>
std::pair<double, double> jvp_scalar(Fn&& fn, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) {
  if (x.size() != v.size()) {
    throw DimensionError("jvp_scalar: tangent has size " + std::to_string(v.size()) +
                         ", input has size " + std::to_string(x.size()));
  }
  const Dual out = fn(seed(x, v));
  return {out.value, out.tangent};
}

/// Dense m x n Jacobian assembled column-by-column from n JVP passes with
/// basis tangents. An AD Jacobian is slower than an analytical one; this is
/// here for testing and for functions without a closed form.
template <typename Fn>
Eigen::MatrixXd jacobian_fwd(Fn&& fn, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    const auto [value, tangent] = jvp(fn, x, e);
    if (j == 0) {
      jac.resize(value.size(), n);
    }
    jac.col(j) = tangent;
  }
  if (n == 0) {
    jac.resize(values(fn(seed(x, x))).size(), 0);
  }
  return jac;
}

}  // namespace vecdyn
