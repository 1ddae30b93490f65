#include "levelset/calculus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "coupling_trace.hpp"
#include "levelset/error.hpp"

namespace levelset {

JacobianMatrix jacobian_inverse_fd(const RevNetParams& params, const Eigen::VectorXd& z,
                                   double eps) {
  if (!(eps > 0.0)) throw ConfigError("finite-difference eps must be positive");
  const Eigen::Index d = params.config.dim;
  if (z.size() != d) throw DimensionError("z has wrong length for the network");
  JacobianMatrix jac(d, d);
  Eigen::VectorXd zp = z;
  Eigen::VectorXd zm = z;
  for (Eigen::Index i = 0; i < d; ++i) {
    zp[i] = z[i] + eps;
    zm[i] = z[i] - eps;
    jac.col(i) = (inverse(params, zp) - inverse(params, zm)) / (2.0 * eps);
    zp[i] = z[i];
    zm[i] = z[i];
  }
  if (!jac.allFinite()) throw NumericalError("finite-difference Jacobian is not finite");
  return jac;
}

JacobianMatrix jacobian_inverse_analytic(const RevNetParams& params, const Eigen::VectorXd& z) {
  if (z.size() != params.config.dim) throw DimensionError("z has wrong length for the network");
  detail::CouplingTrace trace;
  detail::trace_inverse(params, z, trace);
  detail::ShearFactors factors;
  detail::shear_factors(params, trace, factors);
  JacobianMatrix jac;
  detail::assemble_jacobian(factors, jac);
  return jac;
}

JacobianMatrix jacobian_inverse_at_input(const RevNetParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.config.dim) throw DimensionError("x has wrong length for the network");
  detail::CouplingTrace trace;
  detail::trace_forward(params, x, trace);
  detail::ShearFactors factors;
  detail::shear_factors(params, trace, factors);
  JacobianMatrix jac;
  detail::assemble_jacobian(factors, jac);
  return jac;
}

Determinant det_jacobian(const JacobianMatrix& jac) {
  if (jac.rows() != jac.cols()) throw DimensionError("determinant of a non-square matrix");
  if (jac.size() == 0) return {1.0, false};
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double tol =
      static_cast<double>(jac.rows()) * std::numeric_limits<double>::epsilon() * pivots.maxCoeff();
  return {lu.determinant(), !(pivots.minCoeff() > tol)};
}

double abs_det_svd(const JacobianMatrix& jac) {
  if (jac.rows() != jac.cols()) throw DimensionError("determinant of a non-square matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  return svd.singularValues().prod();
}

Eigen::VectorXd transformed_directional_derivs(const Eigen::VectorXd& grad_f,
                                               const JacobianMatrix& jac) {
  if (jac.rows() != grad_f.size()) {
    std::ostringstream msg;
    msg << "gradient length " << grad_f.size() << " does not match Jacobian rows " << jac.rows();
    throw DimensionError(msg.str());
  }
  return jac.transpose() * grad_f;
}

}  // namespace levelset
