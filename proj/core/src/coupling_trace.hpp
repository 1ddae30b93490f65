#pragma once

#include <Eigen/Dense>

#include <vector>

#include "levelset/revnet.hpp"

namespace levelset::detail {

// Intermediate quantities of one pass through the coupling blocks, indexed by
// block. For block n with input state (u_n, v_n):
//   a_n = K1 v_n + b1,   u_{n+1} = u_n + h K1^T tanh(a_n)
//   c_n = K2 u_{n+1} + b2,   v_{n+1} = v_n - h K2^T tanh(c_n)
// The inverse pass visits the same states in reverse, so both passes fill the
// same fields.
struct CouplingTrace {
  std::vector<Eigen::VectorXd> v_in;   // v_n
  std::vector<Eigen::VectorXd> u_mid;  // u_{n+1}
  std::vector<Eigen::VectorXd> ta;     // tanh(a_n)
  std::vector<Eigen::VectorXd> tc;     // tanh(c_n)

  void resize(const RevNetParams& params);
};

// Runs g on x, recording the trace. Returns z.
Eigen::VectorXd trace_forward(const RevNetParams& params, const Eigen::VectorXd& x,
                              CouplingTrace& trace);

// Runs g^{-1} on z, recording the trace. Returns x.
Eigen::VectorXd trace_inverse(const RevNetParams& params, const Eigen::VectorXd& z,
                              CouplingTrace& trace);

// Per-block shear matrices (each dim/2 x dim/2, symmetric):
//   P_n = h K1^T diag(1 - tanh^2(a_n)) K1
//   Q_n = h K2^T diag(1 - tanh^2(c_n)) K2
struct ShearFactors {
  std::vector<Eigen::MatrixXd> p;
  std::vector<Eigen::MatrixXd> q;
};

void shear_factors(const RevNetParams& params, const CouplingTrace& trace, ShearFactors& out);

// J_{g^{-1}} = F_0 F_1 ... F_{2N-1} with
//   F_{2n}   = [[I, -P_n], [0, I]]
//   F_{2n+1} = [[I, 0], [Q_n, I]].
// When prefix is non-null, (*prefix)[k] receives F_0 ... F_{k-1}.
void assemble_jacobian(const ShearFactors& factors, Eigen::MatrixXd& jac,
                       std::vector<Eigen::MatrixXd>* prefix = nullptr);

}  // namespace levelset::detail
