#include "coupling_trace.hpp"

namespace levelset::detail {

void CouplingTrace::resize(const RevNetParams& params) {
  const auto n = params.blocks.size();
  v_in.resize(n);
  u_mid.resize(n);
  ta.resize(n);
  tc.resize(n);
}

Eigen::VectorXd trace_forward(const RevNetParams& params, const Eigen::VectorXd& x,
                              CouplingTrace& trace) {
  trace.resize(params);
  const double h = params.config.step_size;
  const Eigen::Index m = params.config.half();
  Eigen::VectorXd u = x.head(m);
  Eigen::VectorXd v = x.tail(m);
  for (std::size_t n = 0; n < params.blocks.size(); ++n) {
    const auto& b = params.blocks[n];
    trace.v_in[n] = v;
    trace.ta[n] = (b.k1 * v + b.b1).array().tanh();
    u.noalias() += h * (b.k1.transpose() * trace.ta[n]);
    trace.u_mid[n] = u;
    trace.tc[n] = (b.k2 * u + b.b2).array().tanh();
    v.noalias() -= h * (b.k2.transpose() * trace.tc[n]);
  }
  Eigen::VectorXd z(2 * m);
  z << u, v;
  return z;
}

Eigen::VectorXd trace_inverse(const RevNetParams& params, const Eigen::VectorXd& z,
                              CouplingTrace& trace) {
  trace.resize(params);
  const double h = params.config.step_size;
  const Eigen::Index m = params.config.half();
  Eigen::VectorXd u = z.head(m);
  Eigen::VectorXd v = z.tail(m);
  for (std::size_t k = params.blocks.size(); k-- > 0;) {
    const auto& b = params.blocks[k];
    trace.u_mid[k] = u;
    trace.tc[k] = (b.k2 * u + b.b2).array().tanh();
    v.noalias() += h * (b.k2.transpose() * trace.tc[k]);
    trace.v_in[k] = v;
    trace.ta[k] = (b.k1 * v + b.b1).array().tanh();
    u.noalias() -= h * (b.k1.transpose() * trace.ta[k]);
  }
  Eigen::VectorXd x(2 * m);
  x << u, v;
  return x;
}

void shear_factors(const RevNetParams& params, const CouplingTrace& trace, ShearFactors& out) {
  const auto n_blocks = params.blocks.size();
  const double h = params.config.step_size;
  out.p.resize(n_blocks);
  out.q.resize(n_blocks);
  for (std::size_t n = 0; n < n_blocks; ++n) {
    const auto& b = params.blocks[n];
    const Eigen::VectorXd da = h * (1.0 - trace.ta[n].array().square());
    const Eigen::VectorXd dc = h * (1.0 - trace.tc[n].array().square());
    out.p[n].noalias() = b.k1.transpose() * (da.asDiagonal() * b.k1);
    out.q[n].noalias() = b.k2.transpose() * (dc.asDiagonal() * b.k2);
  }
}

void assemble_jacobian(const ShearFactors& factors, Eigen::MatrixXd& jac,
                       std::vector<Eigen::MatrixXd>* prefix) {
  const auto n_blocks = factors.p.size();
  const Eigen::Index m = n_blocks ? factors.p[0].rows() : 0;
  const Eigen::Index d = 2 * m;
  jac.setIdentity(d, d);
  if (prefix) prefix->resize(2 * n_blocks);
  for (std::size_t n = 0; n < n_blocks; ++n) {
    if (prefix) (*prefix)[2 * n] = jac;
    jac.rightCols(m).noalias() -= jac.leftCols(m) * factors.p[n];
    if (prefix) (*prefix)[2 * n + 1] = jac;
    jac.leftCols(m).noalias() += jac.rightCols(m) * factors.q[n];
  }
}

}  // namespace levelset::detail
