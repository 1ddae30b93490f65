#include "levelset/loss.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "coupling_trace.hpp"
#include "levelset/error.hpp"
#include "levelset/parallel.hpp"

namespace levelset {

AnisotropyWeights AnisotropyWeights::from_active(int dim, const std::vector<int>& active) {
  AnisotropyWeights w{Eigen::VectorXd::Ones(dim)};
  for (int i : active) {
    if (i < 0 || i >= dim) throw ConfigError("active dimension index out of range");
    w.omega[i] = 0.0;
  }
  return w;
}

std::vector<int> AnisotropyWeights::active_dims() const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    if (omega[i] == 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> AnisotropyWeights::inactive_dims() const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    if (omega[i] > 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

void AnisotropyWeights::validate() const {
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i]) || omega[i] < 0.0) {
      throw ConfigError("anisotropy weights must be finite and nonnegative");
    }
  }
}

namespace {

struct Workspace {
  detail::CouplingTrace trace;
  detail::ShearFactors factors;
  std::vector<Eigen::MatrixXd> prefix;
  Eigen::MatrixXd jac;
  Eigen::MatrixXd jbar;
  Eigen::MatrixXd v;
  Eigen::MatrixXd pbar;
  Eigen::MatrixXd qbar;
  Eigen::VectorXd ubar;
  Eigen::VectorXd vbar;
};

struct Partial {
  double l1 = 0.0;
  double l2 = 0.0;
  std::optional<RevNetGradient> grad;
};

struct Objective {
  double l1_weight = 1.0;
  double l2_weight = 0.0;
};

void check_batch(const RevNetParams& params, std::span<const GradientSample> batch,
                 const AnisotropyWeights* weights) {
  if (batch.empty()) throw ConfigError("loss evaluated on an empty batch");
  const Eigen::Index d = params.config.dim;
  if (weights) {
    if (weights->omega.size() != d) throw DimensionError("anisotropy weights have wrong length");
    weights->validate();
  }
  for (const auto& s : batch) {
    if (s.x.size() != d || s.grad.size() != d) {
      throw DimensionError("sample dimension does not match the network");
    }
  }
}

// d(tanh)/da * h and the second derivative factor -2 t (1 - t^2) * h.
void backprop_shear(const Eigen::MatrixXd& k, const Eigen::VectorXd& t, double h,
                    const Eigen::MatrixXd& sbar, Eigen::MatrixXd& kbar, Eigen::VectorXd& pre_bar) {
  const Eigen::ArrayXd d1 = 1.0 - t.array().square();
  const Eigen::MatrixXd sym = sbar + sbar.transpose();
  kbar.noalias() += (h * d1).matrix().asDiagonal() * (k * sym);
  const Eigen::MatrixXd ks = k * sbar;
  pre_bar = (h * -2.0 * t.array() * d1) * (ks.array() * k.array()).rowwise().sum();
}

// Adds one sample's contribution. Returns (l1_s, l2_s).
std::pair<double, double> accumulate_sample(const RevNetParams& params, const GradientSample& s,
                                            const AnisotropyWeights& weights,
                                            const Objective& obj, Workspace& ws,
                                            RevNetGradient* grad) {
  const Eigen::Index m = params.config.half();
  const Eigen::Index d = params.config.dim;
  const double h = params.config.step_size;
  const auto n_blocks = params.blocks.size();

  detail::trace_forward(params, s.x, ws.trace);
  detail::shear_factors(params, ws.trace, ws.factors);
  detail::assemble_jacobian(ws.factors, ws.jac, grad ? &ws.prefix : nullptr);

  if (grad) ws.jbar.setZero(d, d);
  double l1 = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double w = weights.omega[i];
    if (w == 0.0) continue;
    const auto col = ws.jac.col(i);
    const double r = col.norm();
    if (!(r > 0.0)) {
      throw DegenerateError("Jacobian column " + std::to_string(i) +
                            " has zero norm; the transform is numerically corrupt");
    }
    const double p = col.dot(s.grad);
    const double t = p / r;
    l1 += (w * t) * (w * t);
    if (grad) {
      const double coeff = obj.l1_weight * 2.0 * w * w * t;
      ws.jbar.col(i) = coeff * (s.grad / r - (p / (r * r * r)) * col);
    }
  }

  const Determinant det = det_jacobian(ws.jac);
  const double l2 = (det.value - 1.0) * (det.value - 1.0);
  if (!grad) return {l1, l2};

  if (obj.l2_weight != 0.0 && det.value != 1.0 && !det.singular) {
    // d det / dJ = det * J^{-T}
    const Eigen::MatrixXd inv_t = ws.jac.inverse().transpose();
    ws.jbar.noalias() += obj.l2_weight * 2.0 * (det.value - 1.0) * det.value * inv_t;
  }

  // Adjoints of the shear factors: with J = L_k F_k R_k, dJ-adjoint of F_k is
  // L_k^T Jbar R_k^T. v holds Jbar R_k^T, updated by V <- V F_k^T.
  ws.v = ws.jbar;
  ws.ubar.setZero(m);
  ws.vbar.setZero(m);
  Eigen::VectorXd abar_j;
  Eigen::VectorXd cbar_j;
  for (std::size_t n = n_blocks; n-- > 0;) {
    const auto& b = params.blocks[n];
    auto& g = grad->blocks[n];
    const auto& fq = ws.factors.q[n];
    const auto& fp = ws.factors.p[n];

    // F_{2n+1} = [[I, 0], [Q, I]]
    ws.qbar.noalias() = ws.prefix[2 * n + 1].rightCols(m).transpose() * ws.v.leftCols(m);
    ws.v.rightCols(m).noalias() += ws.v.leftCols(m) * fq;
    // F_{2n} = [[I, -P], [0, I]]
    ws.pbar.noalias() = -(ws.prefix[2 * n].leftCols(m).transpose() * ws.v.rightCols(m));
    ws.v.leftCols(m).noalias() -= ws.v.rightCols(m) * fp;

    backprop_shear(b.k2, ws.trace.tc[n], h, ws.qbar, g.k2, cbar_j);
    backprop_shear(b.k1, ws.trace.ta[n], h, ws.pbar, g.k1, abar_j);

    // v_{n+1} = v_n - h K2^T tanh(K2 u_{n+1} + b2)
    const Eigen::ArrayXd dtc = 1.0 - ws.trace.tc[n].array().square();
    const Eigen::VectorXd cbar = (dtc * (-h * (b.k2 * ws.vbar)).array()).matrix() + cbar_j;
    g.k2.noalias() -= h * ws.trace.tc[n] * ws.vbar.transpose();
    g.k2.noalias() += cbar * ws.trace.u_mid[n].transpose();
    g.b2 += cbar;
    ws.ubar.noalias() += b.k2.transpose() * cbar;

    // u_{n+1} = u_n + h K1^T tanh(K1 v_n + b1)
    const Eigen::ArrayXd dta = 1.0 - ws.trace.ta[n].array().square();
    const Eigen::VectorXd abar = (dta * (h * (b.k1 * ws.ubar)).array()).matrix() + abar_j;
    g.k1.noalias() += h * ws.trace.ta[n] * ws.ubar.transpose();
    g.k1.noalias() += abar * ws.trace.v_in[n].transpose();
    g.b1 += abar;
    ws.vbar.noalias() += b.k1.transpose() * abar;
  }
  return {l1, l2};
}

Partial evaluate(const RevNetParams& params, std::span<const GradientSample> batch,
                 const AnisotropyWeights& weights, const Objective& obj, bool want_grad) {
  const std::size_t n = batch.size();
  const std::size_t chunks = chunk_count(n, kReductionChunk);
  std::vector<Partial> partials(chunks);
  for_each_chunk(n, kReductionChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    Workspace ws;
    Partial& part = partials[c];
    if (want_grad) part.grad = RevNetGradient::zeros_like(params);
    for (std::size_t i = begin; i < end; ++i) {
      const auto [l1, l2] = accumulate_sample(params, batch[i], weights, obj, ws,
                                              want_grad ? &*part.grad : nullptr);
      part.l1 += l1;
      part.l2 += l2;
    }
  });
  Partial total = std::move(partials.front());
  for (std::size_t c = 1; c < chunks; ++c) {
    total.l1 += partials[c].l1;
    total.l2 += partials[c].l2;
    if (want_grad) *total.grad += *partials[c].grad;
  }
  return total;
}

LossBreakdown breakdown(double l1_sum, double l2_sum, std::size_t n, double lambda) {
  LossBreakdown out;
  out.l1 = l1_sum;
  out.l2 = l2_sum / static_cast<double>(n);
  out.lambda = lambda;
  out.total = out.l1 + lambda * out.l2;
  return out;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be nonnegative and finite");
  }
}

}  // namespace

double l1_loss(const RevNetParams& params, std::span<const GradientSample> batch,
               const AnisotropyWeights& weights) {
  check_batch(params, batch, &weights);
  return evaluate(params, batch, weights, {}, false).l1;
}

double l2_loss(const RevNetParams& params, std::span<const GradientSample> batch) {
  check_batch(params, batch, nullptr);
  const AnisotropyWeights none{Eigen::VectorXd::Zero(params.config.dim)};
  return evaluate(params, batch, none, {}, false).l2 / static_cast<double>(batch.size());
}

double l2_loss(std::span<const JacobianMatrix> jacobians) {
  if (jacobians.empty()) throw ConfigError("l2 loss of an empty batch");
  double sum = 0.0;
  for (const auto& j : jacobians) {
    const double dev = det_jacobian(j).value - 1.0;
    sum += dev * dev;
  }
  return sum / static_cast<double>(jacobians.size());
}

LossBreakdown total_loss(const RevNetParams& params, std::span<const GradientSample> batch,
                         const AnisotropyWeights& weights, double lambda) {
  check_lambda(lambda);
  check_batch(params, batch, &weights);
  const Partial p = evaluate(params, batch, weights, {}, false);
  return breakdown(p.l1, p.l2, batch.size(), lambda);
}

LossGradient loss_gradient(const RevNetParams& params, std::span<const GradientSample> batch,
                           const AnisotropyWeights& weights, double lambda,
                           LossReduction reduction) {
  check_lambda(lambda);
  check_batch(params, batch, &weights);
  const double n = static_cast<double>(batch.size());
  Objective obj;
  obj.l1_weight = reduction == LossReduction::kMean ? 1.0 / n : 1.0;
  obj.l2_weight = lambda / n;

  Partial p = evaluate(params, batch, weights, obj, true);
  LossGradient out;
  out.loss = breakdown(p.l1, p.l2, batch.size(), lambda);
  out.objective = obj.l1_weight * p.l1 + lambda * out.loss.l2;
  out.grad = std::move(*p.grad);

  if (!std::isfinite(out.loss.total)) throw NumericalError("loss is not finite");
  for (std::size_t k = 0; k < out.grad.blocks.size(); ++k) {
    const auto& g = out.grad.blocks[k];
    if (!g.k1.allFinite() || !g.k2.allFinite() || !g.b1.allFinite() || !g.b2.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite loss gradient in block " << k;
      throw NumericalError(msg.str(), static_cast<std::ptrdiff_t>(k));
    }
  }
  return out;
}

}  // namespace levelset
