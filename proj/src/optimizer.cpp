// Copyright 2026 The RigidGrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rigidgrasp/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace rg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_nan(const VecX& v) { return !v.allFinite(); }
}  // namespace

SolveReport solve_eq_qp(const EqQP& p, double residual_tol) {
  const int n = static_cast<int>(p.H.rows());
  const int k = static_cast<int>(p.A.rows());
  if (p.H.cols() != n || p.g.size() != n) throw DomainError("solve_eq_qp: H/g dimension mismatch");
  if (k > 0 && (p.A.cols() != n || p.b.size() != k)) {
    throw DomainError("solve_eq_qp: A/b dimension mismatch");
  }
  if ((p.H - p.H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + p.H.cwiseAbs().maxCoeff())) {
    throw DomainError("solve_eq_qp: H must be symmetric");
  }

  SolveReport report;
  if (k == 0) {
    Eigen::LDLT<MatX> ldlt(p.H);
    report.x = ldlt.solve(-p.g);
    report.eq_multipliers = VecX::Zero(0);
  } else {
    MatX kkt = MatX::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = p.H;
    kkt.topRightCorner(n, k) = p.A.transpose();
    kkt.bottomLeftCorner(k, n) = p.A;
    VecX rhs(n + k);
    rhs.head(n) = -p.g;
    rhs.tail(k) = p.b;
    // Minimum-norm solve; the constraint block of Eq.-(12)-style programs can
    // carry linearly dependent rows.
    Eigen::CompleteOrthogonalDecomposition<MatX> cod(kkt);
    const VecX sol = cod.solve(rhs);
    report.x = sol.head(n);
    report.eq_multipliers = sol.tail(k);
  }

  const double scale =
      std::max({1.0, p.g.lpNorm<Eigen::Infinity>(),
                k > 0 ? p.b.lpNorm<Eigen::Infinity>() : 0.0, p.H.cwiseAbs().maxCoeff()});
  VecX grad_res = p.H * report.x + p.g;
  if (k > 0) grad_res += p.A.transpose() * report.eq_multipliers;
  const double r_stat = grad_res.lpNorm<Eigen::Infinity>();
  const double r_feas = k > 0 ? (p.A * report.x - p.b).lpNorm<Eigen::Infinity>() : 0.0;
  if (!report.x.allFinite() || std::max(r_stat, r_feas) > residual_tol * scale) {
    throw RankDeficiencyError("solve_eq_qp: KKT system inconsistent (residual " +
                              std::to_string(std::max(r_stat, r_feas)) + ")");
  }
  report.objective = 0.5 * report.x.dot(p.H * report.x) + p.g.dot(report.x);
  report.max_violation = r_feas;
  report.iterations = 1;
  report.status = SolveStatus::kConverged;
  return report;
}

namespace detail {

QpResult solve_qp(const MatX& H, const VecX& g, const MatX& A, const VecX& b, const MatX& C,
                  const VecX& h, int max_iter, double tol) {
  const int n = static_cast<int>(H.rows());
  const int p = static_cast<int>(A.rows());
  const int q = static_cast<int>(C.rows());
  QpResult res;
  res.y = VecX::Zero(p);
  res.z = VecX::Zero(q);

  if (q == 0) {
    // Pure KKT solve.
    MatX kkt = MatX::Zero(n + p, n + p);
    kkt.topLeftCorner(n, n) = H;
    if (p > 0) {
      kkt.topRightCorner(n, p) = A.transpose();
      kkt.bottomLeftCorner(p, n) = A;
      kkt.bottomRightCorner(p, p).diagonal().array() = -1e-13;
    }
    VecX rhs(n + p);
    rhs.head(n) = -g;
    rhs.tail(p) = b;
    const VecX sol = kkt.partialPivLu().solve(rhs);
    res.x = sol.head(n);
    // Multiplier convention: gradient of the Lagrangian is Hx + g - A'y - C'z.
    res.y = -sol.tail(p);
    VecX r = H * res.x + g;
    if (p > 0) r -= A.transpose() * res.y;
    res.residual = r.lpNorm<Eigen::Infinity>() +
                   (p > 0 ? (A * res.x - b).lpNorm<Eigen::Infinity>() : 0.0);
    res.ok = res.x.allFinite() && res.residual < 1e-8 * std::max(1.0, g.lpNorm<Eigen::Infinity>());
    res.iterations = 1;
    return res;
  }

  // Primal-dual path following with slacks s = Cx - h.
  VecX x = VecX::Zero(n);
  VecX y = VecX::Zero(p);
  VecX z = VecX::Ones(q);
  VecX s = VecX::Ones(q);

  const double scale = std::max({1.0, g.lpNorm<Eigen::Infinity>(),
                                 p > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0,
                                 q > 0 ? h.lpNorm<Eigen::Infinity>() : 0.0});
  for (int it = 0; it < max_iter; ++it) {
    VecX r_d = H * x + g - C.transpose() * z;
    if (p > 0) r_d -= A.transpose() * y;
    VecX r_p = p > 0 ? VecX(A * x - b) : VecX();
    VecX r_c = C * x - s - h;
    const double mu = s.dot(z) / q;

    const double err = std::max({r_d.lpNorm<Eigen::Infinity>(),
                                 p > 0 ? r_p.lpNorm<Eigen::Infinity>() : 0.0,
                                 r_c.lpNorm<Eigen::Infinity>(), mu});
    res.iterations = it;
    if (err <= tol * scale) {
      res.x = x;
      res.y = y;
      res.z = z;
      res.residual = err;
      res.ok = true;
      return res;
    }

    const double sigma = 0.2;
    const VecX r_sz = s.cwiseProduct(z).array() - sigma * mu;

    // Eliminate (s, z): reduced saddle system in (x, y).
    const VecX w = z.cwiseQuotient(s);  // S^-1 Z
    MatX Hbar = H + C.transpose() * w.asDiagonal() * C;
    VecX rhs1 = -r_d - C.transpose() * (w.cwiseProduct(r_c) + r_sz.cwiseQuotient(s));
    MatX kkt = MatX::Zero(n + p, n + p);
    kkt.topLeftCorner(n, n) = Hbar;
    VecX rhs(n + p);
    rhs.head(n) = rhs1;
    if (p > 0) {
      kkt.topRightCorner(n, p) = A.transpose();
      kkt.bottomLeftCorner(p, n) = A;
      kkt.bottomRightCorner(p, p).diagonal().array() = -1e-13;
      rhs.tail(p) = -r_p;
    }
    VecX sol = kkt.partialPivLu().solve(rhs);
    if (!sol.allFinite()) {
      sol = kkt.fullPivLu().solve(rhs);
      if (!sol.allFinite()) break;
    }
    const VecX dx = sol.head(n);
    const VecX dy = p > 0 ? VecX(-sol.tail(p)) : VecX();
    const VecX dz = -w.cwiseProduct(C * dx + r_c) - r_sz.cwiseQuotient(s);
    const VecX ds = -(r_sz + s.cwiseProduct(dz)).cwiseQuotient(z);

    double alpha = 1.0;
    for (int i = 0; i < q; ++i) {
      if (ds(i) < 0.0) alpha = std::min(alpha, -s(i) / ds(i));
      if (dz(i) < 0.0) alpha = std::min(alpha, -z(i) / dz(i));
    }
    alpha = std::min(1.0, 0.995 * alpha);
    x += alpha * dx;
    if (p > 0) y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    s = s.cwiseMax(1e-300);
    z = z.cwiseMax(1e-300);
  }
  res.x = x;
  res.y = y;
  res.z = z;
  res.ok = false;
  return res;
}

}  // namespace detail

namespace {

struct Evaluation {
  double f = 0.0;
  VecX grad;
  VecX c_eq;
  MatX j_eq;
  VecX c_ineq;
  MatX j_ineq;
  bool finite = true;
};

Evaluation evaluate(const NlpProblem& p, const VecX& x, bool with_derivatives) {
  Evaluation ev;
  ev.grad.resize(p.n);
  ev.f = p.objective(x, with_derivatives ? &ev.grad : nullptr);
  if (p.eq_dim > 0) {
    ev.c_eq.resize(p.eq_dim);
    if (with_derivatives) ev.j_eq.resize(p.eq_dim, p.n);
    p.eq(x, ev.c_eq, with_derivatives ? &ev.j_eq : nullptr);
  } else {
    ev.c_eq.resize(0);
  }
  if (p.ineq_dim > 0) {
    ev.c_ineq.resize(p.ineq_dim);
    if (with_derivatives) ev.j_ineq.resize(p.ineq_dim, p.n);
    p.ineq(x, ev.c_ineq, with_derivatives ? &ev.j_ineq : nullptr);
  } else {
    ev.c_ineq.resize(0);
  }
  ev.finite = std::isfinite(ev.f) && !has_nan(ev.c_eq) && !has_nan(ev.c_ineq) &&
              (!with_derivatives || (!has_nan(ev.grad) && ev.j_eq.allFinite() && ev.j_ineq.allFinite()));
  return ev;
}

double constraint_violation(const NlpProblem& p, const Evaluation& ev, const VecX& x) {
  double v = 0.0;
  if (ev.c_eq.size() > 0) v = std::max(v, ev.c_eq.cwiseAbs().maxCoeff());
  if (ev.c_ineq.size() > 0) v = std::max(v, std::max(0.0, -ev.c_ineq.minCoeff()));
  if (p.lower.size() > 0) v = std::max(v, std::max(0.0, (p.lower - x).maxCoeff()));
  if (p.upper.size() > 0) v = std::max(v, std::max(0.0, (x - p.upper).maxCoeff()));
  return v;
}

double merit_l1(const Evaluation& ev, double nu) {
  double viol = 0.0;
  for (int i = 0; i < ev.c_eq.size(); ++i) viol += std::abs(ev.c_eq(i));
  for (int i = 0; i < ev.c_ineq.size(); ++i) viol += std::max(0.0, -ev.c_ineq(i));
  return ev.f + nu * viol;
}

}  // namespace

double max_gradient_error(const NlpProblem& p, const VecX& x, double fd_step) {
  double worst = 0.0;
  auto rel = [](double a, double fd) {
    return std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
  };
  const Evaluation ev = evaluate(p, x, true);
  for (int j = 0; j < p.n; ++j) {
    VecX xp = x, xm = x;
    xp(j) += fd_step;
    xm(j) -= fd_step;
    const Evaluation ep = evaluate(p, xp, false);
    const Evaluation em = evaluate(p, xm, false);
    worst = std::max(worst, rel(ev.grad(j), (ep.f - em.f) / (2.0 * fd_step)));
    for (int r = 0; r < p.eq_dim; ++r) {
      worst = std::max(worst, rel(ev.j_eq(r, j), (ep.c_eq(r) - em.c_eq(r)) / (2.0 * fd_step)));
    }
    for (int r = 0; r < p.ineq_dim; ++r) {
      worst = std::max(worst, rel(ev.j_ineq(r, j), (ep.c_ineq(r) - em.c_ineq(r)) / (2.0 * fd_step)));
    }
  }
  return worst;
}

SolveReport solve_nlp(const NlpProblem& p, const NlpOptions& opts) {
  if (p.n <= 0 || !p.objective) throw DomainError("solve_nlp: empty problem");
  if (p.x0.size() != p.n) throw DomainError("solve_nlp: x0 has wrong dimension");
  if (p.eq_dim > 0 && !p.eq) throw DomainError("solve_nlp: eq_dim > 0 without callback");
  if (p.ineq_dim > 0 && !p.ineq) throw DomainError("solve_nlp: ineq_dim > 0 without callback");
  if (!p.x0.allFinite()) throw DomainError("solve_nlp: x0 is not finite");

  VecX x = p.x0;
  if (p.lower.size() > 0) x = x.cwiseMax(p.lower);
  if (p.upper.size() > 0) x = x.cwiseMin(p.upper);

  if (opts.check_gradients) {
    const double err = max_gradient_error(p, x);
    if (err > opts.gradient_check_tol) {
      throw DomainError("solve_nlp: analytic gradients disagree with finite differences (max "
                        "relative error " + std::to_string(err) + ")");
    }
  }

  SolveReport report;
  MatX B = MatX::Identity(p.n, p.n);
  double nu = 1.0;
  Evaluation ev = evaluate(p, x, true);
  if (!ev.finite) {
    report.status = SolveStatus::kNumericError;
    report.message = "objective or constraints not finite at the initial point";
    report.x = x;
    return report;
  }

  // Bound rows appended to the inequality block of the subproblem.
  const bool has_lb = p.lower.size() > 0;
  const bool has_ub = p.upper.size() > 0;

  // Bound rows enter the subproblem only for finite limits.
  std::vector<int> lb_idx, ub_idx;
  if (has_lb) {
    for (int i = 0; i < p.n; ++i) {
      if (std::isfinite(p.lower(i))) lb_idx.push_back(i);
    }
  }
  if (has_ub) {
    for (int i = 0; i < p.n; ++i) {
      if (std::isfinite(p.upper(i))) ub_idx.push_back(i);
    }
  }

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // Assemble the inequality matrix [J_ineq; bound rows] for the QP.
    const int rows = p.ineq_dim + static_cast<int>(lb_idx.size() + ub_idx.size());
    MatX C = MatX::Zero(rows, p.n);
    VecX c_all(rows);
    int at = 0;
    if (p.ineq_dim > 0) {
      C.topRows(p.ineq_dim) = ev.j_ineq;
      c_all.head(p.ineq_dim) = ev.c_ineq;
      at = p.ineq_dim;
    }
    for (int i : lb_idx) {
      C(at, i) = 1.0;
      c_all(at) = x(i) - p.lower(i);
      ++at;
    }
    for (int i : ub_idx) {
      C(at, i) = -1.0;
      c_all(at) = p.upper(i) - x(i);
      ++at;
    }

    // QP subproblem: min 1/2 d'Bd + grad'd  s.t. J_eq d = -c_eq, C d >= -c_all.
    detail::QpResult qp;
    const std::array<double, 4> relaxations = {1.0, 0.5, 0.2, 0.05};
    for (double beta : relaxations) {
      VecX beq = p.eq_dim > 0 ? VecX(-beta * ev.c_eq) : VecX();
      VecX h = -c_all;
      for (int i = 0; i < c_all.size(); ++i) {
        if (c_all(i) < 0.0) h(i) = beta * (-c_all(i));
      }
      qp = detail::solve_qp(B, ev.grad, p.eq_dim > 0 ? ev.j_eq : MatX(), beq, C, h);
      if (qp.ok) break;
    }
    if (!qp.ok) {
      report.status = SolveStatus::kInfeasible;
      report.message = "QP subproblem infeasible or not solvable";
      break;
    }
    const VecX d = qp.x;
    const VecX y = qp.y;
    const VecX z = qp.z;
    report.eq_multipliers = y;
    report.ineq_multipliers = z;

    // KKT residual at x with the subproblem multipliers.
    VecX stat = ev.grad;
    if (p.eq_dim > 0) stat -= ev.j_eq.transpose() * y;
    stat -= C.transpose() * z;
    const double grad_scale = 1.0 + ev.grad.lpNorm<Eigen::Infinity>();
    const double viol = constraint_violation(p, ev, x);
    if (stat.lpNorm<Eigen::Infinity>() <= opts.tol * grad_scale && viol <= opts.feas_tol) {
      report.status = SolveStatus::kConverged;
      break;
    }
    if (d.lpNorm<Eigen::Infinity>() <= 1e-14 && viol <= opts.feas_tol) {
      // Degenerate multipliers but no useful direction and feasible: accept.
      report.status = SolveStatus::kConverged;
      break;
    }

    // L1 merit line search.
    double mult_norm = 0.0;
    if (y.size() > 0) mult_norm = std::max(mult_norm, y.cwiseAbs().maxCoeff());
    if (z.size() > 0) mult_norm = std::max(mult_norm, z.cwiseAbs().maxCoeff());
    nu = std::max(nu, 1.2 * mult_norm + 1e-3);
    const double phi0 = merit_l1(ev, nu);
    double viol_l1 = 0.0;
    for (int i = 0; i < ev.c_eq.size(); ++i) viol_l1 += std::abs(ev.c_eq(i));
    for (int i = 0; i < ev.c_ineq.size(); ++i) viol_l1 += std::max(0.0, -ev.c_ineq(i));
    const double directional = ev.grad.dot(d) - nu * viol_l1;

    double alpha = 1.0;
    Evaluation ev_next;
    VecX x_next;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_next = x + alpha * d;
      if (has_lb) x_next = x_next.cwiseMax(p.lower);
      if (has_ub) x_next = x_next.cwiseMin(p.upper);
      ev_next = evaluate(p, x_next, true);
      if (ev_next.finite &&
          merit_l1(ev_next, nu) <= phi0 + 1e-4 * alpha * std::min(directional, 0.0)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-13) break;
    }
    if (!accepted) {
      report.status = SolveStatus::kIterationLimit;
      report.message = "line search failed to make progress";
      break;
    }

    // Damped BFGS on the Lagrangian gradient.
    VecX grad_l_next = ev_next.grad;
    VecX grad_l_here = ev.grad;
    if (p.eq_dim > 0) {
      grad_l_next -= ev_next.j_eq.transpose() * y;
      grad_l_here -= ev.j_eq.transpose() * y;
    }
    if (rows > 0) {
      // Only the nonlinear inequality rows contribute curvature.
      if (p.ineq_dim > 0) {
        grad_l_next -= ev_next.j_ineq.transpose() * z.head(p.ineq_dim);
        grad_l_here -= ev.j_ineq.transpose() * z.head(p.ineq_dim);
      }
    }
    const VecX step = x_next - x;
    const VecX yv = grad_l_next - grad_l_here;
    const double sts = step.squaredNorm();
    if (sts > 1e-20) {
      const VecX Bs = B * step;
      const double sBs = step.dot(Bs);
      const double sy = step.dot(yv);
      double theta = 1.0;
      if (sy < 0.2 * sBs) theta = 0.8 * sBs / (sBs - sy);
      const VecX r = theta * yv + (1.0 - theta) * Bs;
      const double sr = step.dot(r);
      if (sr > 1e-14 && sBs > 1e-14) {
        B += r * r.transpose() / sr - Bs * Bs.transpose() / sBs;
      }
    }

    x = x_next;
    ev = ev_next;
  }

  if (it >= opts.max_iter) {
    report.status = SolveStatus::kIterationLimit;
    report.message = "iteration limit reached";
  }
  report.x = x;
  report.objective = ev.f;
  report.max_violation = constraint_violation(p, ev, x);
  report.iterations = it;
  if (report.status == SolveStatus::kConverged && report.max_violation > opts.feas_tol) {
    report.status = SolveStatus::kInfeasible;
    report.message = "converged point violates constraints";
  }
  return report;
}

}  // namespace rg
