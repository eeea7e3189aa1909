#include "specext/solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "specext/errors.hpp"
#include "warn.hpp"

namespace specext {

namespace {

constexpr double kPolishTarget = 2e-11;  // keeps the cep identity below 1e-10
constexpr int kPolishSteps = 3;

// Largest t with P + t dP > 0 and Q + t dQ > 0 on the grid (inf if unbounded).
double max_feasible_step(const GridField& pf, const GridField& qf,
                         const GridField& dpf, const GridField& dqf) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pf.values.size(); ++i) {
    if (dpf.values[i] < 0.0) t = std::min(t, -pf.values[i] / dpf.values[i]);
    if (dqf.values[i] < 0.0) t = std::min(t, -qf.values[i] / dqf.values[i]);
  }
  return t;
}

DualPoint advance(const DualPoint& x, const Eigen::VectorXd& dir, double t) {
  DualPoint out = x;
  const std::size_t np = x.p.size();
  for (std::size_t i = 0; i < np; ++i)
    out.p[i] += t * dir[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < x.q.size(); ++i)
    out.q[i] += t * dir[static_cast<Eigen::Index>(np + i)];
  return out;
}

// Direction polynomials of a packed step: the P part has zero constant term.
std::pair<SymTrigPoly, SymTrigPoly> step_polys(const IndexSet& S,
                                               const Eigen::VectorXd& dir) {
  const std::size_t h = S.half_size();
  std::vector<double> dp(h, 0.0), dq(h, 0.0);
  for (std::size_t i = 1; i < h; ++i) dp[i] = dir[static_cast<Eigen::Index>(i - 1)];
  for (std::size_t i = 0; i < h; ++i)
    dq[i] = dir[static_cast<Eigen::Index>(h - 1 + i)];
  return {SymTrigPoly{S, std::move(dp)}, SymTrigPoly{S, std::move(dq)}};
}

}  // namespace

void SolveOptions::validate() const {
  if (grad_tol <= 0.0) throw std::invalid_argument("SolveOptions: grad_tol <= 0");
  if (max_iter < 1) throw std::invalid_argument("SolveOptions: max_iter < 1");
  if (backtrack_alpha <= 0.0 || backtrack_alpha >= 0.5)
    throw std::invalid_argument("SolveOptions: backtrack_alpha outside (0, 0.5)");
  if (backtrack_beta <= 0.0 || backtrack_beta >= 1.0)
    throw std::invalid_argument("SolveOptions: backtrack_beta outside (0, 1)");
  if (feasibility_fraction <= 0.0 || feasibility_fraction >= 1.0)
    throw std::invalid_argument("SolveOptions: feasibility_fraction outside (0, 1)");
}

DualPoint initial_point(const MomentData& data) {
  data.validate();
  const std::size_t h = data.index_set.half_size();
  DualPoint x{data.index_set, std::vector<double>(h - 1, 0.0),
              std::vector<double>(h, 0.0)};
  x.q[0] = std::pow(data.c[0], -1.0 / data.nu);
  return x;
}

std::pair<DualPoint, SolveReport> solve(const MomentData& data,
                                        const GridSpec& grid,
                                        const SolveOptions& opts,
                                        std::optional<DualPoint> start) {
  data.validate();
  opts.validate();
  grid.validate();
  if (data.lambda == 0.0)
    detail::warn("solve: lambda = 0, no interior guarantee for the minimizer");

  DualPoint x = start ? std::move(*start) : initial_point(data);
  SolveReport report;

  DualEval ev = dual_eval(x, data, grid);
  if (!ev.feasible) throw infeasible_error("solve: infeasible starting point");

  int polish_left = -1;  // -1: main phase; >= 0: remaining polish steps
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const double grad_norm = ev.gradient.norm();
    if (polish_left < 0 && grad_norm <= opts.grad_tol) {
      report.converged = true;
      polish_left = kPolishSteps;
    }
    if (polish_left >= 0 && (grad_norm <= kPolishTarget || polish_left == 0))
      break;

    Eigen::LLT<Eigen::MatrixXd> llt(ev.hessian);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("solve: Hessian factorization failed at iteration " +
                               std::to_string(iter));
    const Eigen::VectorXd dir = llt.solve(-ev.gradient);
    const double slope = ev.gradient.dot(dir);

    const auto [dpoly, dqoly] = step_polys(x.index_set, dir);
    const GridField pf = eval_poly(x.numerator(), grid);
    const GridField qf = eval_poly(x.denominator(), grid);
    const double t_max = max_feasible_step(pf, qf, eval_poly(dpoly, grid),
                                           eval_poly(dqoly, grid));
    double t = std::min(1.0, opts.feasibility_fraction * t_max);

    if (polish_left >= 0) {
      // Near the optimum the value test is rounding-noise dominated; accept
      // the damped full step iff it sharpens stationarity.
      --polish_left;
      DualPoint candidate = advance(x, dir, t);
      DualEval next = dual_eval(candidate, data, grid);
      if (!next.feasible || next.gradient.norm() >= grad_norm) break;
      x = std::move(candidate);
      ev = std::move(next);
    } else {
      DualPoint candidate = advance(x, dir, t);
      double cand_value = dual_value(candidate, data, grid);
      while (cand_value > ev.value + opts.backtrack_alpha * t * slope) {
        t *= opts.backtrack_beta;
        if (t < 1e-20) break;  // stalled; accept no step
        candidate = advance(x, dir, t);
        cand_value = dual_value(candidate, data, grid);
      }
      if (t < 1e-20) break;
      x = std::move(candidate);
      ev = dual_eval(x, data, grid);
    }
    ++report.iterations;
    if (opts.observer)
      opts.observer(report.iterations, ev.value, ev.gradient.norm(), t,
                    ev.p_min, ev.q_min);
  }

  report.final_grad_norm = ev.gradient.norm();
  if (!report.converged && report.final_grad_norm <= opts.grad_tol)
    report.converged = true;

  SolveReport diag = verify(x, data, grid, /*require_stationary=*/report.converged);
  diag.iterations = report.iterations;
  diag.final_grad_norm = report.final_grad_norm;
  diag.converged = report.converged;
  return {std::move(x), std::move(diag)};
}

SolveReport verify(const DualPoint& x, const MomentData& data,
                   const GridSpec& grid, bool require_stationary) {
  x.validate();
  data.validate();
  const GridField pf = eval_poly(x.numerator(), grid);
  const GridField qf = eval_poly(x.denominator(), grid);
  SolveReport report;
  report.p_min = pf.min();
  report.q_min = qf.min();
  if (report.p_min <= 0.0 || report.q_min <= 0.0)
    throw infeasible_error("verify: point not strictly feasible on the grid");

  const int nu = data.nu;
  const std::size_t n = pf.values.size();
  GridField phi{grid, std::vector<double>(n)};        // (P/Q)^nu
  GridField phi_frac{grid, std::vector<double>(n)};   // (P/Q)^{nu-1}
  GridField inv_p_nu{grid, std::vector<double>(n)};   // 1/P^nu
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pf.values[i] / qf.values[i];
    double rn1 = 1.0;
    for (int e = 0; e < nu - 1; ++e) rn1 *= r;
    phi_frac.values[i] = rn1;
    phi.values[i] = rn1 * r;
    double pn = 1.0;
    for (int e = 0; e < nu; ++e) pn *= pf.values[i];
    inv_p_nu.values[i] = 1.0 / pn;
  }

  const auto c_hat = project_moments(phi, x.index_set);
  report.cov_residual = 0.0;
  for (std::size_t i = 0; i < c_hat.size(); ++i)
    report.cov_residual =
        std::max(report.cov_residual, std::abs(data.c[i] - c_hat[i]));

  const auto m_hat = project_moments0(phi_frac, x.index_set);
  const auto eps_raw = project_moments0(inv_p_nu, x.index_set);
  const double cep_scale = static_cast<double>(nu) / (nu - 1);
  report.cep_residual.resize(m_hat.size());
  report.eps_certificate.resize(m_hat.size());
  report.cep_identity_gap = 0.0;
  for (std::size_t i = 0; i < m_hat.size(); ++i) {
    report.cep_residual[i] = cep_scale * m_hat[i] - data.m[i];
    report.eps_certificate[i] = data.lambda * eps_raw[i];
    report.cep_identity_gap =
        std::max(report.cep_identity_gap,
                 std::abs(report.cep_residual[i] - report.eps_certificate[i]));
  }
  if (require_stationary && report.cep_identity_gap >= 1e-10)
    throw std::runtime_error(
        "verify: stationarity identity violated, |cep_residual - eps| = " +
        std::to_string(report.cep_identity_gap));

  report.entropy = nu_entropy(phi, nu);
  return report;
}

}  // namespace specext
