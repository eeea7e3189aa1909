#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "specext/dual.hpp"

namespace specext {

struct SolveOptions {
  double grad_tol = 1e-9;             // stop when ||g||_2 <= grad_tol
  int max_iter = 200;
  double backtrack_alpha = 0.3;       // Armijo slope fraction, in (0, 0.5)
  double backtrack_beta = 0.5;        // step shrink factor, in (0, 1)
  double feasibility_fraction = 0.99; // fraction-to-boundary damping, in (0, 1)

  /// Called once per accepted Newton step; not part of the numerical contract.
  std::function<void(int iter, double value, double grad_norm, double step,
                     double p_min, double q_min)>
      observer;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  double final_grad_norm = 0.0;
  bool converged = false;

  // Matching diagnostics (filled by verify()).
  double cov_residual = 0.0;               // ||c - Gamma((P/Q)^nu)||_inf
  std::vector<double> cep_residual;        // per k in Lambda_half \ {0}
  std::vector<double> eps_certificate;     // lambda * Gamma_0(1/P^nu)
  double cep_identity_gap = 0.0;           // ||cep_residual - eps||_inf
  double entropy = 0.0;                    // H_nu of the solution spectrum
  double p_min = 0.0;
  double q_min = 0.0;
};

/// Standard initialization: q_0 = c_0^{-1/nu}, everything else zero, so the
/// initial spectrum (P/Q)^nu is identically c_0. Strictly feasible on any
/// grid. Throws infeasible_error when c_0 <= 0.
DualPoint initial_point(const MomentData& data);

/// Damped Newton on the discrete regularized dual problem. Each step solves
/// H d = -g by Cholesky factorization, damps the step to keep P and Q
/// strictly positive on the grid (fraction-to-boundary), then backtracks
/// until the Armijo condition holds. Stops when ||g||_2 <= grad_tol; a few
/// extra Newton steps then sharpen the stationarity residual so the
/// verification identities hold at their documented tolerances.
///
/// Running out of iterations yields a non-converged report, not an error;
/// a failed Hessian factorization throws naming the iterate.
std::pair<DualPoint, SolveReport> solve(const MomentData& data,
                                        const GridSpec& grid,
                                        const SolveOptions& opts = {},
                                        std::optional<DualPoint> start = {});

/// Matching diagnostics at an arbitrary strictly feasible point:
///   cov_residual    = ||c - Gamma((P/Q)^nu)||_inf
///   cep_residual_k  = (nu/(nu-1)) Gamma_0((P/Q)^{nu-1})_k - m_k
///   eps_k           = lambda * Gamma_0(1/P^nu)_k
/// With require_stationary, the identity cep_residual == eps must hold to
/// 1e-10 in the sup norm (it does at any converged point) or the call throws.
SolveReport verify(const DualPoint& x, const MomentData& data,
                   const GridSpec& grid, bool require_stationary = false);

}  // namespace specext
