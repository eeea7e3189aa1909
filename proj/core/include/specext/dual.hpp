#pragma once

#include <Eigen/Core>

#include <vector>

#include "specext/grid.hpp"
#include "specext/moments.hpp"

namespace specext {

/// Optimization variables of the discrete regularized dual problem.
/// p holds the free coefficients of P over Lambda_half \ {0} (p_0 == 1 is
/// implicit); q holds all coefficients of Q over Lambda_half. The combined
/// coordinate vector is [p; q], of dimension 2|Lambda_half| - 1.
struct DualPoint {
  IndexSet index_set;
  std::vector<double> p;  // size |Lambda_half| - 1
  std::vector<double> q;  // size |Lambda_half|

  std::size_t dimension() const { return p.size() + q.size(); }
  SymTrigPoly numerator() const;    // P with p_0 = 1
  SymTrigPoly denominator() const;  // Q

  Eigen::VectorXd packed() const;               // [p; q]
  static DualPoint unpack(const IndexSet& S, const Eigen::VectorXd& x);

  void validate() const;
};

/// One evaluation of the regularized dual objective. When the point is
/// infeasible on the grid (min P <= 0 or min Q <= 0), value is +inf and
/// gradient/hessian are left empty.
struct DualEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  double p_min = 0.0;
  double q_min = 0.0;
  bool feasible = false;
};

/// Objective value
///   J(P,Q) = (1/(nu-1)) mean[P^nu / Q^{nu-1}] + <q,c> - <p,m>
///            + (lambda/(nu-1)) mean[1/P^{nu-1}]
/// with <q,c> = q_0 c_0 + 2 sum_{k != 0} q_k c_k and <p,m> = 2 sum p_k m_k.
/// Infeasible points return +inf rather than throwing.
double dual_value(const DualPoint& x, const MomentData& data, const GridSpec& grid);

/// Gradient in the canonical basis: the direction polynomial for a k != 0
/// coefficient is e^{-i<k,theta>} + e^{i<k,theta>}, so those entries carry a
/// factor 2; the q_0 direction is the constant 1.
/// Layout matches DualPoint::packed(): [p-block; q-block].
Eigen::VectorXd dual_gradient(const DualPoint& x, const MomentData& data,
                              const GridSpec& grid);

/// Hessian: H[j,k] = nu * mean[ P^{nu-2}/Q^{nu+1} (P dQ_j - Q dP_j)(P dQ_k - Q dP_k)
///                              + lambda dP_j dP_k / P^{nu+1} ].
Eigen::MatrixXd dual_hessian(const DualPoint& x, const MomentData& data,
                             const GridSpec& grid);

/// Full evaluation; gradient and Hessian share the field computations.
DualEval dual_eval(const DualPoint& x, const MomentData& data,
                   const GridSpec& grid, bool with_hessian = true);

struct PositivityCertificate {
  double p_min = 0.0;   // smallest grid value (after rescaling to p_0 = 1)
  double delta = 0.0;   // sum over Lambda of ||k||_1
  bool certified = false;
};

/// Grid positivity certificate: with p_0 = 1 (rescaled if necessary) and
/// Delta = sum_{k in Lambda} ||k||_1, the condition
///   2 pi d Delta / min(N) < min_l P(zeta_l)
/// certifies P > 0 on the whole torus, not only on the grid.
PositivityCertificate positivity_certificate(const SymTrigPoly& poly,
                                             const GridSpec& grid);

}  // namespace specext
