#pragma once

#include <complex>
#include <vector>

#include "specext/solver.hpp"

namespace specext {

/// Degree-one-per-dimension ARMA model with transfer function
///   W(z) = [ b(z)/a(z) ]^nu,
///   a(z) = a_0 - a_1 z_1^{-1} - ... - a_d z_d^{-1}  (a_0 = 1),
///   b(z) analogous with ||b|| = 1.
/// The output spectrum is (P/Q)^nu with P = |b|^2 and Q = |a|^2.
struct ArmaModel {
  int d = 0;
  std::vector<std::complex<double>> a;  // size d + 1
  std::vector<std::complex<double>> b;  // size d + 1, unit norm
  int nu = 2;

  void validate() const;
  IndexSet index_set() const;  // Lambda = Lambda_+ - Lambda_+, Lambda_+ = {0, e_1..e_d}

  /// Ground-truth dual coefficients: p from |b|^2 (free part), q from |a|^2.
  DualPoint true_coefficients() const;
};

/// Builds a model from modulus/angle arrays, angles in units of pi
/// (angle = [0,1,1,1] means [0, pi, pi, pi]); b is normalized to unit norm.
ArmaModel arma_from_polar(const std::vector<double>& abs_a,
                          const std::vector<double>& angle_a_pi,
                          const std::vector<double>& abs_b,
                          const std::vector<double>& angle_b_pi, int nu);

/// Autocorrelation of the filter coefficients: the symmetric polynomial
/// |c_0 - sum_j c_j e^{-i theta_j}|^2 expanded over Lambda. The imaginary
/// residue of every coefficient must stay below 1e-12 (real-field symmetry).
SymTrigPoly poly_from_filter(const std::vector<std::complex<double>>& coeffs,
                             const IndexSet& S);

/// (P/Q)^nu sampled on the grid; Q must be strictly positive there.
/// The numerator field is clamped at zero (|b|^2 can round slightly negative
/// at a spectral zero).
GridField true_spectrum(const ArmaModel& model, const GridSpec& grid);

/// Covariances and nu-cepstra of the model spectrum under the discrete
/// measure; deterministic for a given model and grid. lambda is left 0.
MomentData model_moments(const ArmaModel& model, const GridSpec& grid);

/// Cross-section of a field along one axis through a base point.
struct CrossSection {
  int axis = 0;
  std::vector<int> base;          // grid point the section passes through
  std::vector<double> truth;      // true spectrum along the line
  std::vector<std::vector<double>> reconstructed;  // [lambda index][line index]
};

struct ExperimentResult {
  std::vector<double> lambdas;    // sorted in decreasing order
  std::vector<double> errors;     // ||(p_hat, q_hat) - (p, q)||_2 per lambda
  std::vector<double> entropies;
  std::vector<double> cov_residuals;
  std::vector<double> max_abs_eps;
  std::vector<bool> converged;
  std::vector<int> iterations;
  std::vector<DualPoint> solutions;
  MomentData data;                        // the (c, m) shared by all solves
  std::vector<CrossSection> cross_sections;  // one per axis when requested
};

/// Full realization sweep: moments from the model spectrum once, then one
/// solve per lambda. Sweep points run in parallel up to the thread budget;
/// rows are ordered by decreasing lambda. With sections enabled, records the
/// spectrum cross-sections through its global minimum along every axis.
ExperimentResult lambda_sweep(const ArmaModel& model, const GridSpec& grid,
                              std::vector<double> lambdas,
                              const SolveOptions& opts = {},
                              bool with_sections = false);

struct GridConvergenceRow {
  std::vector<int> sizes;
  DualPoint solution;
  SolveReport report;
  double distance_to_prev = 0.0;  // 0 for the first row
};

/// Solves the model problem on cubic grids (N, ..., N) for each N in Ns,
/// recomputing moments per grid, and reports successive solution distances.
/// Warns when nu < d/2 + 1 (no continuous-limit guarantee).
std::vector<GridConvergenceRow> grid_convergence(const ArmaModel& model,
                                                 const std::vector<int>& Ns,
                                                 double lambda,
                                                 const SolveOptions& opts = {});

struct EntropyCurve {
  std::vector<double> lambdas;    // sorted in increasing order
  std::vector<double> entropies;  // H_nu of the solution spectrum per lambda
  std::vector<DualPoint> solutions;
  double slope_at_origin = 0.0;   // forward difference over the two smallest lambdas
};

/// H_nu of the regularized solution as a function of lambda for fixed data.
EntropyCurve entropy_curve(const MomentData& data, const GridSpec& grid,
                           std::vector<double> lambdas,
                           const SolveOptions& opts = {});

/// Thread budget for parallel sweeps: hardware concurrency, capped by the
/// SPECEXT_THREADS environment variable when set.
int thread_limit();

}  // namespace specext
