#pragma once

#include <vector>

#include "specext/grid.hpp"

namespace specext {

/// Problem data for the regularized dual solve: covariances c over the half
/// set (c_0 first), nu-cepstra m over the half set minus zero, the integer
/// order nu >= 2 and the regularization weight lambda >= 0. m_0 is never
/// stored; the p_0*m_0 term of <p,m> is taken as 0.
struct MomentData {
  IndexSet index_set;
  std::vector<double> c;  // size |Lambda_half|
  std::vector<double> m;  // size |Lambda_half| - 1
  int nu = 2;
  double lambda = 0.0;

  void validate() const;  // throws std::invalid_argument / infeasible_error
};

/// c_k = (1/|N|) sum_l zeta_l^k Phi(zeta_l) over the half set.
/// Rejects spectra with entries below -1e-12.
std::vector<double> covariances_from_spectrum(const GridField& phi,
                                              const IndexSet& S);

/// m_k = (nu/(nu-1)) (1/|N|) sum_l zeta_l^k Phi(zeta_l)^{(nu-1)/nu}
/// over the half set minus zero. Phi is clipped below at 0; 0^x = 0.
std::vector<double> nu_cepstral_from_spectrum(const GridField& phi,
                                              const IndexSet& S, int nu);

/// H_nu(Phi) = (nu^2/(nu-1)) ((1/|N|) sum_l Phi^{(nu-1)/nu} - 1).
double nu_entropy(const GridField& phi, int nu);

/// alpha-divergence between two grid spectra under the discrete measure.
/// The alpha = 0 and alpha = 1 branches are implemented separately from the
/// generic one; 0*log 0 = 0, log of zero against positive mass is an error.
double alpha_divergence(const GridField& phi, const GridField& psi, double alpha);

struct ToeplitzFeasibility {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
};

/// d = 1 feasibility criterion: the (n+1)x(n+1) symmetric Toeplitz matrix
/// built from (c_0..c_n) must be positive definite.
ToeplitzFeasibility toeplitz_feasibility_1d(const std::vector<double>& c, int n);

}  // namespace specext
