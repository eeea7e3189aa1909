#include "specext/moments.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "pairwise.hpp"
#include "specext/errors.hpp"

namespace specext {

namespace {

void require_nonnegative(const GridField& phi, const char* who) {
  for (double v : phi.values)
    if (v < -1e-12)
      throw infeasible_error(std::string(who) + ": spectrum entry below -1e-12");
}

// Phi^{(nu-1)/nu} with clipping at zero; exact zeros map to zero.
GridField fractional_power_field(const GridField& phi, int nu) {
  const double e = static_cast<double>(nu - 1) / nu;
  GridField out{phi.grid, std::vector<double>(phi.values.size())};
  for (std::size_t i = 0; i < phi.values.size(); ++i) {
    const double v = phi.values[i];
    out.values[i] = v <= 0.0 ? 0.0 : std::exp(e * std::log(v));
  }
  return out;
}

}  // namespace

void MomentData::validate() const {
  if (nu < 2) throw std::invalid_argument("MomentData: nu must be >= 2");
  if (lambda < 0.0) throw std::invalid_argument("MomentData: lambda must be >= 0");
  if (c.size() != index_set.half_size())
    throw std::invalid_argument("MomentData: covariance count != |Lambda_half|");
  if (m.size() + 1 != index_set.half_size())
    throw std::invalid_argument("MomentData: cepstrum count != |Lambda_half|-1");
  if (c.empty() || c[0] <= 0.0)
    throw infeasible_error("MomentData: c_0 must be positive");
}

std::vector<double> covariances_from_spectrum(const GridField& phi,
                                              const IndexSet& S) {
  require_nonnegative(phi, "covariances_from_spectrum");
  return project_moments(phi, S);
}

std::vector<double> nu_cepstral_from_spectrum(const GridField& phi,
                                              const IndexSet& S, int nu) {
  if (nu < 2) throw std::invalid_argument("nu_cepstral_from_spectrum: nu < 2");
  require_nonnegative(phi, "nu_cepstral_from_spectrum");
  auto m = project_moments0(fractional_power_field(phi, nu), S);
  const double scale = static_cast<double>(nu) / (nu - 1);
  for (double& v : m) v *= scale;
  return m;
}

double nu_entropy(const GridField& phi, int nu) {
  if (nu < 2) throw std::invalid_argument("nu_entropy: nu < 2");
  require_nonnegative(phi, "nu_entropy");
  const GridField pw = fractional_power_field(phi, nu);
  const double mean = detail::pairwise_mean(pw.values);
  return static_cast<double>(nu) * nu / (nu - 1) * (mean - 1.0);
}

double alpha_divergence(const GridField& phi, const GridField& psi, double alpha) {
  if (phi.values.size() != psi.values.size())
    throw std::invalid_argument("alpha_divergence: field size mismatch");
  const std::size_t n = phi.values.size();
  std::vector<double> integrand(n);

  if (alpha == 0.0 || alpha == 1.0) {
    // D_1(phi||psi) = int phi log(phi/psi) - phi + psi; D_0 swaps the roles.
    const auto& f = (alpha == 1.0) ? phi.values : psi.values;
    const auto& g = (alpha == 1.0) ? psi.values : phi.values;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = f[i], b = g[i];
      if (a < 0.0 || b < 0.0)
        throw infeasible_error("alpha_divergence: negative spectrum entry");
      double term;
      if (a == 0.0) {
        term = b;  // 0*log 0 = 0
      } else if (b == 0.0) {
        throw infeasible_error(
            "alpha_divergence: log of zero against positive mass");
      } else {
        term = a * std::log(a / b) - a + b;
      }
      integrand[i] = term;
    }
  } else {
    const double c0 = 1.0 / (alpha * (alpha - 1.0));
    const double c1 = 1.0 / (1.0 - alpha);
    const double c2 = 1.0 / alpha;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = phi.values[i], b = psi.values[i];
      if (a < 0.0 || b < 0.0)
        throw infeasible_error("alpha_divergence: negative spectrum entry");
      integrand[i] = c0 * std::pow(a, alpha) * std::pow(b, 1.0 - alpha) +
                     c1 * a + c2 * b;
    }
  }
  return detail::pairwise_mean(integrand);
}

ToeplitzFeasibility toeplitz_feasibility_1d(const std::vector<double>& c, int n) {
  if (n < 0 || c.size() < static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("toeplitz_feasibility_1d: need c_0..c_n");
  Eigen::MatrixXd t(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) t(i, j) = c[static_cast<std::size_t>(std::abs(i - j))];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  const double eigmin = es.eigenvalues().minCoeff();
  return {eigmin > 0.0, eigmin};
}

}  // namespace specext
