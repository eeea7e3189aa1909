#include "specext/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pairwise.hpp"
#include "specext/errors.hpp"

namespace specext {

namespace {

// x^n for integer n (n may be negative), by squaring.
double ipow(double x, int n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double r = 1.0, b = x;
  for (; n > 0; n >>= 1, b *= b)
    if (n & 1) r *= b;
  return r;
}

// <q,c> with half-set storage: the k = 0 term once, k != 0 terms doubled.
double symmetric_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += 2.0 * a[i] * b[i];
  return s;
}

// cos(<k, theta_l>) for every grid point, row-major.
std::vector<double> cosine_field(const MultiIndex& k, const GridSpec& grid) {
  const int d = grid.dim();
  const std::int64_t total = grid.total();
  std::vector<double> out(static_cast<std::size_t>(total));
  std::vector<int> l(d, 0);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    double arg = 0.0;
    for (int j = 0; j < d; ++j)
      arg += 2.0 * std::numbers::pi * k[j] * l[j] / grid.sizes[j];
    out[static_cast<std::size_t>(flat)] = std::cos(arg);
    for (int j = d - 1; j >= 0; --j) {
      if (++l[j] < grid.sizes[j]) break;
      l[j] = 0;
    }
  }
  return out;
}

}  // namespace

SymTrigPoly DualPoint::numerator() const {
  std::vector<double> coeffs(index_set.half_size());
  coeffs[0] = 1.0;
  std::copy(p.begin(), p.end(), coeffs.begin() + 1);
  return {index_set, std::move(coeffs)};
}

SymTrigPoly DualPoint::denominator() const { return {index_set, q}; }

Eigen::VectorXd DualPoint::packed() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(dimension()));
  Eigen::Index i = 0;
  for (double v : p) x[i++] = v;
  for (double v : q) x[i++] = v;
  return x;
}

DualPoint DualPoint::unpack(const IndexSet& S, const Eigen::VectorXd& x) {
  const std::size_t h = S.half_size();
  if (x.size() != static_cast<Eigen::Index>(2 * h - 1))
    throw std::invalid_argument("DualPoint::unpack: dimension mismatch");
  DualPoint out{S, std::vector<double>(h - 1), std::vector<double>(h)};
  for (std::size_t i = 0; i + 1 < h; ++i) out.p[i] = x[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < h; ++i)
    out.q[i] = x[static_cast<Eigen::Index>(h - 1 + i)];
  return out;
}

void DualPoint::validate() const {
  const std::size_t h = index_set.half_size();
  if (p.size() + 1 != h || q.size() != h)
    throw std::invalid_argument("DualPoint: coefficient block sizes do not match Lambda_half");
}

DualEval dual_eval(const DualPoint& x, const MomentData& data,
                   const GridSpec& grid, bool with_hessian) {
  x.validate();
  data.validate();
  if (x.index_set.half() != data.index_set.half())
    throw std::invalid_argument("dual_eval: point and data index sets differ");

  const int nu = data.nu;
  const double lambda = data.lambda;
  const std::size_t h = x.index_set.half_size();
  const std::size_t dim = x.dimension();
  const std::size_t n = static_cast<std::size_t>(grid.total());

  DualEval ev;
  const GridField pf = eval_poly(x.numerator(), grid);
  const GridField qf = eval_poly(x.denominator(), grid);
  ev.p_min = pf.min();
  ev.q_min = qf.min();
  if (ev.p_min <= 0.0 || ev.q_min <= 0.0) {
    ev.value = std::numeric_limits<double>::infinity();
    ev.feasible = false;
    return ev;
  }
  ev.feasible = true;

  // (P/Q)^nu and companions, all elementwise over the grid.
  std::vector<double> ratio_nu(n), scratch(n);
  GridField ratio_num1{grid, std::vector<double>(n)};  // (P/Q)^{nu-1}
  GridField inv_p_nu{grid, std::vector<double>(n)};    // P^{-nu}
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pf.values[i] / qf.values[i];
    const double rn1 = ipow(r, nu - 1);
    ratio_num1.values[i] = rn1;
    ratio_nu[i] = rn1 * r;
    inv_p_nu.values[i] = ipow(pf.values[i], -nu);
    // P^nu/Q^{nu-1} = (P/Q)^nu * Q; 1/P^{nu-1} = P^{-nu} * P.
    scratch[i] = rn1 * r * qf.values[i] + lambda * inv_p_nu.values[i] * pf.values[i];
  }
  ev.value = detail::pairwise_mean(scratch) / (nu - 1) +
             symmetric_dot(x.q, data.c);
  for (std::size_t i = 1; i < h; ++i) ev.value -= 2.0 * x.p[i - 1] * data.m[i - 1];

  // Gradient: q-block from c - Gamma((P/Q)^nu), p-block from the
  // stationarity residual of (part_P); k != 0 entries doubled.
  const GridField ratio_nu_field{grid, ratio_nu};
  const auto gamma_q = project_moments(ratio_nu_field, x.index_set);
  const auto gamma_p1 = project_moments0(ratio_num1, x.index_set);
  const auto gamma_p2 = project_moments0(inv_p_nu, x.index_set);
  ev.gradient.resize(static_cast<Eigen::Index>(dim));
  const double cep_scale = static_cast<double>(nu) / (nu - 1);
  for (std::size_t i = 1; i < h; ++i)
    ev.gradient[static_cast<Eigen::Index>(i - 1)] =
        2.0 * (cep_scale * gamma_p1[i - 1] - lambda * gamma_p2[i - 1] -
               data.m[i - 1]);
  ev.gradient[static_cast<Eigen::Index>(h - 1)] = data.c[0] - gamma_q[0];
  for (std::size_t i = 1; i < h; ++i)
    ev.gradient[static_cast<Eigen::Index>(h - 1 + i)] =
        2.0 * (data.c[i] - gamma_q[i]);

  if (!with_hessian) return ev;

  // Direction fields: dP_j and dQ_j on the grid for each coordinate.
  // u_j = P dQ_j - Q dP_j enters the rank-structured first term.
  Eigen::MatrixXd u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd dp(static_cast<Eigen::Index>(h - 1), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < h; ++i) {
    const auto cosk = cosine_field(x.index_set.half_at(i), grid);
    for (std::size_t l = 0; l < n; ++l) {
      const double dir = 2.0 * cosk[l];
      dp(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(l)) = dir;
      u(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(l)) =
          -qf.values[l] * dir;                       // p_k direction
      u(static_cast<Eigen::Index>(h - 1 + i), static_cast<Eigen::Index>(l)) =
          pf.values[l] * dir;                        // q_k direction
    }
  }
  for (std::size_t l = 0; l < n; ++l)
    u(static_cast<Eigen::Index>(h - 1), static_cast<Eigen::Index>(l)) =
        pf.values[l];                                // q_0 direction: dQ = 1

  std::vector<double> w(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pv = pf.values[i], qv = qf.values[i];
    w[i] = nu * ipow(pv, nu - 2) / ipow(qv, nu + 1);
    v[i] = nu * lambda * ipow(pv, -(nu + 1));
  }

  ev.hessian.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<double> prod(n);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j; k < dim; ++k) {
      for (std::size_t l = 0; l < n; ++l)
        prod[l] = w[l] * u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) *
                  u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
      if (j < h - 1 && k < h - 1)
        for (std::size_t l = 0; l < n; ++l)
          prod[l] += v[l] *
                     dp(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) *
                     dp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
      const double hjk = detail::pairwise_mean(prod);
      ev.hessian(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = hjk;
      ev.hessian(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = hjk;
    }
  }
  return ev;
}

double dual_value(const DualPoint& x, const MomentData& data, const GridSpec& grid) {
  x.validate();
  data.validate();
  const GridField pf = eval_poly(x.numerator(), grid);
  const GridField qf = eval_poly(x.denominator(), grid);
  if (pf.min() <= 0.0 || qf.min() <= 0.0)
    return std::numeric_limits<double>::infinity();

  const int nu = data.nu;
  const std::size_t n = pf.values.size();
  std::vector<double> scratch(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pv = pf.values[i], qv = qf.values[i];
    scratch[i] = ipow(pv, nu) / ipow(qv, nu - 1) +
                 data.lambda * ipow(pv, -(nu - 1));
  }
  double value = detail::pairwise_mean(scratch) / (nu - 1) +
                 symmetric_dot(x.q, data.c);
  for (std::size_t i = 0; i < data.m.size(); ++i)
    value -= 2.0 * x.p[i] * data.m[i];
  return value;
}

Eigen::VectorXd dual_gradient(const DualPoint& x, const MomentData& data,
                              const GridSpec& grid) {
  const DualEval ev = dual_eval(x, data, grid, /*with_hessian=*/false);
  if (!ev.feasible) throw infeasible_error("dual_gradient: infeasible point");
  return ev.gradient;
}

Eigen::MatrixXd dual_hessian(const DualPoint& x, const MomentData& data,
                             const GridSpec& grid) {
  const DualEval ev = dual_eval(x, data, grid, /*with_hessian=*/true);
  if (!ev.feasible) throw infeasible_error("dual_hessian: infeasible point");
  return ev.hessian;
}

PositivityCertificate positivity_certificate(const SymTrigPoly& poly,
                                             const GridSpec& grid) {
  poly.validate();
  grid.validate();
  PositivityCertificate cert;
  cert.delta = static_cast<double>(poly.index_set.l1_mass());

  SymTrigPoly scaled = poly;
  const double p0 = poly.coeffs.empty() ? 0.0 : poly.coeffs[0];
  if (p0 > 0.0 && p0 != 1.0)
    for (double& c : scaled.coeffs) c /= p0;
  cert.p_min = eval_poly(scaled, grid).min();
  if (p0 <= 0.0) {
    cert.certified = false;  // mean value p_0 <= 0: never positive
    return cert;
  }

  const int min_n = *std::min_element(grid.sizes.begin(), grid.sizes.end());
  const double threshold =
      2.0 * std::numbers::pi * grid.dim() * cert.delta / min_n;
  cert.certified = threshold < cert.p_min;
  return cert;
}

}  // namespace specext
