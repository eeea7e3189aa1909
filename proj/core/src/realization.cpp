#include "specext/realization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "specext/errors.hpp"
#include "warn.hpp"

namespace specext {

namespace {

// Signed filter sequence of a(z) = a_0 - sum_j a_j z_j^{-1}: the coefficient
// of e^{-i<e_j, theta>} is -a_j.
std::vector<std::complex<double>> signed_sequence(
    const std::vector<std::complex<double>>& coeffs) {
  std::vector<std::complex<double>> beta = coeffs;
  for (std::size_t j = 1; j < beta.size(); ++j) beta[j] = -beta[j];
  return beta;
}

double norm2(const std::vector<std::complex<double>>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

void run_indexed_parallel(std::size_t count, int threads,
                          const std::function<void(std::size_t)>& work) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const int nworkers = std::min<int>(threads, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nworkers));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < nworkers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void ArmaModel::validate() const {
  if (d < 1) throw std::invalid_argument("ArmaModel: d must be >= 1");
  if (a.size() != static_cast<std::size_t>(d) + 1 ||
      b.size() != static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("ArmaModel: need d + 1 filter coefficients");
  if (std::abs(a[0] - std::complex<double>(1.0)) > 1e-12)
    throw std::invalid_argument("ArmaModel: a_0 must be 1");
  if (std::abs(norm2(b) - 1.0) > 1e-12)
    throw std::invalid_argument("ArmaModel: ||b|| must be 1");
  if (nu < 2) throw std::invalid_argument("ArmaModel: nu must be >= 2");
}

IndexSet ArmaModel::index_set() const {
  std::vector<MultiIndex> plus;
  plus.emplace_back(d, 0);
  for (int j = 0; j < d; ++j) {
    MultiIndex e(d, 0);
    e[j] = 1;
    plus.push_back(std::move(e));
  }
  return make_difference_index_set(plus);
}

DualPoint ArmaModel::true_coefficients() const {
  const IndexSet S = index_set();
  const SymTrigPoly P = poly_from_filter(b, S);
  const SymTrigPoly Q = poly_from_filter(a, S);
  DualPoint x{S, std::vector<double>(P.coeffs.begin() + 1, P.coeffs.end()),
              Q.coeffs};
  return x;
}

ArmaModel arma_from_polar(const std::vector<double>& abs_a,
                          const std::vector<double>& angle_a_pi,
                          const std::vector<double>& abs_b,
                          const std::vector<double>& angle_b_pi, int nu) {
  if (abs_a.size() != angle_a_pi.size() || abs_b.size() != angle_b_pi.size() ||
      abs_a.size() != abs_b.size() || abs_a.size() < 2)
    throw std::invalid_argument("arma_from_polar: inconsistent coefficient arrays");
  ArmaModel model;
  model.d = static_cast<int>(abs_a.size()) - 1;
  model.nu = nu;
  auto compose = [](double mod, double ang_pi) {
    // Angles that are integer multiples of pi stay exactly real.
    const double r = std::remainder(ang_pi, 2.0);
    if (r == 0.0) return std::complex<double>(mod, 0.0);
    if (r == 1.0 || r == -1.0) return std::complex<double>(-mod, 0.0);
    return std::polar(mod, ang_pi * std::numbers::pi);
  };
  for (std::size_t j = 0; j < abs_a.size(); ++j) {
    model.a.push_back(compose(abs_a[j], angle_a_pi[j]));
    model.b.push_back(compose(abs_b[j], angle_b_pi[j]));
  }
  const double bn = norm2(model.b);
  if (bn == 0.0) throw std::invalid_argument("arma_from_polar: zero numerator");
  for (auto& v : model.b) v /= bn;
  model.validate();
  return model;
}

SymTrigPoly poly_from_filter(const std::vector<std::complex<double>>& coeffs,
                             const IndexSet& S) {
  const int d = S.dim();
  if (coeffs.size() != static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("poly_from_filter: need d + 1 coefficients");
  const auto beta = signed_sequence(coeffs);

  // Support indices of the degree-one filter: 0, e_1, ..., e_d.
  std::vector<MultiIndex> support;
  support.emplace_back(d, 0);
  for (int j = 0; j < d; ++j) {
    MultiIndex e(d, 0);
    e[j] = 1;
    support.push_back(std::move(e));
  }

  std::map<MultiIndex, std::complex<double>> acc;
  for (std::size_t i = 0; i < beta.size(); ++i)
    for (std::size_t j = 0; j < beta.size(); ++j) {
      MultiIndex k(d);
      for (int t = 0; t < d; ++t) k[t] = support[i][t] - support[j][t];
      acc[k] += beta[i] * std::conj(beta[j]);
    }

  double scale = 0.0;
  for (const auto& v : beta) scale += std::norm(v);
  const double tol = 1e-12 * std::max(1.0, scale);

  SymTrigPoly out{S, std::vector<double>(S.half_size(), 0.0)};
  for (const auto& [k, v] : acc) {
    if (std::abs(v.imag()) >= tol)
      throw std::invalid_argument(
          "poly_from_filter: complex residue in autocorrelation; model violates "
          "real-field symmetry");
    const std::size_t pos = S.find(k);
    if (pos == IndexSet::npos) {
      if (std::abs(v) > 0.0)
        throw std::invalid_argument(
            "poly_from_filter: index set does not cover the filter support");
      continue;
    }
    out.coeffs[pos] = v.real();
  }
  return out;
}

GridField true_spectrum(const ArmaModel& model, const GridSpec& grid) {
  model.validate();
  grid.validate();
  const IndexSet S = model.index_set();
  GridField pf = eval_poly(poly_from_filter(model.b, S), grid);
  const GridField qf = eval_poly(poly_from_filter(model.a, S), grid);
  if (qf.min() <= 0.0)
    throw infeasible_error("true_spectrum: |a|^2 vanishes on the grid");

  GridField phi{grid, std::vector<double>(pf.values.size())};
  for (std::size_t i = 0; i < pf.values.size(); ++i) {
    const double p = std::max(pf.values[i], 0.0);
    double r = p / qf.values[i], out = 1.0;
    for (int e = 0; e < model.nu; ++e) out *= r;
    phi.values[i] = out;
  }
  return phi;
}

MomentData model_moments(const ArmaModel& model, const GridSpec& grid) {
  const IndexSet S = model.index_set();
  const GridField phi = true_spectrum(model, grid);
  MomentData data;
  data.index_set = S;
  data.c = covariances_from_spectrum(phi, S);
  data.m = nu_cepstral_from_spectrum(phi, S, model.nu);
  data.nu = model.nu;
  data.lambda = 0.0;
  return data;
}

ExperimentResult lambda_sweep(const ArmaModel& model, const GridSpec& grid,
                              std::vector<double> lambdas,
                              const SolveOptions& opts, bool with_sections) {
  model.validate();
  for (double l : lambdas)
    if (l <= 0.0) throw std::invalid_argument("lambda_sweep: lambda must be > 0");
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  ExperimentResult result;
  result.lambdas = lambdas;
  result.data = model_moments(model, grid);

  const Eigen::VectorXd truth = model.true_coefficients().packed();
  const std::size_t n = lambdas.size();
  result.errors.resize(n);
  result.entropies.resize(n);
  result.cov_residuals.resize(n);
  result.max_abs_eps.resize(n);
  result.converged.assign(n, false);
  result.iterations.resize(n);
  result.solutions.resize(n);

  run_indexed_parallel(n, thread_limit(), [&](std::size_t i) {
    MomentData data = result.data;
    data.lambda = lambdas[i];
    auto [sol, report] = solve(data, grid, opts);
    result.errors[i] = (sol.packed() - truth).norm();
    result.entropies[i] = report.entropy;
    result.cov_residuals[i] = report.cov_residual;
    double eps = 0.0;
    for (double e : report.eps_certificate) eps = std::max(eps, std::abs(e));
    result.max_abs_eps[i] = eps;
    result.converged[i] = report.converged;
    result.iterations[i] = report.iterations;
    result.solutions[i] = std::move(sol);
  });

  if (with_sections) {
    const GridField truth_field = true_spectrum(model, grid);
    const auto argmin =
        std::min_element(truth_field.values.begin(), truth_field.values.end()) -
        truth_field.values.begin();
    std::vector<int> base(grid.dim());
    {
      std::int64_t rem = argmin;
      for (int j = grid.dim() - 1; j >= 0; --j) {
        base[static_cast<std::size_t>(j)] = static_cast<int>(rem % grid.sizes[j]);
        rem /= grid.sizes[j];
      }
    }
    std::vector<GridField> recon_fields;
    recon_fields.reserve(n);
    for (const auto& sol : result.solutions) {
      const GridField pf = eval_poly(sol.numerator(), grid);
      const GridField qf = eval_poly(sol.denominator(), grid);
      GridField phi{grid, std::vector<double>(pf.values.size())};
      for (std::size_t i = 0; i < pf.values.size(); ++i) {
        double r = pf.values[i] / qf.values[i], out = 1.0;
        for (int e = 0; e < model.nu; ++e) out *= r;
        phi.values[i] = out;
      }
      recon_fields.push_back(std::move(phi));
    }
    for (int axis = 0; axis < grid.dim(); ++axis) {
      CrossSection sec;
      sec.axis = axis;
      sec.base = base;
      std::vector<int> point = base;
      sec.reconstructed.assign(n, {});
      for (int l = 0; l < grid.sizes[axis]; ++l) {
        point[static_cast<std::size_t>(axis)] = l;
        const auto flat = static_cast<std::size_t>(grid.flatten(point));
        sec.truth.push_back(truth_field.values[flat]);
        for (std::size_t i = 0; i < n; ++i)
          sec.reconstructed[i].push_back(recon_fields[i].values[flat]);
      }
      result.cross_sections.push_back(std::move(sec));
    }
  }
  return result;
}

std::vector<GridConvergenceRow> grid_convergence(const ArmaModel& model,
                                                 const std::vector<int>& Ns,
                                                 double lambda,
                                                 const SolveOptions& opts) {
  model.validate();
  if (Ns.size() < 2)
    throw std::invalid_argument("grid_convergence: need at least two grid sizes");
  if (model.nu < model.d / 2.0 + 1.0)
    detail::warn("grid_convergence: nu < d/2 + 1, discrete solutions have no "
                 "continuous-limit guarantee");

  std::vector<GridConvergenceRow> rows;
  for (int N : Ns) {
    GridSpec grid{std::vector<int>(static_cast<std::size_t>(model.d), N)};
    MomentData data = model_moments(model, grid);
    data.lambda = lambda;
    auto [sol, report] = solve(data, grid, opts);
    GridConvergenceRow row{grid.sizes, std::move(sol), std::move(report), 0.0};
    if (!rows.empty())
      row.distance_to_prev =
          (row.solution.packed() - rows.back().solution.packed()).norm();
    rows.push_back(std::move(row));
  }
  return rows;
}

EntropyCurve entropy_curve(const MomentData& data, const GridSpec& grid,
                           std::vector<double> lambdas,
                           const SolveOptions& opts) {
  if (lambdas.size() < 2)
    throw std::invalid_argument("entropy_curve: need at least two lambdas");
  std::sort(lambdas.begin(), lambdas.end());

  EntropyCurve curve;
  curve.lambdas = lambdas;
  curve.entropies.resize(lambdas.size());
  curve.solutions.resize(lambdas.size());
  run_indexed_parallel(lambdas.size(), thread_limit(), [&](std::size_t i) {
    MomentData local = data;
    local.lambda = lambdas[i];
    auto [sol, report] = solve(local, grid, opts);
    curve.entropies[i] = report.entropy;
    curve.solutions[i] = std::move(sol);
  });
  curve.slope_at_origin =
      (curve.entropies[1] - curve.entropies[0]) / (lambdas[1] - lambdas[0]);
  return curve;
}

int thread_limit() {
  int limit = static_cast<int>(std::thread::hardware_concurrency());
  if (limit < 1) limit = 1;
  if (const char* env = std::getenv("SPECEXT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) limit = std::min<long>(limit, cap);
  }
  return limit;
}

}  // namespace specext
