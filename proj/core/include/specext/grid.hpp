#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace specext {

/// A multi-index k = (k_1, ..., k_d) in Z^d.
using MultiIndex = std::vector<int>;

/// Uniform grid on the d-torus. Grid point l = (l_1..l_d), 0 <= l_j < N_j,
/// has frequency theta_l = (2*pi*l_1/N_1, ..., 2*pi*l_d/N_d) and carries
/// weight 1/|N| under the discrete measure.
struct GridSpec {
  std::vector<int> sizes;  // N_1..N_d, each >= 2

  int dim() const { return static_cast<int>(sizes.size()); }
  std::int64_t total() const;

  /// Row-major flat index of a grid point.
  std::int64_t flatten(const std::vector<int>& point) const;

  /// theta_l for the grid point with the given flat index.
  std::vector<double> frequency(std::int64_t flat) const;

  void validate() const;  // throws std::invalid_argument on a bad spec
};

/// Symmetric index set Lambda = Lambda_half U (-Lambda_half), stored through
/// its half set. The half set keeps the zero index first, then the remaining
/// indices in lexicographic order; an index belongs to the half set iff its
/// first nonzero entry is positive.
class IndexSet {
 public:
  IndexSet() = default;

  int dim() const { return d_; }
  std::size_t half_size() const { return half_.size(); }
  std::size_t full_size() const { return 2 * half_.size() - 1; }

  const std::vector<MultiIndex>& half() const { return half_; }
  const MultiIndex& half_at(std::size_t i) const { return half_[i]; }

  /// Position of k in the half set after sign canonicalization, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(const MultiIndex& k) const;
  bool contains(const MultiIndex& k) const { return find(k) != npos; }

  /// max_j over Lambda of |k_j|, per dimension.
  std::vector<int> max_abs_per_dim() const;

  /// sum over the full Lambda of ||k||_1.
  std::int64_t l1_mass() const;

 private:
  friend IndexSet make_box_index_set(const std::vector<int>& n);
  friend IndexSet make_difference_index_set(const std::vector<MultiIndex>& plus);
  explicit IndexSet(int d, std::vector<MultiIndex> half);

  // Builds the canonical half set (zero first, lexicographic) from the full
  // symmetric member list.
  static IndexSet finish(int d, std::vector<MultiIndex> members);

  int d_ = 0;
  std::vector<MultiIndex> half_;
  std::map<MultiIndex, std::size_t> position_;
};

/// Real coefficients of a symmetric trigonometric polynomial
///   P(e^{i theta}) = sum_{k in Lambda} p_k e^{-i<k,theta>},  p_{-k} = p_k,
/// stored over the half set (zero index first).
struct SymTrigPoly {
  IndexSet index_set;
  std::vector<double> coeffs;  // over Lambda_half, coeffs[0] <-> k = 0

  void validate() const;
};

/// Real-valued function sampled on a GridSpec, row-major over grid points.
struct GridField {
  GridSpec grid;
  std::vector<double> values;

  double min() const;
  double max_abs() const;
};

/// Box index set {k : |k_j| <= n_j for all j}.
IndexSet make_box_index_set(const std::vector<int>& n);

/// Difference set Lambda = plus - plus = {x - y : x, y in plus}.
/// `plus` must contain the zero index.
IndexSet make_difference_index_set(const std::vector<MultiIndex>& plus);

/// Evaluates P on the grid: values(l) = sum_{k in Lambda} p_k zeta_l^{-k}.
/// Coefficients are folded into a zero-padded |N| array at k mod N and
/// transformed with a multidimensional DFT; the imaginary residue must stay
/// below 1e-10 * ||p||_1 and is discarded.
///
/// Throws if two indices of Lambda coincide mod N; warns when some
/// N_j <= 2 max|k_j| (folding still injective but aliased).
GridField eval_poly(const SymTrigPoly& poly, const GridSpec& grid);

/// Fourier coefficients of a grid field over the half set of S:
///   c_k = (1/|N|) sum_l zeta_l^k f(zeta_l).
/// The field must be symmetric under l -> -l (mod N); the imaginary residue
/// check (< 1e-10 * ||f||_inf) doubles as the symmetry test.
std::vector<double> project_moments(const GridField& f, const IndexSet& S);

/// Gamma_0 variant: coefficients over Lambda_half \ {0}.
std::vector<double> project_moments0(const GridField& f, const IndexSet& S);

}  // namespace specext
