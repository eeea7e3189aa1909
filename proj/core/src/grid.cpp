#include "specext/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "fft.hpp"
#include "warn.hpp"

namespace specext {

namespace {

// Canonical sign: an index is in the half set iff its first nonzero entry
// is positive (the zero index included).
bool in_half(const MultiIndex& k) {
  for (int v : k) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return true;
}

MultiIndex negate(const MultiIndex& k) {
  MultiIndex out(k.size());
  std::transform(k.begin(), k.end(), out.begin(), [](int v) { return -v; });
  return out;
}

std::string index_to_string(const MultiIndex& k) {
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < k.size(); ++j) os << (j ? "," : "") << k[j];
  os << ")";
  return os.str();
}

// Flat position of k folded mod N (row-major).
std::int64_t fold_index(const MultiIndex& k, const std::vector<int>& sizes) {
  std::int64_t flat = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const int n = sizes[j];
    int r = k[j] % n;
    if (r < 0) r += n;
    flat = flat * n + r;
  }
  return flat;
}

}  // namespace

IndexSet IndexSet::finish(int d, std::vector<MultiIndex> members) {
  std::vector<MultiIndex> half;
  half.reserve(members.size() / 2 + 1);
  for (auto& k : members)
    if (in_half(k)) half.push_back(std::move(k));
  std::sort(half.begin(), half.end());
  // The zero index sorts first among half-set members; rotating guards the
  // invariant anyway and doubles as the membership check.
  MultiIndex zero(d, 0);
  auto it = std::find(half.begin(), half.end(), zero);
  if (it == half.end())
    throw std::invalid_argument("index set must contain the zero index");
  std::rotate(half.begin(), it, it + 1);
  return IndexSet(d, std::move(half));
}

std::int64_t GridSpec::total() const {
  std::int64_t t = 1;
  for (int n : sizes) t *= n;
  return t;
}

std::int64_t GridSpec::flatten(const std::vector<int>& point) const {
  std::int64_t flat = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) flat = flat * sizes[j] + point[j];
  return flat;
}

std::vector<double> GridSpec::frequency(std::int64_t flat) const {
  std::vector<double> theta(sizes.size());
  for (std::size_t j = sizes.size(); j-- > 0;) {
    const int n = sizes[j];
    theta[j] = 2.0 * std::numbers::pi * static_cast<double>(flat % n) / n;
    flat /= n;
  }
  return theta;
}

void GridSpec::validate() const {
  if (sizes.empty()) throw std::invalid_argument("GridSpec: dimension must be >= 1");
  for (int n : sizes)
    if (n < 2) throw std::invalid_argument("GridSpec: every N_j must be >= 2");
}

IndexSet::IndexSet(int d, std::vector<MultiIndex> half)
    : d_(d), half_(std::move(half)) {
  for (std::size_t i = 0; i < half_.size(); ++i) position_.emplace(half_[i], i);
}

std::size_t IndexSet::find(const MultiIndex& k) const {
  if (static_cast<int>(k.size()) != d_) return npos;
  const MultiIndex& canon = in_half(k) ? k : negate(k);
  auto it = position_.find(canon);
  return it == position_.end() ? npos : it->second;
}

std::vector<int> IndexSet::max_abs_per_dim() const {
  std::vector<int> m(d_, 0);
  for (const auto& k : half_)
    for (int j = 0; j < d_; ++j) m[j] = std::max(m[j], std::abs(k[j]));
  return m;
}

std::int64_t IndexSet::l1_mass() const {
  std::int64_t mass = 0;
  for (const auto& k : half_) {
    std::int64_t l1 = 0;
    for (int v : k) l1 += std::abs(v);
    mass += 2 * l1;  // each nonzero half index stands for the pair {k, -k}
  }
  return mass;
}

IndexSet make_box_index_set(const std::vector<int>& n) {
  const int d = static_cast<int>(n.size());
  if (d < 1) throw std::invalid_argument("make_box_index_set: d must be >= 1");
  for (int v : n)
    if (v < 0) throw std::invalid_argument("make_box_index_set: negative bound");
  std::vector<MultiIndex> members;
  MultiIndex k(d);
  // Odometer over the box [-n_j, n_j]^d.
  std::vector<int> digit(d, 0);
  while (true) {
    for (int j = 0; j < d; ++j) k[j] = digit[j] - n[j];
    members.push_back(k);
    int j = d - 1;
    while (j >= 0 && digit[j] == 2 * n[j]) digit[j--] = 0;
    if (j < 0) break;
    ++digit[j];
  }
  return IndexSet::finish(d, std::move(members));
}

IndexSet make_difference_index_set(const std::vector<MultiIndex>& plus) {
  if (plus.empty())
    throw std::invalid_argument("make_difference_index_set: empty plus set");
  const int d = static_cast<int>(plus.front().size());
  bool has_zero = false;
  for (const auto& x : plus) {
    if (static_cast<int>(x.size()) != d)
      throw std::invalid_argument("make_difference_index_set: ragged indices");
    has_zero = has_zero || std::all_of(x.begin(), x.end(), [](int v) { return v == 0; });
  }
  if (!has_zero)
    throw std::invalid_argument("make_difference_index_set: plus must contain 0");
  std::vector<MultiIndex> members;
  for (const auto& x : plus)
    for (const auto& y : plus) {
      MultiIndex k(d);
      for (int j = 0; j < d; ++j) k[j] = x[j] - y[j];
      members.push_back(std::move(k));
    }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return IndexSet::finish(d, std::move(members));
}

void SymTrigPoly::validate() const {
  if (coeffs.size() != index_set.half_size())
    throw std::invalid_argument("SymTrigPoly: coefficient count != |Lambda_half|");
}

double GridField::min() const {
  return *std::min_element(values.begin(), values.end());
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

GridField eval_poly(const SymTrigPoly& poly, const GridSpec& grid) {
  poly.validate();
  grid.validate();
  const IndexSet& S = poly.index_set;
  if (S.dim() != grid.dim())
    throw std::invalid_argument("eval_poly: dimension mismatch");

  const auto maxk = S.max_abs_per_dim();
  for (int j = 0; j < grid.dim(); ++j)
    if (grid.sizes[j] <= 2 * maxk[j])
      detail::warn("eval_poly: grid size N_" + std::to_string(j + 1) +
                   " <= 2*max|k|; indices fold mod N");

  const std::int64_t total = grid.total();
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(total));
  std::unordered_map<std::int64_t, std::size_t> seen;
  seen.reserve(S.full_size());
  double coeff_l1 = 0.0;
  for (std::size_t i = 0; i < S.half_size(); ++i) {
    const MultiIndex& k = S.half_at(i);
    const double p = poly.coeffs[i];
    const std::int64_t pos = fold_index(k, grid.sizes);
    if (!seen.emplace(pos, i).second)
      throw std::runtime_error("eval_poly: aliasing collision at index " +
                               index_to_string(k));
    buf[static_cast<std::size_t>(pos)] += p;
    coeff_l1 += std::abs(p);
    if (i > 0) {
      const std::int64_t neg = fold_index(negate(k), grid.sizes);
      if (!seen.emplace(neg, i).second)
        throw std::runtime_error("eval_poly: aliasing collision at index -" +
                                 index_to_string(k));
      buf[static_cast<std::size_t>(neg)] += p;
      coeff_l1 += std::abs(p);
    }
  }

  // values(l) = sum_k p_k e^{-i<k,theta_l>}: the sign -1 transform.
  detail::dft(buf, grid.sizes, -1);

  GridField out{grid, std::vector<double>(static_cast<std::size_t>(total))};
  double imag_max = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out.values[i] = buf[i].real();
    imag_max = std::max(imag_max, std::abs(buf[i].imag()));
  }
  if (imag_max > 1e-10 * coeff_l1)
    throw std::runtime_error("eval_poly: imaginary residue exceeds tolerance");
  return out;
}

std::vector<double> project_moments(const GridField& f, const IndexSet& S) {
  f.grid.validate();
  if (S.dim() != f.grid.dim())
    throw std::invalid_argument("project_moments: dimension mismatch");
  const std::int64_t total = f.grid.total();
  if (f.values.size() != static_cast<std::size_t>(total))
    throw std::invalid_argument("project_moments: field size mismatch");

  std::vector<std::complex<double>> buf(f.values.begin(), f.values.end());
  // c_k = (1/|N|) sum_l f(l) e^{+i<k,theta_l>}: the sign +1 transform.
  detail::dft(buf, f.grid.sizes, +1);

  const double scale = 1.0 / static_cast<double>(total);
  const double tol = 1e-10 * f.max_abs();
  std::vector<double> out(S.half_size());
  for (std::size_t i = 0; i < S.half_size(); ++i) {
    const std::complex<double> c =
        scale * buf[static_cast<std::size_t>(fold_index(S.half_at(i), f.grid.sizes))];
    if (std::abs(c.imag()) > tol)
      throw std::runtime_error(
          "project_moments: imaginary residue exceeds tolerance (field not "
          "symmetric?) at index " + index_to_string(S.half_at(i)));
    out[i] = c.real();
  }
  return out;
}

std::vector<double> project_moments0(const GridField& f, const IndexSet& S) {
  auto full = project_moments(f, S);
  return std::vector<double>(full.begin() + 1, full.end());
}

}  // namespace specext
