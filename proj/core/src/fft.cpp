#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace specext::detail {

namespace {

// fftw_execute_dft may run concurrently; plan creation may not.
std::mutex plan_mutex;
std::map<std::pair<std::vector<int>, int>, fftw_plan> plan_cache;

fftw_plan plan_for(const std::vector<int>& sizes, int sign, fftw_complex* buf) {
  std::lock_guard lock(plan_mutex);
  auto key = std::make_pair(sizes, sign);
  if (auto it = plan_cache.find(key); it != plan_cache.end()) return it->second;
  // FFTW_UNALIGNED so the cached plan stays valid for any array.
  fftw_plan plan = fftw_plan_dft(static_cast<int>(sizes.size()), sizes.data(),
                                 buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("fftw_plan_dft failed");
  plan_cache.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void dft(std::vector<std::complex<double>>& data, const std::vector<int>& sizes,
         int sign) {
  if (sizes.empty()) throw std::invalid_argument("dft: empty size vector");
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  if (data.size() != n) throw std::invalid_argument("dft: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan =
      plan_for(sizes, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, buf);
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace specext::detail
