#include "sikam/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

#include "sikam/error.hpp"

namespace sikam {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 1) throw InvalidArgument("fft length must be positive");
  std::vector<double> real(static_cast<size_t>(n));
  std::vector<cdouble> spec(static_cast<size_t>(n / 2 + 1));
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real.data(), as_fftw(spec.data()), kPlanFlags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, as_fftw(spec.data()), real.data(), kPlanFlags);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(std::span<const double> in, std::span<cdouble> out) const {
  if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != spectrum_size())
    throw InvalidArgument("RealFft::forward: size mismatch");
  // r2c does not modify its input, but the API takes a non-const pointer.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       as_fftw(out.data()));
}

void RealFft::inverse(std::span<const cdouble> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != spectrum_size() || static_cast<int>(out.size()) != n_)
    throw InvalidArgument("RealFft::inverse: size mismatch");
  // c2r destroys its input.
  std::vector<cdouble> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(scratch.data()), out.data());
}

ComplexFft::ComplexFft(int n) : n_(n) {
  if (n < 1) throw InvalidArgument("fft length must be positive");
  std::vector<cdouble> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
  std::lock_guard lock(planner_mutex());
  forward_plan_ =
      fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, kPlanFlags);
  backward_plan_ =
      fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, kPlanFlags);
}

ComplexFft::~ComplexFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void ComplexFft::forward(std::span<const cdouble> in, std::span<cdouble> out) const {
  if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
    throw InvalidArgument("ComplexFft::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(const_cast<cdouble*>(in.data())),
                   as_fftw(out.data()));
}

void ComplexFft::backward(std::span<const cdouble> in, std::span<cdouble> out) const {
  if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
    throw InvalidArgument("ComplexFft::backward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_),
                   as_fftw(const_cast<cdouble*>(in.data())), as_fftw(out.data()));
}

namespace {

template <typename Plan>
std::shared_ptr<const Plan> cached_plan(int n) {
  static std::mutex m;
  static std::map<int, std::shared_ptr<const Plan>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Plan>(n);
  return slot;
}

}  // namespace

std::shared_ptr<const RealFft> real_fft(int n) { return cached_plan<RealFft>(n); }
std::shared_ptr<const ComplexFft> complex_fft(int n) { return cached_plan<ComplexFft>(n); }

}  // namespace sikam
