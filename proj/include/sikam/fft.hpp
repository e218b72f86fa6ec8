#pragma once

#include <complex>
#include <memory>
#include <span>

namespace sikam {

using cdouble = std::complex<double>;

// Thin RAII wrapper over FFTW plans of a fixed length. Plans are created with
// FFTW_ESTIMATE so the chosen algorithm, and therefore every output bit, does
// not depend on timing measurements. Execution is thread-safe; plan creation
// is serialized internally.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  // out[k] = sum_n in[n] exp(-2 pi i k n / N), k = 0 .. N/2
  void forward(std::span<const double> in, std::span<cdouble> out) const;
  // Unnormalized inverse of forward: returns N * x.
  void inverse(std::span<const cdouble> in, std::span<double> out) const;

 private:
  int n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

class ComplexFft {
 public:
  explicit ComplexFft(int n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  int size() const { return n_; }

  // Sign -1 in the exponent.
  void forward(std::span<const cdouble> in, std::span<cdouble> out) const;
  // Sign +1 in the exponent, unnormalized.
  void backward(std::span<const cdouble> in, std::span<cdouble> out) const;

 private:
  int n_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

// Shared, lazily created plans keyed by length.
std::shared_ptr<const RealFft> real_fft(int n);
std::shared_ptr<const ComplexFft> complex_fft(int n);

}  // namespace sikam
