#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace nlslab::detail {

// Unnormalized in-place DFT of fixed length. Plans are shared per thread.
class Fft {
public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }
  void forward(std::complex<double>* data) const;   // sum f_n e^{-2 pi i jn/N}
  void backward(std::complex<double>* data) const;  // sum f_j e^{+2 pi i jn/N}

  static const Fft& get(int n);

private:
  int n_;
  void* fwd_;
  void* bwd_;
};

}  // namespace nlslab::detail
