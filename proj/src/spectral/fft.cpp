#include "relaylab/spectral/fft.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "relaylab/errors.hpp"

namespace relaylab::spectral {
namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

FftPlan::FftPlan(std::size_t n, FftDirection dir) : n_(n) {
  if (n == 0) throw DomainError("FftPlan: size must be positive");
  std::lock_guard lock(planner_mutex());
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!buf_) throw std::bad_alloc();
  auto* io = reinterpret_cast<fftw_complex*>(buf_);
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), io, io, dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE);
  if (!plan_) {
    fftw_free(buf_);
    throw std::runtime_error("FftPlan: planner failed");
  }
}

void FftPlan::release() {
  if (plan_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
  if (buf_) fftw_free(buf_);
  plan_ = nullptr;
  buf_ = nullptr;
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept : n_(other.n_), buf_(other.buf_), plan_(other.plan_) {
  other.buf_ = nullptr;
  other.plan_ = nullptr;
  other.n_ = 0;
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    release();
    n_ = other.n_;
    buf_ = other.buf_;
    plan_ = other.plan_;
    other.buf_ = nullptr;
    other.plan_ = nullptr;
    other.n_ = 0;
  }
  return *this;
}

std::span<std::complex<double>> FftPlan::buffer() { return {buf_, n_}; }

void FftPlan::execute() { fftw_execute(static_cast<fftw_plan>(plan_)); }

void FftPlan::transform(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  if (in.size() != n_ || out.size() != n_) throw DomainError("FftPlan::transform: size mismatch");
  std::copy(in.begin(), in.end(), buf_);
  execute();
  std::copy(buf_, buf_ + n_, out.begin());
}

}  // namespace relaylab::spectral
