#pragma once

// Thin FFTW wrapper for batched spatial transforms of one time slice: all
// fiber components transform together (howmany = fiber), rank = dim - 1.
// Plans are created once per grid shape and reused; FFTW_ESTIMATE keeps
// planning deterministic and cheap.

#include <fftw3.h>

#include <vector>

#include "slab/common.hpp"
#include "slab/grid.hpp"

namespace slab {

class SpatialFFT {
 public:
  explicit SpatialFFT(const SpacetimeGrid& g)
      : nspace_(g.nspace()), fiber_(g.fiber), buf_(std::size_t(g.nspace() * g.fiber)) {
    std::vector<int> n(g.nx.begin(), g.nx.end());
    auto* io = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = fftw_plan_many_dft(int(n.size()), n.data(), fiber_, io, nullptr, fiber_, 1,
                              io, nullptr, fiber_, 1, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_many_dft(int(n.size()), n.data(), fiber_, io, nullptr, fiber_, 1,
                              io, nullptr, fiber_, 1, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw NumericError("fft: plan creation failed");
  }

  SpatialFFT(const SpatialFFT&) = delete;
  SpatialFFT& operator=(const SpatialFFT&) = delete;

  ~SpatialFFT() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  // slice layout: (xflat * fiber + comp), length nspace * fiber
  void forward(cplx* slice) {
    copy_in(slice);
    fftw_execute(fwd_);
    copy_out(slice, 1.0);
  }

  // normalized inverse: backward transform scaled by 1/nspace
  void inverse(cplx* slice) {
    copy_in(slice);
    fftw_execute(bwd_);
    copy_out(slice, 1.0 / double(nspace_));
  }

 private:
  void copy_in(const cplx* slice) {
    for (std::size_t k = 0; k < buf_.size(); ++k) buf_[k] = slice[k];
  }
  void copy_out(cplx* slice, double scale) {
    for (std::size_t k = 0; k < buf_.size(); ++k) slice[k] = buf_[k] * scale;
  }

  long nspace_;
  int fiber_;
  std::vector<cplx> buf_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace slab
