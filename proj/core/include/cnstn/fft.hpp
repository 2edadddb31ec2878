#pragma once

#include <complex>

namespace cnstn::fft {

/// In-place unnormalized DFT over a dim-dimensional cube with n points per
/// axis, row-major layout.  forward applies exp(-ik.x) weights, backward
/// exp(+ik.x); backward(forward(x)) == n^dim * x.
///
/// Plans are cached per (dim, n, direction) and creation is serialized, so
/// both calls are safe from worker threads operating on distinct buffers.
void forward(int dim, int n, std::complex<double>* data);
void backward(int dim, int n, std::complex<double>* data);

}  // namespace cnstn::fft
