#include "cnstn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace cnstn::fft {

namespace {

// fftw_plan creation is not thread-safe; new-array execution is.  Plans are
// created FFTW_UNALIGNED so they can run on any caller buffer.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int dim, int n, int sign, fftw_complex* probe) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(dim, n, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  int dims[3] = {n, n, n};
  fftw_plan p = fftw_plan_dft(dim, dims, probe, probe, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_cache.emplace(key, p);
  return p;
}

void execute(int dim, int n, int sign, std::complex<double>* data) {
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_plan p = plan_for(dim, n, sign, raw);
  fftw_execute_dft(p, raw, raw);
}

}  // namespace

void forward(int dim, int n, std::complex<double>* data) {
  execute(dim, n, FFTW_FORWARD, data);
}

void backward(int dim, int n, std::complex<double>* data) {
  execute(dim, n, FFTW_BACKWARD, data);
}

}  // namespace cnstn::fft
