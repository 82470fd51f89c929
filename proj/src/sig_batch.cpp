#include "pgo/sig_batch.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pgo/robust_kernel.hpp"

namespace pgo::batch {

namespace {

void pow_mu_scalar(const double* x, const double* mu, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::pow(x[i], mu[i]);
}

void weights_scalar(const double* x, const double* mu, double* out,
                    std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = pgo::detail::sig_weight_x(x[i], mu[i], c);
}

void costs_scalar(const double* x, const double* mu, double* out,
                  std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = pgo::detail::sig_rho_x(x[i], mu[i], c);
}

}  // namespace

#ifdef PGO_HAVE_AVX2
namespace avx2 {
void pow_mu(const double* x, const double* mu, double* out, std::size_t n);
void weights(const double* x, const double* mu, double* out, std::size_t n,
             double c);
void costs(const double* x, const double* mu, double* out, std::size_t n,
           double c);
}  // namespace avx2
#endif

bool avx2_supported() {
#ifdef PGO_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend resolve() {
  if (const char* env = std::getenv("PGO_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::kScalar;
    if (v == "avx2" && avx2_supported()) return Backend::kAvx2;
    return Backend::kScalar;
  }
  return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

Backend& backend_slot() {
  static Backend b = resolve();
  return b;
}

}  // namespace

const char* backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

Backend active_backend() { return backend_slot(); }

Backend force_backend(Backend b) {
  if (b == Backend::kAvx2 && !avx2_supported())
    throw std::runtime_error("avx2 backend not supported on this host");
  Backend prev = backend_slot();
  backend_slot() = b;
  return prev;
}

void pow_mu(const double* x, const double* mu, double* out, std::size_t n) {
#ifdef PGO_HAVE_AVX2
  if (active_backend() == Backend::kAvx2) return avx2::pow_mu(x, mu, out, n);
#endif
  pow_mu_scalar(x, mu, out, n);
}

void weights(const double* x, const double* mu, double* out, std::size_t n,
             double c) {
#ifdef PGO_HAVE_AVX2
  if (active_backend() == Backend::kAvx2)
    return avx2::weights(x, mu, out, n, c);
#endif
  weights_scalar(x, mu, out, n, c);
}

void costs(const double* x, const double* mu, double* out, std::size_t n,
           double c) {
#ifdef PGO_HAVE_AVX2
  if (active_backend() == Backend::kAvx2) return avx2::costs(x, mu, out, n, c);
#endif
  costs_scalar(x, mu, out, n, c);
}

}  // namespace pgo::batch
