// Batch evaluation of the SIG kernel over factor arrays: the IRLS weighting
// pass evaluates x^mu per factor, which dominates the reweighting cost on
// large graphs. A scalar reference backend always exists; an AVX2+FMA backend
// is selected at runtime when the CPU supports it. Set PGO_SIMD=scalar or
// PGO_SIMD=avx2 to override.
//
// All inputs take x = squared residual norm (not r), matching what the solver
// has on hand after whitening.
#pragma once

#include <cstddef>

namespace pgo::batch {

enum class Backend { kScalar, kAvx2 };

const char* backend_name(Backend b);
bool avx2_supported();

// Backend in use, resolved once from CPU support and PGO_SIMD.
Backend active_backend();

// Test hook: force a backend. Throws std::runtime_error if unsupported.
// Returns the previously active backend.
Backend force_backend(Backend b);

// out[i] = x[i]^mu[i]; x[i] >= 0.
void pow_mu(const double* x, const double* mu, double* out, std::size_t n);
// out[i] = IRLS weight at squared residual x[i] with graduation mu[i].
void weights(const double* x, const double* mu, double* out, std::size_t n,
             double c);
// out[i] = rho at squared residual x[i].
void costs(const double* x, const double* mu, double* out, std::size_t n,
           double c);

}  // namespace pgo::batch
