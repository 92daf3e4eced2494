#include "vecmath.hpp"

#include <cmath>

#if defined(NDPC_USE_LIBMVEC) && (defined(__AVX512F__) || defined(__AVX2__))
#include <immintrin.h>
#define NDPC_VECMATH 1
extern "C" {
#if defined(__AVX512F__)
__m512d _ZGVeN8v_sin(__m512d);
__m512d _ZGVeN8v_cos(__m512d);
#else
__m256d _ZGVdN4v_sin(__m256d);
__m256d _ZGVdN4v_cos(__m256d);
#endif
}
#endif

namespace ndpc::detail {

#if defined(NDPC_VECMATH) && defined(__AVX512F__)
void sin_array(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm512_storeu_pd(out + i, _ZGVeN8v_sin(_mm512_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = std::sin(in[i]);
}
void cos_array(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm512_storeu_pd(out + i, _ZGVeN8v_cos(_mm512_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = std::cos(in[i]);
}
#elif defined(NDPC_VECMATH)
void sin_array(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _ZGVdN4v_sin(_mm256_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = std::sin(in[i]);
}
void cos_array(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _ZGVdN4v_cos(_mm256_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = std::cos(in[i]);
}
#else
void sin_array(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(in[i]);
}
void cos_array(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(in[i]);
}
#endif

}  // namespace ndpc::detail
