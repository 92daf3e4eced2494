#pragma once

#include <cstddef>

namespace ndpc::detail {

// Elementwise sin / cos over contiguous arrays. Uses the glibc vector math
// library when built for AVX2 or AVX-512, std::sin / std::cos otherwise.
void sin_array(const double* in, double* out, std::size_t n);
void cos_array(const double* in, double* out, std::size_t n);

}  // namespace ndpc::detail
