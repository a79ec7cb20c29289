#pragma once

#include "fracbs/kernels.hpp"

namespace fracbs::kernels {

#if defined(FRACBS_HAVE_AVX2)
/// Defined in avx2.cpp, which is the only translation unit built with -mavx2.
const Table& avx2_table_impl() noexcept;
#endif

}  // namespace fracbs::kernels
