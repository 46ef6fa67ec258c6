#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace multinet {

/// True when already inside an OpenMP parallel region; nested kernels fall
/// back to their serial path instead of oversubscribing.
inline bool in_omp_parallel() {
#ifdef _OPENMP
    return omp_in_parallel() != 0;
#else
    return false;
#endif
}

} // namespace multinet
