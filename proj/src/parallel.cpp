#include "testimation/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace testimation {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads >= 1) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

}  // namespace testimation
