#include "ustat/threads.hpp"

#include "ustat/errors.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ustat {

int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int count) {
    if (count < 1) throw DomainError("thread count must be at least 1");
#if defined(_OPENMP)
    omp_set_num_threads(count);
#endif
}

}  // namespace ustat
