#include "spinkin/parallel.hpp"

#include "spinkin/common.hpp"

#include <omp.h>

namespace spinkin {

void set_thread_count(int n) {
    if (n < 1) throw InvalidArgument("set_thread_count: need at least one thread");
    omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace spinkin
