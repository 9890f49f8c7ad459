#pragma once

namespace spinkin {

/// Sets the number of worker threads used by data-parallel loops (n >= 1).
void set_thread_count(int n);
int thread_count();

}  // namespace spinkin
