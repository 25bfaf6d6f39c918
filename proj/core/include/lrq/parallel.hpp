#pragma once

namespace lrq {

/// Caps internal parallelism; 0 restores the runtime default.
void set_num_threads(int n);
int num_threads();

}  // namespace lrq
