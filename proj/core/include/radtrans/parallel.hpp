#pragma once

namespace radtrans {

/// Caps the number of worker threads used inside the library. Zero restores
/// the runtime default.
void set_thread_limit(int threads);

/// Applies RADTRANS_THREADS from the environment, if set. Returns the value
/// applied, or -1 when the variable is absent or unparseable.
int apply_thread_limit_from_env();

int thread_limit();

}  // namespace radtrans
