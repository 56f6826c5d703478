#include "radtrans/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace radtrans {

namespace {
const int kDefaultThreads = omp_get_max_threads();
}

void set_thread_limit(int threads) {
  omp_set_num_threads(threads > 0 ? threads : kDefaultThreads);
}

int apply_thread_limit_from_env() {
  const char* raw = std::getenv("RADTRANS_THREADS");
  if (raw == nullptr) return -1;
  std::string_view text(raw);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) return -1;
  set_thread_limit(value);
  return value;
}

int thread_limit() { return omp_get_max_threads(); }

}  // namespace radtrans
