#include "resedf/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace resedf {

std::size_t workers_from_environment()
{
  const char* raw = std::getenv(kWorkersEnv);
  if (raw == nullptr) {
    return 0;
  }
  try {
    const long v = std::stol(raw);
    return v > 0 ? static_cast<std::size_t>(v) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

std::size_t resolve_workers(std::size_t requested)
{
  if (requested > 0) {
    return requested;
  }
  if (const auto env = workers_from_environment(); env > 0) {
    return env;
  }
#ifdef _OPENMP
  return static_cast<std::size_t>(omp_get_num_procs());
#else
  return std::max(1u, std::thread::hardware_concurrency());
#endif
}

} // namespace resedf
