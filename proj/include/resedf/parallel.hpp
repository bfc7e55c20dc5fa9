#pragma once

#include <cstddef>

namespace resedf {

//! Name of the environment variable overriding the worker count.
inline constexpr const char* kWorkersEnv = "RESEDF_WORKERS";

//! Worker count to use: `requested` if positive, else $RESEDF_WORKERS if set to
//! a positive integer, else the number of available cores.
std::size_t resolve_workers(std::size_t requested = 0);

//! Positive value of $RESEDF_WORKERS, or 0 when unset or invalid.
std::size_t workers_from_environment();

} // namespace resedf
