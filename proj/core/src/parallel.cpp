#include "desync/parallel.hpp"

#include <cstdlib>
#include <string>

#include "desync/errors.hpp"

namespace desync {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DESYNC_THREADS"); env && *env) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ValidationError("DESYNC_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1u;
}

}  // namespace desync
