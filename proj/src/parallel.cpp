#include "torustau/parallel.hpp"

#include <cstdlib>
#include <string>

namespace torustau {

std::size_t worker_count()
{
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0)
        n = 1;
    if (const char* env = std::getenv("TORUSTAU_THREADS")) {
        try {
            long cap = std::stol(env);
            if (cap >= 1 && static_cast<std::size_t>(cap) < n)
                n = static_cast<std::size_t>(cap);
        } catch (...) {
        }
    }
    return n;
}

} // namespace torustau
