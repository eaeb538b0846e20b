#include "opcalc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace opcalc {

unsigned thread_limit() noexcept
{
    static const unsigned limit = [] {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("MARKOV_OPCALC_THREADS")) {
            try {
                const long v = std::stol(env);
                if (v >= 1) return static_cast<unsigned>(v);
            } catch (...) {
            }
        }
        return hw;
    }();
    return limit;
}

}  // namespace opcalc
