#include "gscp/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gscp {

int default_thread_count() {
    if (const char* env = std::getenv("GSCP_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace gscp
