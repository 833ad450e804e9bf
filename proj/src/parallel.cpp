#include "rwdre/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rwdre
{
    unsigned worker_cap()
    {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("RWDRE_THREADS"))
        {
            try
            {
                const long v = std::stol(env);
                if (v > 0)
                    return static_cast<unsigned>(v);
            }
            catch (...)
            {
            }
        }
        return hw;
    }
} // namespace rwdre
