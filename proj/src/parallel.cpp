#include "subheat/parallel.hpp"

namespace subheat {

unsigned default_workers() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace subheat
