#include "noncollapse/version.hpp"

namespace noncollapse {

const char* version() { return NONCOLLAPSE_VERSION; }

}  // namespace noncollapse
