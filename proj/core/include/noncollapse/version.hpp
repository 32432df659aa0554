#pragma once

namespace noncollapse {

/// Library version, "major.minor.patch".
const char* version();

}  // namespace noncollapse
