#include "noncollapse/error.hpp"

// The hierarchy is header-only; this translation unit anchors the vtables.
namespace noncollapse {}
