#pragma once

#include <stdexcept>
#include <string>

namespace dtf {

// Thrown when an exhaustive operation would exceed its hard enumeration
// guard. Oracles are exact or absent; they never silently truncate.
class GuardExceeded : public std::runtime_error {
public:
    explicit GuardExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Execution policy for data-parallel kernels. The serial path is the
// reference implementation; the parallel path must produce identical
// results for any thread count.
enum class ExecPolicy { serial, parallel };

} // namespace dtf
