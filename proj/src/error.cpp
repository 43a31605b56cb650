#include "blade/error.hpp"

namespace blade {

std::string_view to_string(Severity s) {
  return s == Severity::error ? "error" : "warning";
}

}  // namespace blade
