#include "lsfct/errors.hpp"

namespace lsfct {

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::config:
      return 2;
    case ErrorCategory::input_data:
    case ErrorCategory::numeric:
      return 3;
    case ErrorCategory::io:
      return 4;
  }
  return 1;
}

}  // namespace lsfct
