#include "nsi/error.hpp"

namespace nsi {

ConvergenceError::ConvergenceError(const std::string& what, double residual, int iterations)
    : NumericalError(what + " (residual " + std::to_string(residual) + " after " +
                     std::to_string(iterations) + " iterations)"),
      residual_(residual),
      iterations_(iterations) {}

IoError parse_error(const std::string& path, std::size_t line, const std::string& message) {
  return IoError(path + ":" + std::to_string(line) + ": " + message);
}

}  // namespace nsi
