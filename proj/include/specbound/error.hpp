#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace specbound {

// Every failure carries the name of the module that raised it, so CLI users
// can tell a parse problem from an estimation problem without a stack trace.
class error : public std::runtime_error {
 public:
  error(std::string module, const std::string& message)
      : std::runtime_error("[" + module + "] " + message),
        module_(std::move(module)) {}

  [[nodiscard]] const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace specbound
