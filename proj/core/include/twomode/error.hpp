#pragma once

#include <stdexcept>
#include <string>

namespace twomode {

/// Invalid user-supplied parameter. `field()` names the offending input
/// so front ends can point at it.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace twomode
