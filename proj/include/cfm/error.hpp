// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cfm {

enum class ErrorCode {
  SingularMetric,
  UnknownSurface,
  BadParams,
  DegenerateDomain,
  MeshingFailed,
  InvalidArgument,
  UnknownTag,
  MissingBC,
  NonSPD,
  OutsideDomain,
  OrientationCheckFailed,
  OptimizationStalled,
  ConfigError,
  DomainError,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cfm
