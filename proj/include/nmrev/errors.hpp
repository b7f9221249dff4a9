// Copyright 2026 The nmrev Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nmrev {

enum class ErrorCode {
  InvalidDimension,
  DimensionMismatch,
  MalformedState,
  MalformedLiouvillian,
  InvalidInput,
  NoUniqueSolution,
  InconsistentSystem,
  Singularity,
  PropagatorZero,
  RootNotFound,
  DomainError,
  DegenerateState,
  InfeasibleTrajectory,
  IntegrationDiverged,
  UnphysicalState,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::MalformedState: return "malformed-state";
    case ErrorCode::MalformedLiouvillian: return "malformed-liouvillian";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NoUniqueSolution: return "no-unique-solution";
    case ErrorCode::InconsistentSystem: return "inconsistent-system";
    case ErrorCode::Singularity: return "singularity";
    case ErrorCode::PropagatorZero: return "propagator-zero";
    case ErrorCode::RootNotFound: return "root-not-found";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::DegenerateState: return "degenerate-state";
    case ErrorCode::InfeasibleTrajectory: return "infeasible-trajectory";
    case ErrorCode::IntegrationDiverged: return "integration-diverged";
    case ErrorCode::UnphysicalState: return "unphysical-state";
    case ErrorCode::ConfigError: return "config-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code; the
/// message names the operation that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nmrev
