// Copyright 2026 The axbstar Authors
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

#include "axb/errors.hpp"

namespace axb {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidHandle: return "InvalidHandle";
    case ErrorCode::InvalidExponents: return "InvalidExponents";
    case ErrorCode::OddLength: return "OddLength";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ContourDivergence: return "ContourDivergence";
    case ErrorCode::OnBranchCut: return "OnBranchCut";
    case ErrorCode::TailDivergence: return "TailDivergence";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace axb
