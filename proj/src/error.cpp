// Copyright 2026 The cknb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cknb/error.hpp"

namespace cknb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kOddNUnsupported: return "OddNUnsupported";
    case ErrorKind::kNoTieSets: return "NoTieSets";
    case ErrorKind::kCapacityExceeded: return "CapacityExceeded";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kNonConvergence: return "NonConvergence";
    case ErrorKind::kInvalidPhaseType: return "InvalidPhaseType";
  }
  return "Unknown";
}

}  // namespace cknb
