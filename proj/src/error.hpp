// Copyright 2026 The latentnav Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LATENTNAV_ERROR_HPP
#define LATENTNAV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace latentnav {

// Mirrors lnav_status in latentnav.h; values must stay in sync.
enum class ErrorCode : int {
  kConfig = 1,
  kArgument = 2,
  kContract = 3,
  kEvaluation = 4,
  kTraining = 5,
  kPlanning = 6,
  kBadMagic = 7,
  kBadVersion = 8,
  kTruncated = 9,
  kFormat = 10,
  kIo = 11,
  kDisconnected = 12,
  kNoGroundTruth = 13,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

}  // namespace latentnav

#endif
