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

#ifndef LATENTNAV_IO_UTIL_HPP
#define LATENTNAV_IO_UTIL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace latentnav {

std::string ReadFileBytes(const std::string &path);

/// Collects file contents and publishes them together: every file is first
/// written to a temporary sibling, then all are renamed into place. If any
/// write fails, the temporaries are removed and nothing is published.
class OutputBatch {
 public:
  void Add(std::string path, std::string bytes);
  void Commit();

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

void WriteFileAtomic(const std::string &path, const std::string &bytes);

/// Little-endian encoders; the on-disk formats are little-endian regardless
/// of the host.
void AppendU32(std::string &out, std::uint32_t v);
void AppendF64(std::string &out, double v);
std::uint32_t ReadU32(const std::string &in, std::size_t offset);
double ReadF64(const std::string &in, std::size_t offset);

/// FNV-1a 64 over a byte string.
std::uint64_t Fnv1a64(const std::string &bytes);

}  // namespace latentnav

#endif
