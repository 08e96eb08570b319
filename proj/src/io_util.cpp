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

#include "io_util.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <system_error>

#include "error.hpp"

namespace latentnav {

namespace fs = std::filesystem;

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorCode::kIo, "read error on '" + path + "'");
  return bytes;
}

namespace {

void WriteRaw(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "write error on '" + path + "'");
}

}  // namespace

void OutputBatch::Add(std::string path, std::string bytes) {
  files_.emplace_back(std::move(path), std::move(bytes));
}

void OutputBatch::Commit() {
  std::vector<std::string> temps;
  try {
    for (const auto &[path, bytes] : files_) {
      const auto parent = fs::path(path).parent_path();
      if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) Fail(ErrorCode::kIo, "cannot create directory '" + parent.string() + "'");
      }
      temps.push_back(path + ".tmp");
      WriteRaw(temps.back(), bytes);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto &t : temps) fs::remove(t, ec);
    throw;
  }
  for (std::size_t i = 0; i < files_.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files_[i].first, ec);
    if (ec) {
      for (std::size_t j = i; j < temps.size(); ++j) fs::remove(temps[j], ec);
      Fail(ErrorCode::kIo, "cannot move output into '" + files_[i].first + "'");
    }
  }
  files_.clear();
}

void WriteFileAtomic(const std::string &path, const std::string &bytes) {
  OutputBatch batch;
  batch.Add(path, bytes);
  batch.Commit();
}

void AppendU32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void AppendF64(std::string &out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

std::uint32_t ReadU32(const std::string &in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i]))
         << (8 * i);
  }
  return v;
}

double ReadF64(const std::string &in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i]))
            << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

std::uint64_t Fnv1a64(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace latentnav
