// Copyright 2026 The UAE Authors
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

#include "uae/binary_io.hpp"

#include <fstream>
#include <sstream>

namespace uae {

void BinaryWriter::save(const std::filesystem::path& path) const {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

BinaryReader BinaryReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return BinaryReader(ss.str());
}

void expect_header(BinaryReader& in, std::string_view magic,
                   std::uint16_t expected_version) {
  if (in.remaining() < magic.size()) throw FormatError("truncated file");
  if (in.bytes(magic.size()) != magic) {
    throw FormatError("bad magic, expected " + std::string(magic));
  }
  const auto version = in.u16();
  if (version != expected_version) {
    throw FormatError("version mismatch for " + std::string(magic) + ": file has " +
                      std::to_string(version) + ", reader supports " +
                      std::to_string(expected_version));
  }
}

}  // namespace uae
