// Copyright 2026 The ReviBranch Authors
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

// Raw host-order (little-endian on supported targets) record helpers shared
// by the binary checkpoint formats.

#ifndef REVIBRANCH_BINARY_IO_H_
#define REVIBRANCH_BINARY_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace revibranch {

class TruncatedRecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw TruncatedRecordError("truncated binary record");
  return value;
}

template <typename T>
void write_vector(std::ostream& out, const std::vector<T>& values) {
  write_pod<uint64_t>(out, values.size());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vector(std::istream& in) {
  const uint64_t size = read_pod<uint64_t>(in);
  if (size > (uint64_t{1} << 32)) throw TruncatedRecordError("corrupt vector length");
  std::vector<T> values(size);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(size * sizeof(T)));
  if (!in) throw TruncatedRecordError("truncated binary record");
  return values;
}

inline void write_doubles(std::ostream& out, const double* data, int64_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

inline void read_doubles(std::istream& in, double* data, int64_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw TruncatedRecordError("truncated binary record");
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
  const uint32_t size = read_pod<uint32_t>(in);
  if (size > (1u << 24)) throw TruncatedRecordError("corrupt string length");
  std::string s(size, '\0');
  in.read(s.data(), size);
  if (!in) throw TruncatedRecordError("truncated binary record");
  return s;
}

}  // namespace revibranch

#endif  // REVIBRANCH_BINARY_IO_H_
