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

// Line-oriented decimal text format for MilpInstance:
//
//   milp <n0> <m>
//   name <identifier>
//   obj <c_0> ... <c_{n0-1}>
//   row <nnz> (<j> <coeff>)* <= <b_i>          (m lines)
//   bounds <j> <l_j> <u_j>                      (n0 lines)
//   int <k> <j_1> ... <j_k>
//
// Numbers use the shortest decimal form that round-trips a double, so
// read(write(x)) == x bit for bit. Unbounded entries are written "inf"/"-inf".
// Blank lines and lines starting with '#' are ignored.

#ifndef REVIBRANCH_INSTANCE_IO_H_
#define REVIBRANCH_INSTANCE_IO_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "revibranch/milp.h"

namespace revibranch {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

std::string format_double(double value);
double parse_double(const std::string& token);

void write_instance(const MilpInstance& instance, std::ostream& out);
void write_instance(const MilpInstance& instance,
                    const std::filesystem::path& path);
std::string instance_to_string(const MilpInstance& instance);

MilpInstance read_instance(std::istream& in);
MilpInstance read_instance(const std::filesystem::path& path);
MilpInstance instance_from_string(const std::string& text);

}  // namespace revibranch

#endif  // REVIBRANCH_INSTANCE_IO_H_
