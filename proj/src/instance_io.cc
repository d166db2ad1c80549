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

#include "revibranch/instance_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace revibranch {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

std::string format_double(double value) {
  if (value == kInfinity) return "inf";
  if (value == -kInfinity) return "-inf";
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& token) {
  if (token == "inf" || token == "+inf") return kInfinity;
  if (token == "-inf") return -kInfinity;
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end || std::isnan(value)) {
    throw std::invalid_argument("not a number: '" + token + "'");
  }
  return value;
}

void write_instance(const MilpInstance& instance, std::ostream& out) {
  instance.validate();
  if (instance.name.find_first_of(" \t\r\n") != std::string::npos) {
    throw InvalidInstanceError("instance name must not contain whitespace");
  }
  out << "milp " << instance.num_variables() << ' '
      << instance.num_constraints() << '\n';
  out << "name " << (instance.name.empty() ? "-" : instance.name) << '\n';
  out << "obj";
  for (double c : instance.objective) out << ' ' << format_double(c);
  out << '\n';
  for (const SparseRow& row : instance.rows) {
    out << "row " << row.columns.size();
    for (size_t k = 0; k < row.columns.size(); ++k) {
      out << ' ' << row.columns[k] << ' ' << format_double(row.coefficients[k]);
    }
    out << " <= " << format_double(row.rhs) << '\n';
  }
  for (int j = 0; j < instance.num_variables(); ++j) {
    out << "bounds " << j << ' ' << format_double(instance.lower_bounds[j])
        << ' ' << format_double(instance.upper_bounds[j]) << '\n';
  }
  out << "int " << instance.integer_set.size();
  for (int j : instance.integer_set) out << ' ' << j;
  out << '\n';
}

void write_instance(const MilpInstance& instance,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_instance(instance, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string instance_to_string(const MilpInstance& instance) {
  std::ostringstream out;
  write_instance(instance, out);
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split into tokens; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      std::istringstream split(line);
      tokens.clear();
      std::string token;
      while (split >> token) tokens.push_back(token);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      return true;
    }
    return false;
  }

  void expect(std::vector<std::string>& tokens, const std::string& keyword) {
    if (!next(tokens)) fail("unexpected end of file, expected '" + keyword + "'");
    if (tokens[0] != keyword) {
      fail("expected '" + keyword + "', found '" + tokens[0] + "'");
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_number_, message);
  }

  double number(const std::string& token) const {
    try {
      return parse_double(token);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  long long integer(const std::string& token) const {
    long long value = 0;
    auto result =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
      fail("not an integer: '" + token + "'");
    }
    return value;
  }

  int line_number() const { return line_number_; }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

}  // namespace

MilpInstance read_instance(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tokens;
  MilpInstance instance;

  reader.expect(tokens, "milp");
  if (tokens.size() != 3) reader.fail("header must be 'milp <n0> <m>'");
  const long long n = reader.integer(tokens[1]);
  const long long m = reader.integer(tokens[2]);
  if (n < 0 || m < 0) reader.fail("negative dimensions");

  reader.expect(tokens, "name");
  if (tokens.size() != 2) reader.fail("name line must be 'name <identifier>'");
  instance.name = tokens[1] == "-" ? "" : tokens[1];

  reader.expect(tokens, "obj");
  if (static_cast<long long>(tokens.size()) != n + 1) {
    reader.fail("objective must have " + std::to_string(n) + " coefficients");
  }
  for (long long j = 0; j < n; ++j) {
    instance.objective.push_back(reader.number(tokens[j + 1]));
  }

  for (long long i = 0; i < m; ++i) {
    reader.expect(tokens, "row");
    if (tokens.size() < 2) reader.fail("row line missing nnz");
    const long long nnz = reader.integer(tokens[1]);
    if (nnz < 0 || static_cast<long long>(tokens.size()) != 2 + 2 * nnz + 2) {
      reader.fail("row must be 'row <nnz> (j coeff)* <= b'");
    }
    if (tokens[2 + 2 * nnz] != "<=") reader.fail("row sense must be '<='");
    SparseRow row;
    for (long long k = 0; k < nnz; ++k) {
      const long long j = reader.integer(tokens[2 + 2 * k]);
      if (j < 0 || j >= n) reader.fail("column index out of range");
      row.columns.push_back(static_cast<int>(j));
      row.coefficients.push_back(reader.number(tokens[3 + 2 * k]));
    }
    row.rhs = reader.number(tokens.back());
    instance.rows.push_back(std::move(row));
  }

  instance.lower_bounds.assign(n, 0.0);
  instance.upper_bounds.assign(n, 0.0);
  for (long long j = 0; j < n; ++j) {
    reader.expect(tokens, "bounds");
    if (tokens.size() != 4) reader.fail("bounds line must be 'bounds <j> <l> <u>'");
    if (reader.integer(tokens[1]) != j) reader.fail("bounds out of order");
    const double lower = reader.number(tokens[2]);
    const double upper = reader.number(tokens[3]);
    if (lower > upper) {
      reader.fail("variable " + std::to_string(j) +
                  " has lower bound above upper bound");
    }
    instance.lower_bounds[j] = lower;
    instance.upper_bounds[j] = upper;
  }

  reader.expect(tokens, "int");
  if (tokens.size() < 2) reader.fail("int line missing count");
  const long long k = reader.integer(tokens[1]);
  if (k < 0 || static_cast<long long>(tokens.size()) != k + 2) {
    reader.fail("int line must be 'int <k> j_1 ... j_k'");
  }
  for (long long t = 0; t < k; ++t) {
    instance.integer_set.push_back(static_cast<int>(reader.integer(tokens[t + 2])));
  }
  if (reader.next(tokens)) reader.fail("trailing content after 'int' line");

  try {
    instance.validate();
  } catch (const InvalidInstanceError& e) {
    throw ParseError(reader.line_number(), e.what());
  }
  return instance;
}

MilpInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_instance(in);
}

MilpInstance instance_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_instance(in);
}

}  // namespace revibranch
