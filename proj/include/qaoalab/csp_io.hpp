#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qaoalab/csp.hpp"

namespace qaoalab {

// Line-oriented CSP text format:
//
//   # comment
//   csp <n> <m>
//   <k> <v_1> .. <v_k> <pattern>,<pattern>,...
//
// Each pattern is a k-character binary string whose j-th character is the
// value of v_j. Exactly m clause lines must follow the header.

CspInstance read_csp(std::istream& in);
CspInstance read_csp_file(const std::filesystem::path& path);
void write_csp(std::ostream& out, const CspInstance& instance);

/// DIMACS CNF; every clause (at most 3 distinct variables) becomes an OR truth table.
CspInstance read_dimacs(std::istream& in);
CspInstance read_dimacs_file(const std::filesystem::path& path);

}  // namespace qaoalab
