#pragma once

// Problem files are JSON documents:
//
//   {"family": "lp" | "qp" | "expsum",
//    "n": 5, "m": 2,
//    "c": [...],            // lp, qp
//    "Q": [[...], ...],     // qp only, row-major
//    "A": [[...], ...],     // m rows of n entries
//    "b": [...]}

#include "ftopt/problem.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ftopt {

/// Throws ParseError with line or field context on malformed input.
ConvexProgram parse_problem_file(std::string_view text);

ConvexProgram load_problem_file(const std::filesystem::path& path);

/// Writes doubles with round-trip precision, so parsing the result
/// reproduces the program bit for bit. GenericOracle programs are rejected.
std::string serialize_program(const ConvexProgram& program);

}  // namespace ftopt
