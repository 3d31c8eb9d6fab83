#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "laplace/critpoint.hpp"

namespace laplace {

// Problem file grammar, one key per line, '#' starts a comment:
//
//   name   classical          (optional)
//   dim    1
//   box    -1 1               (lo hi for every axis)
//   h      poly               (term lines "coeff a1 .. ad", closed by "end")
//   -1 2
//   end
//   sigma  zero               (optional; poly | builtin NAME | NAME)
//   g      builtin one
//   p      inf                (optional, default inf)
//   s      0                  (optional, default 0)
//   k      0
//
// Numbers are parsed with correctly rounded decimal conversion. Unknown or
// repeated keys are rejected.
ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem(const std::filesystem::path& path);

// Inverse of parse_problem for polynomial and builtin fields.
std::string format_problem(const ProblemSpec& prob);

// Term lines "coeff a1 .. ad", one per line.
ScalarField parse_polynomial(int dim, std::string_view lines);

}  // namespace laplace
