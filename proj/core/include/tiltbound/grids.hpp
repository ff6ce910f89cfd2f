#pragma once

#include <string>
#include <vector>

namespace tiltbound {

// n points from a to b inclusive; endpoints are exact (no accumulated step error,
// and a symmetric grid contains 0 exactly when it straddles it with odd n).
std::vector<double> linspace(double a, double b, std::size_t n);

// n points 10^a .. 10^b, log-spaced (exponents linearly spaced).
std::vector<double> logspace(double a, double b, std::size_t n);

bool strictly_increasing(const std::vector<double>& xs);

// Grid syntax used by the CLI and config files:
//   "a:b:n"          -> linspace(a, b, n)
//   "logspace:a:b:n" -> logspace(a, b, n)  (a, b are exponents of 10)
// Throws std::invalid_argument on malformed input.
std::vector<double> parse_grid_spec(const std::string& spec);

}  // namespace tiltbound
