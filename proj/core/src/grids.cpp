#include "tiltbound/grids.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tiltbound {

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) throw std::invalid_argument("linspace: n must be >= 1");
    if (n == 1) return {a};
    std::vector<double> xs(n);
    const double den = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        // Convex combination keeps endpoints exact and hits 0 exactly on symmetric grids.
        xs[i] = (a * (den - static_cast<double>(i)) + b * static_cast<double>(i)) / den;
    }
    return xs;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    std::vector<double> xs = linspace(a, b, n);
    for (double& x : xs) x = std::pow(10.0, x);
    return xs;
}

bool strictly_increasing(const std::vector<double>& xs) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) return false;
    return true;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_real(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("grid spec: bad number '" + s + "'");
    return v;
}

std::size_t parse_count(const std::string& s) {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size() || v < 1) throw std::invalid_argument("grid spec: bad count '" + s + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    std::vector<std::string> parts = split(spec, ':');
    if (parts.size() == 4 && parts[0] == "logspace")
        return logspace(parse_real(parts[1]), parse_real(parts[2]), parse_count(parts[3]));
    if (parts.size() == 3)
        return linspace(parse_real(parts[0]), parse_real(parts[1]), parse_count(parts[2]));
    throw std::invalid_argument("grid spec: expected a:b:n or logspace:a:b:n, got '" + spec + "'");
}

}  // namespace tiltbound
