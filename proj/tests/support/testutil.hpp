#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace spe::test {

inline std::string fixture_path(const std::string& name) {
    return std::string(SPE_FIXTURE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(SPE_GOLDEN_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& name) { return slurp(fixture_path(name)); }

/// |a - b| <= tol * max(1, |a|, |b|)
inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= tol * scale;
}

} // namespace spe::test
