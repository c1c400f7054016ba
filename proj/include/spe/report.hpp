#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace spe {

// Canonical report documents: a small ordered tree written with sorted map
// keys, 2-space indentation and shortest round-trip number formatting, so
// report bytes are stable and can be frozen as golden files.

struct Doc;

using DocMap = std::map<std::string, Doc>;
using DocList = std::vector<Doc>;

struct Doc {
    std::variant<std::string, double, std::int64_t, bool, DocMap, DocList> value;

    Doc() : value(std::string()) {}
    Doc(const char* s) : value(std::string(s)) {}
    Doc(std::string s) : value(std::move(s)) {}
    Doc(double d) : value(d) {}
    Doc(std::int64_t i) : value(i) {}
    Doc(int i) : value(static_cast<std::int64_t>(i)) {}
    Doc(bool b) : value(b) {}
    Doc(DocMap m) : value(std::move(m)) {}
    Doc(DocList l) : value(std::move(l)) {}
};

/// Renders `key { ... }` with the given root key. Ends with a newline.
std::string write_doc(const std::string& root, const Doc& doc);

/// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);

} // namespace spe
