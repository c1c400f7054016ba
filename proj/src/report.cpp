#include "spe/report.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace spe {

std::string format_number(double value) {
    if (value == 0.0) return "0"; // normalize -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s) {
        const bool word = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                          c == '.' || c == '-' || c == '/';
        if (!word) return true;
    }
    return false;
}

void write_scalar(std::string& out, const std::string& s) {
    if (!needs_quotes(s)) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '"';
}

void write_value(std::string& out, const Doc& doc, int depth);

void write_map(std::string& out, const DocMap& map, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    for (const auto& [key, value] : map) {
        out += indent;
        out += key;
        if (std::holds_alternative<DocMap>(value.value)) {
            out += " {\n";
            write_map(out, std::get<DocMap>(value.value), depth + 1);
            out += indent;
            out += "}\n";
        } else if (std::holds_alternative<DocList>(value.value)) {
            out += " [\n";
            for (const auto& item : std::get<DocList>(value.value)) {
                if (std::holds_alternative<DocMap>(item.value)) {
                    out += indent + "  {\n";
                    write_map(out, std::get<DocMap>(item.value), depth + 2);
                    out += indent + "  }\n";
                } else {
                    out += indent + "  ";
                    write_value(out, item, depth + 1);
                    out += '\n';
                }
            }
            out += indent;
            out += "]\n";
        } else {
            out += ' ';
            write_value(out, value, depth);
            out += '\n';
        }
    }
}

void write_value(std::string& out, const Doc& doc, int depth) {
    if (const auto* s = std::get_if<std::string>(&doc.value)) {
        write_scalar(out, *s);
    } else if (const auto* d = std::get_if<double>(&doc.value)) {
        out += format_number(*d);
    } else if (const auto* i = std::get_if<std::int64_t>(&doc.value)) {
        out += std::to_string(*i);
    } else if (const auto* b = std::get_if<bool>(&doc.value)) {
        out += *b ? "true" : "false";
    } else {
        (void)depth; // nested containers handled by write_map
    }
}

} // namespace

std::string write_doc(const std::string& root, const Doc& doc) {
    std::string out = root + " {\n";
    if (const auto* map = std::get_if<DocMap>(&doc.value)) write_map(out, *map, 1);
    out += "}\n";
    return out;
}

} // namespace spe
