#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "spe/diagnostics.hpp"

namespace spe::detail {

enum class TokKind { identifier, integer, real, punct, end };

struct Token {
    TokKind kind = TokKind::end;
    std::string text;
    int line = 0;
    int column = 0;
};

// Structural keywords of the document format. Reserved everywhere so that a
// token stream never needs lookahead to find the end of an identifier list.
inline const std::unordered_set<std::string>& reserved_words() {
    static const std::unordered_set<std::string> words = {
        "scenario", "activity", "statechart", "deployment", "annotations", "overhead",
        "graph", "objectives", "participants", "sync", "async", "self", "loop", "alt",
        "par", "branch", "ref", "repeat", "actions", "initial", "final", "edge",
        "decision", "at", "outcome", "fork", "join", "states", "transition", "on",
        "prob", "composite", "region", "sequential", "concurrent", "node", "device",
        "allocate", "speed", "time", "request", "resources", "devices", "row", "basic",
        "case", "pardo", "split", "expanded",
    };
    return words;
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(at.line, at.column, message);
    }

    bool at_punct(const char* p) const {
        return current_.kind == TokKind::punct && current_.text == p;
    }

    bool at_keyword(const char* word) const {
        return current_.kind == TokKind::identifier && current_.text == word;
    }

    void expect_punct(const char* p) {
        if (!at_punct(p)) fail(current_, std::string("expected '") + p + "'");
        advance();
    }

    void expect_keyword(const char* word) {
        if (!at_keyword(word)) fail(current_, std::string("expected '") + word + "'");
        advance();
    }

    bool accept_keyword(const char* word) {
        if (!at_keyword(word)) return false;
        advance();
        return true;
    }

    /// A user identifier: any identifier token that is not a reserved word.
    std::string expect_name(const char* what) {
        if (current_.kind != TokKind::identifier)
            fail(current_, std::string("expected ") + what);
        if (reserved_words().count(current_.text))
            fail(current_, "reserved word '" + current_.text + "' used as " + what);
        return take().text;
    }

    bool at_name() const {
        return current_.kind == TokKind::identifier && !reserved_words().count(current_.text);
    }

    std::int64_t expect_integer(const char* what) {
        if (current_.kind != TokKind::integer)
            fail(current_, std::string("expected ") + what);
        const Token t = take();
        try {
            return std::stoll(t.text);
        } catch (const std::out_of_range&) {
            fail(t, "integer out of range");
        }
    }

    double expect_number(const char* what) {
        if (current_.kind != TokKind::integer && current_.kind != TokKind::real)
            fail(current_, std::string("expected ") + what);
        const Token t = take();
        try {
            return std::stod(t.text);
        } catch (const std::out_of_range&) {
            fail(t, "number out of range");
        }
    }

    bool at_number() const {
        return current_.kind == TokKind::integer || current_.kind == TokKind::real;
    }

private:
    void advance() {
        skip_space_and_comments();
        current_ = Token{TokKind::end, "", line_, column_};
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            current_.kind = TokKind::identifier;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                current_.text += get();
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            current_.kind = TokKind::integer;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                current_.text += get();
            if (pos_ < text_.size() && text_[pos_] == '.') {
                current_.kind = TokKind::real;
                current_.text += get();
                if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    throw ParseError(line_, column_, "digit expected after decimal point");
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    current_.text += get();
            }
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                current_.kind = TokKind::real;
                current_.text += get();
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                    current_.text += get();
                if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    throw ParseError(line_, column_, "digit expected in exponent");
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    current_.text += get();
            }
            return;
        }
        current_.kind = TokKind::punct;
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            current_.text = "->";
            get();
            get();
            return;
        }
        if (c == '<' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            current_.text = "<=";
            get();
            get();
            return;
        }
        if (c == '{' || c == '}' || c == ':' || c == '[' || c == ']') {
            current_.text = std::string(1, c);
            get();
            return;
        }
        throw ParseError(line_, column_, std::string("unexpected character '") + c + "'");
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    char get() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
};

} // namespace spe::detail
