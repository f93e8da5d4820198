#pragma once

// Minimal TOML reader/writer for scenario files: tables, dotted keys, strings, numbers
// (including inf/nan), booleans and (nested) arrays. No dates, inline tables or arrays of tables.

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sfcinv/errors.hpp"

namespace sfcinv::toml {

using Value = nlohmann::ordered_json;

namespace detail {

inline bool bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Value document() {
        Value root = Value::object();
        Value* table = &root;
        std::string table_path;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                ++i_;
                skip_ws();
                if (peek() == '[') fail("", "arrays of tables are not supported");
                const auto path = key_path();
                skip_ws();
                expect(']');
                end_of_line();
                table_path = join(path);
                table = &root;
                for (const auto& k : path) {
                    auto& next = (*table)[k];
                    if (next.is_null()) next = Value::object();
                    else if (!next.is_object()) fail(table_path, "key already holds a value");
                    table = &next;
                }
                if (!seen_tables_.insert(table_path).second) fail(table_path, "table defined twice");
                continue;
            }
            const auto path = key_path();
            const std::string full = table_path.empty() ? join(path) : table_path + "." + join(path);
            skip_ws();
            expect('=');
            skip_ws();
            Value v = value(full);
            end_of_line();
            Value* t = table;
            for (std::size_t k = 0; k + 1 < path.size(); ++k) {
                auto& next = (*t)[path[k]];
                if (next.is_null()) next = Value::object();
                else if (!next.is_object()) fail(full, "key already holds a value");
                t = &next;
            }
            if (t->contains(path.back())) fail(full, "duplicate key");
            (*t)[path.back()] = std::move(v);
        }
        return root;
    }

    /// A lone value, as used by command-line overrides.
    Value single_value(const std::string& key) {
        skip_ws();
        Value v = value(key);
        skip_ws();
        if (!eof()) fail(key, "trailing characters after value");
        return v;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    int line_ = 1;
    std::set<std::string> seen_tables_;

    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[i_]; }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ParseError(key, "line " + std::to_string(line_) + ": " + msg);
    }

    void expect(char c) {
        if (peek() != c) fail("", std::string("expected '") + c + "'");
        ++i_;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++i_;
    }

    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++i_;
    }

    void skip_blank_lines() {
        while (!eof()) {
            skip_ws();
            skip_comment();
            if (peek() == '\r') ++i_;
            if (peek() == '\n') {
                ++i_;
                ++line_;
                continue;
            }
            break;
        }
    }

    /// Whitespace, comments and newlines inside arrays.
    void skip_array_space() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') ++i_;
            else if (c == '\n') {
                ++i_;
                ++line_;
            } else if (c == '#') skip_comment();
            else break;
        }
    }

    void end_of_line() {
        skip_ws();
        skip_comment();
        if (peek() == '\r') ++i_;
        if (eof()) return;
        if (peek() != '\n') fail("", "expected end of line");
        ++i_;
        ++line_;
    }

    static std::string join(const std::vector<std::string>& path) {
        std::string out;
        for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
        return out;
    }

    std::string key_part() {
        if (peek() == '"') return basic_string();
        const std::size_t start = i_;
        while (!eof() && bare_key_char(peek())) ++i_;
        if (i_ == start) fail("", "expected a key");
        return std::string(s_.substr(start, i_ - start));
    }

    std::vector<std::string> key_path() {
        std::vector<std::string> path{key_part()};
        skip_ws();
        while (peek() == '.') {
            ++i_;
            skip_ws();
            path.push_back(key_part());
            skip_ws();
        }
        return path;
    }

    std::string basic_string() {
        expect('"');
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("", "unterminated string");
            const char c = s_[i_++];
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            const char e = eof() ? '\0' : s_[i_++];
            switch (e) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            default: fail("", std::string("unsupported escape \\") + e);
            }
        }
        return out;
    }

    std::string literal_string() {
        expect('\'');
        const std::size_t start = i_;
        while (!eof() && peek() != '\'' && peek() != '\n') ++i_;
        if (peek() != '\'') fail("", "unterminated string");
        std::string out(s_.substr(start, i_ - start));
        ++i_;
        return out;
    }

    Value number_or_word(const std::string& key) {
        const std::size_t start = i_;
        while (!eof()) {
            const char c = peek();
            if (c == ',' || c == ']' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
            ++i_;
        }
        std::string tok(s_.substr(start, i_ - start));
        if (tok.empty()) fail(key, "missing value");
        if (tok == "true") return true;
        if (tok == "false") return false;
        std::string body = tok;
        std::string sign;
        if (body[0] == '+' || body[0] == '-') {
            sign = body.substr(0, 1);
            body = body.substr(1);
        }
        if (body == "inf") return sign == "-" ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        std::string clean;
        for (std::size_t k = 0; k < tok.size(); ++k) {
            if (tok[k] == '_') {
                if (k == 0 || k + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[k - 1])) ||
                    !std::isdigit(static_cast<unsigned char>(tok[k + 1])))
                    fail(key, "misplaced underscore in number '" + tok + "'");
                continue;
            }
            clean += tok[k];
        }
        const bool is_float = clean.find_first_of(".eE") != std::string::npos;
        char* end = nullptr;
        if (is_float) {
            const double v = std::strtod(clean.c_str(), &end);
            if (end != clean.c_str() + clean.size() || clean.back() == '.' || clean.find(".e") != std::string::npos ||
                clean.find(".E") != std::string::npos || clean.front() == '.')
                fail(key, "invalid number '" + tok + "'");
            return v;
        }
        errno = 0;
        const long long v = std::strtoll(clean.c_str(), &end, 10);
        if (end != clean.c_str() + clean.size() || errno == ERANGE) fail(key, "invalid value '" + tok + "'");
        return v;
    }

    Value array(const std::string& key) {
        expect('[');
        Value out = Value::array();
        while (true) {
            skip_array_space();
            if (peek() == ']') {
                ++i_;
                return out;
            }
            out.push_back(value(key));
            skip_array_space();
            if (peek() == ',') {
                ++i_;
                continue;
            }
            if (peek() == ']') {
                ++i_;
                return out;
            }
            fail(key, "expected ',' or ']' in array");
        }
    }

    Value value(const std::string& key) {
        switch (peek()) {
        case '"': return basic_string();
        case '\'': return literal_string();
        case '[': return array(key);
        case '{': fail(key, "inline tables are not supported");
        default: return number_or_word(key);
        }
    }
};

inline void format_number(std::string& out, double x) {
    if (std::isnan(x)) {
        out += "nan";
        return;
    }
    if (std::isinf(x)) {
        out += x > 0 ? "inf" : "-inf";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    out += s;
}

inline void format_value(std::string& out, const Value& v) {
    if (v.is_string()) {
        out += '"';
        for (char c : v.get<std::string>()) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
            }
        }
        out += '"';
    } else if (v.is_boolean()) {
        out += v.get<bool>() ? "true" : "false";
    } else if (v.is_number_integer()) {
        out += std::to_string(v.get<long long>());
    } else if (v.is_number()) {
        format_number(out, v.get<double>());
    } else if (v.is_array()) {
        out += '[';
        bool first = true;
        for (const auto& e : v) {
            if (!first) out += ", ";
            first = false;
            format_value(out, e);
        }
        out += ']';
    } else {
        throw ParseError("", "value cannot be written as TOML");
    }
}

inline void write_table(std::string& out, const Value& t, const std::string& path) {
    bool has_scalars = false;
    for (const auto& [k, v] : t.items())
        if (!v.is_object()) has_scalars = true;
    if (!path.empty() && (has_scalars || t.empty())) {
        if (!out.empty()) out += '\n';
        out += "[" + path + "]\n";
    }
    for (const auto& [k, v] : t.items()) {
        if (v.is_object()) continue;
        out += k + " = ";
        format_value(out, v);
        out += '\n';
    }
    for (const auto& [k, v] : t.items())
        if (v.is_object()) write_table(out, v, path.empty() ? k : path + "." + k);
}

} // namespace detail

inline Value parse(std::string_view text) { return detail::Parser(text).document(); }

/// Parses the right-hand side of `key = value`. Bare words that are not numbers or booleans
/// are taken as strings, which keeps `--override model.variant=keen` convenient.
inline Value parse_value(const std::string& key, std::string_view text) {
    try {
        return detail::Parser(text).single_value(key);
    } catch (const ParseError&) {
        std::string word(text);
        while (!word.empty() && (word.back() == ' ' || word.back() == '\t')) word.pop_back();
        if (!word.empty() && word.find_first_of("\"'[]{}=#\n") == std::string::npos) return word;
        throw;
    }
}

inline std::string serialize(const Value& root) {
    std::string out;
    detail::write_table(out, root, "");
    return out;
}

} // namespace sfcinv::toml
