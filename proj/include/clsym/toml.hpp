#pragma once

// Minimal TOML subset reader for problem files: comments, [tables],
// key = string | number | boolean | homogeneous array. Enough for the
// problem-file schema; nesting beyond one table level is not supported.

#include <cctype>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "clsym/errors.hpp"

namespace clsym::toml {

struct Value {
    std::variant<std::string, double, bool, std::vector<std::string>, std::vector<double>> data;

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string_array() const {
        return std::holds_alternative<std::vector<std::string>>(data);
    }
    bool is_number_array() const { return std::holds_alternative<std::vector<double>>(data); }

    const std::string& as_string() const { return std::get<std::string>(data); }
    double as_number() const { return std::get<double>(data); }
    bool as_bool() const { return std::get<bool>(data); }
    const std::vector<std::string>& as_string_array() const {
        return std::get<std::vector<std::string>>(data);
    }
    const std::vector<double>& as_number_array() const {
        return std::get<std::vector<double>>(data);
    }
};

// table name -> key -> value; top-level keys live under the "" table
using Document = std::map<std::string, std::map<std::string, Value>>;

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline Value parse_scalar(const std::string& text, int lineno) {
    std::string s = strip(text);
    if (s.empty()) throw ValidationError("empty value on line " + std::to_string(lineno));
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ValidationError("unterminated string on line " + std::to_string(lineno));
        return Value{s.substr(1, s.size() - 2)};
    }
    if (s == "true") return Value{true};
    if (s == "false") return Value{false};
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return Value{v};
    } catch (const std::exception&) {
    }
    throw ValidationError("cannot parse value '" + s + "' on line " + std::to_string(lineno));
}

inline Value parse_array(const std::string& inner, int lineno) {
    std::vector<std::string> strings;
    std::vector<double> numbers;
    bool any_string = false, any_number = false;
    std::string item;
    bool in_string = false;
    auto flush = [&](const std::string& raw) {
        std::string s = strip(raw);
        if (s.empty()) return;
        Value v = parse_scalar(s, lineno);
        if (v.is_string()) {
            strings.push_back(v.as_string());
            any_string = true;
        } else if (v.is_number()) {
            numbers.push_back(v.as_number());
            any_number = true;
        } else {
            throw ValidationError("unsupported array element on line " + std::to_string(lineno));
        }
    };
    for (char c : inner) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            flush(item);
            item.clear();
        } else {
            item += c;
        }
    }
    flush(item);
    if (any_string && any_number)
        throw ValidationError("mixed array types on line " + std::to_string(lineno));
    if (any_string) return Value{strings};
    return Value{numbers};
}

}  // namespace detail

inline Document parse(const std::string& text) {
    Document doc;
    std::string table;
    std::string line;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            line = text.substr(pos);
            pos = text.size() + 1;
        } else {
            line = text.substr(pos, nl - pos);
            pos = nl + 1;
        }
        ++lineno;
        line = detail::strip(detail::strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("malformed table header on line " + std::to_string(lineno));
            table = detail::strip(line.substr(1, line.size() - 2));
            doc[table];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("expected key = value on line " + std::to_string(lineno));
        std::string key = detail::strip(line.substr(0, eq));
        std::string value = detail::strip(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("empty key on line " + std::to_string(lineno));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw ValidationError("unterminated array on line " + std::to_string(lineno));
            doc[table][key] = detail::parse_array(value.substr(1, value.size() - 2), lineno);
        } else {
            doc[table][key] = detail::parse_scalar(value, lineno);
        }
    }
    return doc;
}

}  // namespace clsym::toml
