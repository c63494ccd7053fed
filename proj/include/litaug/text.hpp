#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace litaug::text {

// ASCII-only case folding; bytes >= 0x80 pass through untouched so UTF-8
// sequences keep their byte offsets.
inline char fold(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = fold(c);
    return out;
}

inline bool is_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Lowercase and collapse whitespace runs into one space.
inline std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(fold(c));
    }
    return out;
}

// True when [begin, end) is not flanked by alphanumeric characters.
inline bool on_word_boundary(std::string_view s, std::size_t begin, std::size_t end) {
    if (begin > 0 && is_alnum(s[begin - 1])) return false;
    if (end < s.size() && is_alnum(s[end])) return false;
    return true;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline bool contains_whitespace(std::string_view s) {
    for (char c : s)
        if (is_space(c)) return true;
    return false;
}

}  // namespace litaug::text
