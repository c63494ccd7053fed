#pragma once

#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "litaug/error.hpp"
#include "litaug/text.hpp"

namespace litaug {

struct Abstract {
    std::string doc_id;
    std::string title;
    std::string text;
};

struct CorpusLoad {
    std::vector<Abstract> abstracts;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

// Reads JSON-lines abstracts in file order. Lines that fail to parse or lack
// a non-empty string doc_id/text are skipped and counted; a repeated doc_id
// is fatal.
inline CorpusLoad parse_corpus(std::istream& in, const std::string& origin = "<stream>") {
    CorpusLoad out;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") || !j["doc_id"].is_string() ||
            !j.contains("text") || !j["text"].is_string() || (j.contains("title") && !j["title"].is_string())) {
            ++out.skipped;
            continue;
        }
        Abstract a{j["doc_id"].get<std::string>(), j.value("title", std::string{}), j["text"].get<std::string>()};
        if (a.doc_id.empty() || text::trim(a.text).empty()) {
            ++out.skipped;
            continue;
        }
        if (!ids.insert(a.doc_id).second)
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate doc_id '" + a.doc_id + "'");
        out.abstracts.push_back(std::move(a));
    }
    if (out.abstracts.empty() && out.skipped == 0) out.warnings.push_back(origin + ": corpus is empty");
    if (out.skipped > 0) out.warnings.push_back(origin + ": skipped " + std::to_string(out.skipped) + " malformed line(s)");
    return out;
}

inline CorpusLoad load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read corpus file: " + path);
    return parse_corpus(in, path);
}

inline std::string to_jsonl(const Abstract& a) {
    return nlohmann::json{{"doc_id", a.doc_id}, {"title", a.title}, {"text", a.text}}.dump();
}

struct Sentence {
    std::size_t index;
    std::string text;
};

// Rule-based splitter: a break follows [.!?] when the next non-space
// character is an uppercase letter (or the text ends), unless the word
// carrying the period is a listed abbreviation.
class SentenceSplitter {
public:
    static std::vector<std::string> default_abbreviations() {
        return {"al",   "approx", "ca",  "cf",   "co",  "dr",    "e.g",  "eq",  "eqs",  "etc",
                "fig",  "figs",   "i.e", "i.p",  "i.v", "inc",   "ltd",  "mr",  "mrs",  "ms",
                "no",   "nos",    "p.o", "prof", "ref", "refs",  "resp", "s.c", "sp",   "spp",
                "st",   "suppl",  "tab", "u.s",  "viz", "vol",   "vs",   "wt"};
    }

    SentenceSplitter() : SentenceSplitter(default_abbreviations()) {}

    explicit SentenceSplitter(const std::vector<std::string>& abbreviations) {
        for (const auto& a : abbreviations) {
            auto key = text::lower(text::trim(a));
            while (!key.empty() && key.back() == '.') key.pop_back();
            if (!key.empty()) abbreviations_.insert(std::move(key));
        }
    }

    const std::set<std::string>& abbreviations() const { return abbreviations_; }

    std::vector<Sentence> split(std::string_view s) const {
        std::vector<Sentence> out;
        std::size_t start = 0;
        auto emit = [&](std::size_t end) {
            auto piece = text::trim(s.substr(start, end - start));
            if (!piece.empty()) out.push_back({out.size(), std::string(piece)});
            start = end;
        };
        for (std::size_t i = 0; i < s.size(); ++i) {
            const char c = s[i];
            if (c != '.' && c != '!' && c != '?') continue;
            std::size_t end = i + 1;
            while (end < s.size() && (s[end] == '.' || s[end] == '!' || s[end] == '?' || s[end] == '"' ||
                                      s[end] == '\'' || s[end] == ')' || s[end] == ']'))
                ++end;
            std::size_t next = end;
            while (next < s.size() && text::is_space(s[next])) ++next;
            const bool at_end = next == s.size();
            if (!at_end && (next == end || !text::is_upper(s[next]))) continue;
            if (c == '.' && is_abbreviation(s, i) && !at_end) continue;
            emit(end);
            i = end - 1;
        }
        emit(s.size());
        return out;
    }

private:
    bool is_abbreviation(std::string_view s, std::size_t period) const {
        std::size_t b = period;
        while (b > 0 && !text::is_space(s[b - 1])) --b;
        auto word = s.substr(b, period - b);
        while (!word.empty() && (word.front() == '(' || word.front() == '[' || word.front() == '"')) word.remove_prefix(1);
        return !word.empty() && abbreviations_.count(text::lower(word)) > 0;
    }

    std::set<std::string> abbreviations_;
};

inline std::vector<std::string> load_abbreviations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read abbreviation file: " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.emplace_back(t);
    }
    return out;
}

inline std::vector<Sentence> split_sentences(const Abstract& abstract, const SentenceSplitter& splitter = {}) {
    return splitter.split(abstract.text);
}

}  // namespace litaug
