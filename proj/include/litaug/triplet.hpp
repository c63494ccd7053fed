#pragma once

#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "litaug/csv.hpp"
#include "litaug/error.hpp"
#include "litaug/text.hpp"

namespace litaug {

// Canonical identity of an example: lowercased keys, drugs sorted.
struct Triplet {
    std::string drug_a;
    std::string drug_b;
    std::string cell;

    auto operator<=>(const Triplet&) const = default;
    bool operator==(const Triplet&) const = default;
};

inline Triplet make_triplet(std::string_view drug_1, std::string_view drug_2, std::string_view cell) {
    auto a = text::lower(text::trim(drug_1));
    auto b = text::lower(text::trim(drug_2));
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b), text::lower(text::trim(cell))};
}

struct TripletHash {
    std::size_t operator()(const Triplet& t) const {
        std::hash<std::string> h;
        std::size_t seed = h(t.drug_a);
        seed ^= h(t.drug_b) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
        seed ^= h(t.cell) + 0x9e3779b9 + (seed << 6) + (seed >> 2);
        return seed;
    }
};

inline std::ostream& operator<<(std::ostream& os, const Triplet& t) {
    return os << '(' << t.drug_a << ", " << t.drug_b << ", " << t.cell << ')';
}

struct LabeledTriplet {
    Triplet triplet;
    int label = 0;

    bool operator==(const LabeledTriplet&) const = default;
};

struct DatasetLoad {
    std::vector<LabeledTriplet> rows;
    std::size_t duplicates_dropped = 0;
};

// Reads `drug_a,drug_b,cell_line,label`. Exact duplicates are dropped;
// the same triplet with conflicting labels is rejected.
inline DatasetLoad parse_dataset(std::istream& in, const std::string& origin = "<stream>") {
    DatasetLoad out;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(origin + ": empty dataset file (missing header)");
    const auto header = csv::parse_line(line);
    if (header != std::vector<std::string>{"drug_a", "drug_b", "cell_line", "label"})
        throw ValidationError(origin + ": expected header drug_a,drug_b,cell_line,label");

    std::map<Triplet, int> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto f = csv::parse_line(line);
        const auto where = origin + ":" + std::to_string(line_no);
        if (f.size() != 4) throw ValidationError(where + ": expected 4 fields");
        const auto label = text::trim(f[3]);
        if (label != "0" && label != "1") throw ValidationError(where + ": label must be 0 or 1");
        auto t = make_triplet(f[0], f[1], f[2]);
        if (t.drug_a.empty() || t.drug_b.empty() || t.cell.empty())
            throw ValidationError(where + ": empty entity name");
        if (t.drug_a == t.drug_b) throw ValidationError(where + ": drug_a and drug_b are the same drug");
        const int y = label == "1" ? 1 : 0;
        auto [it, inserted] = seen.emplace(t, y);
        if (!inserted) {
            if (it->second != y) throw ValidationError(where + ": conflicting labels for " + t.drug_a + "," + t.drug_b + "," + t.cell);
            ++out.duplicates_dropped;
            continue;
        }
        out.rows.push_back({std::move(t), y});
    }
    return out;
}

inline DatasetLoad load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dataset file: " + path);
    return parse_dataset(in, path);
}

inline void write_dataset(std::ostream& out, const std::vector<LabeledTriplet>& rows) {
    out << "drug_a,drug_b,cell_line,label\n";
    for (const auto& r : rows)
        out << csv::escape(r.triplet.drug_a) << ',' << csv::escape(r.triplet.drug_b) << ','
            << csv::escape(r.triplet.cell) << ',' << r.label << '\n';
}

inline std::set<std::string> drugs_of(const std::vector<LabeledTriplet>& rows) {
    std::set<std::string> out;
    for (const auto& r : rows) {
        out.insert(r.triplet.drug_a);
        out.insert(r.triplet.drug_b);
    }
    return out;
}

inline std::set<std::string> cells_of(const std::vector<LabeledTriplet>& rows) {
    std::set<std::string> out;
    for (const auto& r : rows) out.insert(r.triplet.cell);
    return out;
}

}  // namespace litaug
