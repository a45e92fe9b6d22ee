#pragma once
// Reference coefficient tables: text format "level delta p:a_p p:a_p ...",
// one newform per line, plus the tables compiled into the binary.

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cmforms/arith.hpp"
#include "cmforms/errors.hpp"
#include "cmforms/table_data.hpp"

namespace cmforms::tables {

using arith::i64;

struct TableRow {
    i64 level;
    i64 delta;                                // the CM field is Q(sqrt(-delta))
    std::vector<std::pair<i64, i64>> coeffs;  // (p, a_p), ascending p
};

namespace detail {

inline i64 parse_int(const std::string& s) {
    std::size_t pos = 0;
    i64 v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw parse_error("table: bad integer '" + s + "'");
    }
    if (pos != s.size()) throw parse_error("table: trailing characters in '" + s + "'");
    return v;
}

}  // namespace detail

inline std::vector<TableRow> parse_table(const std::string& text) {
    std::vector<TableRow> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        TableRow row;
        std::string tok;
        if (!(ls >> tok)) continue;  // whitespace-only line
        row.level = detail::parse_int(tok);
        if (!(ls >> tok)) throw parse_error("table row: missing discriminant");
        row.delta = detail::parse_int(tok);
        if (row.level < 1 || row.delta < 3)
            throw parse_error("table row: level and discriminant must be positive");
        i64 last_p = 1;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw parse_error("table row: expected p:a_p, got '" + tok + "'");
            const i64 p = detail::parse_int(tok.substr(0, colon));
            const i64 ap = detail::parse_int(tok.substr(colon + 1));
            if (!arith::is_prime(p)) throw parse_error("table row: " + std::to_string(p) + " is not prime");
            if (p <= last_p) throw parse_error("table row: primes must be ascending");
            last_p = p;
            row.coeffs.emplace_back(p, ap);
        }
        if (row.coeffs.empty()) throw parse_error("table row: no coefficients");
        rows.push_back(std::move(row));
    }
    return rows;
}

/// The compiled-in reference table for weight 3 or 4.
inline const std::vector<TableRow>& embedded_table(i64 weight) {
    static const std::vector<TableRow> wt3 = parse_table(detail::kWt3Text);
    static const std::vector<TableRow> wt4 = parse_table(detail::kWt4Text);
    if (weight == 3) return wt3;
    if (weight == 4) return wt4;
    throw std::domain_error("embedded_table: weight must be 3 or 4");
}

}  // namespace cmforms::tables
