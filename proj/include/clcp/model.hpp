// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "clcp/error.hpp"

namespace clcp {

/// Color of a string in the collection. The query string always has color 0;
/// subjects are numbered 1..m in input order.
using Color = std::uint32_t;
inline constexpr Color kQueryColor = 0;

/// Byte used for every end-marker in the ebwt file. Distinct end-markers are
/// realized by ordering on the owning color.
inline constexpr std::uint8_t kEndMarker = 0x00;

enum class Subset : std::uint8_t { Query, Subject };

inline std::string_view to_string(Subset s) { return s == Subset::Query ? "query" : "subject"; }

struct SequenceRecord {
    std::string name;
    Color color = 0;
    Subset subset = Subset::Subject;
    std::string text;

    std::uint64_t length() const { return text.size(); }
};

/// Per-record entry of the manifest (the text itself lives only in the index).
struct RecordInfo {
    std::string name;
    std::uint64_t length = 0;
    Subset subset = Subset::Subject;

    bool operator==(const RecordInfo&) const = default;
};

/// Tracks which subsets occur inside a range of sorted suffixes.
struct ColorFlags {
    bool has_query = false;
    bool has_subject = false;

    void add(Color c) {
        if (c == kQueryColor)
            has_query = true;
        else
            has_subject = true;
    }
    void merge(const ColorFlags& other) {
        has_query |= other.has_query;
        has_subject |= other.has_subject;
    }
    bool colored() const { return has_query && has_subject; }
};

/// Order between two end-markers, identified by the color of their string.
/// Two end-markers never match each other when counting common prefixes;
/// only the ordering is reflexive.
inline std::strong_ordering end_marker_compare(Color a, Color b) { return a <=> b; }

/// One position of a suffix: either an alphabet byte or the end-marker of `color`.
struct SuffixSymbol {
    std::uint8_t ch = kEndMarker;
    Color color = 0;

    bool is_end_marker() const { return ch == kEndMarker; }
};

inline std::strong_ordering compare_symbols(SuffixSymbol a, SuffixSymbol b) {
    if (a.is_end_marker() && b.is_end_marker())
        return end_marker_compare(a.color, b.color);
    if (a.is_end_marker())
        return std::strong_ordering::less;
    if (b.is_end_marker())
        return std::strong_ordering::greater;
    return a.ch <=> b.ch;
}

/// True when the two positions extend a common prefix.
inline bool symbols_match(SuffixSymbol a, SuffixSymbol b) {
    return !a.is_end_marker() && a.ch == b.ch;
}

/// Metadata binding the index files of one collection together.
struct CollectionManifest {
    std::uint64_t total_rows = 0;
    std::uint32_t num_subjects = 0;
    std::uint32_t sigma = 0;
    std::string alphabet;
    unsigned lcp_width = 0;
    std::uint64_t max_lcp = 0;
    std::uint64_t max_lcp_chi = 0;
    std::vector<RecordInfo> records;  // index == color; records[0] is the query

    const RecordInfo& query() const { return records.at(kQueryColor); }
    std::uint64_t query_length() const { return query().length; }
    std::uint64_t length(Color c) const { return records.at(c).length; }
    /// Rows of the chi matrix: one per suffix of the query, end-marker included.
    std::uint64_t chi_rows() const { return query_length() + 1; }

    Color color_of(std::string_view name) const {
        for (std::size_t i = 0; i < records.size(); ++i)
            if (records[i].name == name)
                return static_cast<Color>(i);
        throw ValidationError("no record named '" + std::string(name) + "'");
    }

    bool operator==(const CollectionManifest&) const = default;

    void validate() const {
        if (records.size() < 2)
            throw ValidationError("manifest: need a query and at least one subject");
        if (num_subjects + 1 != records.size())
            throw ValidationError("manifest: num_subjects does not match record count");
        if (records[0].subset != Subset::Query)
            throw ValidationError("manifest: first record must be the query");
        std::uint64_t rows = 0;
        std::set<std::string> names;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (i > 0 && r.subset != Subset::Subject)
                throw ValidationError("manifest: more than one query record");
            if (r.length == 0)
                throw ValidationError("manifest: record '" + r.name + "' is empty");
            if (!names.insert(r.name).second)
                throw ValidationError("manifest: duplicate record name '" + r.name + "'");
            rows += r.length + 1;
        }
        if (rows != total_rows)
            throw ValidationError("manifest: total_rows does not equal sum of (length + 1)");
        if (sigma < 1 || sigma != alphabet.size())
            throw ValidationError("manifest: sigma does not match alphabet");
        if (lcp_width != 1 && lcp_width != 2 && lcp_width != 4 && lcp_width != 8)
            throw ValidationError("manifest: lcp_width must be 1, 2, 4 or 8");
        if (lcp_width < 8 && max_lcp >= (std::uint64_t{1} << (8 * lcp_width)))
            throw ValidationError("manifest: lcp_width too small for max_lcp");
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write manifest " + path.string());
        out << "# clcp collection manifest\n"
            << "format_version\t1\n"
            << "total_rows\t" << total_rows << '\n'
            << "num_subjects\t" << num_subjects << '\n'
            << "sigma\t" << sigma << '\n'
            << "alphabet\t" << alphabet << '\n'
            << "lcp_width\t" << lcp_width << '\n'
            << "max_lcp\t" << max_lcp << '\n'
            << "max_lcp_chi\t" << max_lcp_chi << '\n';
        for (const auto& r : records)
            out << "record\t" << r.name << '\t' << r.length << '\t' << to_string(r.subset) << '\n';
        if (!out)
            throw IoError("failed writing manifest " + path.string());
    }

    static CollectionManifest read(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read manifest " + path.string());
        CollectionManifest m;
        std::map<std::string, std::string> kv;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#')
                continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            for (std::string f; std::getline(ss, f, '\t');)
                fields.push_back(f);
            if (fields.size() == 4 && fields[0] == "record") {
                RecordInfo r;
                r.name = fields[1];
                r.length = parse_u64(fields[2], line_no);
                if (fields[3] == "query")
                    r.subset = Subset::Query;
                else if (fields[3] == "subject")
                    r.subset = Subset::Subject;
                else
                    throw ValidationError("manifest line " + std::to_string(line_no) + ": bad subset");
                m.records.push_back(std::move(r));
            } else if (fields.size() == 2) {
                kv[fields[0]] = fields[1];
            } else {
                throw ValidationError("manifest line " + std::to_string(line_no) + ": malformed");
            }
        }
        auto need = [&](const char* key) -> const std::string& {
            auto it = kv.find(key);
            if (it == kv.end())
                throw ValidationError(std::string("manifest: missing key ") + key);
            return it->second;
        };
        if (need("format_version") != "1")
            throw ValidationError("manifest: unsupported format_version");
        m.total_rows = parse_u64(need("total_rows"), 0);
        m.num_subjects = static_cast<std::uint32_t>(parse_u64(need("num_subjects"), 0));
        m.sigma = static_cast<std::uint32_t>(parse_u64(need("sigma"), 0));
        m.alphabet = need("alphabet");
        m.lcp_width = static_cast<unsigned>(parse_u64(need("lcp_width"), 0));
        m.max_lcp = parse_u64(need("max_lcp"), 0);
        m.max_lcp_chi = parse_u64(need("max_lcp_chi"), 0);
        m.validate();
        return m;
    }

private:
    static std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw ValidationError("manifest: bad integer '" + s + "'" +
                                  (line_no ? " on line " + std::to_string(line_no) : ""));
        return v;
    }
};

/// Locations of the files making up one index directory.
struct IndexFiles {
    std::filesystem::path dir;

    std::filesystem::path manifest() const { return dir / "index.manifest"; }
    std::filesystem::path ebwt() const { return dir / "index.ebwt"; }
    std::filesystem::path id() const { return dir / "index.id"; }
    std::filesystem::path lcp() const { return dir / "index.lcp"; }
    std::filesystem::path pos() const { return dir / "index.pos"; }
    std::filesystem::path lcp_chi() const { return dir / "index.lcpchi"; }
    std::filesystem::path d() const { return dir / "index.d"; }
    std::filesystem::path clcp_chi() const { return dir / "index.clcpchi"; }
    std::filesystem::path rows() const { return dir / "index.rows"; }
};

inline constexpr unsigned kIdWidth = 4;
inline constexpr unsigned kPosWidth = 8;
inline constexpr unsigned kEbwtWidth = 1;

}  // namespace clcp
