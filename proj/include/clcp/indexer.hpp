// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clcp/error.hpp"
#include "clcp/model.hpp"
#include "clcp/streams.hpp"

namespace clcp {

/// A suffix of one record: `offset` is 1-based, and `length + 1` denotes the
/// suffix made of the end-marker alone.
struct SuffixRef {
    std::uint32_t record = 0;
    std::uint64_t offset = 1;

    bool operator==(const SuffixRef&) const = default;
};

struct IndexOptions {
    unsigned lcp_width = 0;  // 0 selects the narrowest width that fits
    std::string alphabet = std::string(kDnaAlphabet);
};

/// Puts the record named `chi_name` first as the query (color 0) and numbers
/// the remaining records 1..m in their original order.
inline std::vector<SequenceRecord> designate_query(std::vector<SequenceRecord> records,
                                                   std::string_view chi_name) {
    std::set<std::string> names;
    for (const auto& r : records)
        if (!names.insert(r.name).second)
            throw ValidationError("duplicate record name '" + r.name + "'");
    auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.name == chi_name; });
    if (it == records.end())
        throw ValidationError("no record named '" + std::string(chi_name) + "' to use as query");
    std::rotate(records.begin(), it, it + 1);
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].color = static_cast<Color>(i);
        records[i].subset = i == 0 ? Subset::Query : Subset::Subject;
    }
    return records;
}

namespace detail {

class SuffixView {
public:
    explicit SuffixView(std::span<const SequenceRecord> records) : records_(records) {}

    SuffixSymbol at(const SuffixRef& s, std::uint64_t k) const {
        const auto& text = records_[s.record].text;
        std::uint64_t idx = s.offset - 1 + k;
        if (idx < text.size())
            return {static_cast<std::uint8_t>(text[idx]), s.record};
        return {kEndMarker, s.record};
    }

    bool less(const SuffixRef& a, const SuffixRef& b) const {
        for (std::uint64_t k = 0;; ++k) {
            SuffixSymbol x = at(a, k), y = at(b, k);
            auto c = compare_symbols(x, y);
            if (c != 0)
                return c < 0;
            if (x.is_end_marker())
                return false;  // identical suffix
        }
    }

    std::uint64_t lcp(const SuffixRef& a, const SuffixRef& b) const {
        std::uint64_t k = 0;
        while (symbols_match(at(a, k), at(b, k)))
            ++k;
        return k;
    }

    std::uint8_t preceding(const SuffixRef& s) const {
        return s.offset == 1 ? kEndMarker
                             : static_cast<std::uint8_t>(records_[s.record].text[s.offset - 2]);
    }

private:
    std::span<const SequenceRecord> records_;
};

inline void validate_collection(std::span<const SequenceRecord> records, std::string_view alphabet) {
    if (records.size() < 2)
        throw ValidationError("collection needs a query and at least one subject");
    if (records.size() - 1 > std::numeric_limits<std::uint32_t>::max() - 1)
        throw ValidationError("too many records");
    bool allowed[256] = {};
    for (unsigned char c : alphabet) {
        if (c == kEndMarker)
            throw ValidationError("alphabet may not contain the end-marker byte");
        allowed[c] = true;
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.color != i)
            throw ValidationError("record '" + r.name + "' has color " + std::to_string(r.color) +
                                  ", expected " + std::to_string(i));
        if ((i == 0) != (r.subset == Subset::Query))
            throw ValidationError("exactly the first record must be the query");
        if (r.text.empty())
            throw ValidationError("record '" + r.name + "' is empty");
        if (!names.insert(r.name).second)
            throw ValidationError("duplicate record name '" + r.name + "'");
        for (unsigned char c : r.text)
            if (!allowed[c])
                throw ValidationError("record '" + r.name + "' has a symbol outside the alphabet");
    }
}

}  // namespace detail

/// Sorts every suffix of the collection (end-marker suffixes included).
inline std::vector<SuffixRef> sort_suffixes(std::span<const SequenceRecord> records) {
    std::vector<SuffixRef> sa;
    std::uint64_t n = 0;
    for (const auto& r : records)
        n += r.length() + 1;
    sa.reserve(n);
    for (std::uint32_t rec = 0; rec < records.size(); ++rec)
        for (std::uint64_t off = 1; off <= records[rec].length() + 1; ++off)
            sa.push_back({rec, off});
    detail::SuffixView view(records);
    std::sort(sa.begin(), sa.end(), [&](const SuffixRef& a, const SuffixRef& b) { return view.less(a, b); });
    return sa;
}

/// Single pass over lcp and id: entry c of the output is the LCP between
/// the (c-1)-th and c-th query suffixes in sorted order. Entry 1 is stored as 0.
/// Returns the maximum entry.
inline std::uint64_t extract_lcp_chi(const IndexFiles& files, const CollectionManifest& manifest) {
    IntReader lcp(files.lcp(), manifest.lcp_width);
    IntReader id(files.id(), kIdWidth);
    if (lcp.length() != manifest.total_rows || id.length() != manifest.total_rows)
        throw ValidationError("lcp/id length does not match manifest total_rows");

    IntWriter out(files.lcp_chi(), manifest.lcp_width);
    std::uint64_t running = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t max_value = 0;
    for (std::uint64_t row = 1; row <= manifest.total_rows; ++row) {
        std::uint64_t v = lcp.next();
        if (row > 1)
            running = std::min(running, v);
        if (id.next() == kQueryColor) {
            std::uint64_t entry = out.size() == 0 ? 0 : running;
            out.push(entry);
            max_value = std::max(max_value, entry);
            running = std::numeric_limits<std::uint64_t>::max();
        }
    }
    if (out.size() != manifest.chi_rows())
        throw ValidationError("found " + std::to_string(out.size()) + " query rows, manifest expects " +
                              std::to_string(manifest.chi_rows()));
    out.close();
    return max_value;
}

/// Builds the ebwt, id, lcp, pos and lcp_chi files plus the manifest under
/// `out_dir`. `records` must already be ordered with the query first
/// (see designate_query).
inline CollectionManifest build_index(std::span<const SequenceRecord> records,
                                      const std::filesystem::path& out_dir,
                                      const IndexOptions& options = {}) {
    detail::validate_collection(records, options.alphabet);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string());

    auto sa = sort_suffixes(records);
    detail::SuffixView view(records);

    std::vector<std::uint64_t> lcp(sa.size(), 0);
    std::uint64_t max_lcp = 0;
    for (std::size_t i = 1; i < sa.size(); ++i) {
        lcp[i] = view.lcp(sa[i - 1], sa[i]);
        max_lcp = std::max(max_lcp, lcp[i]);
    }

    CollectionManifest m;
    m.total_rows = sa.size();
    m.num_subjects = static_cast<std::uint32_t>(records.size() - 1);
    m.alphabet = options.alphabet;
    m.sigma = static_cast<std::uint32_t>(options.alphabet.size());
    m.max_lcp = max_lcp;
    if (options.lcp_width == 0) {
        // D entries reach max_lcp + 1.
        m.lcp_width = width_for(max_lcp + 1);
    } else {
        check_width(options.lcp_width);
        if (max_lcp > max_value_for_width(options.lcp_width))
            throw ValidationError("max lcp " + std::to_string(max_lcp) + " overflows lcp width " +
                                  std::to_string(options.lcp_width));
        m.lcp_width = options.lcp_width;
    }
    for (const auto& r : records)
        m.records.push_back({r.name, r.length(), r.subset});

    IndexFiles files{out_dir};
    {
        IntWriter ebwt(files.ebwt(), kEbwtWidth);
        IntWriter id(files.id(), kIdWidth);
        IntWriter pos(files.pos(), kPosWidth);
        IntWriter lcp_out(files.lcp(), m.lcp_width);
        for (std::size_t i = 0; i < sa.size(); ++i) {
            ebwt.push(view.preceding(sa[i]));
            id.push(sa[i].record);
            pos.push(sa[i].offset);
            lcp_out.push(lcp[i]);
        }
        ebwt.close();
        id.close();
        pos.close();
        lcp_out.close();
    }
    m.max_lcp_chi = extract_lcp_chi(files, m);
    m.validate();
    m.write(files.manifest());
    return m;
}

/// Rebuilds the record texts from the ebwt, id and pos files: the symbol
/// preceding the suffix at offset p + 1 is text position p.
inline std::vector<SequenceRecord> reconstruct_records(const IndexFiles& files,
                                                       const CollectionManifest& manifest) {
    std::vector<SequenceRecord> records;
    for (std::size_t c = 0; c < manifest.records.size(); ++c) {
        const auto& info = manifest.records[c];
        records.push_back({info.name, static_cast<Color>(c), info.subset, std::string(info.length, '\0')});
    }
    IntReader ebwt(files.ebwt(), kEbwtWidth);
    IntReader id(files.id(), kIdWidth);
    IntReader pos(files.pos(), kPosWidth);
    if (ebwt.length() != manifest.total_rows || id.length() != manifest.total_rows ||
        pos.length() != manifest.total_rows)
        throw ValidationError("index files do not match manifest total_rows");
    while (ebwt.has_next()) {
        auto sym = static_cast<std::uint8_t>(ebwt.next());
        auto color = id.next();
        auto p = pos.next();
        if (color >= records.size() || p == 0 || p > records[color].text.size() + 1)
            throw ValidationError("corrupt id/pos entry");
        if (p == 1) {
            if (sym != kEndMarker)
                throw ValidationError("offset-1 suffix not preceded by the end-marker");
        } else {
            records[color].text[p - 2] = static_cast<char>(sym);
        }
    }
    return records;
}

}  // namespace clcp
