// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Brute-force reference implementations. Everything here works from the
// definitions directly and is quadratic or worse; keep inputs small.
// Nothing in this header is shared with the streaming code paths except the
// symbol order from model.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clcp/model.hpp"

namespace clcp::oracle {

struct Suffix {
    Color color = 0;
    std::uint64_t offset = 1;  // 1-based; length + 1 is the end-marker suffix
    std::vector<SuffixSymbol> symbols;
};

/// All arrays are 0-based: element k describes sorted row k + 1.
struct NaiveIndex {
    std::vector<Suffix> suffixes;
    std::vector<std::uint8_t> ebwt;
    std::vector<Color> id;
    std::vector<std::int64_t> lcp;  // N + 1 entries; lcp[0] = lcp[N] = -1
    std::vector<std::uint64_t> pos;

    std::size_t rows() const { return id.size(); }
};

inline NaiveIndex naive_index(std::span<const SequenceRecord> records) {
    NaiveIndex ix;
    for (std::size_t c = 0; c < records.size(); ++c) {
        const std::string& t = records[c].text;
        for (std::uint64_t off = 1; off <= t.size() + 1; ++off) {
            Suffix s;
            s.color = static_cast<Color>(c);
            s.offset = off;
            for (std::uint64_t k = off - 1; k < t.size(); ++k)
                s.symbols.push_back({static_cast<std::uint8_t>(t[k]), s.color});
            s.symbols.push_back({kEndMarker, s.color});
            ix.suffixes.push_back(std::move(s));
        }
    }
    std::stable_sort(ix.suffixes.begin(), ix.suffixes.end(), [](const Suffix& a, const Suffix& b) {
        return std::lexicographical_compare_three_way(a.symbols.begin(), a.symbols.end(), b.symbols.begin(),
                                                      b.symbols.end(), compare_symbols) < 0;
    });
    auto common = [](const Suffix& a, const Suffix& b) {
        std::int64_t k = 0;
        while (k < static_cast<std::int64_t>(std::min(a.symbols.size(), b.symbols.size())) &&
               symbols_match(a.symbols[k], b.symbols[k]))
            ++k;
        return k;
    };
    ix.lcp.push_back(-1);
    for (std::size_t i = 0; i < ix.suffixes.size(); ++i) {
        const auto& s = ix.suffixes[i];
        const std::string& t = records[s.color].text;
        ix.ebwt.push_back(s.offset == 1 ? kEndMarker : static_cast<std::uint8_t>(t[s.offset - 2]));
        ix.id.push_back(s.color);
        ix.pos.push_back(s.offset);
        if (i > 0)
            ix.lcp.push_back(common(ix.suffixes[i - 1], s));
    }
    ix.lcp.push_back(-1);
    return ix;
}

/// flcp over rows (i, j], 1-based.
inline std::int64_t flcp(const NaiveIndex& ix, std::size_t i, std::size_t j) {
    std::int64_t v = std::numeric_limits<std::int64_t>::max();
    for (std::size_t x = i + 1; x <= j; ++x)
        v = std::min(v, ix.lcp[x - 1]);
    return v;
}

/// D by enumerating every candidate interval [i, j] and testing the
/// k-lcp-interval conditions and the coloring directly. Length N + 1.
inline std::vector<std::uint64_t> naive_d(const NaiveIndex& ix) {
    const std::size_t n = ix.rows();
    auto lcp_at = [&](std::size_t row) { return ix.lcp[row - 1]; };  // row in 1..N+1
    std::vector<std::uint64_t> d(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            std::int64_t k = flcp(ix, i, j);
            if (k < 1 || !(lcp_at(i) < k) || !(lcp_at(j + 1) < k))
                continue;
            bool query = false, subject = false;
            for (std::size_t x = i; x <= j; ++x)
                (ix.id[x - 1] == kQueryColor ? query : subject) = true;
            if (query && subject)
                d[i - 1] = std::max<std::uint64_t>(d[i - 1], static_cast<std::uint64_t>(k) + 1);
        }
    }
    return d;
}

struct ClcpCell {
    std::uint64_t u = 0;
    std::uint64_t l = 0;
    std::uint64_t clcp() const { return std::max(u, l); }
};

/// UcLCP/LcLCP of every row against every color, from prev/next searches.
/// Result[row - 1][color].
inline std::vector<std::vector<ClcpCell>> naive_clcp(const NaiveIndex& ix, std::size_t colors) {
    const std::size_t n = ix.rows();
    std::vector<std::vector<ClcpCell>> out(n, std::vector<ClcpCell>(colors));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t t = 0; t < colors; ++t) {
            for (std::size_t x = i - 1; x >= 1; --x)
                if (ix.id[x - 1] == t) {
                    out[i - 1][t].u = static_cast<std::uint64_t>(flcp(ix, x, i));
                    break;
                }
            for (std::size_t x = i + 1; x <= n; ++x)
                if (ix.id[x - 1] == t) {
                    out[i - 1][t].l = static_cast<std::uint64_t>(flcp(ix, i, x));
                    break;
                }
        }
    }
    return out;
}

/// min{lcp[x] : i < x <= next(i, query)}, or 0 when no query row follows.
inline std::uint64_t lower_clcp_direct(const NaiveIndex& ix, std::size_t i) {
    std::int64_t v = std::numeric_limits<std::int64_t>::max();
    for (std::size_t x = i + 1; x <= ix.rows(); ++x) {
        v = std::min(v, ix.lcp[x - 1]);
        if (ix.id[x - 1] == kQueryColor)
            return static_cast<std::uint64_t>(v);
    }
    return 0;
}

/// lcp of the query alone, as stored in the lcp_chi file (entry 1 stored as 0).
inline std::vector<std::uint64_t> naive_lcp_chi(const SequenceRecord& query) {
    SequenceRecord alone = query;
    alone.color = 0;
    auto ix = naive_index(std::span<const SequenceRecord>(&alone, 1));
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < ix.rows(); ++i)
        out.push_back(i == 0 ? 0 : static_cast<std::uint64_t>(ix.lcp[i]));
    return out;
}

/// For each j, the longest prefix of s[j..] occurring in t, by substring search.
inline std::vector<std::uint64_t> naive_ms(std::string_view s, std::string_view t) {
    std::vector<std::uint64_t> ms(s.size(), 0);
    for (std::size_t j = 0; j < s.size(); ++j) {
        std::size_t len = 0;
        while (j + len < s.size() && t.find(s.substr(j, len + 1)) != std::string_view::npos)
            ++len;
        ms[j] = len;
    }
    return ms;
}

struct NaiveAcs {
    std::uint64_t sum_st = 0;  // sum of MS(s, t)
    std::uint64_t sum_ts = 0;  // sum of MS(t, s)
    double acs = 0;
    bool defined = true;
};

inline NaiveAcs naive_acs(std::string_view s, std::string_view t, unsigned sigma) {
    NaiveAcs r;
    for (auto v : naive_ms(s, t))
        r.sum_st += v;
    for (auto v : naive_ms(t, s))
        r.sum_ts += v;
    if (r.sum_st == 0 || r.sum_ts == 0) {
        r.defined = false;
        r.acs = std::numeric_limits<double>::infinity();
        return r;
    }
    const double ns = static_cast<double>(s.size()), nt = static_cast<double>(t.size());
    const double ls = std::log(ns) / std::log(double(sigma)), lt = std::log(nt) / std::log(double(sigma));
    const double norm_st = lt / (static_cast<double>(r.sum_st) / ns) - 2 * ls / (ns + 1);
    const double norm_ts = ls / (static_cast<double>(r.sum_ts) / nt) - 2 * lt / (nt + 1);
    r.acs = (norm_st + norm_ts) / 2;
    return r;
}

}  // namespace clcp::oracle
