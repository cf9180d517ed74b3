// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clcp/clcp.hpp"
#include "clcp/error.hpp"
#include "clcp/model.hpp"
#include "clcp/streams.hpp"

namespace clcp {

/// Per-subject sums of matching statistics, in both directions.
struct AcsAccumulators {
    std::vector<std::uint64_t> sum_subject;  // sum over s_r of MS(s_r, s_chi)
    std::vector<std::uint64_t> sum_query;    // sum over s_chi of MS(s_chi, s_r)

    explicit AcsAccumulators(std::uint32_t m = 0) : sum_subject(m, 0), sum_query(m, 0) {}

    void add_subject_row(const SubjectRowValue& v) { sum_subject.at(v.color - 1) += v.clcp(); }

    /// Adds one finalized chi-matrix row; rank 1 (the end-marker suffix) is skipped.
    void add_chi_row(std::uint64_t rank, std::span<const std::uint64_t> row) {
        if (row.size() != sum_query.size())
            throw ValidationError("chi row width does not match subject count");
        if (rank == 1)
            return;
        for (std::size_t r = 0; r < row.size(); ++r)
            sum_query[r] += row[r];
    }
};

/// Reads the row emission and the finalized chi matrix of an index.
inline AcsAccumulators accumulate(const IndexFiles& files, const CollectionManifest& manifest) {
    const std::uint32_t m = manifest.num_subjects;
    AcsAccumulators acc(m);

    RowReader rows(files.rows());
    std::uint64_t last_row = 0;
    while (rows.has_next()) {
        auto v = rows.next();
        if (v.color == kQueryColor || v.color > m || v.row <= last_row || v.row > manifest.total_rows)
            throw ValidationError("row file entry for row " + std::to_string(v.row) + " is inconsistent");
        last_row = v.row;
        acc.add_subject_row(v);
    }
    if (rows.size() != manifest.total_rows - manifest.chi_rows())
        throw ValidationError("row file has " + std::to_string(rows.size()) + " entries, expected " +
                              std::to_string(manifest.total_rows - manifest.chi_rows()));

    IntReader matrix(files.clcp_chi(), manifest.lcp_width);
    if (matrix.length() != manifest.chi_rows() * m)
        throw ValidationError("chi matrix size does not match the manifest");
    std::vector<std::uint64_t> row(m);
    for (std::uint64_t c = 1; c <= manifest.chi_rows(); ++c) {
        for (auto& x : row)
            x = matrix.next();
        acc.add_chi_row(c, row);
    }
    return acc;
}

struct AcsEntry {
    std::string subject;
    std::uint64_t sum_query = 0;    // numerator of d_query_subject
    std::uint64_t sum_subject = 0;  // numerator of d_subject_query
    std::uint64_t query_length = 0;
    std::uint64_t subject_length = 0;
    double d_query_subject = 0;
    double d_subject_query = 0;
    double norm_query_subject = 0;
    double norm_subject_query = 0;
    double acs = 0;
    bool defined = true;
};

struct AcsReport {
    unsigned sigma = 0;
    std::vector<AcsEntry> entries;  // entries[r - 1] is subject color r
};

/// Normalized score of an average match length `avg` taken over a base
/// string of length `base_len` against a string of length `other_len`.
inline double normalized_score(double avg, std::uint64_t base_len, std::uint64_t other_len, unsigned sigma) {
    const double log_sigma = std::log(static_cast<double>(sigma));
    auto lg = [&](std::uint64_t x) { return std::log(static_cast<double>(x)) / log_sigma; };
    return lg(other_len) / avg - 2.0 * lg(base_len) / static_cast<double>(base_len + 1);
}

inline AcsReport finalize(const AcsAccumulators& acc, const CollectionManifest& manifest,
                          std::optional<unsigned> sigma_override = std::nullopt) {
    const unsigned sigma = sigma_override.value_or(manifest.sigma);
    if (sigma < 2)
        throw ValidationError("sigma must be at least 2 for ACS normalization");
    if (acc.sum_query.size() != manifest.num_subjects || acc.sum_subject.size() != manifest.num_subjects)
        throw ValidationError("accumulator size does not match subject count");

    AcsReport report;
    report.sigma = sigma;
    const std::uint64_t nq = manifest.query_length();
    const double inf = std::numeric_limits<double>::infinity();
    for (std::uint32_t r = 1; r <= manifest.num_subjects; ++r) {
        AcsEntry e;
        e.subject = manifest.records[r].name;
        e.sum_query = acc.sum_query[r - 1];
        e.sum_subject = acc.sum_subject[r - 1];
        e.query_length = nq;
        e.subject_length = manifest.length(r);
        e.d_query_subject = static_cast<double>(e.sum_query) / static_cast<double>(nq);
        e.d_subject_query = static_cast<double>(e.sum_subject) / static_cast<double>(e.subject_length);
        e.norm_query_subject = e.sum_query ? normalized_score(e.d_query_subject, nq, e.subject_length, sigma) : inf;
        e.norm_subject_query =
            e.sum_subject ? normalized_score(e.d_subject_query, e.subject_length, nq, sigma) : inf;
        e.defined = e.sum_query != 0 && e.sum_subject != 0;
        e.acs = e.defined ? (e.norm_query_subject + e.norm_subject_query) / 2.0 : inf;
        report.entries.push_back(std::move(e));
    }
    return report;
}

namespace detail {
inline void put_double(std::ostream& os, double v) {
    if (std::isinf(v))
        os << "inf";
    else
        os << std::setprecision(17) << v;
}
}  // namespace detail

inline void write_tsv(std::ostream& os, const AcsReport& report) {
    os << "subject_name\td_query_subject\td_subject_query\tnorm_qs\tnorm_sq\tacs\n";
    for (const auto& e : report.entries) {
        os << e.subject;
        for (double v : {e.d_query_subject, e.d_subject_query, e.norm_query_subject, e.norm_subject_query, e.acs}) {
            os << '\t';
            detail::put_double(os, v);
        }
        os << '\n';
    }
}

/// Query-versus-subjects distances in PHYLIP-like layout: the subject count,
/// then one `name distance` line per subject.
inline void write_phylip(std::ostream& os, const AcsReport& report) {
    os << report.entries.size() << '\n';
    for (const auto& e : report.entries) {
        os << e.subject << ' ';
        detail::put_double(os, e.acs);
        os << '\n';
    }
}

/// MS(s_r, s_chi) in text order, from the row emission and the pos file.
inline std::vector<std::uint64_t> matching_statistics(const IndexFiles& files, const CollectionManifest& manifest,
                                                      Color target) {
    if (target == kQueryColor || target > manifest.num_subjects)
        throw ValidationError("target must be a subject color in 1.." + std::to_string(manifest.num_subjects));
    if (!std::filesystem::exists(files.pos()))
        throw IoError("missing pos file " + files.pos().string());
    const std::uint64_t n = manifest.length(target);
    std::vector<std::uint64_t> ms(n, 0);
    std::vector<bool> seen(n, false);

    RowReader rows(files.rows());
    IntReader pos(files.pos(), kPosWidth);
    std::uint64_t pos_row = 0, p = 0;
    while (rows.has_next()) {
        auto v = rows.next();
        if (v.color != target)
            continue;
        while (pos_row < v.row) {
            p = pos.next();
            ++pos_row;
        }
        if (p == n + 1)
            continue;  // end-marker suffix
        if (p == 0 || p > n || seen[p - 1])
            throw ValidationError("pos file inconsistent at row " + std::to_string(v.row));
        ms[p - 1] = v.clcp();
        seen[p - 1] = true;
    }
    return ms;
}

/// MS(s_chi, s_r) in text order, from column r of the finalized chi matrix.
inline std::vector<std::uint64_t> matching_statistics_query(const IndexFiles& files,
                                                            const CollectionManifest& manifest, Color subject) {
    if (subject == kQueryColor || subject > manifest.num_subjects)
        throw ValidationError("subject must be a color in 1.." + std::to_string(manifest.num_subjects));
    if (!std::filesystem::exists(files.pos()))
        throw IoError("missing pos file " + files.pos().string());
    const std::uint64_t n = manifest.query_length();
    const std::uint32_t m = manifest.num_subjects;
    std::vector<std::uint64_t> ms(n, 0);

    IntReader id(files.id(), kIdWidth);
    IntReader pos(files.pos(), kPosWidth);
    IntReader matrix(files.clcp_chi(), manifest.lcp_width);
    if (matrix.length() != manifest.chi_rows() * m)
        throw ValidationError("chi matrix size does not match the manifest");
    while (id.has_next()) {
        auto color = id.next();
        auto p = pos.next();
        if (color != kQueryColor)
            continue;
        std::uint64_t value = 0;
        for (std::uint32_t r = 1; r <= m; ++r) {
            auto x = matrix.next();
            if (r == subject)
                value = x;
        }
        if (p <= n)
            ms[p - 1] = value;
    }
    return ms;
}

}  // namespace clcp
