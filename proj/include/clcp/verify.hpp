// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clcp/acs.hpp"
#include "clcp/clcp.hpp"
#include "clcp/darray.hpp"
#include "clcp/indexer.hpp"
#include "clcp/oracle.hpp"
#include "clcp/pipeline.hpp"

namespace clcp {

/// Names of the independent checks performed against the oracle.
namespace check {
inline constexpr const char* kIndex = "index";
inline constexpr const char* kLcpChi = "lcp_chi";
inline constexpr const char* kDArray = "darray";
inline constexpr const char* kRows = "clcp_rows";
inline constexpr const char* kLowerDirect = "lower_clcp_direct";
inline constexpr const char* kMatrix = "chi_matrix";
inline constexpr const char* kMs = "ms";
inline constexpr const char* kAcs = "acs";
inline constexpr const char* kMemory = "memory";
inline constexpr const char* kWrites = "matrix_writes";
inline constexpr const char* kAlpha = "alpha_cross_check";
}  // namespace check

struct VerifyFailure {
    std::string check;
    std::string detail;
};

/// Counts of comparisons made and failures found, per check name.
struct VerifyTally {
    std::map<std::string, std::uint64_t> compared;
    std::vector<VerifyFailure> failures;
    std::uint64_t instances = 0;

    bool ok() const { return failures.empty(); }
    bool ok(const std::string& name) const {
        for (const auto& f : failures)
            if (f.check == name)
                return false;
        return true;
    }
    void fail(const std::string& name, const std::string& detail) { failures.push_back({name, detail}); }
};

namespace detail {

template <class A, class B>
bool compare_seq(VerifyTally& tally, const char* name, const std::string& what, const A& got, const B& want,
                 std::size_t row_base = 1) {
    tally.compared[name] += 1;
    if (got.size() != want.size()) {
        tally.fail(name, what + ": length " + std::to_string(got.size()) + " != expected " +
                             std::to_string(want.size()));
        return false;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (static_cast<std::int64_t>(got[i]) != static_cast<std::int64_t>(want[i])) {
            tally.fail(name, what + " differs at row " + std::to_string(i + row_base) + ": got " +
                                 std::to_string(static_cast<std::int64_t>(got[i])) + ", expected " +
                                 std::to_string(static_cast<std::int64_t>(want[i])));
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Compares every file of a fully processed index directory against the
/// oracle, re-deriving the collection from the index itself.
inline void verify_index_files(const IndexFiles& files, VerifyTally& tally) {
    auto manifest = load_manifest(files);
    auto records = reconstruct_records(files, manifest);
    const std::uint32_t m = manifest.num_subjects;
    auto ix = oracle::naive_index(records);

    // Index arrays; the stored lcp[1] is 0 in place of -1.
    std::vector<std::int64_t> want_lcp(ix.lcp.begin(), ix.lcp.end() - 1);
    want_lcp[0] = 0;
    detail::compare_seq(tally, check::kIndex, "ebwt", read_ints(files.ebwt(), kEbwtWidth), ix.ebwt);
    detail::compare_seq(tally, check::kIndex, "id", read_ints(files.id(), kIdWidth), ix.id);
    detail::compare_seq(tally, check::kIndex, "lcp", read_ints(files.lcp(), manifest.lcp_width), want_lcp);
    detail::compare_seq(tally, check::kIndex, "pos", read_ints(files.pos(), kPosWidth), ix.pos);
    detail::compare_seq(tally, check::kLcpChi, "lcp_chi", read_ints(files.lcp_chi(), manifest.lcp_width),
                        oracle::naive_lcp_chi(records[0]));
    detail::compare_seq(tally, check::kDArray, "D", read_ints(files.d(), manifest.lcp_width), oracle::naive_d(ix));

    auto table = oracle::naive_clcp(ix, m + 1);

    // Per subject row (u, l) and the direct lower-neighbour evaluation.
    {
        RowReader rows(files.rows());
        std::vector<std::uint64_t> got_u, got_l, want_u, want_l, direct_l;
        std::vector<std::uint64_t> subject_rows;
        for (std::size_t i = 1; i <= ix.rows(); ++i)
            if (ix.id[i - 1] != kQueryColor)
                subject_rows.push_back(i);
        while (rows.has_next()) {
            auto v = rows.next();
            got_u.push_back(v.u);
            got_l.push_back(v.l);
        }
        for (auto i : subject_rows) {
            want_u.push_back(table[i - 1][kQueryColor].u);
            want_l.push_back(table[i - 1][kQueryColor].l);
            direct_l.push_back(oracle::lower_clcp_direct(ix, i));
        }
        detail::compare_seq(tally, check::kRows, "UcLCP per subject row", got_u, want_u);
        detail::compare_seq(tally, check::kRows, "LcLCP per subject row", got_l, want_l);
        detail::compare_seq(tally, check::kLowerDirect, "streamed LcLCP vs direct range minimum", got_l, direct_l);
    }

    // Finalized chi matrix, row by row in chi rank order.
    {
        auto matrix = read_ints(files.clcp_chi(), manifest.lcp_width);
        std::vector<std::uint64_t> want;
        for (std::size_t i = 1; i <= ix.rows(); ++i)
            if (ix.id[i - 1] == kQueryColor)
                for (std::uint32_t r = 1; r <= m; ++r)
                    want.push_back(table[i - 1][r].clcp());
        detail::compare_seq(tally, check::kMatrix, "chi matrix (row-major)", matrix, want);
    }

    const std::string& query_text = records[0].text;
    for (std::uint32_t r = 1; r <= m; ++r) {
        const auto& subject = records[r].text;
        detail::compare_seq(tally, check::kMs, "MS(" + records[r].name + ", query)",
                            matching_statistics(files, manifest, r), oracle::naive_ms(subject, query_text));
        detail::compare_seq(tally, check::kMs, "MS(query, " + records[r].name + ")",
                            matching_statistics_query(files, manifest, r), oracle::naive_ms(query_text, subject));
    }

    if (manifest.sigma >= 2) {
        auto report = finalize(accumulate(files, manifest), manifest);
        for (std::uint32_t r = 1; r <= m; ++r) {
            const auto& e = report.entries[r - 1];
            auto want = oracle::naive_acs(query_text, records[r].text, manifest.sigma);
            tally.compared[check::kAcs] += 1;
            bool same = e.sum_query == want.sum_st && e.sum_subject == want.sum_ts && e.defined == want.defined &&
                        (!want.defined || std::abs(e.acs - want.acs) <= 1e-12);
            if (!same) {
                std::ostringstream os;
                os << "ACS vs " << e.subject << ": got " << e.acs << " (" << e.sum_query << ", " << e.sum_subject
                   << "), expected " << want.acs << " (" << want.sum_st << ", " << want.sum_ts << ")";
                tally.fail(check::kAcs, os.str());
            }
        }
    }
}

/// Runs the whole pipeline on `records` in `dir`, then checks it against the
/// oracle together with the buffer and write-count contracts.
inline void verify_instance(std::span<const SequenceRecord> records, const std::filesystem::path& dir,
                            std::optional<std::uint64_t> block_rows, VerifyTally& tally,
                            const std::string& alphabet = std::string(kDnaAlphabet)) {
    ++tally.instances;
    IndexFiles files{dir};
    IndexOptions opt;
    opt.alphabet = alphabet;
    auto manifest = build_index(records, dir, opt);
    auto dstats = build_d_array(files, manifest);

    ClcpOptions copt;
    copt.block_rows = block_rows;
    copt.count_matrix_writes = true;
    ClcpStats cstats;
    try {
        cstats = run_clcp(files, manifest, copt);
        tally.compared[check::kAlpha] += cstats.scan.alpha_checks;
    } catch (const MismatchError& e) {
        tally.fail(check::kAlpha, e.what());
        return;
    }

    tally.compared[check::kMemory] += 1;
    if (cstats.peak_elements > cstats.element_budget)
        tally.fail(check::kMemory, "tracked elements " + std::to_string(cstats.peak_elements) + " exceed budget " +
                                       std::to_string(cstats.element_budget));
    if (dstats.max_stack_depth > manifest.max_lcp + 2)
        tally.fail(check::kMemory, "interval stack depth " + std::to_string(dstats.max_stack_depth) +
                                       " exceeds max_lcp + 2 = " + std::to_string(manifest.max_lcp + 2));
    tally.compared[check::kWrites] += 1;
    if (cstats.max_writes_per_entry > 3)
        tally.fail(check::kWrites, "a chi matrix entry was written " +
                                       std::to_string(int(cstats.max_writes_per_entry)) + " times");

    verify_index_files(files, tally);
}

struct RandomSuiteOptions {
    std::uint64_t trials = 200;
    std::uint64_t seed = 7;
    std::vector<unsigned> sigmas = {2, 4};
    std::uint64_t max_len = 32;
    std::uint32_t min_m = 2;
    std::uint32_t max_m = 6;
};

/// Random collection: query first, then m subjects. About half of the
/// subjects are mutated fragments of the query so deep matches occur.
inline std::vector<SequenceRecord> random_collection(std::mt19937_64& rng, unsigned sigma, std::uint64_t max_len,
                                                     std::uint32_t m) {
    const std::string alphabet = std::string(kDnaAlphabet).substr(0, sigma);
    std::uniform_int_distribution<std::uint64_t> len_dist(1, max_len);
    std::uniform_int_distribution<unsigned> sym(0, sigma - 1);
    auto random_text = [&](std::uint64_t n) {
        std::string s;
        for (std::uint64_t i = 0; i < n; ++i)
            s.push_back(alphabet[sym(rng)]);
        return s;
    };
    std::vector<SequenceRecord> out;
    out.push_back({"query", 0, Subset::Query, random_text(len_dist(rng))});
    for (std::uint32_t r = 1; r <= m; ++r) {
        std::string text;
        if (rng() % 2 == 0) {
            const std::string& q = out[0].text;
            std::uniform_int_distribution<std::size_t> at(0, q.size() - 1);
            std::size_t b = at(rng), e = std::min(q.size(), b + 1 + at(rng));
            text = q.substr(b, e - b);
            for (auto& c : text)
                if (rng() % 6 == 0)
                    c = alphabet[sym(rng)];
            if (rng() % 2)
                text += random_text(len_dist(rng) / 2);
            if (text.size() > max_len)
                text.resize(max_len);
        } else {
            text = random_text(len_dist(rng));
        }
        out.push_back({"s" + std::to_string(r), r, Subset::Subject, std::move(text)});
    }
    return out;
}

/// Runs `trials` random instances per listed sigma, each in a fresh
/// subdirectory of `scratch`, with a random block size Q in [2, n_chi + 1].
inline VerifyTally verify_random(const RandomSuiteOptions& opt, const std::filesystem::path& scratch) {
    VerifyTally tally;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::uint32_t> m_dist(opt.min_m, opt.max_m);
    for (std::uint64_t t = 0; t < opt.trials; ++t) {
        for (unsigned sigma : opt.sigmas) {
            auto records = random_collection(rng, sigma, opt.max_len, m_dist(rng));
            std::uniform_int_distribution<std::uint64_t> q_dist(2, records[0].text.size() + 1);
            auto dir = scratch / ("trial_" + std::to_string(t) + "_s" + std::to_string(sigma));
            std::filesystem::remove_all(dir);
            verify_instance(records, dir, q_dist(rng), tally, std::string(kDnaAlphabet).substr(0, sigma));
            std::filesystem::remove_all(dir);
        }
    }
    return tally;
}

}  // namespace clcp
