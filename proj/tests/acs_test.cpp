// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clcp/acs.hpp"
#include "clcp/darray.hpp"
#include "clcp/indexer.hpp"
#include "clcp/oracle.hpp"
#include "clcp/verify.hpp"
#include "worked_example.hpp"
#include "test_util.hpp"

namespace clcp {
namespace {

namespace ex = testing::worked;

struct Processed {
    IndexFiles files;
    CollectionManifest manifest;
};

Processed process(std::span<const SequenceRecord> records, const std::filesystem::path& dir,
                  const std::string& alphabet = std::string(kDnaAlphabet)) {
    IndexOptions opt;
    opt.alphabet = alphabet;
    auto m = build_index(records, dir, opt);
    IndexFiles files{dir};
    build_d_array(files, m);
    run_clcp(files, m);
    return {files, m};
}

TEST(Acs, WorkedExampleSums) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    auto acc = accumulate(p.files, p.manifest);
    EXPECT_EQ(acc.sum_query, (std::vector<std::uint64_t>{ex::kSumQueryS1, ex::kSumQueryS2}));
    EXPECT_EQ(acc.sum_subject, (std::vector<std::uint64_t>{ex::kSumS1Query, ex::kSumS2Query}));

    auto report = finalize(acc, p.manifest);
    ASSERT_EQ(report.entries.size(), 2u);
    EXPECT_DOUBLE_EQ(report.entries[0].d_query_subject, 11.0 / 7.0);
    EXPECT_DOUBLE_EQ(report.entries[1].d_query_subject, 19.0 / 7.0);
    EXPECT_DOUBLE_EQ(report.entries[0].d_subject_query, 15.0 / 10.0);
    EXPECT_DOUBLE_EQ(report.entries[1].d_subject_query, 30.0 / 13.0);
}

TEST(Acs, WorkedExampleDistances) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    auto report = finalize(accumulate(p.files, p.manifest), p.manifest);
    EXPECT_NEAR(report.entries[0].acs, ex::kAcsS1, 5e-3);
    EXPECT_NEAR(report.entries[1].acs, ex::kAcsS2, 5e-3);
    EXPECT_LT(report.entries[1].acs, report.entries[0].acs);
}

TEST(Acs, WorkedExampleMatchingStatistics) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    EXPECT_EQ(matching_statistics_query(p.files, p.manifest, 1), ex::kMsQueryVsS1);
    EXPECT_EQ(matching_statistics(p.files, p.manifest, 1), ex::kMsS1VsQuery);
}

TEST(Acs, MatchingStatisticsTargetValidation) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    EXPECT_THROW(matching_statistics(p.files, p.manifest, 0), ValidationError);
    EXPECT_THROW(matching_statistics(p.files, p.manifest, 3), ValidationError);
    EXPECT_THROW(matching_statistics_query(p.files, p.manifest, 0), ValidationError);
}

TEST(Acs, IdenticalStringsHaveZeroDistance) {
    testing::TempDir dir("acs");
    std::string s = "ACGTTGCAAGCTAGCA";
    std::vector<SequenceRecord> records = {{"q", 0, Subset::Query, s}, {"s", 1, Subset::Subject, s}};
    auto p = process(records, dir.path());
    auto report = finalize(accumulate(p.files, p.manifest), p.manifest);
    EXPECT_NEAR(report.entries[0].acs, 0.0, 1e-12);
}

TEST(Acs, ZeroSumIsUndefined) {
    testing::TempDir dir("acs");
    std::vector<SequenceRecord> records = {{"q", 0, Subset::Query, "AAAA"}, {"s", 1, Subset::Subject, "CCC"}};
    auto p = process(records, dir.path());
    auto report = finalize(accumulate(p.files, p.manifest), p.manifest);
    EXPECT_FALSE(report.entries[0].defined);
    EXPECT_TRUE(std::isinf(report.entries[0].acs));
    std::ostringstream os;
    write_tsv(os, report);
    EXPECT_NE(os.str().find("\tinf\n"), std::string::npos);
}

TEST(Acs, SigmaBelowTwoIsRejected) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    auto acc = accumulate(p.files, p.manifest);
    EXPECT_THROW(finalize(acc, p.manifest, 1u), ValidationError);
    EXPECT_NO_THROW(finalize(acc, p.manifest, 2u));
}

TEST(Acs, TsvAndPhylipLayout) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    auto report = finalize(accumulate(p.files, p.manifest), p.manifest);
    std::ostringstream tsv, phy;
    write_tsv(tsv, report);
    write_phylip(phy, report);
    std::istringstream lines(tsv.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "subject_name\td_query_subject\td_subject_query\tnorm_qs\tnorm_sq\tacs");
    EXPECT_EQ(first.rfind("s1\t", 0), 0u);
    EXPECT_EQ(std::count(first.begin(), first.end(), '\t'), 5);
    EXPECT_EQ(phy.str().rfind("2\ns1 ", 0), 0u);
}

TEST(Acs, RowFileCountMismatchIsRejected) {
    testing::TempDir dir("acs");
    auto p = process(ex::records(), dir.path());
    auto bytes = read_file(p.files.rows());
    {
        std::ofstream out(p.files.rows(), std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - kRowRecordBytes));
    }
    EXPECT_THROW(accumulate(p.files, p.manifest), ValidationError);
}

// Each subject's MS multiset equals the multiset of its per-row cLCP values
// (end-marker row excluded), and swapping the query role keeps the distance.
TEST(Acs, RandomPairsMatchOracleAndAreSymmetric) {
    testing::TempDir dir("acs");
    std::mt19937_64 rng(505);
    for (int t = 0; t < 40; ++t) {
        unsigned sigma = t % 2 ? 4 : 2;
        const std::string alphabet = std::string(kDnaAlphabet).substr(0, sigma);
        auto records = random_collection(rng, sigma, 24, 1);
        auto p = process(records, dir / ("a" + std::to_string(t)), alphabet);
        auto report = finalize(accumulate(p.files, p.manifest), p.manifest);
        auto want = oracle::naive_acs(records[0].text, records[1].text, sigma);
        EXPECT_EQ(report.entries[0].sum_query, want.sum_st);
        EXPECT_EQ(report.entries[0].sum_subject, want.sum_ts);
        EXPECT_EQ(report.entries[0].defined, want.defined);
        if (want.defined) {
            EXPECT_NEAR(report.entries[0].acs, want.acs, 1e-12);
        }

        auto ms = matching_statistics(p.files, p.manifest, 1);
        std::vector<std::uint64_t> per_row;
        auto pos = read_ints(p.files.pos(), kPosWidth);
        RowReader rows(p.files.rows());
        while (rows.has_next()) {
            auto v = rows.next();
            if (pos[v.row - 1] <= records[1].text.size())
                per_row.push_back(v.clcp());
        }
        std::sort(ms.begin(), ms.end());
        std::sort(per_row.begin(), per_row.end());
        EXPECT_EQ(ms, per_row);

        std::vector<SequenceRecord> swapped = {{"q", 0, Subset::Query, records[1].text},
                                               {"s", 1, Subset::Subject, records[0].text}};
        auto ps = process(swapped, dir / ("b" + std::to_string(t)), alphabet);
        auto swapped_report = finalize(accumulate(ps.files, ps.manifest), ps.manifest);
        EXPECT_EQ(swapped_report.entries[0].defined, report.entries[0].defined);
        if (report.entries[0].defined) {
            EXPECT_NEAR(swapped_report.entries[0].acs, report.entries[0].acs, 1e-12);
        }
    }
}

}  // namespace
}  // namespace clcp
