// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "clcp/clcp.hpp"
#include "clcp/darray.hpp"
#include "clcp/indexer.hpp"
#include "clcp/oracle.hpp"
#include "clcp/verify.hpp"
#include "worked_example.hpp"
#include "test_util.hpp"

namespace clcp {
namespace {

namespace ex = testing::worked;

struct Prepared {
    IndexFiles files;
    CollectionManifest manifest;
};

Prepared prepare(std::span<const SequenceRecord> records, const std::filesystem::path& dir,
                 const std::string& alphabet = std::string(kDnaAlphabet)) {
    IndexOptions opt;
    opt.alphabet = alphabet;
    auto m = build_index(records, dir, opt);
    IndexFiles files{dir};
    build_d_array(files, m);
    return {files, m};
}

std::vector<SubjectRowValue> read_rows(const IndexFiles& files) {
    RowReader r(files.rows());
    std::vector<SubjectRowValue> out;
    while (r.has_next())
        out.push_back(r.next());
    return out;
}

// matrix[(rank - 1) * m + (color - 1)]
std::uint64_t cell(const std::vector<std::uint64_t>& matrix, std::uint32_t m, std::uint64_t rank, Color color) {
    return matrix.at((rank - 1) * m + (color - 1));
}

TEST(Clcp, WorkedExampleSubjectRows) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    auto stats = run_clcp(p.files, p.manifest);
    EXPECT_EQ(stats.scan.subject_rows, 25u);
    EXPECT_EQ(stats.scan.chi_rows, 8u);

    auto rows = read_rows(p.files);
    ASSERT_EQ(rows.size(), ex::kSubjectRows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& want = ex::kSubjectRows[k];
        EXPECT_EQ(rows[k].row, want.row);
        EXPECT_EQ(rows[k].color, ex::kId[want.row - 1]);
        EXPECT_EQ(rows[k].u, want.u) << "row " << want.row;
        EXPECT_EQ(rows[k].l, want.l) << "row " << want.row;
        EXPECT_EQ(rows[k].clcp(), want.clcp) << "row " << want.row;
    }
}

TEST(Clcp, WorkedExampleSpotRows) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    run_clcp(p.files, p.manifest);
    auto rows = read_rows(p.files);
    auto at = [&](std::uint64_t row) {
        for (const auto& v : rows)
            if (v.row == row)
                return v;
        ADD_FAILURE() << "row " << row << " missing";
        return SubjectRowValue{};
    };
    // Rows 16 and 17: lower neighbour within the interval above query row 19.
    EXPECT_EQ(at(16).u, 2u);
    EXPECT_EQ(at(16).l, 1u);
    EXPECT_EQ(at(17).u, 1u);
    EXPECT_EQ(at(17).l, 2u);
    // Row 13 sits between query rows 12 and 14.
    EXPECT_EQ(at(13).clcp(), 1u);
    // Row 8 is ACGCCGCCGGCA$2, just above the whole query.
    EXPECT_EQ(at(8).l, 4u);
    EXPECT_EQ(at(8).u, 0u);
}

TEST(Clcp, WorkedExampleChiMatrix) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    run_clcp(p.files, p.manifest);
    auto matrix = read_ints(p.files.clcp_chi(), p.manifest.lcp_width);
    ASSERT_EQ(matrix.size(), 16u);
    for (std::size_t rank = 1; rank <= ex::kChiRowValues.size(); ++rank)
        for (Color r = 1; r <= 2; ++r)
            EXPECT_EQ(cell(matrix, 2, rank, r), ex::kChiRowValues[rank - 1].clcp[r - 1])
                << "row " << ex::kChiRowValues[rank - 1].row << " color " << r;
}

TEST(Clcp, WorkedExampleSeparateUpperAndLower) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    compute_chi_components(p.files, p.manifest, dir / "u.bin", dir / "l.bin", 2);
    auto upper = read_ints(dir / "u.bin", p.manifest.lcp_width);
    auto lower = read_ints(dir / "l.bin", p.manifest.lcp_width);
    for (std::size_t rank = 1; rank <= ex::kChiRowValues.size(); ++rank)
        for (Color r = 1; r <= 2; ++r) {
            const auto& want = ex::kChiRowValues[rank - 1];
            EXPECT_EQ(cell(upper, 2, rank, r), want.u[r - 1]) << "row " << want.row << " color " << r;
            EXPECT_EQ(cell(lower, 2, rank, r), want.l[r - 1]) << "row " << want.row << " color " << r;
        }
}

// The row-12 entry against s1 is 0 after the scan and becomes 1 by backward
// propagation from row 14; the row-22 entry is fixed by forward propagation
// from row 19.
TEST(Clcp, PropagationPassesOnWorkedExample) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    WorkingSet ws;
    ClcpChiMatrix matrix(p.files.clcp_chi(), p.manifest.chi_rows(), 2, p.manifest.lcp_width, 3, ws);
    RowWriter sink(p.files.rows());
    scan_forward(p.files, p.manifest, matrix, ws, sink);
    sink.close();

    auto seeded = matrix.load();
    EXPECT_EQ(cell(seeded, 2, 3, 1), 0u);
    EXPECT_EQ(cell(seeded, 2, 6, 1), 0u);
    EXPECT_EQ(cell(seeded, 2, 4, 1), 1u);

    matrix.propagate_backward(p.files.lcp_chi());
    auto backward = matrix.load();
    EXPECT_EQ(cell(backward, 2, 3, 1), 1u);
    EXPECT_EQ(cell(backward, 2, 6, 1), 0u);

    std::vector<std::uint64_t> visited;
    matrix.propagate_forward(p.files.lcp_chi(), [&](std::uint64_t c, std::span<const std::uint64_t> row) {
        visited.push_back(c);
        EXPECT_EQ(row.size(), 2u);
    });
    auto forward = matrix.load();
    EXPECT_EQ(cell(forward, 2, 6, 1), 2u);
    EXPECT_EQ(visited, (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8}));
    for (std::size_t k = 0; k < seeded.size(); ++k)
        EXPECT_LE(seeded[k], forward[k]);
}

TEST(Clcp, DisjointAlphabetsGiveZeroMatrix) {
    testing::TempDir dir("clcp");
    std::vector<SequenceRecord> records = {
        {"q", 0, Subset::Query, "AAAA"}, {"s1", 1, Subset::Subject, "CCGC"}, {"s2", 2, Subset::Subject, "GGT"}};
    auto p = prepare(records, dir.path());
    run_clcp(p.files, p.manifest);
    for (auto v : read_ints(p.files.clcp_chi(), p.manifest.lcp_width))
        EXPECT_EQ(v, 0u);
    for (const auto& v : read_rows(p.files))
        EXPECT_EQ(v.clcp(), 0u);
}

TEST(Clcp, IdenticalStringsMatchWholeSuffixes) {
    testing::TempDir dir("clcp");
    std::string s = "ACGGTACA";
    std::vector<SequenceRecord> records = {{"q", 0, Subset::Query, s}, {"s", 1, Subset::Subject, s}};
    auto p = prepare(records, dir.path());
    run_clcp(p.files, p.manifest);
    auto pos = read_ints(p.files.pos(), kPosWidth);
    auto id = read_ints(p.files.id(), kIdWidth);
    auto matrix = read_ints(p.files.clcp_chi(), p.manifest.lcp_width);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < id.size(); ++i) {
        if (id[i] != kQueryColor)
            continue;
        EXPECT_EQ(matrix[rank++], s.size() + 1 - pos[i]);
    }
    for (const auto& v : read_rows(p.files))
        EXPECT_EQ(v.clcp(), s.size() + 1 - pos[v.row - 1]);
}

TEST(Clcp, RejectsBlockRowsBelowTwo) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    ClcpOptions opt;
    opt.block_rows = 1;
    EXPECT_THROW(run_clcp(p.files, p.manifest, opt), ValidationError);
}

TEST(Clcp, CorruptLcpChiTripsAlphaCrossCheck) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    auto chi = ex::kLcpChi;
    chi[5] = 2;  // true value 3
    write_ints(p.files.lcp_chi(), p.manifest.lcp_width, chi);
    EXPECT_THROW(run_clcp(p.files, p.manifest), MismatchError);
}

TEST(Clcp, MissingDArrayIsReported) {
    testing::TempDir dir("clcp");
    auto m = build_index(ex::records(), dir.path());
    EXPECT_THROW(run_clcp(IndexFiles{dir.path()}, m), IoError);
}

// Every block size from the smallest up to the whole matrix gives the same
// finalized values, within the tracked buffer budget and three writes per entry.
TEST(Clcp, BlockSizeDoesNotChangeResults) {
    testing::TempDir dir("clcp");
    auto p = prepare(ex::records(), dir.path());
    run_clcp(p.files, p.manifest);
    auto reference = read_ints(p.files.clcp_chi(), p.manifest.lcp_width);
    for (std::uint64_t q = 2; q <= 10; ++q) {
        ClcpOptions opt;
        opt.block_rows = q;
        opt.count_matrix_writes = true;
        auto stats = run_clcp(p.files, p.manifest, opt);
        EXPECT_EQ(read_ints(p.files.clcp_chi(), p.manifest.lcp_width), reference) << "Q=" << q;
        EXPECT_LE(stats.peak_elements, stats.element_budget);
        EXPECT_EQ(stats.max_writes_per_entry, 3);
    }
}

TEST(Clcp, RandomCollectionsMatchOracle) {
    testing::TempDir dir("clcp");
    std::mt19937_64 rng(303);
    for (int t = 0; t < 80; ++t) {
        unsigned sigma = t % 2 ? 4 : 2;
        auto records = random_collection(rng, sigma, 28, 2 + t % 5);
        auto sub = dir / ("r" + std::to_string(t));
        auto p = prepare(records, sub, std::string(kDnaAlphabet).substr(0, sigma));
        ClcpOptions opt;
        opt.block_rows = 2 + t % 7;
        auto stats = run_clcp(p.files, p.manifest, opt);
        EXPECT_LE(stats.peak_elements, stats.element_budget);

        auto ix = oracle::naive_index(records);
        const std::uint32_t m = p.manifest.num_subjects;
        auto table = oracle::naive_clcp(ix, m + 1);
        for (const auto& v : read_rows(p.files)) {
            EXPECT_EQ(v.u, table[v.row - 1][kQueryColor].u) << "trial " << t << " row " << v.row;
            EXPECT_EQ(v.l, table[v.row - 1][kQueryColor].l) << "trial " << t << " row " << v.row;
            EXPECT_EQ(v.l, oracle::lower_clcp_direct(ix, v.row));
        }
        auto matrix = read_ints(p.files.clcp_chi(), p.manifest.lcp_width);
        std::uint64_t rank = 0;
        for (std::size_t i = 1; i <= ix.rows(); ++i) {
            if (ix.id[i - 1] != kQueryColor)
                continue;
            ++rank;
            for (Color r = 1; r <= m; ++r)
                EXPECT_EQ(cell(matrix, m, rank, r), table[i - 1][r].clcp()) << "trial " << t << " row " << i;
        }
    }
}

// Within one chi-interval, the lcp between any two rows is at least the lcp
// of the two query suffixes bounding the interval.
TEST(Clcp, IntervalRowsShareBoundingPrefix) {
    std::mt19937_64 rng(404);
    for (int t = 0; t < 40; ++t) {
        auto records = random_collection(rng, 2, 16, 3);
        auto ix = oracle::naive_index(records);
        std::vector<std::size_t> chi;
        for (std::size_t i = 1; i <= ix.rows(); ++i)
            if (ix.id[i - 1] == kQueryColor)
                chi.push_back(i);
        for (std::size_t k = 0; k + 1 < chi.size(); ++k) {
            auto g = oracle::flcp(ix, chi[k], chi[k + 1]);
            for (std::size_t a = chi[k]; a <= chi[k + 1]; ++a)
                for (std::size_t b = a + 1; b <= chi[k + 1]; ++b)
                    EXPECT_GE(oracle::flcp(ix, a, b), g);
        }
    }
}

}  // namespace
}  // namespace clcp
