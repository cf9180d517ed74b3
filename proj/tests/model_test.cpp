// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "clcp/model.hpp"
#include "test_util.hpp"

namespace clcp {
namespace {

TEST(EndMarkerCompare, QueryMarkerSortsBeforeSymbols) {
    SuffixSymbol query_marker{kEndMarker, kQueryColor};
    SuffixSymbol a{'A', 1};
    EXPECT_TRUE(compare_symbols(query_marker, a) < 0);
    EXPECT_TRUE(compare_symbols(a, query_marker) > 0);
}

TEST(EndMarkerCompare, DistinctMarkersOrderByColorAndNeverMatch) {
    EXPECT_TRUE(end_marker_compare(1, 2) < 0);
    SuffixSymbol m1{kEndMarker, 1}, m2{kEndMarker, 2};
    EXPECT_TRUE(compare_symbols(m1, m2) < 0);
    EXPECT_FALSE(symbols_match(m1, m2));
}

TEST(EndMarkerCompare, SameMarkerIsEqualButDoesNotExtendPrefix) {
    EXPECT_TRUE(end_marker_compare(1, 1) == 0);
    SuffixSymbol m1{kEndMarker, 1};
    EXPECT_TRUE(compare_symbols(m1, m1) == 0);
    EXPECT_FALSE(symbols_match(m1, m1));
}

TEST(EndMarkerCompare, TotalOrderOnRandomTriples) {
    std::mt19937_64 rng(11);
    auto draw = [&] {
        if (rng() % 3 == 0)
            return SuffixSymbol{kEndMarker, static_cast<Color>(rng() % 4)};
        return SuffixSymbol{static_cast<std::uint8_t>("ACGT"[rng() % 4]), static_cast<Color>(rng() % 4)};
    };
    for (int t = 0; t < 5000; ++t) {
        auto a = draw(), b = draw(), c = draw();
        auto ab = compare_symbols(a, b), ba = compare_symbols(b, a);
        EXPECT_EQ(ab < 0, ba > 0);
        EXPECT_EQ(ab == 0, ba == 0);
        if (ab <= 0 && compare_symbols(b, c) <= 0) {
            EXPECT_TRUE(compare_symbols(a, c) <= 0);
        }
    }
}

TEST(ColorFlags, ColoredNeedsBothSubsets) {
    ColorFlags f;
    f.add(2);
    EXPECT_FALSE(f.colored());
    ColorFlags q;
    q.add(kQueryColor);
    f.merge(q);
    EXPECT_TRUE(f.colored());
}

CollectionManifest sample_manifest() {
    CollectionManifest m;
    m.total_rows = 33;
    m.num_subjects = 2;
    m.sigma = 4;
    m.alphabet = "ACGT";
    m.lcp_width = 1;
    m.max_lcp = 5;
    m.max_lcp_chi = 3;
    m.records = {{"chi", 7, Subset::Query}, {"s1", 10, Subset::Subject}, {"s2", 13, Subset::Subject}};
    return m;
}

TEST(Manifest, WriteReadRoundTrip) {
    testing::TempDir dir("manifest");
    auto m = sample_manifest();
    m.validate();
    m.write(dir / "m.txt");
    EXPECT_EQ(CollectionManifest::read(dir / "m.txt"), m);
    EXPECT_EQ(m.color_of("s2"), 2u);
    EXPECT_EQ(m.chi_rows(), 8u);
}

TEST(Manifest, RejectsInconsistentRowCount) {
    auto m = sample_manifest();
    m.total_rows = 32;
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Manifest, RejectsWidthTooSmallForMaxLcp) {
    auto m = sample_manifest();
    m.max_lcp = 256;
    EXPECT_THROW(m.validate(), ValidationError);
    m.lcp_width = 2;
    EXPECT_NO_THROW(m.validate());
}

TEST(Manifest, RejectsSecondQueryAndDuplicateNames) {
    auto m = sample_manifest();
    m.records[2].subset = Subset::Query;
    EXPECT_THROW(m.validate(), ValidationError);
    m = sample_manifest();
    m.records[2].name = "s1";
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Manifest, ReadRejectsMissingKey) {
    testing::TempDir dir("manifest");
    {
        std::ofstream out(dir / "m.txt");
        out << "format_version\t1\ntotal_rows\t3\n";
    }
    EXPECT_THROW(CollectionManifest::read(dir / "m.txt"), ValidationError);
    EXPECT_THROW(CollectionManifest::read(dir / "absent.txt"), IoError);
}

}  // namespace
}  // namespace clcp
