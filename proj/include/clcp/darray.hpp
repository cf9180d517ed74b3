// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "clcp/error.hpp"
#include "clcp/model.hpp"
#include "clcp/streams.hpp"

namespace clcp {

/// An lcp-interval still open on the stack.
struct IntervalFrame {
    std::int64_t k = -1;
    std::uint64_t start = 1;
    ColorFlags flags;
};

/// Computes D in one forward pass over (lcp[i], id[i]) pairs.
///
/// D[i] = k + 1 for the deepest colored k-lcp interval starting at row i,
/// k >= 1, and 0 when no such interval starts there. The 0-lcp interval
/// spanning the whole table is never recorded.
class DArrayBuilder {
public:
    explicit DArrayBuilder(std::uint64_t rows) : rows_(rows), d_(rows + 1, 0) {
        stack_.push_back({-1, 1, {}});
    }

    /// Feeds row `row_ + 1`; `lcp` is -1 for row 1.
    void push_row(std::int64_t lcp, Color color) {
        ++row_;
        if (row_ > rows_)
            throw ValidationError("D builder fed more rows than declared");
        if (row_ > 1)
            reduce(lcp);
        stack_.back().flags.add(color);
        prev_color_ = color;
    }

    std::vector<std::uint64_t> finish() {
        if (row_ != rows_)
            throw ValidationError("D builder fed " + std::to_string(row_) + " of " + std::to_string(rows_) + " rows");
        ++row_;
        reduce(-1);
        if (stack_.size() != 1)
            throw ValidationError("interval stack not reduced to its sentinel; lcp input is corrupt");
        return std::move(d_);
    }

    std::size_t max_stack_depth() const { return max_depth_; }

private:
    // Closes every interval deeper than h at the boundary between rows
    // row_ - 1 and row_, then opens an h-interval if none is open.
    void reduce(std::int64_t h) {
        std::uint64_t lb = row_ - 1;
        bool popped = false;
        ColorFlags carried;
        while (stack_.back().k > h) {
            IntervalFrame f = stack_.back();
            stack_.pop_back();
            if (f.k >= 1 && f.flags.colored()) {
                auto& slot = d_[f.start - 1];
                slot = std::max<std::uint64_t>(slot, static_cast<std::uint64_t>(f.k) + 1);
            }
            lb = f.start;
            carried = f.flags;
            stack_.back().flags.merge(f.flags);
            popped = true;
        }
        if (stack_.back().k < h) {
            if (!popped)
                carried.add(prev_color_);
            stack_.push_back({h, lb, carried});
            max_depth_ = std::max(max_depth_, stack_.size());
        }
    }

    std::uint64_t rows_;
    std::uint64_t row_ = 0;
    Color prev_color_ = 0;
    std::vector<std::uint64_t> d_;
    std::vector<IntervalFrame> stack_;
    std::size_t max_depth_ = 1;
};

struct DArrayStats {
    std::uint64_t rows = 0;
    std::size_t max_stack_depth = 0;
    std::uint64_t nonzero = 0;
    std::uint64_t max_value = 0;
};

/// Streams lcp and id from the index and writes `index.d` (N + 1 entries,
/// the last always 0).
inline DArrayStats build_d_array(const IndexFiles& files, const CollectionManifest& manifest) {
    SentinelLcpReader lcp(files.lcp(), manifest.lcp_width);
    IntReader id(files.id(), kIdWidth);
    if (lcp.rows() != manifest.total_rows || id.length() != manifest.total_rows)
        throw ValidationError("lcp/id length does not match manifest total_rows");

    DArrayBuilder builder(manifest.total_rows);
    for (std::uint64_t row = 1; row <= manifest.total_rows; ++row)
        builder.push_row(lcp.next(), static_cast<Color>(id.next()));
    auto d = builder.finish();

    DArrayStats stats;
    stats.rows = manifest.total_rows;
    stats.max_stack_depth = builder.max_stack_depth();
    IntWriter out(files.d(), manifest.lcp_width);
    for (auto v : d) {
        out.push(v);
        stats.nonzero += v != 0;
        stats.max_value = std::max(stats.max_value, v);
    }
    out.close();
    return stats;
}

}  // namespace clcp
