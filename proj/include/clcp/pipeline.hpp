// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include "clcp/acs.hpp"
#include "clcp/clcp.hpp"
#include "clcp/darray.hpp"
#include "clcp/indexer.hpp"
#include "clcp/model.hpp"
#include "clcp/streams.hpp"

namespace clcp {

/// One line of stage telemetry, printed by the CLI on stderr.
struct StageSummary {
    std::string stage;
    std::uint64_t rows = 0;
    std::size_t peak_elements = 0;
    double seconds = 0;

    std::string line() const {
        std::ostringstream os;
        os << stage << ": rows=" << rows << " peak_tracked_elements=" << peak_elements << " elapsed_s=" << seconds;
        return os.str();
    }
};

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline CollectionManifest load_manifest(const IndexFiles& files) {
    if (!std::filesystem::exists(files.manifest()))
        throw IoError("no index manifest in " + files.dir.string());
    return CollectionManifest::read(files.manifest());
}

inline StageSummary index_stage(const std::filesystem::path& fasta, const std::string& chi_name,
                                const std::filesystem::path& out_dir, const IndexOptions& options,
                                CollectionManifest* manifest_out = nullptr) {
    StageTimer t;
    auto records = designate_query(parse_fasta(read_file(fasta), options.alphabet), chi_name);
    auto m = build_index(records, out_dir, options);
    if (manifest_out)
        *manifest_out = m;
    return {"index", m.total_rows, 0, t.seconds()};
}

inline StageSummary darray_stage(const IndexFiles& files, DArrayStats* stats_out = nullptr) {
    StageTimer t;
    auto m = load_manifest(files);
    auto stats = build_d_array(files, m);
    if (stats_out)
        *stats_out = stats;
    return {"darray", stats.rows, stats.max_stack_depth, t.seconds()};
}

inline StageSummary clcp_stage(const IndexFiles& files, const ClcpOptions& options, ClcpStats* stats_out = nullptr) {
    StageTimer t;
    auto m = load_manifest(files);
    auto stats = run_clcp(files, m, options);
    if (stats_out)
        *stats_out = stats;
    return {"clcp", stats.scan.rows, stats.peak_elements, t.seconds()};
}

inline bool darray_present(const IndexFiles& f) { return std::filesystem::exists(f.d()); }
inline bool clcp_present(const IndexFiles& f) {
    return std::filesystem::exists(f.rows()) && std::filesystem::exists(f.clcp_chi());
}

}  // namespace clcp
