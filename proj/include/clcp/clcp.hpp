// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clcp/error.hpp"
#include "clcp/model.hpp"
#include "clcp/streams.hpp"

namespace clcp {

/// Counts the elements held by the scan engines' working buffers.
class WorkingSet {
public:
    void acquire(std::size_t n) {
        current_ += n;
        peak_ = std::max(peak_, current_);
    }
    void release(std::size_t n) { current_ -= std::min(n, current_); }

    std::size_t current() const { return current_; }
    std::size_t peak() const { return peak_; }

private:
    std::size_t current_ = 0;
    std::size_t peak_ = 0;
};

/// Fixed-size array whose element count is charged to a WorkingSet for its lifetime.
template <class T>
class TrackedBuffer {
public:
    TrackedBuffer(WorkingSet& ws, std::size_t n, T init = T{}) : ws_(&ws), data_(n, init) { ws_->acquire(n); }
    ~TrackedBuffer() {
        if (ws_)
            ws_->release(data_.size());
    }
    TrackedBuffer(const TrackedBuffer&) = delete;
    TrackedBuffer& operator=(const TrackedBuffer&) = delete;
    TrackedBuffer(TrackedBuffer&& other) noexcept : ws_(std::exchange(other.ws_, nullptr)), data_(std::move(other.data_)) {}

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return data_.size(); }
    std::span<T> span() { return data_; }
    std::span<const T> span() const { return data_; }
    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

private:
    WorkingSet* ws_;
    std::vector<T> data_;
};

/// cLCP of one subject row against the query: u = UcLCP, l = LcLCP.
struct SubjectRowValue {
    std::uint64_t row = 0;
    Color color = 0;
    std::uint64_t u = 0;
    std::uint64_t l = 0;

    std::uint64_t clcp() const { return std::max(u, l); }
    bool operator==(const SubjectRowValue&) const = default;
};

// Row emission file: per subject row, little-endian
//   row:u64  color:u32  u:u64  l:u64   (28 bytes)
inline constexpr std::size_t kRowRecordBytes = 28;

class RowWriter {
public:
    explicit RowWriter(const std::filesystem::path& path, std::size_t buffer_bytes = stream_buffer_bytes())
        : path_(path), file_(detail::open_file(path, "wb")) {
        buffer_.resize(std::max<std::size_t>(1, buffer_bytes / kRowRecordBytes) * kRowRecordBytes);
    }
    RowWriter(const RowWriter&) = delete;
    RowWriter& operator=(const RowWriter&) = delete;
    ~RowWriter() {
        try {
            close();
        } catch (...) {
        }
    }

    void push(const SubjectRowValue& v) {
        std::uint8_t* p = buffer_.data() + fill_;
        encode_le(v.row, 8, p);
        encode_le(v.color, 4, p + 8);
        encode_le(v.u, 8, p + 12);
        encode_le(v.l, 8, p + 20);
        fill_ += kRowRecordBytes;
        ++count_;
        if (fill_ == buffer_.size())
            flush();
    }
    void operator()(const SubjectRowValue& v) { push(v); }

    void close() {
        if (!file_)
            return;
        flush();
        if (std::fclose(file_.release()) != 0)
            throw IoError("failed closing " + path_.string());
    }
    std::uint64_t size() const { return count_; }

private:
    void flush() {
        if (fill_ && std::fwrite(buffer_.data(), 1, fill_, file_.get()) != fill_)
            throw IoError("write failed on " + path_.string());
        fill_ = 0;
    }

    std::filesystem::path path_;
    detail::FilePtr file_;
    std::vector<std::uint8_t> buffer_;
    std::size_t fill_ = 0;
    std::uint64_t count_ = 0;
};

class RowReader {
public:
    explicit RowReader(const std::filesystem::path& path) : inner_(path, 4, Direction::Forward) {
        if (inner_.length() * 4 % kRowRecordBytes != 0)
            throw IoError("truncated row file " + path.string());
        count_ = inner_.length() * 4 / kRowRecordBytes;
    }
    std::uint64_t size() const { return count_; }
    bool has_next() const { return inner_.has_next(); }

    SubjectRowValue next() {
        std::uint64_t w[7];
        for (auto& x : w)
            x = inner_.next();
        return {w[0] | (w[1] << 32), static_cast<Color>(w[2]), w[3] | (w[4] << 32), w[5] | (w[6] << 32)};
    }

private:
    IntReader inner_;
    std::uint64_t count_ = 0;
};

struct MatrixWriteCounter {
    std::vector<std::uint8_t> counts;
    std::uint8_t max() const { return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end()); }
};

/// Which neighbour values the seeding pass stores: both (the cLCP matrix),
/// or only the upper / lower ones (the separate UcLCP / LcLCP matrices).
enum class SeedMode { Both, UpperOnly, LowerOnly };

/// The (n_chi + 1) x m matrix of cLCP values of the query's suffixes against
/// each subject, stored row-major on disk and processed Q rows at a time.
/// Row 1 belongs to the query's end-marker suffix.
class ClcpChiMatrix {
public:
    ClcpChiMatrix(std::filesystem::path path, std::uint64_t rows, std::uint32_t cols, unsigned width,
                  std::uint64_t block_rows, WorkingSet& ws, MatrixWriteCounter* counter = nullptr,
                  SeedMode mode = SeedMode::Both)
        : path_(std::move(path)), rows_(rows), cols_(cols), width_(width), block_rows_(block_rows), ws_(&ws),
          counter_(counter), mode_(mode) {
        check_width(width);
        if (block_rows < 2)
            throw ValidationError("block rows Q must be at least 2");
        if (rows < 1 || cols < 1)
            throw ValidationError("chi matrix needs at least one row and one column");
        block_rows_ = std::min(block_rows_, rows_);
        if (counter_)
            counter_->counts.assign(rows_ * cols_, 0);
    }

    std::uint64_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    std::uint64_t block_rows() const { return block_rows_; }
    const std::filesystem::path& path() const { return path_; }

    /// Sequential writer for the seeding pass. Rows are opened in order with
    /// their UcLCP seed and completed later with their LcLCP seed.
    class SeedWriter {
    public:
        explicit SeedWriter(ClcpChiMatrix& m)
            : m_(&m), block_(*m.ws_, m.block_rows_ * m.cols_, 0), file_(detail::open_file(m.path_, "wb")) {}

        void begin_row(std::uint64_t c, std::span<const std::int64_t> upper) {
            if (c != next_row_)
                throw ValidationError("chi matrix rows must be seeded in order");
            if (c >= base_ + m_->block_rows_)
                flush_through(c - 1);
            auto row = row_span(c);
            const bool keep = m_->mode_ != SeedMode::LowerOnly;
            for (std::uint32_t r = 0; r < m_->cols_; ++r)
                row[r] = keep && upper[r] > 0 ? static_cast<std::uint64_t>(upper[r]) : 0;
            ++next_row_;
        }

        void complete_row(std::uint64_t c, std::span<const std::int64_t> lower) {
            if (c + 1 != next_row_)
                throw ValidationError("only the most recently opened chi row can be completed");
            if (m_->mode_ == SeedMode::UpperOnly)
                return;
            auto row = row_span(c);
            for (std::uint32_t r = 0; r < m_->cols_; ++r)
                if (lower[r] > 0)
                    row[r] = std::max(row[r], static_cast<std::uint64_t>(lower[r]));
        }

        void finish() {
            if (next_row_ != m_->rows_ + 1)
                throw ValidationError("seeded " + std::to_string(next_row_ - 1) + " chi rows, expected " +
                                      std::to_string(m_->rows_));
            flush_through(m_->rows_);
            if (std::fclose(file_.release()) != 0)
                throw IoError("failed closing " + m_->path_.string());
        }

    private:
        std::span<std::uint64_t> row_span(std::uint64_t c) {
            return block_.span().subspan((c - base_) * m_->cols_, m_->cols_);
        }
        void flush_through(std::uint64_t last) {
            if (last < base_)
                return;
            m_->write_rows(file_.get(), base_, last - base_ + 1, block_.span());
            base_ = last + 1;
        }

        ClcpChiMatrix* m_;
        TrackedBuffer<std::uint64_t> block_;
        detail::FilePtr file_;
        std::uint64_t base_ = 1;
        std::uint64_t next_row_ = 1;
    };

    /// Backward pass: row[c] = max(row[c], min(lcp_chi[c + 1], row[c + 1])).
    void propagate_backward(const std::filesystem::path& lcp_chi_path) {
        IntReader gaps(lcp_chi_path, width_, Direction::Backward);
        if (gaps.length() != rows_)
            throw ValidationError("lcp_chi length does not match chi matrix rows");
        auto file = detail::open_file(path_, "r+b");
        TrackedBuffer<std::uint64_t> block(*ws_, block_rows_ * cols_, 0);
        TrackedBuffer<std::uint64_t> carry(*ws_, cols_, 0);
        std::uint64_t gap = 0;
        for (std::uint64_t hi = rows_; hi >= 1;) {
            std::uint64_t lo = hi >= block_rows_ ? hi - block_rows_ + 1 : 1;
            read_rows(file.get(), lo, hi - lo + 1, block.span());
            for (std::uint64_t c = hi; c >= lo; --c) {
                auto row = block.span().subspan((c - lo) * cols_, cols_);
                if (c < rows_)
                    for (std::uint32_t r = 0; r < cols_; ++r)
                        row[r] = std::max(row[r], std::min(gap, carry[r]));
                std::copy(row.begin(), row.end(), carry.span().begin());
                gap = gaps.next();  // lcp_chi[c]
                if (c == 1)
                    break;
            }
            write_rows(file.get(), lo, hi - lo + 1, block.span());
            if (lo == 1)
                break;
            hi = lo - 1;
        }
        close_checked(std::move(file));
    }

    /// Forward pass: row[c] = max(row[c], min(lcp_chi[c], row[c - 1])).
    /// `on_final_row(c, row)` sees each row once its value is definitive.
    template <class RowVisitor>
    void propagate_forward(const std::filesystem::path& lcp_chi_path, RowVisitor&& on_final_row) {
        IntReader gaps(lcp_chi_path, width_, Direction::Forward);
        if (gaps.length() != rows_)
            throw ValidationError("lcp_chi length does not match chi matrix rows");
        auto file = detail::open_file(path_, "r+b");
        TrackedBuffer<std::uint64_t> block(*ws_, block_rows_ * cols_, 0);
        TrackedBuffer<std::uint64_t> carry(*ws_, cols_, 0);
        for (std::uint64_t lo = 1; lo <= rows_; lo += block_rows_) {
            std::uint64_t n = std::min(block_rows_, rows_ - lo + 1);
            read_rows(file.get(), lo, n, block.span());
            for (std::uint64_t c = lo; c < lo + n; ++c) {
                auto row = block.span().subspan((c - lo) * cols_, cols_);
                std::uint64_t gap = gaps.next();  // lcp_chi[c]
                if (c > 1)
                    for (std::uint32_t r = 0; r < cols_; ++r)
                        row[r] = std::max(row[r], std::min(gap, carry[r]));
                std::copy(row.begin(), row.end(), carry.span().begin());
                on_final_row(c, std::span<const std::uint64_t>(row));
            }
            write_rows(file.get(), lo, n, block.span());
        }
        close_checked(std::move(file));
    }

    void propagate_forward(const std::filesystem::path& lcp_chi_path) {
        propagate_forward(lcp_chi_path, [](std::uint64_t, std::span<const std::uint64_t>) {});
    }

    /// Loads the whole matrix (tests and verification only).
    std::vector<std::uint64_t> load() const { return read_ints(path_, width_); }

private:
    void write_rows(std::FILE* f, std::uint64_t first, std::uint64_t n, std::span<const std::uint64_t> src) {
        seek(f, first);
        std::uint8_t scratch[4096];
        const std::size_t per = sizeof(scratch) / width_;
        const std::size_t total = n * cols_;
        for (std::size_t done = 0; done < total;) {
            std::size_t k = std::min(per, total - done);
            for (std::size_t j = 0; j < k; ++j) {
                if (src[done + j] > max_value_for_width(width_))
                    throw ValidationError("chi matrix value overflows lcp width");
                encode_le(src[done + j], width_, scratch + j * width_);
            }
            if (std::fwrite(scratch, width_, k, f) != k)
                throw IoError("write failed on " + path_.string());
            done += k;
        }
        if (counter_)
            for (std::size_t j = 0; j < total; ++j)
                ++counter_->counts[(first - 1) * cols_ + j];
    }

    void read_rows(std::FILE* f, std::uint64_t first, std::uint64_t n, std::span<std::uint64_t> dst) const {
        seek(f, first);
        std::uint8_t scratch[4096];
        const std::size_t per = sizeof(scratch) / width_;
        const std::size_t total = n * cols_;
        for (std::size_t done = 0; done < total;) {
            std::size_t k = std::min(per, total - done);
            if (std::fread(scratch, width_, k, f) != k)
                throw IoError("short read on " + path_.string());
            for (std::size_t j = 0; j < k; ++j)
                dst[done + j] = decode_le(scratch + j * width_, width_);
            done += k;
        }
    }

    void seek(std::FILE* f, std::uint64_t row) const {
        if (std::fseek(f, static_cast<long>((row - 1) * cols_ * width_), SEEK_SET) != 0)
            throw IoError("seek failed on " + path_.string());
    }

    void close_checked(detail::FilePtr f) const {
        if (std::fclose(f.release()) != 0)
            throw IoError("failed closing " + path_.string());
    }

    std::filesystem::path path_;
    std::uint64_t rows_;
    std::uint32_t cols_;
    unsigned width_;
    std::uint64_t block_rows_;
    WorkingSet* ws_;
    MatrixWriteCounter* counter_;
    SeedMode mode_;
};

inline constexpr std::uint64_t kDefaultBlockRows = 4096;

/// Q for a given query: min(n_chi + 1, 4096) unless overridden.
inline std::uint64_t effective_block_rows(const CollectionManifest& m, std::optional<std::uint64_t> requested) {
    if (requested && *requested < 2)
        throw ValidationError("block rows Q must be at least 2");
    return std::min<std::uint64_t>(requested.value_or(kDefaultBlockRows), m.chi_rows());
}

/// State of the forward scan inside the current chi-interval.
struct ScanState {
    ScanState(WorkingSet& ws, std::uint32_t m) : first_u(ws, m, -1), last_l(ws, m, -1) {}

    std::int64_t alpha = std::numeric_limits<std::int64_t>::max();  // min lcp since the last chi row
    std::int64_t zeta = std::numeric_limits<std::int64_t>::min();   // max D - 1 since the last chi row
    std::uint64_t g = 0;                                            // flcp(chi1, chi2)
    bool has_next_chi = true;
    std::uint64_t chi_rank = 0;
    // Per subject color; -1 marks "not yet seen in this interval".
    TrackedBuffer<std::int64_t> first_u;
    TrackedBuffer<std::int64_t> last_l;

    void start_interval() {
        alpha = std::numeric_limits<std::int64_t>::max();
        zeta = std::numeric_limits<std::int64_t>::min();
        first_u.fill(-1);
        last_l.fill(-1);
    }
};

struct ScanStats {
    std::uint64_t rows = 0;
    std::uint64_t subject_rows = 0;
    std::uint64_t chi_rows = 0;
    std::uint64_t alpha_checks = 0;
};

/// One forward pass over id, lcp, D and lcp_chi. Emits a SubjectRowValue for
/// every subject row to `sink` and seeds the chi matrix with each query
/// suffix's nearest-neighbour values from the adjacent chi-intervals.
template <class Sink>
ScanStats scan_forward(const IndexFiles& files, const CollectionManifest& manifest, ClcpChiMatrix& matrix,
                       WorkingSet& ws, Sink&& sink) {
    const std::uint64_t n_rows = manifest.total_rows;
    IntReader id(files.id(), kIdWidth);
    SentinelLcpReader lcp(files.lcp(), manifest.lcp_width);
    IntReader d(files.d(), manifest.lcp_width);
    IntReader lcp_chi(files.lcp_chi(), manifest.lcp_width);
    if (id.length() != n_rows || lcp.rows() != n_rows)
        throw ValidationError("id/lcp length does not match manifest total_rows");
    if (d.length() != n_rows + 1)
        throw ValidationError("D length does not match manifest total_rows + 1");
    if (lcp_chi.length() != manifest.chi_rows() || matrix.rows() != manifest.chi_rows() ||
        matrix.cols() != manifest.num_subjects)
        throw ValidationError("lcp_chi / chi matrix dimensions do not match the manifest");

    ScanState st(ws, manifest.num_subjects);
    ClcpChiMatrix::SeedWriter seeds(matrix);
    ScanStats stats;
    lcp_chi.next();  // entry 1 belongs to the query end-marker suffix

    for (std::uint64_t i = 1; i <= n_rows; ++i) {
        std::int64_t h = lcp.next();
        std::int64_t dv = static_cast<std::int64_t>(d.next());
        auto color = static_cast<Color>(id.next());
        if (color > manifest.num_subjects)
            throw ValidationError("row " + std::to_string(i) + " has unknown color " + std::to_string(color));
        if (i == 1 && color != kQueryColor)
            throw ValidationError("row 1 must hold the query end-marker suffix");
        if (i > 1) {
            st.alpha = std::min(st.alpha, h);
            st.zeta = std::max(st.zeta, dv - 1);
        }

        if (color == kQueryColor) {
            std::uint64_t rank = ++st.chi_rank;
            if (rank > manifest.chi_rows())
                throw ValidationError("more query rows than the manifest declares");
            if (rank > 1) {
                ++stats.alpha_checks;
                if (st.alpha != static_cast<std::int64_t>(st.g))
                    throw MismatchError("alpha cross-check failed at row " + std::to_string(i) + ": running min " +
                                        std::to_string(st.alpha) + " != lcp_chi[" + std::to_string(rank) +
                                        "] = " + std::to_string(st.g));
                seeds.complete_row(rank - 1, st.first_u.span());
            }
            seeds.begin_row(rank, st.last_l.span());
            st.start_interval();
            st.has_next_chi = lcp_chi.has_next();
            st.g = st.has_next_chi ? lcp_chi.next() : 0;
            ++stats.chi_rows;
            continue;
        }

        const auto u = static_cast<std::uint64_t>(st.alpha);
        std::uint64_t l = 0;
        if (st.has_next_chi)
            l = st.alpha > static_cast<std::int64_t>(st.g)
                    ? st.g
                    : static_cast<std::uint64_t>(std::max(st.zeta, static_cast<std::int64_t>(st.g)));
        sink(SubjectRowValue{i, color, u, l});
        auto slot = color - 1;
        if (st.first_u[slot] < 0)
            st.first_u[slot] = static_cast<std::int64_t>(u);
        st.last_l[slot] = static_cast<std::int64_t>(l);
        ++stats.subject_rows;
    }
    if (st.chi_rank != manifest.chi_rows())
        throw ValidationError("found " + std::to_string(st.chi_rank) + " query rows, manifest expects " +
                              std::to_string(manifest.chi_rows()));
    seeds.complete_row(st.chi_rank, st.first_u.span());
    seeds.finish();
    stats.rows = n_rows;
    return stats;
}

struct ClcpOptions {
    std::optional<std::uint64_t> block_rows;
    bool count_matrix_writes = false;
};

struct ClcpStats {
    ScanStats scan;
    std::uint64_t block_rows = 0;
    std::size_t peak_elements = 0;
    std::size_t element_budget = 0;  // 3m + Q*m + max_lcp + 2
    std::uint8_t max_writes_per_entry = 0;
};

/// Full clcp stage: forward scan (writing `index.rows` and seeding
/// `index.clcpchi`), then the backward and forward propagation passes.
inline ClcpStats run_clcp(const IndexFiles& files, const CollectionManifest& manifest, const ClcpOptions& options = {}) {
    ClcpStats stats;
    stats.block_rows = effective_block_rows(manifest, options.block_rows);
    const std::uint64_t m = manifest.num_subjects;
    stats.element_budget = 3 * m + stats.block_rows * m + manifest.max_lcp + 2;

    WorkingSet ws;
    MatrixWriteCounter counter;
    ClcpChiMatrix matrix(files.clcp_chi(), manifest.chi_rows(), manifest.num_subjects, manifest.lcp_width,
                         stats.block_rows, ws, options.count_matrix_writes ? &counter : nullptr);
    {
        RowWriter rows(files.rows());
        stats.scan = scan_forward(files, manifest, matrix, ws, rows);
        rows.close();
    }
    matrix.propagate_backward(files.lcp_chi());
    matrix.propagate_forward(files.lcp_chi());
    stats.peak_elements = ws.peak();
    stats.max_writes_per_entry = counter.max();
    return stats;
}

/// UcLCP and LcLCP of every query suffix against every subject, kept apart:
/// the upper matrix needs only the forward pass and the lower one only the
/// backward pass. Written to `upper_path` / `lower_path` in the chi matrix layout.
inline void compute_chi_components(const IndexFiles& files, const CollectionManifest& manifest,
                                   const std::filesystem::path& upper_path, const std::filesystem::path& lower_path,
                                   std::optional<std::uint64_t> block_rows = std::nullopt) {
    const std::uint64_t q = effective_block_rows(manifest, block_rows);
    auto discard = [](const SubjectRowValue&) {};
    {
        WorkingSet ws;
        ClcpChiMatrix upper(upper_path, manifest.chi_rows(), manifest.num_subjects, manifest.lcp_width, q, ws,
                            nullptr, SeedMode::UpperOnly);
        scan_forward(files, manifest, upper, ws, discard);
        upper.propagate_forward(files.lcp_chi());
    }
    WorkingSet ws;
    ClcpChiMatrix lower(lower_path, manifest.chi_rows(), manifest.num_subjects, manifest.lcp_width, q, ws, nullptr,
                        SeedMode::LowerOnly);
    scan_forward(files, manifest, lower, ws, discard);
    lower.propagate_backward(files.lcp_chi());
}

}  // namespace clcp
