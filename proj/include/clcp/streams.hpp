// Copyright 2026 The clcp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clcp/error.hpp"
#include "clcp/model.hpp"

namespace clcp {

inline constexpr std::size_t kDefaultStreamBufferBytes = std::size_t{1} << 20;

/// Name of the environment variable capping the per-stream buffer, in bytes.
inline constexpr const char* kBufferEnvVar = "CLCP_BUFFER_BYTES";

/// Per-stream buffer size: the default, or the environment cap when it is set.
inline std::size_t stream_buffer_bytes() {
    if (const char* env = std::getenv(kBufferEnvVar)) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return std::max<std::size_t>(8, static_cast<std::size_t>(v));
    }
    return kDefaultStreamBufferBytes;
}

inline void check_width(unsigned width) {
    if (width != 1 && width != 2 && width != 4 && width != 8)
        throw ValidationError("element width must be 1, 2, 4 or 8 (got " + std::to_string(width) + ")");
}

inline std::uint64_t max_value_for_width(unsigned width) {
    return width >= 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * width)) - 1;
}

/// Smallest supported width that can store `value`.
inline unsigned width_for(std::uint64_t value) {
    for (unsigned w : {1u, 2u, 4u})
        if (value <= max_value_for_width(w))
            return w;
    return 8;
}

inline void encode_le(std::uint64_t v, unsigned width, std::uint8_t* out) {
    for (unsigned b = 0; b < width; ++b)
        out[b] = static_cast<std::uint8_t>(v >> (8 * b));
}

inline std::uint64_t decode_le(const std::uint8_t* in, unsigned width) {
    std::uint64_t v = 0;
    for (unsigned b = 0; b < width; ++b)
        v |= std::uint64_t{in[b]} << (8 * b);
    return v;
}

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw IoError("cannot open " + path.string());
    return f;
}

inline std::size_t buffer_elements(std::size_t buffer_bytes, unsigned width) {
    return std::max<std::size_t>(1, buffer_bytes / width);
}

}  // namespace detail

enum class Direction { Forward, Backward };

/// Appends fixed-width little-endian unsigned integers to a file.
class IntWriter {
public:
    IntWriter(const std::filesystem::path& path, unsigned width,
              std::size_t buffer_bytes = stream_buffer_bytes())
        : path_(path), width_(width) {
        check_width(width);
        file_ = detail::open_file(path, "wb");
        buffer_.resize(detail::buffer_elements(buffer_bytes, width) * width);
    }

    IntWriter(const IntWriter&) = delete;
    IntWriter& operator=(const IntWriter&) = delete;
    IntWriter(IntWriter&&) noexcept = default;
    IntWriter& operator=(IntWriter&&) noexcept = default;

    ~IntWriter() {
        if (file_) {
            try {
                close();
            } catch (...) {
            }
        }
    }

    void push(std::uint64_t v) {
        if (v > max_value_for_width(width_))
            throw ValidationError("value " + std::to_string(v) + " overflows width " +
                                  std::to_string(width_) + " in " + path_.string());
        encode_le(v, width_, buffer_.data() + fill_);
        fill_ += width_;
        peak_ = std::max(peak_, fill_);
        ++count_;
        if (fill_ == buffer_.size())
            flush();
    }

    template <class Range>
    void push_all(const Range& values) {
        for (auto v : values)
            push(static_cast<std::uint64_t>(v));
    }

    void close() {
        if (!file_)
            return;
        flush();
        std::FILE* f = file_.release();
        if (std::fclose(f) != 0)
            throw IoError("failed closing " + path_.string());
    }

    std::uint64_t size() const { return count_; }
    unsigned width() const { return width_; }
    std::size_t buffer_capacity_bytes() const { return buffer_.size(); }
    std::size_t peak_buffered_bytes() const { return peak_; }

private:
    void flush() {
        if (fill_ == 0)
            return;
        if (std::fwrite(buffer_.data(), 1, fill_, file_.get()) != fill_)
            throw IoError("write failed on " + path_.string());
        fill_ = 0;
    }

    std::filesystem::path path_;
    unsigned width_;
    detail::FilePtr file_;
    std::vector<std::uint8_t> buffer_;
    std::size_t fill_ = 0;
    std::size_t peak_ = 0;
    std::uint64_t count_ = 0;
};

/// Streams fixed-width little-endian unsigned integers from a file, either
/// front to back or back to front. Only one buffer block is resident at a time.
class IntReader {
public:
    IntReader(const std::filesystem::path& path, unsigned width, Direction dir = Direction::Forward,
              std::size_t buffer_bytes = stream_buffer_bytes())
        : path_(path), width_(width), dir_(dir) {
        check_width(width);
        std::error_code ec;
        auto bytes = std::filesystem::file_size(path, ec);
        if (ec)
            throw IoError("cannot stat " + path.string());
        if (bytes % width != 0)
            throw IoError("truncated file " + path.string() + ": " + std::to_string(bytes) +
                          " bytes is not a multiple of width " + std::to_string(width));
        length_ = bytes / width;
        file_ = detail::open_file(path, "rb");
        block_elems_ = detail::buffer_elements(buffer_bytes, width);
        buffer_.resize(std::min<std::uint64_t>(block_elems_, std::max<std::uint64_t>(length_, 1)) * width);
        remaining_ = length_;
        next_file_elem_ = dir == Direction::Forward ? 0 : length_;
    }

    std::uint64_t length() const { return length_; }
    std::uint64_t consumed() const { return length_ - remaining_; }
    bool has_next() const { return remaining_ > 0; }

    std::uint64_t peek() {
        if (!has_next())
            throw IoError("read past end of " + path_.string());
        if (cursor_ == fill_)
            refill();
        return decode_le(buffer_.data() + cursor_ * width_, width_);
    }

    std::uint64_t next() {
        std::uint64_t v = peek();
        ++cursor_;
        --remaining_;
        return v;
    }

    unsigned width() const { return width_; }
    std::size_t buffer_capacity_bytes() const { return buffer_.size(); }
    std::size_t peak_buffered_bytes() const { return peak_; }

private:
    void refill() {
        std::uint64_t unread_in_file = dir_ == Direction::Forward ? length_ - next_file_elem_ : next_file_elem_;
        std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(block_elems_, unread_in_file));
        if (n == 0)
            throw IoError("unexpected end of " + path_.string());
        std::uint64_t start = dir_ == Direction::Forward ? next_file_elem_ : next_file_elem_ - n;
        if (std::fseek(file_.get(), static_cast<long>(start * width_), SEEK_SET) != 0)
            throw IoError("seek failed on " + path_.string());
        if (std::fread(buffer_.data(), width_, n, file_.get()) != n)
            throw IoError("short read on " + path_.string());
        if (dir_ == Direction::Backward) {
            // Reverse element order inside the block so the cursor always moves up.
            for (std::size_t a = 0, b = n - 1; a < b; ++a, --b)
                std::swap_ranges(buffer_.begin() + a * width_, buffer_.begin() + (a + 1) * width_,
                                 buffer_.begin() + b * width_);
            next_file_elem_ -= n;
        } else {
            next_file_elem_ += n;
        }
        fill_ = n;
        cursor_ = 0;
        peak_ = std::max(peak_, n * width_);
    }

    std::filesystem::path path_;
    unsigned width_;
    Direction dir_;
    detail::FilePtr file_;
    std::uint64_t length_ = 0;
    std::uint64_t remaining_ = 0;
    std::uint64_t next_file_elem_ = 0;
    std::size_t block_elems_ = 0;
    std::vector<std::uint8_t> buffer_;
    std::size_t fill_ = 0;
    std::size_t cursor_ = 0;
    std::size_t peak_ = 0;
};

/// Forward reader over an lcp file of N entries that presents the
/// conceptual array lcp[1..N+1]: -1 at rows 1 and N+1, stored values elsewhere.
class SentinelLcpReader {
public:
    SentinelLcpReader(const std::filesystem::path& path, unsigned width) : inner_(path, width) {}

    std::uint64_t rows() const { return inner_.length(); }
    /// Row index (1-based) of the value the next call to next() returns.
    std::uint64_t position() const { return position_; }
    bool has_next() const { return position_ <= inner_.length() + 1; }

    std::int64_t next() {
        std::uint64_t row = position_++;
        if (row == inner_.length() + 1)
            return -1;
        if (row > inner_.length() + 1)
            throw IoError("lcp read past virtual row N+1");
        std::uint64_t stored = inner_.next();
        return row == 1 ? -1 : static_cast<std::int64_t>(stored);
    }

    const IntReader& inner() const { return inner_; }

private:
    IntReader inner_;
    std::uint64_t position_ = 1;
};

template <class Range>
void write_ints(const std::filesystem::path& path, unsigned width, const Range& values) {
    IntWriter w(path, width);
    w.push_all(values);
    w.close();
}

inline std::vector<std::uint64_t> read_ints(const std::filesystem::path& path, unsigned width,
                                            Direction dir = Direction::Forward) {
    IntReader r(path, width, dir);
    std::vector<std::uint64_t> out;
    out.reserve(r.length());
    while (r.has_next())
        out.push_back(r.next());
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline constexpr std::string_view kDnaAlphabet = "ACGT";

/// Parses FASTA text. Sequence symbols are upper-cased and must belong to
/// `alphabet`; record names are the first whitespace-delimited header token.
inline std::vector<SequenceRecord> parse_fasta(std::string_view bytes,
                                               std::string_view alphabet = kDnaAlphabet) {
    bool allowed[256] = {};
    for (unsigned char c : alphabet)
        allowed[c] = true;

    std::vector<SequenceRecord> records;
    std::size_t line_no = 0;
    std::size_t header_line = 0;
    auto close_record = [&] {
        if (!records.empty() && records.back().text.empty())
            throw ValidationError("FASTA: empty sequence '" + records.back().name + "' (header on line " +
                                  std::to_string(header_line) + ")");
    };

    std::size_t start = 0;
    while (start < bytes.size()) {
        std::size_t end = bytes.find('\n', start);
        if (end == std::string_view::npos)
            end = bytes.size();
        std::string_view line = bytes.substr(start, end - start);
        start = end + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.remove_suffix(1);
        if (line.empty())
            continue;

        if (line.front() == '>') {
            close_record();
            std::string_view header = line.substr(1);
            std::size_t b = header.find_first_not_of(" \t");
            std::size_t e = header.find_first_of(" \t", b);
            if (b == std::string_view::npos)
                throw ValidationError("FASTA: header without a name on line " + std::to_string(line_no));
            SequenceRecord r;
            r.name = std::string(header.substr(b, e == std::string_view::npos ? e : e - b));
            r.color = static_cast<Color>(records.size());
            records.push_back(std::move(r));
            header_line = line_no;
            continue;
        }
        if (records.empty())
            throw ValidationError("FASTA: sequence data before the first header on line " +
                                  std::to_string(line_no));
        auto& text = records.back().text;
        for (std::size_t col = 0; col < line.size(); ++col) {
            unsigned char c = static_cast<unsigned char>(line[col]);
            if (c >= 'a' && c <= 'z')
                c = static_cast<unsigned char>(c - 'a' + 'A');
            if (!allowed[c] || c == kEndMarker)
                throw ValidationError("FASTA: illegal symbol '" + std::string(1, line[col]) + "' on line " +
                                      std::to_string(line_no) + ", column " + std::to_string(col + 1));
            text.push_back(static_cast<char>(c));
        }
    }
    if (records.empty())
        throw ValidationError("FASTA: no records found");
    close_record();
    return records;
}

}  // namespace clcp
