#pragma once
// IDX container parsing (the MNIST on-disk format). The parser is total:
// malformed input raises IdxError with a specific kind, never anything else.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsec::data {

enum class IdxErrorKind {
    kBadMagic,      // first two bytes nonzero or unknown dtype code
    kBadRank,       // rank 0 or header/rank disagreement
    kTruncated,     // payload shorter than the header promises
    kSizeMismatch,  // payload longer than the header promises
    kBadGzip,       // gzip stream failed to inflate
    kIo,            // file could not be read
};

struct IdxError : std::runtime_error {
    IdxErrorKind kind;
    IdxError(IdxErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// IDX dtype codes from the header's third byte.
enum class IdxDtype : std::uint8_t {
    kU8 = 0x08,
    kI8 = 0x09,
    kI16 = 0x0B,
    kI32 = 0x0C,
    kF32 = 0x0D,
    kF64 = 0x0E,
};

std::size_t dtype_size(IdxDtype dtype);

struct IdxTensor {
    IdxDtype dtype = IdxDtype::kU8;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> payload;  // row-major, big-endian elements as stored

    std::uint64_t element_count() const;
};

// Exact decode of an IDX byte buffer. Header layout: bytes 0-1 zero, byte 2
// dtype code, byte 3 rank, then rank big-endian u32 dims, then payload of
// product(dims) * dtype_size bytes.
IdxTensor parse_idx(const std::uint8_t* bytes, std::size_t size);
IdxTensor parse_idx(const std::vector<std::uint8_t>& bytes);

// Reads a file and parses it; gzip-compressed files (1f 8b) are inflated
// transparently.
IdxTensor read_idx_file(const std::string& path);

// zlib-backed gzip inflate, exposed for the file reader and tests.
std::vector<std::uint8_t> gunzip(const std::uint8_t* bytes, std::size_t size);

}  // namespace qsec::data
