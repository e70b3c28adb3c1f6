#include "qsec/idx.hpp"

#include <zlib.h>

#include <fstream>

namespace qsec::data {

std::size_t dtype_size(IdxDtype dtype) {
    switch (dtype) {
        case IdxDtype::kU8:
        case IdxDtype::kI8:
            return 1;
        case IdxDtype::kI16:
            return 2;
        case IdxDtype::kI32:
        case IdxDtype::kF32:
            return 4;
        case IdxDtype::kF64:
            return 8;
    }
    throw IdxError(IdxErrorKind::kBadMagic, "unknown dtype code");
}

std::uint64_t IdxTensor::element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

IdxTensor parse_idx(const std::uint8_t* bytes, std::size_t size) {
    if (size < 4) throw IdxError(IdxErrorKind::kTruncated, "header shorter than 4 bytes");
    if (bytes[0] != 0 || bytes[1] != 0) {
        throw IdxError(IdxErrorKind::kBadMagic, "magic bytes 0-1 must be zero");
    }
    const auto code = bytes[2];
    switch (code) {
        case 0x08: case 0x09: case 0x0B: case 0x0C: case 0x0D: case 0x0E:
            break;
        default:
            throw IdxError(IdxErrorKind::kBadMagic, "unknown dtype code in magic");
    }
    const auto rank = bytes[3];
    if (rank == 0) throw IdxError(IdxErrorKind::kBadRank, "rank 0 tensor");

    const std::size_t header = 4 + 4 * static_cast<std::size_t>(rank);
    if (size < header) throw IdxError(IdxErrorKind::kTruncated, "dimension list truncated");

    IdxTensor t;
    t.dtype = static_cast<IdxDtype>(code);
    t.dims.resize(rank);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::uint8_t* p = bytes + 4 + 4 * i;
        const std::uint32_t d = (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                                (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
        t.dims[i] = d;
        count *= d;
        if (count > (1ull << 40)) {  // guards the multiply; real files are far smaller
            throw IdxError(IdxErrorKind::kSizeMismatch, "declared tensor absurdly large");
        }
    }
    const std::uint64_t expected = count * dtype_size(t.dtype);
    const std::uint64_t actual = size - header;
    if (actual < expected) {
        throw IdxError(IdxErrorKind::kTruncated, "payload shorter than header promises");
    }
    if (actual > expected) {
        throw IdxError(IdxErrorKind::kSizeMismatch, "trailing bytes after payload");
    }
    t.payload.assign(bytes + header, bytes + size);
    return t;
}

IdxTensor parse_idx(const std::vector<std::uint8_t>& bytes) {
    return parse_idx(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> gunzip(const std::uint8_t* bytes, std::size_t size) {
    z_stream zs{};
    // 16 + MAX_WBITS: gzip wrapper
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
        throw IdxError(IdxErrorKind::kBadGzip, "inflateInit failed");
    }
    std::vector<std::uint8_t> out;
    out.reserve(size * 4);
    std::uint8_t buf[1 << 16];
    zs.next_in = const_cast<Bytef*>(bytes);
    zs.avail_in = static_cast<uInt>(size);
    int rc = Z_OK;
    do {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw IdxError(IdxErrorKind::kBadGzip, "corrupt gzip stream");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
    inflateEnd(&zs);
    if (rc != Z_STREAM_END) throw IdxError(IdxErrorKind::kBadGzip, "gzip stream ended early");
    return out;
}

IdxTensor read_idx_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IdxError(IdxErrorKind::kIo, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (!f.good() && !f.eof()) throw IdxError(IdxErrorKind::kIo, "read failed for " + path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
        bytes = gunzip(bytes.data(), bytes.size());
    }
    return parse_idx(bytes);
}

}  // namespace qsec::data
