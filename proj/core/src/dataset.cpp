#include "qsec/dataset.hpp"

#include "binio.hpp"

#include <fstream>
#include <stdexcept>

namespace qsec::data {

namespace {
constexpr std::uint32_t kCacheMagic = 0x51444154;  // "QDAT"
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

Dataset preprocess(const IdxTensor& images, const IdxTensor& labels, std::string split) {
    if (images.dtype != IdxDtype::kU8 || images.dims.size() != 3) {
        throw std::invalid_argument("preprocess: expected a rank-3 u8 image tensor");
    }
    if (labels.dtype != IdxDtype::kU8 || labels.dims.size() != 1) {
        throw std::invalid_argument("preprocess: expected a rank-1 u8 label tensor");
    }
    const auto n = images.dims[0];
    if (labels.dims[0] != n) {
        throw std::invalid_argument("preprocess: image and label counts differ");
    }
    const auto pixels = static_cast<Eigen::Index>(images.dims[1]) * images.dims[2];

    Dataset ds;
    ds.split = std::move(split);
    ds.images.resize(pixels, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint8_t* src = images.payload.data() + static_cast<std::size_t>(i) * pixels;
        for (Eigen::Index p = 0; p < pixels; ++p) {
            ds.images(p, i) = static_cast<double>(src[p]) / 127.5 - 1.0;
        }
    }
    ds.labels.assign(labels.payload.begin(), labels.payload.end());
    return ds;
}

Dataset load_dataset(const std::string& images_path, const std::string& labels_path,
                     std::string split) {
    return preprocess(read_idx_file(images_path), read_idx_file(labels_path), std::move(split));
}

void save_dataset_cache(const Dataset& ds, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    detail::write_le(f, kCacheMagic);
    detail::write_le(f, kCacheVersion);
    detail::write_le(f, static_cast<std::uint64_t>(ds.images.rows()));
    detail::write_le(f, static_cast<std::uint64_t>(ds.images.cols()));
    for (Eigen::Index c = 0; c < ds.images.cols(); ++c) {
        for (Eigen::Index r = 0; r < ds.images.rows(); ++r) detail::write_le(f, ds.images(r, c));
    }
    detail::write_le(f, static_cast<std::uint64_t>(ds.labels.size()));
    f.write(reinterpret_cast<const char*>(ds.labels.data()),
            static_cast<std::streamsize>(ds.labels.size()));
    detail::write_le(f, static_cast<std::uint32_t>(ds.split.size()));
    f.write(ds.split.data(), static_cast<std::streamsize>(ds.split.size()));
    if (!f) throw std::runtime_error("write failed for " + path);
}

Dataset load_dataset_cache(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    if (detail::read_le<std::uint32_t>(f) != kCacheMagic) {
        throw std::runtime_error(path + ": not a dataset cache");
    }
    if (detail::read_le<std::uint32_t>(f) != kCacheVersion) {
        throw std::runtime_error(path + ": unsupported cache version");
    }
    const auto rows = detail::read_le<std::uint64_t>(f);
    const auto cols = detail::read_le<std::uint64_t>(f);
    Dataset ds;
    ds.images.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t c = 0; c < cols; ++c) {
        for (std::uint64_t r = 0; r < rows; ++r) {
            ds.images(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                detail::read_le<double>(f);
        }
    }
    const auto n_labels = detail::read_le<std::uint64_t>(f);
    ds.labels.resize(n_labels);
    f.read(reinterpret_cast<char*>(ds.labels.data()), static_cast<std::streamsize>(n_labels));
    const auto tag_len = detail::read_le<std::uint32_t>(f);
    ds.split.resize(tag_len);
    f.read(ds.split.data(), tag_len);
    if (!f) throw std::runtime_error("unexpected end of file in " + path);
    return ds;
}

Dataset head(const Dataset& ds, Eigen::Index n) {
    n = std::min(n, ds.size());
    Dataset out;
    out.images = ds.images.leftCols(n);
    out.labels.assign(ds.labels.begin(), ds.labels.begin() + n);
    out.split = ds.split;
    return out;
}

}  // namespace qsec::data
