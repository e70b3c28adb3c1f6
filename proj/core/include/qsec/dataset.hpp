#pragma once
// Preprocessed dataset container: flattened images scaled to [-1, 1] plus
// labels, with a versioned binary cache format.

#include "qsec/idx.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace qsec::data {

struct Dataset {
    // one column per image, pixel_count rows, every entry in [-1, 1]
    Eigen::MatrixXd images;
    std::vector<std::uint8_t> labels;
    std::string split;  // "train", "test", ...

    Eigen::Index size() const { return images.cols(); }
    Eigen::VectorXd image(Eigen::Index i) const { return images.col(i); }
};

// Flattens a rank-3 u8 image tensor and maps pixels affinely, p/127.5 - 1,
// so 0 -> -1 and 255 -> +1 exactly. Throws std::invalid_argument for wrong
// rank or dtype.
Dataset preprocess(const IdxTensor& images, const IdxTensor& labels, std::string split);

// Convenience: read (optionally gzipped) IDX image/label files and preprocess.
Dataset load_dataset(const std::string& images_path, const std::string& labels_path,
                     std::string split);

// Binary cache (magic, version, dims, f64 pixels, u8 labels, split tag).
void save_dataset_cache(const Dataset& ds, const std::string& path);
Dataset load_dataset_cache(const std::string& path);

// First n images of ds (deterministic subset used by sweeps).
Dataset head(const Dataset& ds, Eigen::Index n);

}  // namespace qsec::data
