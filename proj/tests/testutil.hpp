#pragma once
// Shared helpers for the test suites: dataset location and small fixtures.

#include "qsec/dataset.hpp"

#include <cstdlib>
#include <string>

#ifndef QSEC_DATA_DIR
#define QSEC_DATA_DIR "data/mnist"
#endif

namespace testutil {

inline std::string mnist_dir() {
    if (const char* env = std::getenv("QSEC_MNIST_DIR")) return env;
    return QSEC_DATA_DIR;
}

inline qsec::data::Dataset load_test_split() {
    const std::string dir = mnist_dir();
    return qsec::data::load_dataset(dir + "/t10k-images-idx3-ubyte.gz",
                                    dir + "/t10k-labels-idx1-ubyte.gz", "test");
}

inline qsec::data::Dataset load_train_split() {
    const std::string dir = mnist_dir();
    return qsec::data::load_dataset(dir + "/train-images-idx3-ubyte.gz",
                                    dir + "/train-labels-idx1-ubyte.gz", "train");
}

}  // namespace testutil
