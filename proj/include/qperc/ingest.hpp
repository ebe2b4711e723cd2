#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qperc/common.hpp"
#include "qperc/encode.hpp"
#include "qperc/learn.hpp"

namespace qperc {

// IDX containers (big-endian, unsigned byte payloads).
struct IdxImages {
    std::uint32_t rows = 0, cols = 0;
    std::vector<std::vector<std::uint8_t>> images;  // rows * cols pixels each, row-major
};

IdxImages parse_idx_images(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels);

// Whole file, transparently gunzipped when compressed. Throws FileNotFound.
std::vector<std::uint8_t> read_file_bytes(const std::string& path);

struct ImageDataset {
    IdxImages images;
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return labels.size(); }
};

ImageDataset load_image_dataset(const std::string& images_path, const std::string& labels_path);

struct Pca {
    RVec mean;
    RMat components;   // k x d, orthonormal rows, largest-magnitude entry positive
    RVec variances;    // top-k covariance eigenvalues, descending
    RMat projections;  // samples x k
};

// Mean-centred PCA of the rows of X.
Pca pca_top_k(const RMat& X, std::size_t k);

struct QFashionDataset {
    RMat components;  // 8 x 784
    std::vector<RVec> train_x, test_x;  // PCA coordinates
    std::vector<int> train_y, test_y;   // 1 for the second class
    std::vector<std::size_t> train_source, test_source;  // rows of the raw dataset

    Sample encoded_train() const;  // amplitude states on 3 qubits
    Sample encoded_test() const;
    Sample raw_train() const;  // PCA coordinates as real states
    Sample raw_test() const;
};

struct QFashionOptions {
    int negative_class = 0;  // T-shirt/top
    int positive_class = 3;  // dress
    std::size_t train = 250;
    std::size_t test = 50;
    std::size_t components = 8;
    std::uint64_t seed = 0;
};

QFashionDataset build_qfashion(const ImageDataset& raw, const QFashionOptions& opt = {});

// Encode-module CSV with a label column; rows of the training set then the test set.
void write_qfashion(std::ostream& os, const QFashionDataset& q);

} // namespace qperc
