#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <zlib.h>

#include "qperc/ingest.hpp"

using namespace qperc;

namespace {

std::vector<std::uint8_t> bytes_of(std::initializer_list<int> v)
{
    std::vector<std::uint8_t> b;
    for (int x : v)
        b.push_back(static_cast<std::uint8_t>(x));
    return b;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("qperc_test_" + name);
}

// Synthetic two-class image set: class 0 bright on the left, class 3 on the right.
ImageDataset synthetic_images(std::size_t per_class, std::uint64_t seed)
{
    ImageDataset d;
    d.images.rows = 6;
    d.images.cols = 6;
    Rng rng(seed);
    std::uniform_int_distribution<int> noise(0, 60);
    for (int cls : {0, 3, 5}) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<std::uint8_t> img(36);
            for (int p = 0; p < 36; ++p) {
                const bool left = p % 6 < 3;
                const int base = (cls == 0) == left ? 180 : 20;
                img[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(base + noise(rng));
            }
            d.images.images.push_back(img);
            d.labels.push_back(static_cast<std::uint8_t>(cls));
        }
    }
    return d;
}

} // namespace

TEST_CASE("IDX parsing examples")
{
    auto img = parse_idx_images(bytes_of({0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0x7F}));
    REQUIRE(img.images.size() == 1);
    CHECK(img.rows == 1);
    CHECK(img.images[0] == std::vector<std::uint8_t>{127});

    auto labels = parse_idx_labels(bytes_of({0, 0, 8, 1, 0, 0, 0, 2, 0, 9}));
    CHECK(labels == std::vector<std::uint8_t>{0, 9});

    CHECK_THROWS_AS(parse_idx_labels(bytes_of({0, 0, 8, 3, 0, 0, 0, 0})), ParseError);
    CHECK_THROWS_AS(parse_idx_images(bytes_of({0, 0, 8, 1, 0, 0, 0, 0})), ParseError);
    CHECK_THROWS_AS(parse_idx_labels(bytes_of({0, 0, 8, 1, 0, 0, 0, 3, 1, 2})), ParseError);  // truncated
    CHECK_THROWS_AS(parse_idx_images(bytes_of({0, 0, 8, 3, 0, 0})), ParseError);
}

TEST_CASE("IDX round trip is byte exact")
{
    auto d = synthetic_images(4, 1);
    auto ib = serialize_idx_images(d.images);
    auto lb = serialize_idx_labels(d.labels);
    CHECK(serialize_idx_images(parse_idx_images(ib)) == ib);
    CHECK(serialize_idx_labels(parse_idx_labels(lb)) == lb);

    // Through gzip on disk.
    const auto path = temp_path("images.gz");
    gzFile f = gzopen(path.string().c_str(), "wb");
    REQUIRE(f);
    gzwrite(f, ib.data(), static_cast<unsigned>(ib.size()));
    gzclose(f);
    CHECK(read_file_bytes(path.string()) == ib);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_file_bytes(path.string()), FileNotFound);
}

TEST_CASE("PCA")
{
    SUBCASE("points on a line")
    {
        RMat X(50, 2);
        for (int i = 0; i < 50; ++i) {
            const double t = 0.1 * i - 2.0;
            X.row(i) << 1.0 + 3.0 * t, -2.0 + 4.0 * t;
        }
        auto p = pca_top_k(X, 1);
        CHECK(std::abs(p.components(0, 0) - 0.6) < 1e-12);
        CHECK(std::abs(p.components(0, 1) - 0.8) < 1e-12);
        RMat recon = (p.projections * p.components).rowwise() + p.mean.transpose();
        CHECK((recon - X).squaredNorm() <= 1e-9);
        CHECK_THROWS_AS(pca_top_k(X, 2), InvalidArgument);
    }
    SUBCASE("random data against an SVD oracle")
    {
        Rng rng(4);
        std::normal_distribution<double> g;
        RMat X(200, 12);
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            for (Eigen::Index j = 0; j < X.cols(); ++j)
                X(i, j) = g(rng) * (1.0 + static_cast<double>(j)) + 0.3 * static_cast<double>(j);
        const std::size_t k = 5;
        auto p = pca_top_k(X, k);
        CHECK((p.components * p.components.transpose() - RMat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
        RMat centred = X.rowwise() - X.colwise().mean();
        Eigen::JacobiSVD<RMat> svd(centred);
        RVec oracle = svd.singularValues().array().square() / static_cast<double>(X.rows() - 1);
        CHECK(std::abs(p.variances.sum() - oracle.head(5).sum()) < 1e-9 * oracle.sum());
        const double captured = p.projections.squaredNorm() / static_cast<double>(X.rows() - 1);
        CHECK(std::abs(captured - oracle.head(5).sum()) < 1e-9 * oracle.sum());
        RMat recon = (p.projections * p.components).rowwise() + p.mean.transpose();
        const double residual = (recon - X).squaredNorm() / static_cast<double>(X.rows() - 1);
        CHECK(std::abs(residual - oracle.tail(7).sum()) < 1e-6 * oracle.tail(7).sum());
        // A component vector placed at the mean projects to a unit coordinate.
        RMat probe = (p.components.rowwise() + p.mean.transpose());
        RMat coords = (probe.rowwise() - p.mean.transpose()) * p.components.transpose();
        CHECK((coords - RMat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
        for (Eigen::Index i = 0; i < 5; ++i) {
            Eigen::Index arg = 0;
            p.components.row(i).cwiseAbs().maxCoeff(&arg);
            CHECK(p.components(i, arg) > 0.0);
        }
    }
}

TEST_CASE("Q-FashionMNIST pipeline on synthetic images")
{
    auto raw = synthetic_images(200, 7);
    QFashionOptions opt;
    opt.train = 250;
    opt.test = 50;
    opt.seed = 3;
    auto q = build_qfashion(raw, opt);
    CHECK(q.train_x.size() == 250);
    CHECK(q.test_x.size() == 50);
    CHECK((q.components * q.components.transpose() - RMat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    for (auto src : q.test_source)
        CHECK(std::find(q.train_source.begin(), q.train_source.end(), src) == q.train_source.end());
    for (auto src : q.train_source)
        CHECK((raw.labels[src] == 0 || raw.labels[src] == 3));
    auto enc = q.encoded_train();
    for (const auto& s : enc.x) {
        CHECK(s.size() == 8);
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    }
    auto again = build_qfashion(raw, opt);
    CHECK(again.train_source == q.train_source);
    CHECK(again.train_x[0] == q.train_x[0]);
    std::ostringstream os;
    write_qfashion(os, q);
    CHECK(os.str().rfind("encoding,qubits,n\namplitude,3,8\n", 0) == 0);
    CHECK(os.str().find(",label\n") != std::string::npos);

    opt.train = 500;
    CHECK_THROWS_AS(build_qfashion(raw, opt), InvalidArgument);
    opt.train = 10;
    opt.positive_class = 7;
    CHECK_THROWS_AS(build_qfashion(raw, opt), InvalidArgument);
}
