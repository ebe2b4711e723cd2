#include "qperc/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>

#include <zlib.h>

namespace qperc {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t at)
{
    if (at + 4 > b.size())
        throw ParseError("IDX header truncated");
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
           std::uint32_t{b[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& b, std::uint32_t v)
{
    for (int s = 24; s >= 0; s -= 8)
        b.push_back(static_cast<std::uint8_t>(v >> s));
}

} // namespace

IdxImages parse_idx_images(const std::vector<std::uint8_t>& bytes)
{
    if (read_be32(bytes, 0) != kImageMagic)
        throw ParseError("not an IDX image file (bad magic)");
    const std::uint32_t count = read_be32(bytes, 4);
    IdxImages out;
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);
    const std::size_t pixels = std::size_t{out.rows} * out.cols;
    if (bytes.size() != 16 + pixels * count)
        throw ParseError("IDX image payload size does not match its header");
    out.images.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto begin = bytes.begin() + static_cast<std::ptrdiff_t>(16 + i * pixels);
        out.images.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(pixels));
    }
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes)
{
    if (read_be32(bytes, 0) != kLabelMagic)
        throw ParseError("not an IDX label file (bad magic)");
    const std::uint32_t count = read_be32(bytes, 4);
    if (bytes.size() != 8 + std::size_t{count})
        throw ParseError("IDX label payload size does not match its header");
    return {bytes.begin() + 8, bytes.end()};
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images)
{
    std::vector<std::uint8_t> b;
    write_be32(b, kImageMagic);
    write_be32(b, static_cast<std::uint32_t>(images.images.size()));
    write_be32(b, images.rows);
    write_be32(b, images.cols);
    for (const auto& img : images.images) {
        if (img.size() != std::size_t{images.rows} * images.cols)
            throw DimensionMismatch("image size differs from the declared grid");
        b.insert(b.end(), img.begin(), img.end());
    }
    return b;
}

std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels)
{
    std::vector<std::uint8_t> b;
    write_be32(b, kLabelMagic);
    write_be32(b, static_cast<std::uint32_t>(labels.size()));
    b.insert(b.end(), labels.begin(), labels.end());
    return b;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path)
{
    if (!std::ifstream(path, std::ios::binary))
        throw FileNotFound("cannot open " + path);
    // gzread passes uncompressed files through unchanged.
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f)
        throw FileNotFound("cannot open " + path);
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> buf(1 << 16);
    int got = 0;
    while ((got = gzread(f, buf.data(), static_cast<unsigned>(buf.size()))) > 0)
        out.insert(out.end(), buf.begin(), buf.begin() + got);
    const bool failed = got < 0;
    gzclose(f);
    if (failed)
        throw ParseError("corrupt compressed stream in " + path);
    return out;
}

ImageDataset load_image_dataset(const std::string& images_path, const std::string& labels_path)
{
    ImageDataset d;
    d.images = parse_idx_images(read_file_bytes(images_path));
    d.labels = parse_idx_labels(read_file_bytes(labels_path));
    if (d.images.images.size() != d.labels.size())
        throw ParseError("image and label counts differ");
    return d;
}

Pca pca_top_k(const RMat& X, std::size_t k)
{
    const Eigen::Index K = static_cast<Eigen::Index>(k);
    if (k == 0 || K > X.cols() || static_cast<Eigen::Index>(k) > X.rows())
        throw InvalidArgument("PCA needs 1 <= k <= min(samples, features)");
    Pca p;
    p.mean = X.colwise().mean().transpose();
    RMat centred = X.rowwise() - p.mean.transpose();
    RMat cov = (centred.transpose() * centred) / static_cast<double>(std::max<Eigen::Index>(X.rows() - 1, 1));
    Eigen::SelfAdjointEigenSolver<RMat> es(cov);
    const Eigen::Index d = cov.rows();
    const double top = std::max(es.eigenvalues()[d - 1], 0.0);
    if (top == 0.0 || es.eigenvalues()[d - K] <= 1e-12 * top)
        throw InvalidArgument("k exceeds the rank of the data");
    p.components.resize(K, d);
    p.variances.resize(K);
    for (Eigen::Index i = 0; i < K; ++i) {
        RVec v = es.eigenvectors().col(d - 1 - i);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0)
            v = -v;
        p.components.row(i) = v.transpose();
        p.variances[i] = es.eigenvalues()[d - 1 - i];
    }
    p.projections = centred * p.components.transpose();
    return p;
}

namespace {

Sample to_sample(const std::vector<RVec>& xs, const std::vector<int>& ys, bool amplitude)
{
    Sample s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s.x.push_back(amplitude ? amplitude_encode(xs[i]) : CVec(xs[i].cast<cplx>()));
        s.y.push_back(ys[i]);
    }
    return s;
}

} // namespace

Sample QFashionDataset::encoded_train() const { return to_sample(train_x, train_y, true); }
Sample QFashionDataset::encoded_test() const { return to_sample(test_x, test_y, true); }
Sample QFashionDataset::raw_train() const { return to_sample(train_x, train_y, false); }
Sample QFashionDataset::raw_test() const { return to_sample(test_x, test_y, false); }

QFashionDataset build_qfashion(const ImageDataset& raw, const QFashionOptions& opt)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (raw.labels[i] == opt.negative_class || raw.labels[i] == opt.positive_class)
            rows.push_back(i);
    std::size_t positives = 0;
    for (auto r : rows)
        positives += raw.labels[r] == opt.positive_class ? 1 : 0;
    if (positives == 0 || positives == rows.size() || rows.size() < opt.train + opt.test)
        throw InvalidArgument("not enough images of the two requested classes");

    const auto d = static_cast<Eigen::Index>(std::size_t{raw.images.rows} * raw.images.cols);
    RMat X(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            X(static_cast<Eigen::Index>(i), j) = raw.images.images[rows[i]][static_cast<std::size_t>(j)] / 255.0;
    Pca pca = pca_top_k(X, opt.components);

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (pca.projections.row(static_cast<Eigen::Index>(i)).norm() > 0.0)
            usable.push_back(i);
    if (usable.size() < opt.train + opt.test)
        throw InvalidArgument("not enough encodable images after projection");
    Rng rng = substream(opt.seed, "qfashion");
    std::shuffle(usable.begin(), usable.end(), rng);

    QFashionDataset q;
    q.components = pca.components;
    auto take = [&](std::size_t begin, std::size_t count, std::vector<RVec>& xs, std::vector<int>& ys,
                    std::vector<std::size_t>& src) {
        std::vector<std::size_t> pick(usable.begin() + static_cast<std::ptrdiff_t>(begin),
                                      usable.begin() + static_cast<std::ptrdiff_t>(begin + count));
        std::sort(pick.begin(), pick.end());
        for (auto i : pick) {
            xs.push_back(pca.projections.row(static_cast<Eigen::Index>(i)).transpose());
            ys.push_back(raw.labels[rows[i]] == opt.positive_class ? 1 : 0);
            src.push_back(rows[i]);
        }
    };
    take(0, opt.train, q.train_x, q.train_y, q.train_source);
    take(opt.train, opt.test, q.test_x, q.test_y, q.test_source);
    return q;
}

void write_qfashion(std::ostream& os, const QFashionDataset& q)
{
    EncodedDataset ds;
    ds.encoding = "amplitude";
    ds.qubits = ilog2(next_pow2(static_cast<std::size_t>(q.components.rows())));
    ds.n = static_cast<int>(q.components.rows());
    std::vector<int> labels;
    for (std::size_t i = 0; i < q.train_x.size(); ++i) {
        ds.indices.push_back(q.train_source[i]);
        ds.states.push_back(amplitude_encode(q.train_x[i]));
        labels.push_back(q.train_y[i]);
    }
    for (std::size_t i = 0; i < q.test_x.size(); ++i) {
        ds.indices.push_back(q.test_source[i]);
        ds.states.push_back(amplitude_encode(q.test_x[i]));
        labels.push_back(q.test_y[i]);
    }
    write_dataset(os, ds, &labels);
}

} // namespace qperc
