#include "qperc/prior.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "qperc/boolean.hpp"

namespace qperc {

double PriorHistogram::probability(const std::string& bits) const
{
    if (samples == 0)
        return 0.0;
    auto it = counts.find(bits);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(samples);
}

void PriorHistogram::merge(const PriorHistogram& other)
{
    samples += other.samples;
    for (const auto& [k, v] : other.counts)
        counts[k] += v;
}

namespace {

// One chunk of draws. The first N columns of a Haar unitary on 2N dimensions
// form a Haar isometry V = G R^{-1}, G a complex Gaussian 2N x N matrix and
// R its upper Cholesky factor. With x = R y the output is
// |G1 y|^2 - |G2 y|^2 (top and bottom halves of G), so only a triangular
// solve is needed per draw.
void sample_chunk(const CMat& X, const std::vector<std::size_t>& input_of_col, std::size_t inputs,
                  std::uint64_t draws, Rng rng, std::uint64_t first_draw,
                  std::unordered_map<std::string, std::uint64_t>& out)
{
    const Eigen::Index N = X.rows();
    std::normal_distribution<double> g;
    CMat G(2 * N, N);
    std::string key(inputs, '0');
    for (std::uint64_t d = 0; d < draws; ++d) {
        for (Eigen::Index j = 0; j < N; ++j)
            for (Eigen::Index i = 0; i < 2 * N; ++i) {
                const double re = g(rng);
                G(i, j) = cplx(re, g(rng));
            }
        Eigen::LLT<CMat> llt(G.adjoint() * G);
        if ((first_draw + d) % 1000 == 0) {
            CMat V = llt.matrixU().solve<Eigen::OnTheRight>(G);
            if ((V.adjoint() * V - CMat::Identity(N, N)).cwiseAbs().maxCoeff() > 1e-9)
                throw Error("sampled isometry lost orthonormality");
        }
        CMat Y = llt.matrixU().solve(X);
        CMat top = G.topRows(N) * Y, bottom = G.bottomRows(N) * Y;
        std::fill(key.begin(), key.end(), '0');
        for (Eigen::Index c = 0; c < X.cols(); ++c)
            if (top.col(c).squaredNorm() - bottom.col(c).squaredNorm() > 0.0)
                key[input_of_col[static_cast<std::size_t>(c)]] = '1';
        ++out[key];
    }
}

} // namespace

PriorHistogram sample_prior(const EncodedDataset& ds, std::uint64_t samples, const PriorOptions& opt)
{
    if (samples == 0)
        throw InvalidArgument("prior sampling needs at least one draw");
    if (ds.qubits == 0)
        throw InvalidArgument("prior sampling needs a quantum encoding");
    const auto N = static_cast<Eigen::Index>(ds.dim());
    CMat X(N, static_cast<Eigen::Index>(ds.size()));
    for (std::size_t c = 0; c < ds.size(); ++c)
        X.col(static_cast<Eigen::Index>(c)) = ds.states[c];
    const std::size_t inputs = std::size_t{1} << ds.n;

    const std::uint64_t chunk = std::max<std::uint64_t>(1, opt.chunk);
    const std::uint64_t chunks = (samples + chunk - 1) / chunk;
    const unsigned workers = std::max(1u, opt.workers);
    std::vector<std::unordered_map<std::string, std::uint64_t>> partial(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            for (std::uint64_t c = w; c < chunks; c += workers) {
                const std::uint64_t begin = c * chunk;
                sample_chunk(X, ds.indices, inputs, std::min(chunk, samples - begin),
                             substream(opt.seed, "prior", c), begin, partial[w]);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    PriorHistogram h;
    h.n = ds.n;
    h.encoding = ds.encoding;
    h.samples = samples;
    h.seed = opt.seed;
    for (const auto& p : partial)
        for (const auto& [k, v] : p)
            h.counts[k] += v;
    return h;
}

std::vector<std::pair<std::size_t, double>> rank_plot(const PriorHistogram& hist)
{
    if (hist.counts.empty() || hist.samples == 0)
        throw InvalidArgument("empty histogram");
    std::vector<std::pair<std::string, std::uint64_t>> items(hist.counts.begin(), hist.counts.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t r = 0; r < items.size(); ++r)
        out.emplace_back(r + 1, static_cast<double>(items[r].second) / static_cast<double>(hist.samples));
    return out;
}

std::map<double, double> prior_by_complexity(const PriorHistogram& hist)
{
    std::map<double, double> bins;
    for (const auto& [bits, c] : hist.counts)
        bins[lz_complexity(BooleanFunction::from_string(bits))] += static_cast<double>(c) / static_cast<double>(hist.samples);
    return bins;
}

void write_histogram(std::ostream& os, const PriorHistogram& hist)
{
    os << "# n=" << hist.n << " encoding=" << hist.encoding << " samples=" << hist.samples << " seed=" << hist.seed
       << '\n';
    os << "bitstring,count\n";
    for (const auto& [bits, c] : hist.counts)
        os << bits << ',' << c << '\n';
}

PriorHistogram read_histogram(std::istream& is)
{
    PriorHistogram h;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw ParseError("histogram header missing");
    std::istringstream meta(line.substr(2));
    std::string field;
    bool have_n = false, have_samples = false;
    while (meta >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw ParseError("bad histogram header field: " + field);
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        try {
            if (key == "n") {
                h.n = std::stoi(value);
                have_n = true;
            } else if (key == "encoding") {
                h.encoding = value;
            } else if (key == "samples") {
                h.samples = std::stoull(value);
                have_samples = true;
            } else if (key == "seed") {
                h.seed = std::stoull(value);
            }
        } catch (const std::logic_error&) {
            throw ParseError("bad histogram header value: " + field);
        }
    }
    if (!have_n || !have_samples)
        throw ParseError("histogram header lacks n or samples");
    if (!std::getline(is, line) || line != "bitstring,count")
        throw ParseError("histogram column header missing");
    std::uint64_t total = 0;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma != (std::size_t{1} << h.n))
            throw ParseError("bad histogram row: " + line);
        std::uint64_t c = 0;
        try {
            c = std::stoull(line.substr(comma + 1));
        } catch (const std::logic_error&) {
            throw ParseError("bad histogram count: " + line);
        }
        h.counts[line.substr(0, comma)] += c;
        total += c;
    }
    if (total != h.samples)
        throw ParseError("histogram counts do not sum to the sample total");
    return h;
}

} // namespace qperc
