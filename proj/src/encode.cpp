#include "qperc/encode.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace qperc {

EncodingSpec EncodingSpec::parse(const std::string& name, std::uint64_t seed)
{
    EncodingSpec s;
    s.seed = seed;
    if (name == "amplitude" || name == "amplitude01")
        s.kind = Encoding::Amplitude01;
    else if (name == "amplitude-pm1" || name == "amplitudePM1")
        s.kind = Encoding::AmplitudePm1;
    else if (name == "basis")
        s.kind = Encoding::Basis;
    else if (name == "zz")
        s.kind = Encoding::ZZ;
    else if (name == "rt-n" || name == "rt") {
        s.kind = Encoding::RT;
        s.rt_out = 0;
    } else if (name == "rt-2n") {
        s.kind = Encoding::RT;
        s.rt_out = std::size_t(-1);
    } else if (name == "classical")
        s.kind = Encoding::Classical;
    else if (name == "classical-normalized")
        s.kind = Encoding::ClassicalNormalized;
    else if (name == "parity-augmented")
        s.kind = Encoding::ParityAugmented;
    else
        throw InvalidArgument("unknown encoding '" + name + "'");
    return s;
}

std::string EncodingSpec::name() const
{
    switch (kind) {
    case Encoding::Amplitude01: return "amplitude";
    case Encoding::AmplitudePm1: return "amplitude-pm1";
    case Encoding::Basis: return "basis";
    case Encoding::ZZ: return "zz";
    case Encoding::RT: return rt_out == std::size_t(-1) ? "rt-2n" : "rt-n";
    case Encoding::Classical: return "classical";
    case Encoding::ClassicalNormalized: return "classical-normalized";
    case Encoding::ParityAugmented: return "parity-augmented";
    }
    return "?";
}

bool EncodingSpec::quantum() const
{
    return kind != Encoding::Classical && kind != Encoding::ClassicalNormalized &&
           kind != Encoding::ParityAugmented;
}

RVec to_real(const std::vector<std::uint8_t>& x)
{
    RVec v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = x[i];
    return v;
}

CVec amplitude_encode(const RVec& x)
{
    const double norm = x.norm();
    if (norm == 0.0)
        throw UnencodableOrigin();
    CVec s = CVec::Zero(static_cast<Eigen::Index>(next_pow2(static_cast<std::size_t>(x.size()))));
    s.head(x.size()) = (x / norm).cast<cplx>();
    return s;
}

CVec amplitude_encode_pm1(const std::vector<std::uint8_t>& x)
{
    return amplitude_encode(2.0 * to_real(x) - RVec::Ones(static_cast<Eigen::Index>(x.size())));
}

CVec basis_encode(const std::vector<std::uint8_t>& x)
{
    CVec s = CVec::Zero(Eigen::Index{1} << x.size());
    s[static_cast<Eigen::Index>(input_to_index(x))] = 1.0;
    return s;
}

namespace {

// In-place H^{(x)n} on a length-2^n vector.
void hadamard_all(CVec& v)
{
    const Eigen::Index len = v.size();
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index h = 1; h < len; h <<= 1)
        for (Eigen::Index i = 0; i < len; i += 2 * h)
            for (Eigen::Index j = i; j < i + h; ++j) {
                cplx a = v[j], b = v[j + h];
                v[j] = r * (a + b);
                v[j + h] = r * (a - b);
            }
}

} // namespace

CVec zz_encode(const RVec& x)
{
    const int n = static_cast<int>(x.size());
    const Eigen::Index len = Eigen::Index{1} << n;
    CVec phase(len);
    for (Eigen::Index idx = 0; idx < len; ++idx) {
        double phi = 0.0;
        for (int k = 0; k < n; ++k) {
            const double zk = ((idx >> (n - 1 - k)) & 1) ? -1.0 : 1.0;
            phi += x[k] * zk;
            for (int l = k + 1; l < n; ++l) {
                const double zl = ((idx >> (n - 1 - l)) & 1) ? -1.0 : 1.0;
                phi += (std::numbers::pi - x[k]) * (std::numbers::pi - x[l]) * zk * zl;
            }
        }
        phase[idx] = std::polar(1.0, phi);
    }
    CVec s = CVec::Zero(len);
    s[0] = 1.0;
    for (int rep = 0; rep < 2; ++rep) {
        hadamard_all(s);
        s = s.cwiseProduct(phase);
    }
    return s;
}

CVec sqrt_amplitude_encode(const RVec& x)
{
    if ((x.array() < 0.0).any())
        throw InvalidArgument("sqrt-amplitude encoding needs nonnegative entries");
    if (std::abs(x.sum() - 1.0) > 1e-9)
        throw InvalidArgument("sqrt-amplitude encoding needs unit L1 norm");
    CVec s = CVec::Zero(static_cast<Eigen::Index>(next_pow2(static_cast<std::size_t>(x.size()))));
    s.head(x.size()) = x.cwiseSqrt().cast<cplx>();
    return s;
}

RVec parity_augment_encode(const std::vector<std::uint8_t>& x)
{
    const auto n = static_cast<Eigen::Index>(x.size());
    RVec v = RVec::Zero(2 * n + 1);
    v.head(n) = to_real(x);
    v[n + static_cast<Eigen::Index>(std::count(x.begin(), x.end(), 1))] = 1.0;
    return v;
}

RtLayer RtLayer::sample(std::size_t in, std::size_t out, std::uint64_t seed)
{
    Rng rng = substream(seed, "encode.rt");
    std::normal_distribution<double> g;
    RtLayer layer;
    layer.W.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
    layer.b.resize(static_cast<Eigen::Index>(out));
    for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
        for (Eigen::Index j = 0; j < layer.W.cols(); ++j)
            layer.W(i, j) = g(rng);
    for (Eigen::Index i = 0; i < layer.b.size(); ++i)
        layer.b[i] = g(rng);
    return layer;
}

CVec rt_encode(const RtLayer& layer, const RVec& x)
{
    if (x.size() != layer.W.cols())
        throw DimensionMismatch("RT layer input width mismatch");
    RVec h = (layer.W * x + layer.b).cwiseMax(0.0);
    return amplitude_encode(h);
}

std::ptrdiff_t EncodedDataset::position(std::size_t i) const
{
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    if (it == indices.end() || *it != i)
        return -1;
    return it - indices.begin();
}

EncodedDataset encode_boolean(int n, const EncodingSpec& spec)
{
    EncodedDataset ds;
    ds.encoding = spec.name();
    ds.n = n;
    const std::size_t len = std::size_t{1} << n;
    RtLayer rt;
    if (spec.kind == Encoding::RT) {
        std::size_t out = spec.rt_out == 0 ? static_cast<std::size_t>(n)
                          : spec.rt_out == std::size_t(-1) ? len
                                                           : spec.rt_out;
        rt = RtLayer::sample(static_cast<std::size_t>(n), out, spec.seed);
    }
    for (std::size_t i = 0; i < len; ++i) {
        auto x = index_to_input(i, n);
        try {
            CVec s;
            switch (spec.kind) {
            case Encoding::Amplitude01: s = amplitude_encode(to_real(x)); break;
            case Encoding::AmplitudePm1: s = amplitude_encode_pm1(x); break;
            case Encoding::Basis: s = basis_encode(x); break;
            case Encoding::ZZ: s = zz_encode(to_real(x)); break;
            case Encoding::RT: s = rt_encode(rt, to_real(x)); break;
            case Encoding::Classical: s = to_real(x).cast<cplx>(); break;
            case Encoding::ClassicalNormalized: {
                RVec v = to_real(x);
                if (v.norm() == 0.0)
                    throw UnencodableOrigin();
                s = (v / v.norm()).cast<cplx>();
                break;
            }
            case Encoding::ParityAugmented: s = parity_augment_encode(x).cast<cplx>(); break;
            }
            ds.indices.push_back(i);
            ds.states.push_back(std::move(s));
        } catch (const UnencodableOrigin&) {
            ds.dropped.push_back(i);
        }
    }
    if (spec.quantum() && !ds.states.empty())
        ds.qubits = ilog2(static_cast<std::size_t>(ds.states[0].size()));
    return ds;
}

void write_dataset(std::ostream& os, const EncodedDataset& ds, const std::vector<int>* labels)
{
    os << "encoding,qubits,n\n" << ds.encoding << ',' << ds.qubits << ',' << ds.n << '\n';
    os << "index";
    for (std::size_t k = 0; k < ds.dim(); ++k)
        os << ",re" << k << ",im" << k;
    if (labels)
        os << ",label";
    os << '\n';
    os << std::setprecision(17);
    for (std::size_t r = 0; r < ds.size(); ++r) {
        os << ds.indices[r];
        for (Eigen::Index k = 0; k < ds.states[r].size(); ++k)
            os << ',' << ds.states[r][k].real() << ',' << ds.states[r][k].imag();
        if (labels)
            os << ',' << (*labels)[r];
        os << '\n';
    }
}

} // namespace qperc
