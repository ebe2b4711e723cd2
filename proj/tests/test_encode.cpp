#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qperc/encode.hpp"

using namespace qperc;

namespace {

CMat kron(const CMat& a, const CMat& b)
{
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Z acting on qubit k of n (qubit 0 most significant).
CMat z_on(int k, int n)
{
    CMat Z(2, 2);
    Z << 1, 0, 0, -1;
    CMat out = CMat::Identity(1, 1);
    for (int q = 0; q < n; ++q)
        out = kron(out, q == k ? Z : CMat(CMat::Identity(2, 2)));
    return out;
}

// Dense (U_phi H^n)^2 |0> with U_phi = exp(i sum_S phi_S prod_{k in S} Z_k).
CVec zz_oracle(const RVec& x)
{
    const int n = static_cast<int>(x.size());
    CMat H1(2, 2);
    H1 << 1, 1, 1, -1;
    H1 /= std::sqrt(2.0);
    CMat H = CMat::Identity(1, 1);
    for (int q = 0; q < n; ++q)
        H = kron(H, H1);
    const Eigen::Index dim = Eigen::Index{1} << n;
    CMat gen = CMat::Zero(dim, dim);
    for (int k = 0; k < n; ++k) {
        gen += x[k] * z_on(k, n);
        for (int l = k + 1; l < n; ++l)
            gen += (std::numbers::pi - x[k]) * (std::numbers::pi - x[l]) * z_on(k, n) * z_on(l, n);
    }
    CMat U = CMat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        U(i, i) = std::exp(cplx(0, 1) * gen(i, i));
    CVec s = CVec::Zero(dim);
    s[0] = 1;
    return U * H * U * H * s;
}

} // namespace

TEST_CASE("amplitude encoding")
{
    RVec x(4);
    x << 1, 0, 1, 0;
    CVec s = amplitude_encode(x);
    CHECK(std::abs(s[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(s[2] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(s[1]) == 0.0);
    RVec e(4);
    e << 1, 0, 0, 0;
    CHECK((amplitude_encode(e) - e.cast<cplx>()).norm() == 0.0);
    CHECK_THROWS_AS(amplitude_encode(RVec::Zero(2)), UnencodableOrigin);

    RVec seven = RVec::Ones(7);
    CVec p = amplitude_encode(seven);
    CHECK(p.size() == 8);
    CHECK(std::abs(p[7]) == 0.0);
    CHECK(std::abs(p.norm() - 1.0) < 1e-12);
}

TEST_CASE("pm1 amplitude never hits the origin")
{
    for (int n = 1; n <= 7; ++n) {
        auto ds = encode_boolean(n, EncodingSpec::parse("amplitude-pm1"));
        CHECK(ds.dropped.empty());
        CHECK(ds.size() == (std::size_t{1} << n));
        for (const auto& s : ds.states)
            CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    }
    CVec s = amplitude_encode_pm1({0, 1});
    CHECK(std::abs(s[0] + 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(s[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("amplitude dataset drops only the origin")
{
    auto ds = encode_boolean(7, EncodingSpec::parse("amplitude"));
    CHECK(ds.size() == 127);
    CHECK(ds.dropped == std::vector<std::size_t>{0});
    CHECK(ds.qubits == 3);
    CHECK(ds.position(0) == -1);
    CHECK(ds.position(5) == 4);
}

TEST_CASE("basis encoding")
{
    CVec s = basis_encode({1, 0});
    CHECK(std::abs(s[2] - 1.0) == 0.0);
    CHECK(s.norm() == 1.0);
    CHECK(std::abs(basis_encode({0, 0, 0})[0] - 1.0) == 0.0);
    for (int n = 1; n <= 4; ++n) {
        auto ds = encode_boolean(n, EncodingSpec::parse("basis"));
        CHECK(ds.size() == (std::size_t{1} << n));
        for (std::size_t i = 0; i < ds.size(); ++i)
            for (std::size_t j = 0; j < ds.size(); ++j)
                CHECK(std::abs(ds.states[i].dot(ds.states[j])) == (i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("ZZ encoding matches the dense circuit")
{
    RVec zero = RVec::Zero(1);
    CVec s = zz_encode(zero);
    CHECK(std::abs(std::abs(s[0]) - 1.0) < 1e-12);
    for (int n = 1; n <= 3; ++n)
        for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) {
            RVec x = to_real(index_to_input(i, n));
            CVec a = zz_encode(x), b = zz_oracle(x);
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(a.norm() - 1.0) < 1e-12);
        }
    // Real-valued inputs are accepted too.
    RVec r(3);
    r << 0.3, -1.2, 2.5;
    CHECK((zz_encode(r) - zz_oracle(r)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ZZ state for n=2, x=00 against the frozen overlap")
{
    CVec s = zz_encode(RVec::Zero(2));
    CVec o = zz_oracle(RVec::Zero(2));
    CHECK(std::abs(std::abs(s.dot(o)) - 1.0) < 1e-12);
}

TEST_CASE("RT encoding")
{
    RtLayer id;
    id.W = RMat::Identity(2, 2);
    id.b = RVec::Zero(2);
    RVec x(2);
    x << 1, 0;
    CHECK((rt_encode(id, x) - amplitude_encode(x)).norm() == 0.0);
    RtLayer neg = id;
    neg.W = -neg.W;
    CHECK_THROWS_AS(rt_encode(neg, RVec::Ones(2)), UnencodableOrigin);

    auto a = encode_boolean(7, EncodingSpec::parse("rt-n", 5));
    auto b = encode_boolean(7, EncodingSpec::parse("rt-n", 5));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((a.states[i] - b.states[i]).norm() == 0.0);
    CHECK(a.qubits == 3);
    auto c = encode_boolean(7, EncodingSpec::parse("rt-2n", 5));
    CHECK(c.qubits == 7);
    for (const auto& s : c.states)
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("parity-augmented embedding")
{
    auto v = parity_augment_encode({0, 1, 1});
    RVec e(7);
    e << 0, 1, 1, 0, 0, 1, 0;
    CHECK(v == e);
    e << 0, 0, 0, 1, 0, 0, 0;
    CHECK(parity_augment_encode({0, 0, 0}) == e);
    e << 1, 1, 1, 0, 0, 0, 1;
    CHECK(parity_augment_encode({1, 1, 1}) == e);
}

TEST_CASE("sqrt-amplitude encoding")
{
    RVec a(2), b(2), c(2);
    a << 1, 0;
    b << 0.25, 0.75;
    c << 0.5, 0.5;
    CHECK(std::abs(sqrt_amplitude_encode(a)[0] - 1.0) == 0.0);
    CVec sb = sqrt_amplitude_encode(b);
    CHECK(std::abs(sb[0] - 0.5) < 1e-15);
    CHECK(std::abs(sb[1] - std::sqrt(0.75)) < 1e-15);
    CVec sc = sqrt_amplitude_encode(c);
    CHECK(std::abs(sc[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    RVec neg(2), off(2);
    neg << -0.5, 1.5;
    off << 0.5, 0.6;
    CHECK_THROWS_AS(sqrt_amplitude_encode(neg), InvalidArgument);
    CHECK_THROWS_AS(sqrt_amplitude_encode(off), InvalidArgument);
}

TEST_CASE("every quantum encoding yields unit states")
{
    for (std::string name : {"amplitude", "amplitude-pm1", "basis", "zz", "rt-n", "rt-2n"})
        for (int n = 1; n <= 5; ++n) {
            auto ds = encode_boolean(n, EncodingSpec::parse(name, 3));
            for (const auto& s : ds.states) {
                CHECK(std::abs(s.norm() - 1.0) < 1e-12);
                CHECK(is_pow2(static_cast<std::size_t>(s.size())));
            }
        }
    CHECK_THROWS_AS(EncodingSpec::parse("nope"), InvalidArgument);
}

TEST_CASE("dataset serialization keeps 17 significant digits")
{
    auto ds = encode_boolean(2, EncodingSpec::parse("amplitude"));
    std::ostringstream os;
    write_dataset(os, ds);
    const std::string out = os.str();
    CHECK(out.rfind("encoding,qubits,n\namplitude,1,2\nindex,re0,im0,re1,im1\n", 0) == 0);
    CHECK(out.find("0.707106781186547") != std::string::npos);
}
