#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qperc {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zero-norm input under an amplitude-type encoding.
class UnencodableOrigin : public Error {
public:
    UnencodableOrigin() : Error("input has zero norm and cannot be amplitude encoded") {}
};

class SpectralBoundViolated : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class FileNotFound : public Error {
public:
    using Error::Error;
};

// Named, reproducible sub-stream of a master seed. The same (seed, name, index)
// triple always yields the same generator, independent of call order.
Rng substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

inline bool is_pow2(std::size_t v) { return v && !(v & (v - 1)); }

inline std::size_t next_pow2(std::size_t v)
{
    std::size_t p = 1;
    while (p < v)
        p <<= 1;
    return p;
}

inline int ilog2(std::size_t v)
{
    int k = 0;
    while ((std::size_t{1} << k) < v)
        ++k;
    return k;
}

} // namespace qperc
