#pragma once

#include "qperc/common.hpp"

namespace qperc {

// x (*) x: entry N*i+j (0-based) is |x_i|^2 on the diagonal and
// Re(x_i conj(x_j)) + Im(x_i conj(x_j)) off it.
RVec complex_tensor_square(const CVec& x);

double tpp_eval(const RVec& w, const RVec& h);

// Hermitian A with x^dag A x == w . (x (*) x), and its inverse.
CMat hermitian_from_weights(const RVec& w);
RVec weights_from_hermitian(const CMat& A);

// <x,0| U^dag Z U |x,0> with the readout as the most significant qubit.
double qnn_eval(const CMat& U, const CVec& x);

// Largest |(U^dag U - I)_ij|.
double unitarity_error(const CMat& U);

RVec unitary_to_tpp(const CMat& U);

struct UnitaryEmbedding {
    CMat U;
    double scale = 1.0;  // qnn_eval(U, x) == tpp_eval(w, x (*) x) / scale
};

UnitaryEmbedding tpp_to_unitary(const RVec& w);

// [[M, R s V], [R s V, -M]] with M = R D V and s = sqrt(1 - D^2).
CMat embed_in_unitary(const CMat& M);

// Square root of a Hermitian positive semidefinite matrix; tiny negative
// eigenvalues from rounding are clamped to zero.
CMat psd_sqrt(const CMat& A);

CMat haar_random_unitary(Eigen::Index dim, Rng& rng);

// First `cols` columns of a Haar unitary of size rows x rows.
CMat haar_random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng);

} // namespace qperc
