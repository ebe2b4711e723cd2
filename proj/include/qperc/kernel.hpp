#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "qperc/common.hpp"

namespace qperc {

// K_ij = |<x_i|x_j>|^2.
RMat quantum_kernel(const std::vector<CVec>& states);
// K_ij = Re <x_i|x_j>, the perceptron kernel on real inputs.
RMat linear_kernel(const std::vector<CVec>& states);

// One level of the ReLU arc-cosine recursion for unit-variance inputs.
double fcn_kernel_level(double a);
// Applies fcn_kernel_level elementwise `levels` times to a0.
RMat fcn_kernel(const RMat& a0, int levels);
// a0 = sqrt(K_Q), then `levels` FCN levels.
RMat quantum_fcn_kernel(const std::vector<CVec>& states, int levels);

// K_cross * pinv(K_train) * y; singular values below 1e-10 of the largest are dropped.
RVec ridgeless_regression(const RMat& K_train, const RVec& y, const RMat& K_cross);

struct KernelSpectrum {
    RVec eigenvalues;   // of K / M, descending
    RMat eigenvectors;  // columns, scaled so (1/M) e_k . e_l = delta_kl
    std::size_t rank = 0;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

KernelSpectrum integral_operator_spectrum(const RMat& K);

// TA(k) for k = 1..M under the uniform measure.
RVec task_model_alignment(const KernelSpectrum& spectrum, const RVec& target);

struct CurvePoint {
    std::size_t m = 0;
    double mean_mse = 0.0;
    double stderr_mse = 0.0;
};

struct CurveOptions {
    std::size_t trials = 500;
    std::size_t holdout = 50;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

// Ridgeless learning curve on a fixed input set with full Gram matrix K.
// Each trial draws m training points, then tests on up to `holdout` of the
// remaining points; with none remaining the whole set is used.
std::vector<CurvePoint> learning_curve(const RMat& K, const RVec& target,
                                       const std::vector<std::size_t>& sizes,
                                       const CurveOptions& opt = {});

void write_spectrum_csv(std::ostream& os, const KernelSpectrum& spectrum, const RVec& ta);
void write_learning_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

} // namespace qperc
