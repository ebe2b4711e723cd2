#pragma once

#include <optional>
#include <vector>

#include <gmpxx.h>

#include "qperc/boolean.hpp"
#include "qperc/common.hpp"
#include "qperc/encode.hpp"

namespace qperc {

// How a real output g is read as a class.
enum class ThresholdRule {
    Strict,         // class 1 iff g > 0, class 0 iff g < 0; g == 0 is an error
    PositiveIsOne,  // class 1 iff g > 0, else class 0
};

enum class FeatureMap {
    Tensor,  // h = x (*) x (TPP / QNN)
    Linear,  // h = x (perceptron)
};

struct ExpressibilityVerdict {
    bool expressible = false;
    bool certified = false;  // decided in exact rational arithmetic
    std::optional<RVec> witness;  // weights over the feature map
    double bias = 0.0;            // threshold z, output is w.h - z
    std::optional<double> margin; // min over points of the signed output
};

struct ExpressOptions {
    bool with_bias = false;
    ThresholdRule rule = ThresholdRule::Strict;
    // Re-decide in rational arithmetic when the dataset has at most this many points.
    std::size_t certify_up_to = 16;
};

// Labels for the stored states of `ds` (dropped inputs skipped).
std::vector<int> labels_for(const EncodedDataset& ds, const BooleanFunction& f);

ExpressibilityVerdict is_expressible(const EncodedDataset& ds, const BooleanFunction& f,
                                     const ExpressOptions& opt = {});

ExpressibilityVerdict perceptron_expressible(const EncodedDataset& ds, const BooleanFunction& f,
                                             const ExpressOptions& opt = {});

// Core decision on explicit feature vectors (rows of H).
ExpressibilityVerdict separable(const std::vector<RVec>& features, const std::vector<int>& labels,
                                const ExpressOptions& opt);

// Same decision from the Gram matrix; the witness is returned as coefficients
// over the data points (w = sum_i c_i h_i), bias separately.
struct GramSeparation {
    bool feasible = false;
    RVec coeffs;
    double bias = 0.0;
};

// Low-rank factor K (+ J with bias) = F F^T, reused across labelings.
struct GramFactor {
    RMat K;       // Gram matrix including the bias term
    RMat F;       // M x r
    RMat to_coef; // maps a solution in F coordinates to point coefficients
    bool with_bias = false;

    GramFactor(const RMat& gram, bool with_bias);
};

GramSeparation separable_gram(const GramFactor& factor, const std::vector<int>& labels,
                              ThresholdRule rule);

struct ExactSeparation {
    bool feasible = false;
    bool clean = true;  // every feature was recovered as a small-denominator rational
    RVec witness;       // feature weights, bias last when requested
};

// Verdict in rational arithmetic on rationalised features.
ExactSeparation separable_exact(const std::vector<RVec>& features, const std::vector<int>& labels,
                                bool with_bias, ThresholdRule rule);

// Closest rational with denominator <= max_den if it is within tol, else the
// exact binary value of v.
mpq_class rationalize(double v, bool* clean = nullptr, long max_den = 1L << 20,
                      double tol = 1e-13);

struct CountResult {
    int count = 0;
    std::vector<ExpressibilityVerdict> verdicts;
};

CountResult count_expressible(const EncodedDataset& ds, const TargetSuite& suite,
                              FeatureMap map, const ExpressOptions& opt = {});

// Number of dichotomies of N points in general position realisable by a
// homogeneous linear classifier in K dimensions.
mpz_class cover_count(unsigned long N, unsigned long K);

} // namespace qperc
