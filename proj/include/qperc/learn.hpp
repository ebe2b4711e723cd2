#pragma once

#include <cstdint>
#include <vector>

#include "qperc/boolean.hpp"
#include "qperc/common.hpp"
#include "qperc/encode.hpp"

namespace qperc {

struct TrainConfig {
    double learning_rate = 0.0;  // 0 picks a stable rate from the training kernel
    std::size_t epochs = 2000;
    double batch_fraction = 0.5;
    std::size_t batch_size = 0;  // overrides batch_fraction when nonzero
    std::uint64_t seed = 0;
    std::size_t patience = 50;
    double tolerance = 1e-6;
    bool rescale = false;  // TPP only: divide w by max(1, |A(w)|_2) at the end

    std::size_t batch_for(std::size_t train_size) const;
};

struct History {
    std::vector<double> loss;  // training MSE after each epoch
    std::size_t epochs = 0;
    double train_error = 1.0;
    bool converged = false;  // zero training classification error
    std::size_t fit_epoch = 0;  // first epoch with zero training error, 0 if never
};

struct Sample {
    std::vector<CVec> x;
    std::vector<int> y;  // 0/1 labels

    std::size_t size() const { return x.size(); }
};

// States of the given Boolean inputs (dropped inputs are skipped) with labels f.
Sample gather(const EncodedDataset& ds, const BooleanFunction& f,
              const std::vector<std::size_t>& inputs);

struct TppModel {
    RVec w;
    History history;

    double output(const CVec& x) const;
};

struct PerceptronModel {
    RVec w;
    double b = 0.0;
    History history;

    double output(const CVec& x) const;
};

struct FcnModel {
    RMat W1;  // width x d
    RVec b1;
    RVec w2;
    double b2 = 0.0;
    History history;

    double output(const CVec& x) const;
};

enum class DqnnVariant { Alpha, Beta };

// Layer 1 is held as one QNN unitary per readout: expectation values of
// different readouts are estimated independently, and each is a one-readout
// QNN on the data register.
struct DqnnModel {
    DqnnVariant variant = DqnnVariant::Alpha;
    std::vector<CMat> layer1;  // p unitaries, each 2N x 2N
    RVec biases;
    CMat layer2;  // 2D x 2D, D = 2^q

    std::size_t readouts() const { return layer1.size(); }
    double output(const CVec& x) const;
};

struct DqnnTrained {
    DqnnModel model;
    History history;

    double output(const CVec& x) const { return model.output(x); }
};

TppModel train_tpp(const Sample& train, const TrainConfig& cfg);
PerceptronModel train_perceptron(const Sample& train, const TrainConfig& cfg);
FcnModel train_fcn(const Sample& train, const TrainConfig& cfg, std::size_t width);
DqnnTrained train_dqnn(const Sample& train, const TrainConfig& cfg, std::size_t p,
                       DqnnVariant variant);

// Readout expectations <Z_k> of layer 1 on input x.
RVec dqnn_readouts(const DqnnModel& model, const CVec& x);
// Thresholded and re-encoded intermediate state fed to layer 2.
CVec dqnn_intermediate(const DqnnModel& model, const CVec& x);
double dqnn_forward(const DqnnModel& model, const CVec& x);

// Dense U on d readout qubits (most significant) and the data register with
// <Z_k> = sum_j w_kj |x_j|^2, requires |w_kj| <= 1.
CMat multi_readout_unitary(const std::vector<RVec>& weights);
double readout_expectation(const CMat& U, const CVec& x, std::size_t k, std::size_t d);

DqnnModel construct_universal_dqnn(const BooleanFunction& f, DqnnVariant variant);

template <typename Model>
double test_error(const Model& model, const Sample& test)
{
    if (test.size() == 0)
        throw InvalidArgument("empty test set");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i)
        wrong += ((model.output(test.x[i]) > 0.0 ? 1 : 0) != test.y[i]) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

} // namespace qperc
