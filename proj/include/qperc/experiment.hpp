#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qperc/boolean.hpp"
#include "qperc/encode.hpp"
#include "qperc/learn.hpp"

namespace qperc {

enum class ModelKind { Tpp, Perceptron, Fcn, DqnnAlpha, DqnnBeta, KernelQ1 };

ModelKind parse_model(const std::string& name);  // throws InvalidArgument
std::string model_name(ModelKind m);

struct ModelOptions {
    TrainConfig train;
    std::size_t fcn_width = 0;  // 0 means 2^n
    std::size_t dqnn_p = 0;     // 0 means 2^(n-1) for alpha, n for beta
};

struct RunResult {
    double train_error = 1.0;
    double test_error = 1.0;
    bool converged = false;
    std::size_t epochs = 0;
};

// Train on `train`, score on `test` (which may be empty: test_error is then NaN).
RunResult run_model(ModelKind model, int n, const Sample& train, const Sample& test, const ModelOptions& opt);

struct ExperimentRecord {
    std::size_t function_index = 0;
    std::string generator_tag;
    std::uint64_t seed = 0;
    std::string model;
    std::string encoding;
    double train_error = 0.0;
    double test_error = 0.0;
    bool converged = false;
    double lz = 0.0;
    double class_balance = 0.0;
};

struct SuiteRunOptions {
    std::size_t m = 64;
    std::vector<std::uint64_t> seeds{1};
    ModelOptions model;
    unsigned workers = 1;
    std::vector<std::size_t> only;  // function indices to run; empty runs all
};

// One record per (function, seed); the seed drives both the split and training.
std::vector<ExperimentRecord> run_suite(const EncodedDataset& ds, const TargetSuite& suite, ModelKind model,
                                        const SuiteRunOptions& opt);

void write_records(std::ostream& os, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records(std::istream& is);  // throws ParseError on schema mismatch

extern const char* const kRecordHeader;

} // namespace qperc
