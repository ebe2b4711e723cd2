#include "qperc/experiment.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "qperc/kernel.hpp"

namespace qperc {

const char* const kRecordHeader =
    "function_index,generator_tag,seed,model,encoding,train_error,test_error,converged,lz,class_balance";

ModelKind parse_model(const std::string& name)
{
    if (name == "tpp")
        return ModelKind::Tpp;
    if (name == "perceptron")
        return ModelKind::Perceptron;
    if (name == "fcn")
        return ModelKind::Fcn;
    if (name == "dqnn-alpha")
        return ModelKind::DqnnAlpha;
    if (name == "dqnn-beta")
        return ModelKind::DqnnBeta;
    if (name == "kq1")
        return ModelKind::KernelQ1;
    throw InvalidArgument("unknown model: " + name);
}

std::string model_name(ModelKind m)
{
    switch (m) {
    case ModelKind::Tpp: return "tpp";
    case ModelKind::Perceptron: return "perceptron";
    case ModelKind::Fcn: return "fcn";
    case ModelKind::DqnnAlpha: return "dqnn-alpha";
    case ModelKind::DqnnBeta: return "dqnn-beta";
    case ModelKind::KernelQ1: return "kq1";
    }
    return "?";
}

namespace {

template <typename Model>
RunResult score(const Model& model, const History& h, const Sample& test)
{
    RunResult r;
    r.train_error = h.train_error;
    r.converged = h.converged;
    r.epochs = h.epochs;
    r.test_error = test.size() ? test_error(model, test) : std::numeric_limits<double>::quiet_NaN();
    return r;
}

RunResult run_kernel_q1(const Sample& train, const Sample& test)
{
    std::vector<CVec> all = train.x;
    all.insert(all.end(), test.x.begin(), test.x.end());
    RMat K = quantum_fcn_kernel(all, 1);
    const auto m = static_cast<Eigen::Index>(train.size()), t = static_cast<Eigen::Index>(test.size());
    RVec y(m);
    for (Eigen::Index i = 0; i < m; ++i)
        y[i] = train.y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
    auto errors = [&](const RVec& pred, const Sample& s) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            wrong += ((pred[static_cast<Eigen::Index>(i)] > 0.0) != (s.y[i] == 1)) ? 1 : 0;
        return static_cast<double>(wrong) / static_cast<double>(s.size());
    };
    RunResult r;
    const RMat Kt = K.topLeftCorner(m, m);
    r.train_error = errors(ridgeless_regression(Kt, y, Kt), train);
    r.converged = r.train_error == 0.0;
    r.test_error = t ? errors(ridgeless_regression(Kt, y, K.bottomLeftCorner(t, m)), test)
                     : std::numeric_limits<double>::quiet_NaN();
    return r;
}

} // namespace

RunResult run_model(ModelKind model, int n, const Sample& train, const Sample& test, const ModelOptions& opt)
{
    switch (model) {
    case ModelKind::Tpp: {
        auto m = train_tpp(train, opt.train);
        return score(m, m.history, test);
    }
    case ModelKind::Perceptron: {
        auto m = train_perceptron(train, opt.train);
        return score(m, m.history, test);
    }
    case ModelKind::Fcn: {
        const std::size_t width = opt.fcn_width ? opt.fcn_width : std::size_t{1} << n;
        auto m = train_fcn(train, opt.train, width);
        return score(m, m.history, test);
    }
    case ModelKind::DqnnAlpha: {
        const std::size_t p = opt.dqnn_p ? opt.dqnn_p : std::max<std::size_t>(2, std::size_t{1} << (n - 1));
        auto m = train_dqnn(train, opt.train, p, DqnnVariant::Alpha);
        return score(m, m.history, test);
    }
    case ModelKind::DqnnBeta: {
        const std::size_t p = opt.dqnn_p ? opt.dqnn_p : static_cast<std::size_t>(n);
        auto m = train_dqnn(train, opt.train, p, DqnnVariant::Beta);
        return score(m, m.history, test);
    }
    case ModelKind::KernelQ1:
        return run_kernel_q1(train, test);
    }
    throw InvalidArgument("unknown model");
}

std::vector<ExperimentRecord> run_suite(const EncodedDataset& ds, const TargetSuite& suite, ModelKind model,
                                        const SuiteRunOptions& opt)
{
    std::vector<std::size_t> functions = opt.only;
    if (functions.empty())
        for (std::size_t i = 0; i < suite.functions.size(); ++i)
            functions.push_back(i);
    struct Job {
        std::size_t function;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto f : functions)
        for (auto s : opt.seeds)
            jobs.push_back({f, s});
    std::vector<ExperimentRecord> out(jobs.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(std::max(1u, opt.workers));
    auto worker = [&](unsigned w) {
        try {
            for (std::size_t j = next++; j < jobs.size(); j = next++) {
                const auto& entry = suite.functions.at(jobs[j].function);
                const Split split = split_train_test(ds.indices, opt.m, jobs[j].seed);
                ModelOptions mo = opt.model;
                mo.train.seed = jobs[j].seed;
                const auto r = run_model(model, ds.n, gather(ds, entry.f, split.train), gather(ds, entry.f, split.test), mo);
                ExperimentRecord& rec = out[j];
                rec.function_index = jobs[j].function;
                rec.generator_tag = entry.tag;
                rec.seed = jobs[j].seed;
                rec.model = model_name(model);
                rec.encoding = ds.encoding;
                rec.train_error = r.train_error;
                rec.test_error = r.test_error;
                rec.converged = r.converged;
                rec.lz = lz_complexity(entry.f);
                rec.class_balance = class_balance(entry.f);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (errors.size() == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < errors.size(); ++w)
            pool.emplace_back(worker, w);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

void write_records(std::ostream& os, const std::vector<ExperimentRecord>& records)
{
    os << kRecordHeader << '\n' << std::setprecision(17);
    for (const auto& r : records)
        os << r.function_index << ',' << r.generator_tag << ',' << r.seed << ',' << r.model << ',' << r.encoding << ','
           << r.train_error << ',' << r.test_error << ',' << (r.converged ? 1 : 0) << ',' << r.lz << ','
           << r.class_balance << '\n';
}

std::vector<ExperimentRecord> read_records(std::istream& is)
{
    std::vector<ExperimentRecord> out;
    std::string line;
    if (!std::getline(is, line))
        return out;
    if (line != kRecordHeader)
        throw ParseError("not an experiment record file: header is '" + line + "'");
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 10)
            throw ParseError("experiment record has " + std::to_string(f.size()) + " fields: " + line);
        try {
            ExperimentRecord r;
            r.function_index = std::stoull(f[0]);
            r.generator_tag = f[1];
            r.seed = std::stoull(f[2]);
            r.model = f[3];
            r.encoding = f[4];
            r.train_error = std::stod(f[5]);
            r.test_error = std::stod(f[6]);
            r.converged = f[7] == "1";
            r.lz = std::stod(f[8]);
            r.class_balance = std::stod(f[9]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw ParseError("bad experiment record: " + line);
        }
    }
    return out;
}

} // namespace qperc
