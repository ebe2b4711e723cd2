// Experiment runner: each subcommand writes one CSV (stdout or --out) plus a
// JSON manifest next to it when --out is given.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "qperc/boolean.hpp"
#include "qperc/encode.hpp"
#include "qperc/experiment.hpp"
#include "qperc/express.hpp"
#include "qperc/ingest.hpp"
#include "qperc/kernel.hpp"
#include "qperc/learn.hpp"
#include "qperc/prior.hpp"

#ifndef QPERC_VERSION
#define QPERC_VERSION "0.0.0"
#endif

using namespace qperc;

namespace {

struct Config {
    std::string experiment;
    int n = 7;
    std::string encoding = "amplitude";
    std::string model = "tpp";
    std::size_t m = 64;
    std::size_t seeds = 1;
    std::uint64_t seed = 1;
    std::uint64_t suite_seed = 0;  // 0 means --seed
    std::uint64_t samples = 1000000;
    std::string out;
    unsigned workers = 1;

    double learning_rate = 0.0;
    std::size_t epochs = 2000;
    double batch_fraction = 0.5;
    std::size_t batch_size = 0;
    std::size_t fcn_width = 0;
    std::size_t dqnn_p = 0;

    bool with_bias = false;
    std::string rule = "strict";

    std::size_t trials = 500;
    std::string sizes;
    int levels = 0;
    std::string target = "parity";

    std::uint64_t chunk = 4096;

    std::string images = "data/fashion-images-idx3-ubyte.gz";
    std::string labels = "data/fashion-labels-idx1-ubyte.gz";
    std::size_t qf_train = 250;
    std::size_t qf_test = 50;
    std::string dataset_out;

    std::vector<std::string> inputs;
};

// Flat "module.key = value" entries, one per line; '#' starts a comment.
using Setter = std::function<void(Config&, const std::string&)>;

template <typename T>
Setter set_num(T Config::*field)
{
    return [field](Config& c, const std::string& v) {
        std::istringstream is(v);
        T x{};
        if (!(is >> x) || !(is >> std::ws).eof())
            throw InvalidArgument("bad numeric value: " + v);
        c.*field = x;
    };
}

Setter set_str(std::string Config::*field)
{
    return [field](Config& c, const std::string& v) { c.*field = v; };
}

const std::map<std::string, Setter>& config_keys()
{
    static const std::map<std::string, Setter> keys = {
        {"run.experiment", set_str(&Config::experiment)},
        {"run.n", set_num(&Config::n)},
        {"run.encoding", set_str(&Config::encoding)},
        {"run.model", set_str(&Config::model)},
        {"run.m", set_num(&Config::m)},
        {"run.seeds", set_num(&Config::seeds)},
        {"run.seed", set_num(&Config::seed)},
        {"run.samples", set_num(&Config::samples)},
        {"run.out", set_str(&Config::out)},
        {"run.workers", set_num(&Config::workers)},
        {"suite.seed", set_num(&Config::suite_seed)},
        {"learn.learning_rate", set_num(&Config::learning_rate)},
        {"learn.epochs", set_num(&Config::epochs)},
        {"learn.batch_fraction", set_num(&Config::batch_fraction)},
        {"learn.batch_size", set_num(&Config::batch_size)},
        {"learn.fcn_width", set_num(&Config::fcn_width)},
        {"learn.dqnn_p", set_num(&Config::dqnn_p)},
        {"express.with_bias", set_num(&Config::with_bias)},
        {"express.rule", set_str(&Config::rule)},
        {"kernel.trials", set_num(&Config::trials)},
        {"kernel.sizes", set_str(&Config::sizes)},
        {"kernel.levels", set_num(&Config::levels)},
        {"kernel.target", set_str(&Config::target)},
        {"prior.chunk", set_num(&Config::chunk)},
        {"qfashion.images", set_str(&Config::images)},
        {"qfashion.labels", set_str(&Config::labels)},
        {"qfashion.train", set_num(&Config::qf_train)},
        {"qfashion.test", set_num(&Config::qf_test)},
    };
    return keys;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

void load_config_file(const std::string& path, Config& cfg, std::set<std::string>& seen)
{
    std::ifstream is(path);
    if (!is)
        throw FileNotFound("cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        auto it = config_keys().find(key);
        if (it == config_keys().end())
            throw InvalidArgument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(cfg, trim(line.substr(eq + 1)));
        seen.insert(key);
    }
}

nlohmann::json config_json(const Config& c)
{
    return {{"run.experiment", c.experiment}, {"run.n", c.n}, {"run.encoding", c.encoding}, {"run.model", c.model},
            {"run.m", c.m}, {"run.seeds", c.seeds}, {"run.seed", c.seed}, {"run.samples", c.samples},
            {"run.workers", c.workers}, {"suite.seed", c.suite_seed ? c.suite_seed : c.seed},
            {"learn.learning_rate", c.learning_rate}, {"learn.epochs", c.epochs},
            {"learn.batch_fraction", c.batch_fraction}, {"learn.batch_size", c.batch_size},
            {"learn.fcn_width", c.fcn_width}, {"learn.dqnn_p", c.dqnn_p}, {"express.with_bias", c.with_bias},
            {"express.rule", c.rule}, {"kernel.trials", c.trials}, {"kernel.sizes", c.sizes},
            {"kernel.levels", c.levels}, {"kernel.target", c.target}, {"prior.chunk", c.chunk},
            {"qfashion.images", c.images}, {"qfashion.labels", c.labels}, {"qfashion.train", c.qf_train},
            {"qfashion.test", c.qf_test}, {"report.inputs", c.inputs}};
}

std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// Output sink: the named file, or stdout.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw FileNotFound("cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_manifest(const Config& cfg)
{
    if (cfg.out.empty())
        return;
    nlohmann::json conf = config_json(cfg);
    const std::string canonical = conf.dump();
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    nlohmann::json m = {{"tool", "qperc"},       {"version", QPERC_VERSION},
                        {"experiment", cfg.experiment}, {"seed", cfg.seed},
                        {"config_hash", fnv1a_hex(canonical)}, {"config", conf},
                        {"output", cfg.out},   {"created", stamp}};
    std::ofstream os(cfg.out + ".manifest.json");
    if (!os)
        throw FileNotFound("cannot write manifest for " + cfg.out);
    os << m.dump(2) << '\n';
}

std::vector<std::uint64_t> run_seeds(const Config& c)
{
    std::vector<std::uint64_t> s;
    for (std::size_t k = 0; k < c.seeds; ++k)
        s.push_back(c.seed + k);
    return s;
}

ExpressOptions express_options(const Config& c)
{
    ExpressOptions o;
    o.with_bias = c.with_bias;
    if (c.rule == "strict")
        o.rule = ThresholdRule::Strict;
    else if (c.rule == "positive")
        o.rule = ThresholdRule::PositiveIsOne;
    else
        throw InvalidArgument("rule must be strict or positive");
    return o;
}

ModelOptions model_options(const Config& c)
{
    ModelOptions o;
    o.train.learning_rate = c.learning_rate;
    o.train.epochs = c.epochs;
    o.train.batch_fraction = c.batch_fraction;
    o.train.batch_size = c.batch_size;
    o.fcn_width = c.fcn_width;
    o.dqnn_p = c.dqnn_p;
    return o;
}

EncodedDataset dataset_for(const Config& c)
{
    return encode_boolean(c.n, EncodingSpec::parse(c.encoding, c.seed));
}

TargetSuite suite_for(const Config& c) { return generate_target_suite(c.n, c.suite_seed ? c.suite_seed : c.seed); }

BooleanFunction target_for(const Config& c)
{
    if (c.target == "parity")
        return parity(c.n);
    if (c.target.rfind("suite:", 0) == 0) {
        const auto idx = std::stoull(c.target.substr(6));
        auto suite = suite_for(c);
        if (idx >= suite.functions.size())
            throw InvalidArgument("suite index out of range: " + c.target);
        return suite.functions[idx].f;
    }
    auto f = BooleanFunction::from_string(c.target);
    if (f.n != c.n)
        throw InvalidArgument("target length does not match 2^n");
    return f;
}

RMat kernel_for(const Config& c, const EncodedDataset& ds)
{
    if (c.model == "perceptron")
        return linear_kernel(ds.states);
    if (c.model == "kq1")
        return quantum_fcn_kernel(ds.states, c.levels > 0 ? c.levels : 1);
    if (c.model == "tpp")
        return c.levels > 0 ? quantum_fcn_kernel(ds.states, c.levels) : quantum_kernel(ds.states);
    throw InvalidArgument("kernel models are tpp, perceptron and kq1");
}

RVec pm_target(const EncodedDataset& ds, const BooleanFunction& f)
{
    RVec y(static_cast<Eigen::Index>(ds.size()));
    for (std::size_t i = 0; i < ds.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = f[ds.indices[i]] ? 1.0 : -1.0;
    return y;
}

// Validation shared by the Boolean-data experiments; runs before any work.
void validate(const Config& c)
{
    if (c.n < 1 || c.n > 10)
        throw InvalidArgument("--n must be between 1 and 10");
    if (c.seeds < 1)
        throw InvalidArgument("--seeds must be at least 1");
    if (c.workers < 1)
        throw InvalidArgument("--workers must be at least 1");
    if (c.samples < 1)
        throw InvalidArgument("--samples must be at least 1");
    if (c.epochs < 1)
        throw InvalidArgument("learn.epochs must be at least 1");
    if (c.batch_fraction <= 0.0 || c.batch_fraction > 1.0)
        throw InvalidArgument("learn.batch_fraction must be in (0, 1]");
    if (c.learning_rate < 0.0)
        throw InvalidArgument("learn.learning_rate must be nonnegative");
    EncodingSpec::parse(c.encoding);
    parse_model(c.model);
    express_options(c);
}

int cmd_express(const Config& c)
{
    auto ds = dataset_for(c);
    auto suite = suite_for(c);
    const auto opt = express_options(c);
    const bool classical = c.model == "perceptron";
    Output out(c.out);
    auto& os = out.os();
    // Verdict columns first; the rest is context for plotting.
    os << "function_index,generator_tag,expressible,margin,certified,seed,encoding,model,lz,class_balance\n"
       << std::setprecision(17);
    std::size_t count = 0;
    for (std::size_t i = 0; i < suite.functions.size(); ++i) {
        const auto& e = suite.functions[i];
        const auto v = classical ? perceptron_expressible(ds, e.f, opt) : is_expressible(ds, e.f, opt);
        count += v.expressible ? 1 : 0;
        os << i << ',' << e.tag << ',' << (v.expressible ? 1 : 0) << ',';
        if (v.margin)
            os << *v.margin;
        os << ',' << (v.certified ? 1 : 0) << ',' << e.seed << ',' << ds.encoding << ','
           << (classical ? "perceptron" : "tpp") << ',' << lz_complexity(e.f) << ',' << class_balance(e.f) << '\n';
    }
    std::cerr << "expressible: " << count << '/' << suite.functions.size() << '\n';
    return 0;
}

int cmd_train_suite(const Config& c)
{
    auto ds = dataset_for(c);
    if (c.m >= ds.size())
        throw InvalidArgument("--m must be smaller than the number of encodable inputs");
    auto suite = suite_for(c);
    SuiteRunOptions o;
    o.m = c.m;
    o.seeds = run_seeds(c);
    o.model = model_options(c);
    o.workers = c.workers;
    auto records = run_suite(ds, suite, parse_model(c.model), o);
    Output out(c.out);
    write_records(out.os(), records);
    return 0;
}

int cmd_prior(const Config& c)
{
    auto ds = dataset_for(c);
    if (ds.qubits == 0)
        throw InvalidArgument("prior sampling needs a quantum encoding");
    PriorOptions o;
    o.seed = c.seed;
    o.workers = c.workers;
    o.chunk = c.chunk;
    auto h = sample_prior(ds, c.samples, o);
    Output out(c.out);
    write_histogram(out.os(), h);
    return 0;
}

int cmd_kernel_spectrum(const Config& c)
{
    auto ds = dataset_for(c);
    auto spectrum = integral_operator_spectrum(kernel_for(c, ds));
    RVec ta = task_model_alignment(spectrum, pm_target(ds, target_for(c)));
    Output out(c.out);
    write_spectrum_csv(out.os(), spectrum, ta);
    std::cerr << "rank: " << spectrum.rank << '\n';
    return 0;
}

std::vector<std::size_t> parse_sizes(const std::string& s, std::size_t max)
{
    std::vector<std::size_t> out;
    if (s.empty()) {
        for (std::size_t m = 4; m <= std::min<std::size_t>(max, 120); m += 4)
            out.push_back(m);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t v = 0;
        try {
            v = std::stoull(tok);
        } catch (const std::logic_error&) {
            throw InvalidArgument("bad size list: " + s);
        }
        if (v == 0 || v > max)
            throw InvalidArgument("training size out of range: " + tok);
        out.push_back(v);
    }
    return out;
}

int cmd_learning_curve(const Config& c)
{
    auto ds = dataset_for(c);
    const auto sizes = parse_sizes(c.sizes, ds.size());
    if (c.trials < 1)
        throw InvalidArgument("kernel.trials must be at least 1");
    CurveOptions o;
    o.trials = c.trials;
    o.seed = c.seed;
    o.workers = c.workers;
    auto curve = learning_curve(kernel_for(c, ds), pm_target(ds, target_for(c)), sizes, o);
    Output out(c.out);
    write_learning_curve_csv(out.os(), curve);
    return 0;
}

int cmd_qfashion(const Config& c)
{
    auto raw = load_image_dataset(c.images, c.labels);
    QFashionOptions qo;
    qo.seed = c.seed;
    qo.train = c.qf_train;
    qo.test = c.qf_test;
    auto q = build_qfashion(raw, qo);
    if (!c.dataset_out.empty()) {
        Output d(c.dataset_out);
        write_qfashion(d.os(), q);
    }
    ModelOptions mo = model_options(c);
    mo.train.seed = c.seed;
    if (!mo.dqnn_p)
        mo.dqnn_p = 8;
    Output out(c.out);
    auto& os = out.os();
    os << "model,input,train_error,test_error,converged\n" << std::setprecision(17);
    const std::vector<std::string> models = c.model == "all"
                                                ? std::vector<std::string>{"perceptron", "fcn", "tpp", "dqnn-alpha", "kq1"}
                                                : std::vector<std::string>{c.model};
    for (const auto& name : models) {
        const auto kind = parse_model(name);
        // Classical baselines see the PCA coordinates, quantum models the amplitude states.
        const bool classical = kind == ModelKind::Perceptron || kind == ModelKind::Fcn;
        const auto r = run_model(kind, 3, classical ? q.raw_train() : q.encoded_train(),
                                 classical ? q.raw_test() : q.encoded_test(), mo);
        os << name << ',' << (classical ? "pca" : "amplitude") << ',' << r.train_error << ',' << r.test_error << ','
           << (r.converged ? 1 : 0) << '\n';
    }
    return 0;
}

int cmd_dqnn(const Config& c)
{
    if (c.n > 5)
        throw InvalidArgument("the universal construction is limited to n <= 5");
    auto ds = encode_boolean(c.n, EncodingSpec::parse("amplitude"));
    std::vector<BooleanFunction> functions;
    if (c.n <= 3) {
        const std::size_t len = std::size_t{1} << c.n;
        for (std::size_t code = 0; code < (std::size_t{1} << len); ++code) {
            std::vector<std::uint8_t> bits(len);
            for (std::size_t i = 0; i < len; ++i)
                bits[i] = (code >> (len - 1 - i)) & 1;
            functions.emplace_back(c.n, bits);
        }
    } else {
        for (const auto& e : suite_for(c).functions)
            functions.push_back(e.f);
    }
    std::vector<DqnnVariant> variants;
    if (c.model == "dqnn-alpha" || c.model == "tpp")
        variants.push_back(DqnnVariant::Alpha);
    if (c.model == "dqnn-beta" || c.model == "tpp")
        variants.push_back(DqnnVariant::Beta);
    if (variants.empty())
        throw InvalidArgument("dqnn takes --model dqnn-alpha, dqnn-beta or tpp (both)");
    Output out(c.out);
    auto& os = out.os();
    os << "function,variant,readouts,errors\n";
    std::size_t failures = 0;
    for (const auto& f : functions)
        for (auto v : variants) {
            auto model = construct_universal_dqnn(f, v);
            std::size_t errors = 0;
            for (std::size_t i = 0; i < ds.size(); ++i)
                errors += ((dqnn_forward(model, ds.states[i]) > 0.0) != (f[ds.indices[i]] == 1)) ? 1 : 0;
            failures += errors ? 1 : 0;
            os << f.to_string() << ',' << (v == DqnnVariant::Alpha ? "alpha" : "beta") << ',' << model.readouts() << ','
               << errors << '\n';
        }
    std::cerr << "inexact constructions: " << failures << '\n';
    return 0;
}

// Summaries of experiment records and prior histograms.
int cmd_report(const Config& c)
{
    std::vector<ExperimentRecord> records;
    std::vector<PriorHistogram> hists;
    for (const auto& path : c.inputs) {
        std::ifstream is(path);
        if (!is)
            throw FileNotFound("cannot open " + path);
        const int first = is.peek();
        if (first == std::char_traits<char>::eof())
            continue;
        if (first == '#') {
            hists.push_back(read_histogram(is));
        } else {
            auto r = read_records(is);
            records.insert(records.end(), r.begin(), r.end());
        }
    }
    Output out(c.out);
    auto& os = out.os();
    os << std::setprecision(6);
    if (!records.empty()) {
        struct Acc {
            std::size_t runs = 0, converged = 0;
            double train = 0, test = 0;
        };
        std::map<std::tuple<std::string, std::string, std::string>, Acc> by_tag;
        std::map<std::tuple<std::string, std::string, double>, Acc> by_lz, by_balance;
        for (const auto& r : records) {
            for (auto* acc : {&by_tag[{r.model, r.encoding, r.generator_tag}], &by_lz[{r.model, r.encoding, r.lz}],
                              &by_balance[{r.model, r.encoding, r.class_balance}]}) {
                ++acc->runs;
                acc->converged += r.converged ? 1 : 0;
                acc->train += r.train_error;
                acc->test += r.test_error;
            }
        }
        auto row = [&](const Acc& a) {
            const double n = static_cast<double>(a.runs);
            os << a.runs << ',' << a.train / n << ',' << a.test / n << ',' << static_cast<double>(a.converged) / n
               << '\n';
        };
        os << "# by generator tag\nmodel,encoding,generator_tag,runs,mean_train_error,mean_test_error,converged_fraction\n";
        for (const auto& [k, a] : by_tag) {
            os << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',';
            row(a);
        }
        os << "\n# test error vs LZ complexity\nmodel,encoding,lz,runs,mean_train_error,mean_test_error,converged_fraction\n";
        for (const auto& [k, a] : by_lz) {
            os << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',';
            row(a);
        }
        os << "\n# test error vs class balance\nmodel,encoding,class_balance,runs,mean_train_error,mean_test_error,"
              "converged_fraction\n";
        for (const auto& [k, a] : by_balance) {
            os << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',';
            row(a);
        }
    }
    for (const auto& h : hists) {
        os << "\n# rank plot n=" << h.n << " encoding=" << h.encoding << " samples=" << h.samples << "\nrank,probability\n";
        for (const auto& [rank, p] : rank_plot(h))
            os << rank << ',' << p << '\n';
        os << "\n# P(LZ) n=" << h.n << " encoding=" << h.encoding << "\nlz,probability\n";
        for (const auto& [lz, p] : prior_by_complexity(h))
            os << lz << ',' << p << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    Config cfg;
    std::set<std::string> file_keys;
    // The config file supplies defaults; explicit flags override it.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(argv[i + 1], cfg, file_keys);
            } catch (const FileNotFound& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 3;
            } catch (const Error& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
        }
    }

    CLI::App app{"Tensor-product perceptron experiments on Boolean and image data"};
    app.set_version_flag("--version", QPERC_VERSION);
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("--config", config_path, "flat key = value config file (e.g. run.n = 7)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "number of input bits");
        sub->add_option("--encoding", cfg.encoding, "amplitude, amplitude-pm1, basis, zz, rt-n, rt-2n, classical, ...");
        sub->add_option("--model", cfg.model, "tpp, perceptron, fcn, dqnn-alpha, dqnn-beta, kq1");
        sub->add_option("--m", cfg.m, "training set size");
        sub->add_option("--seeds", cfg.seeds, "number of run seeds, starting at --seed");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--suite-seed", cfg.suite_seed, "target suite seed (defaults to --seed)");
        sub->add_option("--samples", cfg.samples, "prior draws");
        sub->add_option("--out", cfg.out, "output CSV (stdout when omitted)");
        sub->add_option("--workers", cfg.workers, "worker threads");
        sub->add_option("--config", config_path, "config file");
    };
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"express", "expressibility verdicts over the target suite"},
        {"train-suite", "train a model on every suite function"},
        {"prior", "Haar prior histogram over functions"},
        {"kernel-spectrum", "integral-operator spectrum and task-model alignment"},
        {"learning-curve", "ridgeless regression learning curve"},
        {"qfashion", "models on the PCA-reduced two-class fashion images"},
        {"dqnn", "check the universal two-layer constructions"},
        {"report", "summarise record and histogram files"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        subs[name] = sub;
    }
    subs["express"]->add_flag("--with-bias", cfg.with_bias, "allow a bias term");
    subs["express"]->add_option("--rule", cfg.rule, "threshold rule: strict or positive");
    for (const char* k : {"kernel-spectrum", "learning-curve"}) {
        subs[k]->add_option("--target", cfg.target, "parity, suite:<index> or a truth table");
        subs[k]->add_option("--levels", cfg.levels, "FCN kernel levels on top of the quantum kernel");
    }
    subs["learning-curve"]->add_option("--sizes", cfg.sizes, "comma-separated training sizes");
    subs["learning-curve"]->add_option("--trials", cfg.trials, "trials per size");
    subs["qfashion"]->add_option("--images", cfg.images, "IDX image file (gzip allowed)");
    subs["qfashion"]->add_option("--labels", cfg.labels, "IDX label file (gzip allowed)");
    subs["qfashion"]->add_option("--dataset-out", cfg.dataset_out, "also export the encoded dataset");
    for (const char* k : {"train-suite", "qfashion"}) {
        subs[k]->add_option("--epochs", cfg.epochs, "epoch cap");
        subs[k]->add_option("--learning-rate", cfg.learning_rate, "SGD step, 0 picks one from the data");
        subs[k]->add_option("--batch-size", cfg.batch_size, "mini-batch size, 0 means half the training set");
        subs[k]->add_option("--width", cfg.fcn_width, "FCN hidden width, 0 means 2^n");
        subs[k]->add_option("--p", cfg.dqnn_p, "DQNN readouts");
    }
    subs["report"]->add_option("inputs", cfg.inputs, "record or histogram files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    for (const auto& [name, sub] : subs)
        if (sub->parsed())
            cfg.experiment = name;
    if (cfg.experiment.empty()) {
        std::cerr << "error: no experiment given\n" << app.help();
        return 2;
    }
    // qfashion compares all models unless one is named.
    if (cfg.experiment == "qfashion" && !subs["qfashion"]->get_option("--model")->count() && !file_keys.count("run.model"))
        cfg.model = "all";

    try {
        if (cfg.experiment != "report") {
            Config check = cfg;
            if (check.model == "all")
                check.model = "tpp";
            validate(check);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        int status = 0;
        if (cfg.experiment == "express")
            status = cmd_express(cfg);
        else if (cfg.experiment == "train-suite")
            status = cmd_train_suite(cfg);
        else if (cfg.experiment == "prior")
            status = cmd_prior(cfg);
        else if (cfg.experiment == "kernel-spectrum")
            status = cmd_kernel_spectrum(cfg);
        else if (cfg.experiment == "learning-curve")
            status = cmd_learning_curve(cfg);
        else if (cfg.experiment == "qfashion")
            status = cmd_qfashion(cfg);
        else if (cfg.experiment == "dqnn")
            status = cmd_dqnn(cfg);
        else if (cfg.experiment == "report")
            status = cmd_report(cfg);
        write_manifest(cfg);
        return status;
    } catch (const FileNotFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
