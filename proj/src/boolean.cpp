#include "qperc/boolean.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "qperc/common.hpp"

namespace qperc {

BooleanFunction::BooleanFunction(int n_, std::vector<std::uint8_t> bits_)
    : n(n_), bits(std::move(bits_))
{
    if (n < 0 || n > 30 || bits.size() != (std::size_t{1} << n))
        throw InvalidArgument("truth table length must be 2^n");
    for (auto b : bits)
        if (b > 1)
            throw InvalidArgument("truth table entries must be 0 or 1");
}

BooleanFunction BooleanFunction::from_string(const std::string& s)
{
    if (!is_pow2(s.size()))
        throw ParseError("bit string length is not a power of two: " + std::to_string(s.size()));
    std::vector<std::uint8_t> bits(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1')
            throw ParseError("bit string contains a character other than 0/1");
        bits[i] = s[i] == '1';
    }
    return BooleanFunction(ilog2(s.size()), std::move(bits));
}

BooleanFunction BooleanFunction::constant(int n, bool value)
{
    return BooleanFunction(n, std::vector<std::uint8_t>(std::size_t{1} << n, value ? 1 : 0));
}

std::string BooleanFunction::to_string() const
{
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            s[i] = '1';
    return s;
}

BooleanFunction BooleanFunction::complement() const
{
    BooleanFunction c = *this;
    for (auto& b : c.bits)
        b ^= 1;
    return c;
}

std::size_t BooleanFunction::ones() const
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

std::vector<std::uint8_t> index_to_input(std::size_t i, int n)
{
    if (n < 0 || n > 62 || i >= (std::size_t{1} << n))
        throw InvalidArgument("input index out of range");
    std::vector<std::uint8_t> x(n);
    for (int k = 0; k < n; ++k)
        x[k] = (i >> (n - 1 - k)) & 1;
    return x;
}

std::size_t input_to_index(const std::vector<std::uint8_t>& x)
{
    std::size_t i = 0;
    for (auto b : x) {
        if (b > 1)
            throw InvalidArgument("input is not binary");
        i = (i << 1) | b;
    }
    return i;
}

BooleanFunction parity(int n)
{
    if (n < 1)
        throw InvalidArgument("parity needs n >= 1");
    std::vector<std::uint8_t> bits(std::size_t{1} << n);
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = std::popcount(i) & 1;
    return BooleanFunction(n, std::move(bits));
}

double class_balance(const BooleanFunction& f)
{
    double p = static_cast<double>(f.size() - f.ones()) / static_cast<double>(f.size());
    return std::min(p, 1.0 - p);
}

int lz76_phrases(const std::vector<std::uint8_t>& s)
{
    const std::size_t n = s.size();
    if (n == 0)
        return 0;
    if (n == 1)
        return 1;
    std::size_t i = 0, k = 1, l = 1, k_max = 1;
    int c = 1;
    while (true) {
        if (s[i + k - 1] == s[l + k - 1]) {
            ++k;
            if (l + k > n) {
                ++c;
                break;
            }
        } else {
            k_max = std::max(k, k_max);
            ++i;
            if (i == l) {
                ++c;
                l += k_max;
                if (l + 1 > n)
                    break;
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    return c;
}

double lz_complexity(const BooleanFunction& f)
{
    const double log_l = std::log2(static_cast<double>(f.size()));
    const std::size_t ones = f.ones();
    if (ones == 0 || ones == f.size())
        return log_l;
    std::vector<std::uint8_t> rev(f.bits.rbegin(), f.bits.rend());
    return log_l * (lz76_phrases(f.bits) + lz76_phrases(rev)) / 2.0;
}

namespace {

std::vector<std::uint8_t> random_bits(std::size_t len, Rng& rng)
{
    std::vector<std::uint8_t> v(len);
    for (auto& b : v)
        b = static_cast<std::uint8_t>(rng() >> 63);
    return v;
}

} // namespace

TargetSuite generate_target_suite(int n, std::uint64_t seed)
{
    if (n < 1 || n > 16)
        throw InvalidArgument("suite generation supports 1 <= n <= 16");
    const std::size_t len = std::size_t{1} << n;
    TargetSuite suite;
    suite.n = n;
    auto add = [&](std::vector<std::uint8_t> bits, std::string tag) {
        suite.functions.push_back({BooleanFunction(n, std::move(bits)), std::move(tag), seed});
    };

    add(parity(n).bits, "parity");

    // Fixed number of ones, t = 0, step, ..., 2^n with 33 values at n = 7.
    Rng fixed_rng = substream(seed, "suite.fixed");
    const std::size_t step = std::max<std::size_t>(1, len / 32);
    for (std::size_t t = 0; t <= len; t += step) {
        std::vector<std::uint8_t> bits(len, 0);
        std::fill(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(t), 1);
        std::shuffle(bits.begin(), bits.end(), fixed_rng);
        add(std::move(bits), "fixed-count(" + std::to_string(t) + ")");
    }

    // p-fold symmetric: a random block of length 2^n/p repeated p times.
    // Ten draws per p, duplicates dropped, then round-robin redraws until
    // kSymmetricCount distinct functions exist (or every such function is held).
    Rng sym_rng = substream(seed, "suite.symmetric");
    std::vector<std::size_t> folds;
    for (std::size_t p = 2; p <= len; p <<= 1)
        folds.push_back(p);
    const std::size_t available = n >= 7 ? kSymmetricCount : std::min<std::size_t>(kSymmetricCount, std::size_t{1} << (len / 2));
    std::set<std::vector<std::uint8_t>> seen;
    std::vector<std::pair<std::vector<std::uint8_t>, std::size_t>> sym;
    auto draw = [&](std::size_t p) {
        auto block = random_bits(len / p, sym_rng);
        std::vector<std::uint8_t> bits;
        bits.reserve(len);
        for (std::size_t r = 0; r < p; ++r)
            bits.insert(bits.end(), block.begin(), block.end());
        if (seen.insert(bits).second)
            sym.emplace_back(std::move(bits), p);
    };
    for (auto p : folds)
        for (int r = 0; r < 10; ++r)
            draw(p);
    for (std::size_t j = 0; sym.size() < available; ++j)
        draw(folds[j % folds.size()]);
    sym.resize(std::min(sym.size(), available));
    for (auto& [bits, p] : sym)
        add(std::move(bits), "symmetric(" + std::to_string(p) + ")");

    Rng rand_rng = substream(seed, "suite.random");
    while (suite.functions.size() < kSuiteSize)
        add(random_bits(len, rand_rng), "random");
    suite.functions.resize(kSuiteSize);
    return suite;
}

void write_suite(std::ostream& os, const TargetSuite& suite)
{
    for (const auto& e : suite.functions)
        os << e.tag << ',' << e.seed << ',' << e.f.to_string() << '\n';
}

TargetSuite read_suite(std::istream& is)
{
    TargetSuite suite;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        auto a = line.find(',');
        auto b = a == std::string::npos ? a : line.find(',', a + 1);
        if (b == std::string::npos)
            throw ParseError("suite record needs three fields: " + line);
        SuiteEntry e;
        e.tag = line.substr(0, a);
        try {
            e.seed = std::stoull(line.substr(a + 1, b - a - 1));
        } catch (const std::exception&) {
            throw ParseError("bad seed field: " + line);
        }
        e.f = BooleanFunction::from_string(line.substr(b + 1));
        if (!suite.functions.empty() && e.f.n != suite.n)
            throw ParseError("suite mixes input dimensions");
        suite.n = e.f.n;
        suite.functions.push_back(std::move(e));
    }
    return suite;
}

Split split_train_test(const std::vector<std::size_t>& candidates, std::size_t m,
                       std::uint64_t seed)
{
    if (m == 0 || m > candidates.size())
        throw InvalidArgument("training size " + std::to_string(m) + " exceeds the " +
                              std::to_string(candidates.size()) + " encodable inputs");
    std::vector<std::size_t> idx = candidates;
    Rng rng = substream(seed, "split");
    std::shuffle(idx.begin(), idx.end(), rng);
    Split s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

} // namespace qperc
