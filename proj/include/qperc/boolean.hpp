#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qperc {

// Truth table of f: {0,1}^n -> {0,1}. bits[i] is the label of the input whose
// big-endian binary expansion equals i.
struct BooleanFunction {
    int n = 0;
    std::vector<std::uint8_t> bits;

    BooleanFunction() = default;
    BooleanFunction(int n_, std::vector<std::uint8_t> bits_);

    static BooleanFunction from_string(const std::string& s);
    static BooleanFunction constant(int n, bool value);

    std::size_t size() const { return bits.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits[i]; }
    std::string to_string() const;
    BooleanFunction complement() const;
    std::size_t ones() const;

    bool operator==(const BooleanFunction& o) const { return n == o.n && bits == o.bits; }
};

std::vector<std::uint8_t> index_to_input(std::size_t i, int n);
std::size_t input_to_index(const std::vector<std::uint8_t>& x);

BooleanFunction parity(int n);
double class_balance(const BooleanFunction& f);

// Kaspar-Schuster LZ76 phrase count of a binary string.
int lz76_phrases(const std::vector<std::uint8_t>& s);
double lz_complexity(const BooleanFunction& f);

struct SuiteEntry {
    BooleanFunction f;
    std::string tag;  // parity | fixed-count(t) | symmetric(p) | random
    std::uint64_t seed = 0;
};

struct TargetSuite {
    int n = 0;
    std::vector<SuiteEntry> functions;

    std::size_t size() const { return functions.size(); }
    const SuiteEntry& operator[](std::size_t i) const { return functions[i]; }
};

constexpr std::size_t kSuiteSize = 100;
constexpr std::size_t kSymmetricCount = 54;

TargetSuite generate_target_suite(int n, std::uint64_t seed);

void write_suite(std::ostream& os, const TargetSuite& suite);
TargetSuite read_suite(std::istream& is);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Uniform random partition of `candidates` into m training points and the rest.
Split split_train_test(const std::vector<std::size_t>& candidates, std::size_t m,
                       std::uint64_t seed);

} // namespace qperc
