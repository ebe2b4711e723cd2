#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qperc/encode.hpp"

namespace qperc {

// Functions drawn from QNNs with Haar-random unitaries. Keys are truth tables
// over all 2^n inputs; inputs the encoding drops carry a zero state and so
// always read as 0.
struct PriorHistogram {
    int n = 0;
    std::string encoding;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::uint64_t> counts;

    double probability(const std::string& bits) const;
    void merge(const PriorHistogram& other);
};

struct PriorOptions {
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::uint64_t chunk = 4096;  // draws per RNG stream; fixes results independent of workers
};

PriorHistogram sample_prior(const EncodedDataset& ds, std::uint64_t samples, const PriorOptions& opt = {});

// (rank, probability), most probable first; ties broken by bit string.
std::vector<std::pair<std::size_t, double>> rank_plot(const PriorHistogram& hist);

// Probability mass per LZ complexity value.
std::map<double, double> prior_by_complexity(const PriorHistogram& hist);

void write_histogram(std::ostream& os, const PriorHistogram& hist);
PriorHistogram read_histogram(std::istream& is);

} // namespace qperc
