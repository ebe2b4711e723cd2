#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qperc/boolean.hpp"
#include "qperc/common.hpp"

namespace qperc {

enum class Encoding {
    Amplitude01,
    AmplitudePm1,
    Basis,
    ZZ,
    RT,
    Classical,            // raw {0,1}^n, origin kept
    ClassicalNormalized,  // x/|x|, origin dropped
    ParityAugmented,      // classical 2n+1 embedding
};

struct EncodingSpec {
    Encoding kind = Encoding::Amplitude01;
    std::size_t rt_out = 0;  // RT hidden width; 0 means n
    std::uint64_t seed = 0;  // RT layer seed

    static EncodingSpec parse(const std::string& name, std::uint64_t seed = 0);
    std::string name() const;
    bool quantum() const;
};

// Bit vector as reals, for encodings that take real inputs.
RVec to_real(const std::vector<std::uint8_t>& x);

CVec amplitude_encode(const RVec& x);
CVec amplitude_encode_pm1(const std::vector<std::uint8_t>& x);
CVec basis_encode(const std::vector<std::uint8_t>& x);
CVec zz_encode(const RVec& x);
CVec sqrt_amplitude_encode(const RVec& x);
RVec parity_augment_encode(const std::vector<std::uint8_t>& x);

struct RtLayer {
    RMat W;  // out x in
    RVec b;

    static RtLayer sample(std::size_t in, std::size_t out, std::uint64_t seed);
};

CVec rt_encode(const RtLayer& layer, const RVec& x);

struct EncodedDataset {
    std::string encoding;
    int n = 0;
    int qubits = 0;  // 0 for classical embeddings
    std::vector<std::size_t> indices;  // input index of each stored state
    std::vector<CVec> states;
    std::vector<std::size_t> dropped;

    std::size_t size() const { return states.size(); }
    std::size_t dim() const { return states.empty() ? 0 : static_cast<std::size_t>(states[0].size()); }
    // Position of input index i in `states`, or -1 if dropped.
    std::ptrdiff_t position(std::size_t i) const;
};

// Encodes every input of {0,1}^n, dropping the ones the encoding cannot represent.
EncodedDataset encode_boolean(int n, const EncodingSpec& spec);

void write_dataset(std::ostream& os, const EncodedDataset& ds,
                   const std::vector<int>* labels = nullptr);

} // namespace qperc
