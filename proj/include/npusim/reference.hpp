#ifndef NPUSIM_REFERENCE_HPP
#define NPUSIM_REFERENCE_HPP

#include <cstdint>
#include <vector>

#include "npusim/neural_engine.hpp"
#include "npusim/numerics.hpp"

namespace npusim::ref {

// Plain wide-integer reference implementations of the engine operations,
// used by the workload runner's oracle-check mode. They work on host-side
// element vectors with 64-bit accumulation and share no code with the
// scratchpad executors; agreement between the two paths is itself a tested
// property. (The test suite additionally keeps its own oracles under
// tests/, independent of both.)

std::vector<int16_t> gemm(const GemmParams& p, const std::vector<int16_t>& a,
                          const std::vector<int16_t>& b);

std::vector<int16_t> conv(const ConvParams& p, const std::vector<int16_t>& input,
                          const std::vector<int16_t>& weights);

std::vector<int16_t> pool(const PoolParams& p, const std::vector<int16_t>& input);

std::vector<int16_t> relu(const std::vector<int16_t>& input);

}  // namespace npusim::ref

#endif  // NPUSIM_REFERENCE_HPP
