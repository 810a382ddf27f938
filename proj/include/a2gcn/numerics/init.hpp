#pragma once

#include <cstdint>

#include "a2gcn/numerics/tensor.hpp"

namespace a2gcn::numerics {

// Xavier/Glorot uniform: entries drawn from U(-b, b) with b = sqrt(6/(rows+cols)).
Tensor xavier_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace a2gcn::numerics
