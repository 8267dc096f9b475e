#pragma once

#include <span>
#include <vector>

#include "tstab/signal.hpp"

// Serial reference kernels. They solve each local fit from scratch and are
// kept as the oracle for the production kernels and for benchmarking.
namespace tstab::signal::reference {

std::vector<double> sg_filter(std::span<const double> series, const SgSpec& spec);

}  // namespace tstab::signal::reference
