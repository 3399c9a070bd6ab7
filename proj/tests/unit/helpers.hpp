#pragma once

#include <cmath>
#include <cstddef>

// Half-width of a 3 sigma binomial interval for n draws at probability p.
inline double three_sigma(double p, std::size_t n) { return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }
