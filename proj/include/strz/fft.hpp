#pragma once

#include "strz/grid.hpp"

#include <span>

namespace strz::fft {

/// In-place unnormalized forward DFT over all axes of `grid`.
void forward(std::span<Complex> data, const Grid& grid);
/// In-place inverse DFT, normalized by 1/size so inverse(forward(x)) = x.
void inverse(std::span<Complex> data, const Grid& grid);

}  // namespace strz::fft
