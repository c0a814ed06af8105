#pragma once

#include "zzsfem/quad.hpp"

namespace testing {

inline zzsfem::quad::Corners distorted_quad()
{
    zzsfem::quad::Corners x;
    x << 0.0, 2.1, 2.4, -0.3,
         0.0, 0.4, 1.9, 1.2;
    return x;
}

inline zzsfem::quad::Corners unit_square()
{
    zzsfem::quad::Corners x;
    x << 0, 1, 1, 0,
         0, 0, 1, 1;
    return x;
}

} // namespace testing
