#pragma once

#include <complex>

namespace hardyid {

using Complex = std::complex<double>;

}  // namespace hardyid
