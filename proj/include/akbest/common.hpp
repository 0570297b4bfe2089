#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace akbest {

using cplx = std::complex<double>;

// Error taxonomy shared across the library. The CLI maps these onto process
// exit codes: config errors -> 2, budget errors -> 3, numerical failures -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };   // operand shapes disagree
struct LengthError : Error { using Error::Error; };      // bad length or count argument
struct RankDeficientError : Error { using Error::Error; };
struct SingularError : Error { using Error::Error; };
struct BudgetError : Error { using Error::Error; };      // exhaustive-search guard tripped
struct EmptySampleError : Error { using Error::Error; };
struct NonFiniteError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ModelError : Error { using Error::Error; };

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

inline void require(bool cond, const char* msg) {
    if (!cond) throw Error(msg);
}

}  // namespace akbest
