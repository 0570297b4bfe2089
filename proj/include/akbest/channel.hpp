#pragma once

#include <cmath>

#include "akbest/common.hpp"
#include "akbest/linalg.hpp"
#include "akbest/modem.hpp"
#include "akbest/rng.hpp"

namespace akbest {

/// One quasi-static block-fading draw: the channel matrix plus the per-entry
/// complex noise variance (E|n_i|^2 == N0).
struct ChannelDraw {
    ComplexMatrix h;
    double n0 = 0.0;
};

/// i.i.d. Rayleigh flat fading: entries are CN(0, 1), filled row-major.
inline ComplexMatrix sample_channel(int nr, int nt, RngStream& rng) {
    if (nt < 1 || nr < nt) throw DimensionError("sample_channel: need Nr >= Nt >= 1");
    ComplexMatrix h(nr, nt);
    for (cplx& e : h.entries) e = rng.cgauss();
    return h;
}

/// SNR convention: snr_db is the average received signal power per antenna
/// over the noise power per antenna. With unit-energy symbols, E||Hx||^2 per
/// receive antenna equals Nt, so N0 = Nt / 10^(snr_db/10).
inline double noise_variance(int nt, double snr_db) {
    return static_cast<double>(nt) / std::pow(10.0, snr_db / 10.0);
}

/// y = H x + n with an explicit noise variance; n0 == 0 is the noiseless
/// test hook (y == Hx exactly).
inline ComplexVector transmit_with_n0(const ComplexMatrix& h, const ComplexVector& x, double n0,
                                      RngStream& rng) {
    ComplexVector y = matvec(h, x);
    if (n0 > 0.0) {
        const double s = std::sqrt(n0);
        for (cplx& e : y.entries) e += s * rng.cgauss();
    }
    return y;
}

inline std::pair<ComplexVector, double> transmit(const ComplexMatrix& h, const ComplexVector& x,
                                                 double snr_db, RngStream& rng) {
    const double n0 = noise_variance(h.cols, snr_db);
    return {transmit_with_n0(h, x, n0, rng), n0};
}

inline BitBlock random_bits(int n, RngStream& rng) {
    BitBlock b(static_cast<size_t>(n));
    for (auto& bit : b) bit = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    return b;
}

}  // namespace akbest
