#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "akbest/common.hpp"
#include "akbest/linalg.hpp"

namespace akbest {

/// Frame payload bits, MSB-first within each symbol label.
using BitBlock = std::vector<std::uint8_t>;

/// Gray-labeled square QAM with unit average symbol energy.
///
/// A constellation point's index equals its Gray label read as an MSB-first
/// integer; the first half of the label addresses the in-phase axis, the
/// second half the quadrature axis. The per-axis level tables (label -> PAM
/// level before normalization) are frozen as:
///
///   1 bit:   0 -> +1,  1 -> -1
///   2 bits: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
///   3 bits: 000 -> -7, 001 -> -5, 011 -> -3, 010 -> -1,
///           110 -> +1, 111 -> +3, 101 -> +5, 100 -> +7
///
/// Adjacent levels always differ in exactly one bit, so lattice neighbors in
/// the full constellation differ in exactly one bit as well. Normalizers are
/// sqrt(2), sqrt(10), sqrt(42) for Q = 4, 16, 64.
struct Constellation {
    int order = 0;
    int bits_per_symbol = 0;
    std::vector<cplx> points;           // index == label value
    std::vector<std::uint32_t> labels;  // labels[i] == bit pattern of point i

    static Constellation make(int order) {
        int bps = 0;
        switch (order) {
            case 4: bps = 2; break;
            case 16: bps = 4; break;
            case 64: bps = 6; break;
            default: throw LengthError("Constellation: order must be 4, 16, or 64");
        }
        const int bpa = bps / 2;
        const std::vector<double> axis = axis_levels(bpa);

        double energy = 0.0;
        for (double li : axis)
            for (double lq : axis) energy += li * li + lq * lq;
        const double scale = 1.0 / std::sqrt(energy / order);

        Constellation c;
        c.order = order;
        c.bits_per_symbol = bps;
        c.points.resize(static_cast<size_t>(order));
        c.labels.resize(static_cast<size_t>(order));
        const int mask = (1 << bpa) - 1;
        for (int idx = 0; idx < order; ++idx) {
            const int li = idx >> bpa;
            const int lq = idx & mask;
            c.points[static_cast<size_t>(idx)] = cplx(axis[static_cast<size_t>(li)] * scale,
                                                      axis[static_cast<size_t>(lq)] * scale);
            c.labels[static_cast<size_t>(idx)] = static_cast<std::uint32_t>(idx);
        }
        return c;
    }

    std::string label_bits(int idx) const {
        std::string s(static_cast<size_t>(bits_per_symbol), '0');
        for (int b = 0; b < bits_per_symbol; ++b)
            if (labels[static_cast<size_t>(idx)] >> (bits_per_symbol - 1 - b) & 1u)
                s[static_cast<size_t>(b)] = '1';
        return s;
    }

private:
    static std::vector<double> axis_levels(int bits) {
        switch (bits) {
            case 1: return {+1.0, -1.0};
            case 2: return {-3.0, -1.0, +3.0, +1.0};
            case 3: return {-7.0, -5.0, -1.0, -3.0, +7.0, +5.0, +1.0, +3.0};
            default: throw LengthError("Constellation: unsupported axis width");
        }
    }
};

inline ComplexVector modulate(const BitBlock& bits, const Constellation& c) {
    const int bps = c.bits_per_symbol;
    if (bits.size() % static_cast<size_t>(bps) != 0)
        throw LengthError("modulate: bit count not divisible by bits per symbol");
    ComplexVector x(static_cast<int>(bits.size()) / bps);
    for (int s = 0; s < x.len(); ++s) {
        int idx = 0;
        for (int b = 0; b < bps; ++b) idx = (idx << 1) | bits[static_cast<size_t>(s * bps + b)];
        x[s] = c.points[static_cast<size_t>(idx)];
    }
    return x;
}

/// Index of the Euclidean-nearest constellation point; ties go to the lowest
/// index.
inline int hard_decision_index(cplx s, const Constellation& c) {
    int best = 0;
    double best_d = std::norm(s - c.points[0]);
    for (int i = 1; i < c.order; ++i) {
        const double d = std::norm(s - c.points[static_cast<size_t>(i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline BitBlock demodulate_hard(const ComplexVector& x, const Constellation& c) {
    const int bps = c.bits_per_symbol;
    BitBlock bits;
    bits.reserve(static_cast<size_t>(x.len() * bps));
    for (int s = 0; s < x.len(); ++s) {
        const std::uint32_t label = c.labels[static_cast<size_t>(hard_decision_index(x[s], c))];
        for (int b = bps - 1; b >= 0; --b) bits.push_back((label >> b) & 1u);
    }
    return bits;
}

/// The m point indices nearest to s, ascending by distance, ties by index.
inline std::vector<int> nearest_points(cplx s, const Constellation& c, int m) {
    if (m < 1 || m > c.order) throw LengthError("nearest_points: count out of range");
    std::vector<int> idx(static_cast<size_t>(c.order));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> d(static_cast<size_t>(c.order));
    for (int i = 0; i < c.order; ++i) d[static_cast<size_t>(i)] = std::norm(s - c.points[static_cast<size_t>(i)]);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double da = d[static_cast<size_t>(a)];
        const double db = d[static_cast<size_t>(b)];
        return da < db || (da == db && a < b);
    });
    idx.resize(static_cast<size_t>(m));
    return idx;
}

}  // namespace akbest
