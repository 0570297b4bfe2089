#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "akbest/detect.hpp"

namespace akbest {

/// Per-layer ranks of the exact-ML path. ranks[k-1] is the 1-based position
/// of the ML path's length-k prefix among all Q^k partial paths at that
/// depth, ordered by (path metric, lexicographic symbols). A K-best run whose
/// width at every layer is at least the rank there can never prune the ML
/// path, so it returns the ML answer exactly.
struct RankProfile {
    std::vector<long long> ranks;
    std::vector<int> ml_symbols;  // placement order: antenna Nt first
};

inline RankProfile rank_profile(const PreprocessedProblem& p,
                                long long budget = kDefaultMlBudget) {
    const int n = p.nt();
    if (n > kMaxAntennas) throw DimensionError("rank_profile: too many antennas");
    const int order = p.constellation.order;
    const auto& pts = p.constellation.points;

    const DetectResult ml = detect_ml_pre(p, budget);

    RankProfile prof;
    prof.ml_symbols.resize(static_cast<size_t>(n));
    for (int d = 0; d < n; ++d) {
        const cplx v = ml.xhat[n - 1 - d];
        int idx = -1;
        for (int q = 0; q < order; ++q)
            if (pts[static_cast<size_t>(q)] == v) { idx = q; break; }
        prof.ml_symbols[static_cast<size_t>(d)] = idx;
    }

    // Prefix metrics of the ML path, accumulated with the same arithmetic the
    // searches use so exact comparisons below are meaningful.
    std::vector<double> ml_prefix(static_cast<size_t>(n));
    {
        double acc = 0.0;
        for (int d = 0; d < n; ++d) {
            const int row = n - 1 - d;
            cplx base = p.z[row];
            for (int i = row + 1; i < n; ++i)
                base -= p.rbar(row, i) *
                        pts[static_cast<size_t>(prof.ml_symbols[static_cast<size_t>(n - 1 - i)])];
            acc += std::norm(base - p.rbar(row, row) *
                                        pts[static_cast<size_t>(prof.ml_symbols[static_cast<size_t>(d)])]);
            ml_prefix[static_cast<size_t>(d)] = acc;
        }
    }

    std::vector<long long> better(static_cast<size_t>(n), 0);
    std::array<std::uint8_t, kMaxAntennas> sym{};

    auto lex_before_ml = [&](int len) {
        for (int i = 0; i < len; ++i) {
            const int a = sym[static_cast<size_t>(i)];
            const int b = prof.ml_symbols[static_cast<size_t>(i)];
            if (a != b) return a < b;
        }
        return false;
    };

    auto walk = [&](auto&& self, int d, double acc) -> void {
        const int row = n - 1 - d;
        cplx base = p.z[row];
        for (int i = row + 1; i < n; ++i)
            base -= p.rbar(row, i) * pts[sym[static_cast<size_t>(n - 1 - i)]];
        const cplx rdiag = p.rbar(row, row);
        for (int q = 0; q < order; ++q) {
            const double metric = acc + std::norm(base - rdiag * pts[static_cast<size_t>(q)]);
            sym[static_cast<size_t>(d)] = static_cast<std::uint8_t>(q);
            const double ref = ml_prefix[static_cast<size_t>(d)];
            if (metric < ref || (metric == ref && lex_before_ml(d + 1)))
                ++better[static_cast<size_t>(d)];
            if (row > 0) self(self, d + 1, metric);
        }
    };
    walk(walk, 0, 0.0);

    prof.ranks.resize(static_cast<size_t>(n));
    for (int d = 0; d < n; ++d) prof.ranks[static_cast<size_t>(d)] = better[static_cast<size_t>(d)] + 1;
    return prof;
}

/// Turn per-layer ranks into a feasible width schedule. Each width is the
/// rank clamped from above by the tree's growth limit Q * K_{k-1} (and Q^k).
/// If the clamp fires, that layer keeps every child of the surviving parents,
/// so nothing is pruned there and the retention guarantee survives clamping.
inline KSchedule schedule_from_ranks(const std::vector<long long>& ranks, int order) {
    if (ranks.empty()) throw EmptySampleError("schedule_from_ranks: no ranks");
    KSchedule s;
    long long prev = 1;
    long long cap = 1;
    bool cap_sat = false;
    for (long long r : ranks) {
        if (r < 1) throw ConfigError("schedule_from_ranks: rank < 1");
        if (!cap_sat) {
            if (cap > (1ll << 62) / order) cap_sat = true;
            else cap *= order;
        }
        long long w = std::min(r, prev * order);
        if (!cap_sat) w = std::min(w, cap);
        s.widths.push_back(w);
        prev = w;
    }
    s.validate(order);
    return s;
}

/// Order statistic used for target aggregation: the smallest value v such
/// that at least ceil(q * n) of the samples are <= v.
inline long long rank_quantile(std::vector<long long> samples, double q) {
    if (samples.empty()) throw EmptySampleError("rank_quantile: no samples");
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("rank_quantile: q outside [0, 1]");
    std::sort(samples.begin(), samples.end());
    const long long n = static_cast<long long>(samples.size());
    long long pos = static_cast<long long>(std::ceil(q * static_cast<double>(n)));
    pos = std::clamp(pos, 1ll, n);
    return samples[static_cast<size_t>(pos - 1)];
}

/// Aggregated per-layer width targets: the q-quantile of observed ranks at
/// each layer, clamped into a feasible schedule. The raw per-instance
/// profiles are kept for reporting.
struct KTargetSet {
    int nt = 0;
    int order = 0;
    double quantile = 0.0;
    std::vector<long long> targets;
    std::vector<std::vector<long long>> samples;
};

inline KTargetSet generate_targets(int nr, int nt, int order, double snr_db, int count,
                                   double quantile, std::uint64_t seed,
                                   long long budget = kDefaultMlBudget) {
    if (count < 1) throw EmptySampleError("generate_targets: count < 1");
    if (!(quantile >= 0.0 && quantile <= 1.0))
        throw ConfigError("generate_targets: quantile outside [0, 1]");
    const Constellation c = Constellation::make(order);
    const double n0 = noise_variance(nt, snr_db);

    KTargetSet set;
    set.nt = nt;
    set.order = order;
    set.quantile = quantile;
    for (int inst = 0; inst < count; ++inst) {
        RngStream rng(seed, static_cast<std::uint64_t>(inst));
        const ComplexMatrix h = sample_channel(nr, nt, rng);
        ComplexVector x(nt);
        for (int i = 0; i < nt; ++i)
            x[i] = c.points[static_cast<size_t>(rng.next_u64() % static_cast<std::uint64_t>(order))];
        const ComplexVector y = transmit_with_n0(h, x, n0, rng);
        set.samples.push_back(rank_profile(preprocess(h, y, c), budget).ranks);
    }

    std::vector<long long> quantiles(static_cast<size_t>(nt));
    for (int k = 0; k < nt; ++k) {
        std::vector<long long> layer;
        layer.reserve(set.samples.size());
        for (const auto& s : set.samples) layer.push_back(s[static_cast<size_t>(k)]);
        quantiles[static_cast<size_t>(k)] = rank_quantile(std::move(layer), quantile);
    }
    set.targets = schedule_from_ranks(quantiles, order).widths;
    return set;
}

}  // namespace akbest
