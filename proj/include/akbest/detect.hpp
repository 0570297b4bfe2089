#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "akbest/channel.hpp"
#include "akbest/common.hpp"
#include "akbest/linalg.hpp"
#include "akbest/modem.hpp"

namespace akbest {

/// Hard cap on tree depth for the inline symbol arrays below.
inline constexpr int kMaxAntennas = 16;

/// Exhaustive-enumeration guard: detectors that visit all Q^Nt leaves refuse
/// to run past this many candidates unless the caller raises the budget.
inline constexpr long long kDefaultMlBudget = 1 << 20;

/// QR-transformed detection problem. Minimizing ||y - Hx||^2 over candidate
/// vectors x is equivalent to minimizing ||z - Rbar x||^2, which unrolls into
/// a layered tree search because Rbar is upper triangular with a real,
/// strictly positive diagonal. The received vector is kept alongside because
/// the neural path selector consumes (y, Rbar, z) together.
struct PreprocessedProblem {
    ComplexVector z;
    ComplexMatrix rbar;
    Constellation constellation;
    ComplexVector y;

    int nt() const { return rbar.cols; }
};

inline PreprocessedProblem preprocess(const ComplexMatrix& h, const ComplexVector& y,
                                      const Constellation& c) {
    if (h.rows != y.len()) throw DimensionError("preprocess: shape mismatch");
    auto [q1, rbar] = qr_thin(h);
    return PreprocessedProblem{hermitian_times_vector(q1, y), std::move(rbar), c, y};
}

/// A partial path from the root. Symbols are stored in placement order:
/// symbols[0] is the point index for antenna Nt, symbols[1] for antenna
/// Nt-1, and so on. layer is the 1-based index of the next row to fill plus
/// one; the root has layer Nt+1 and an empty assignment, leaves have layer 1.
struct PathNode {
    int layer = 0;
    std::vector<std::uint8_t> symbols;
    double metric = 0.0;

    static PathNode root(int nt) { return PathNode{nt + 1, {}, 0.0}; }
};

/// Per-layer beam widths K_1..K_Nt, indexed from the root, plus the fitting
/// coefficients they were generated from (zeros for hand-built schedules).
struct KSchedule {
    std::vector<long long> widths;
    double a = 0.0, b = 0.0, c = 0.0;

    void validate(int order) const {
        if (widths.empty()) throw ConfigError("KSchedule: empty");
        long long prev = 1;
        long long cap = 1;
        bool cap_sat = false;
        for (size_t k = 0; k < widths.size(); ++k) {
            if (!cap_sat) {
                if (cap > (1ll << 62) / order) cap_sat = true;
                else cap *= order;
            }
            const long long w = widths[k];
            if (w < 1) throw ConfigError("KSchedule: width < 1");
            if (!cap_sat && w > cap) throw ConfigError("KSchedule: width exceeds Q^k");
            if (w > prev * order) throw ConfigError("KSchedule: width exceeds Q*K_{k-1}");
            prev = w;
        }
    }

    static KSchedule fixed(int nt, int order, long long k) {
        KSchedule s;
        long long cap = 1;
        for (int i = 0; i < nt; ++i) {
            cap = std::min(cap * order, (1ll << 62));
            s.widths.push_back(std::min(k, cap));
        }
        return s;
    }

    /// K_k == Q^k at every layer: no pruning, exhaustive search.
    static KSchedule full(int nt, int order) {
        KSchedule s;
        long long cap = 1;
        for (int i = 0; i < nt; ++i) {
            cap *= order;
            s.widths.push_back(cap);
        }
        return s;
    }
};

/// Instrumentation record. nodes_expanded counts children scored by a tree
/// search (leaves visited, for ML); metric_evals counts node-metric
/// evaluations; sort_comparisons counts comparator calls made while selecting
/// survivors and the final leaf.
struct DetectorStats {
    std::uint64_t nodes_expanded = 0;
    std::uint64_t metric_evals = 0;
    std::uint64_t sort_comparisons = 0;

    DetectorStats& operator+=(const DetectorStats& o) {
        nodes_expanded += o.nodes_expanded;
        metric_evals += o.metric_evals;
        sort_comparisons += o.sort_comparisons;
        return *this;
    }
};

struct DetectResult {
    ComplexVector xhat;
    DetectorStats stats;
};

/// Node metric sigma for appending `candidate` to `node`: the squared residual
/// of row (node.layer - 1) of Rbar given the partial assignment.
inline double node_metric(const PreprocessedProblem& p, const PathNode& node, int candidate) {
    const int n = p.nt();
    if (node.layer < 2 || node.layer > n + 1) throw Error("node_metric: no symbol left to place");
    const int row = node.layer - 2;  // 0-based row being filled
    cplx acc = p.z[row];
    for (int i = row + 1; i < n; ++i)
        acc -= p.rbar(row, i) *
               p.constellation.points[node.symbols[static_cast<size_t>(n - 1 - i)]];
    acc -= p.rbar(row, row) * p.constellation.points[static_cast<size_t>(candidate)];
    return std::norm(acc);
}

namespace detail {

struct SearchNode {
    double metric;
    std::array<std::uint8_t, kMaxAntennas> sym;
};

inline bool lex_less(const std::array<std::uint8_t, kMaxAntennas>& a,
                     const std::array<std::uint8_t, kMaxAntennas>& b, int len) {
    for (int i = 0; i < len; ++i) {
        if (a[static_cast<size_t>(i)] != b[static_cast<size_t>(i)])
            return a[static_cast<size_t>(i)] < b[static_cast<size_t>(i)];
    }
    return false;
}

/// Optional search trace: examined (scored) partial paths per layer.
using SearchTrace = std::vector<std::vector<std::vector<std::uint8_t>>>;

/// Width-first beam search over the detection tree. At expansion step k
/// (k = 1 at the first layer under the root, placing antenna Nt), every
/// survivor is expanded over `cands[k-1]` (or the full constellation), the
/// children are scored, and the widths[k-1] best by (metric, lexicographic
/// symbols) are retained. Returns the best leaf.
inline SearchNode beam_search(const PreprocessedProblem& p, const std::vector<long long>& widths,
                              const std::vector<std::vector<int>>* cands, DetectorStats& stats,
                              SearchTrace* trace) {
    const int n = p.nt();
    if (n > kMaxAntennas) throw DimensionError("beam_search: too many antennas");
    if (static_cast<int>(widths.size()) != n) throw ConfigError("beam_search: widths/Nt mismatch");
    const auto& pts = p.constellation.points;
    const int order = p.constellation.order;

    std::vector<int> all(static_cast<size_t>(order));
    for (int q = 0; q < order; ++q) all[static_cast<size_t>(q)] = q;

    std::vector<SearchNode> parents{SearchNode{0.0, {}}};
    std::vector<SearchNode> children;
    if (trace) trace->assign(static_cast<size_t>(n), {});

    for (int k = 1; k <= n; ++k) {
        const int row = n - k;
        const std::vector<int>& cand = cands ? (*cands)[static_cast<size_t>(k - 1)] : all;
        children.clear();
        children.reserve(parents.size() * cand.size());
        for (const SearchNode& parent : parents) {
            cplx base = p.z[row];
            for (int i = row + 1; i < n; ++i)
                base -= p.rbar(row, i) * pts[parent.sym[static_cast<size_t>(n - 1 - i)]];
            const cplx rdiag = p.rbar(row, row);
            for (int q : cand) {
                SearchNode child;
                child.metric = parent.metric + std::norm(base - rdiag * pts[static_cast<size_t>(q)]);
                child.sym = parent.sym;
                child.sym[static_cast<size_t>(k - 1)] = static_cast<std::uint8_t>(q);
                children.push_back(child);
            }
        }
        stats.nodes_expanded += children.size();
        stats.metric_evals += children.size();

        if (trace) {
            auto& layer_trace = (*trace)[static_cast<size_t>(k - 1)];
            for (const SearchNode& ch : children)
                layer_trace.emplace_back(ch.sym.begin(), ch.sym.begin() + k);
        }

        const long long keep = widths[static_cast<size_t>(k - 1)];
        auto less = [&stats, k](const SearchNode& a, const SearchNode& b) {
            ++stats.sort_comparisons;
            if (a.metric != b.metric) return a.metric < b.metric;
            return lex_less(a.sym, b.sym, k);
        };
        if (static_cast<long long>(children.size()) > keep) {
            std::nth_element(children.begin(), children.begin() + static_cast<ptrdiff_t>(keep),
                             children.end(), less);
            children.resize(static_cast<size_t>(keep));
        }
        parents.swap(children);
    }

    auto less_final = [&stats, n](const SearchNode& a, const SearchNode& b) {
        ++stats.sort_comparisons;
        if (a.metric != b.metric) return a.metric < b.metric;
        return lex_less(a.sym, b.sym, n);
    };
    return *std::min_element(parents.begin(), parents.end(), less_final);
}

inline ComplexVector to_symbol_vector(const SearchNode& leaf, const PreprocessedProblem& p) {
    const int n = p.nt();
    ComplexVector x(n);
    for (int a = 0; a < n; ++a)
        x[a] = p.constellation.points[leaf.sym[static_cast<size_t>(n - 1 - a)]];
    return x;
}

}  // namespace detail

/// K-best detection with a per-layer width schedule.
inline DetectResult detect_kbest(const PreprocessedProblem& p, const KSchedule& schedule,
                                 detail::SearchTrace* trace = nullptr) {
    schedule.validate(p.constellation.order);
    if (static_cast<int>(schedule.widths.size()) != p.nt())
        throw ConfigError("detect_kbest: schedule length != Nt");
    DetectResult res;
    const detail::SearchNode leaf =
        detail::beam_search(p, schedule.widths, nullptr, res.stats, trace);
    res.xhat = detail::to_symbol_vector(leaf, p);
    return res;
}

/// Exhaustive ML detection on a preprocessed problem: depth-first enumeration
/// of all Q^Nt candidates with prefix-metric reuse. Leaves are visited in
/// lexicographic symbol order, so keeping the first strict minimum implements
/// the lowest-index tie-break.
inline DetectResult detect_ml_pre(const PreprocessedProblem& p,
                                  long long budget = kDefaultMlBudget) {
    const int n = p.nt();
    if (n > kMaxAntennas) throw DimensionError("detect_ml: too many antennas");
    const int order = p.constellation.order;
    long long leaves = 1;
    for (int i = 0; i < n; ++i) {
        leaves *= order;
        if (leaves > budget) throw BudgetError("detect_ml: Q^Nt exceeds exhaustive budget");
    }

    const auto& pts = p.constellation.points;
    detail::SearchNode best{0.0, {}};
    bool have_best = false;
    std::array<std::uint8_t, kMaxAntennas> sym{};
    DetectorStats stats;

    // Recursive lex-order DFS; depth d places antenna n-1-d (row n-1-d).
    auto walk = [&](auto&& self, int d, double acc) -> void {
        const int row = n - 1 - d;
        cplx base = p.z[row];
        for (int i = row + 1; i < n; ++i)
            base -= p.rbar(row, i) * pts[sym[static_cast<size_t>(n - 1 - i)]];
        const cplx rdiag = p.rbar(row, row);
        for (int q = 0; q < order; ++q) {
            const double metric = acc + std::norm(base - rdiag * pts[static_cast<size_t>(q)]);
            ++stats.metric_evals;
            sym[static_cast<size_t>(d)] = static_cast<std::uint8_t>(q);
            if (row == 0) {
                ++stats.sort_comparisons;
                if (!have_best || metric < best.metric) {
                    best.metric = metric;
                    best.sym = sym;
                    have_best = true;
                }
            } else {
                self(self, d + 1, metric);
            }
        }
    };
    walk(walk, 0, 0.0);
    stats.nodes_expanded = static_cast<std::uint64_t>(leaves);

    DetectResult res;
    res.stats = stats;
    res.xhat = detail::to_symbol_vector(best, p);
    return res;
}

inline DetectResult detect_ml(const ComplexMatrix& h, const ComplexVector& y,
                              const Constellation& c, long long budget = kDefaultMlBudget) {
    return detect_ml_pre(preprocess(h, y, c), budget);
}

enum class LinearMode { ZF, MMSE };

/// Linear equalization followed by per-component hard decision.
inline DetectResult detect_linear(const ComplexMatrix& h, const ComplexVector& y,
                                  const Constellation& c, LinearMode mode, double n0 = 0.0) {
    if (mode == LinearMode::MMSE && n0 <= 0.0)
        throw Error("detect_linear: MMSE requires N0 > 0");
    const ComplexVector soft = solve_regularized(h, y, mode == LinearMode::MMSE ? n0 : 0.0);
    DetectResult res;
    res.xhat = ComplexVector(soft.len());
    for (int i = 0; i < soft.len(); ++i)
        res.xhat[i] = c.points[static_cast<size_t>(hard_decision_index(soft[i], c))];
    return res;
}

}  // namespace akbest
