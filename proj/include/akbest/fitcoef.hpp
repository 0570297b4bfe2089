#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "akbest/adam.hpp"
#include "akbest/common.hpp"
#include "akbest/detect.hpp"
#include "akbest/rng.hpp"

namespace akbest {

/// Coefficients of the width-fitting curve K(k) = a * k^b + c evaluated at
/// the 1-based layer index k.
struct Coefficients {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
};

inline constexpr double kMinExponent = 0.05;
inline constexpr double kMaxExponent = 4.0;
inline constexpr double kRolloutPenalty = 1e30;

/// A curve-fitting problem: per-layer width targets K*_1..K*_Nt.
struct FitTask {
    std::vector<double> targets;
};

inline double k_of_layer(int k) { return static_cast<double>(k); }

inline double fit_loss(const Coefficients& x, const std::vector<double>& targets) {
    if (targets.empty()) throw EmptySampleError("fit_loss: no targets");
    if (!is_finite(x.a) || !is_finite(x.b) || !is_finite(x.c))
        throw NonFiniteError("fit_loss: non-finite coefficients");
    double s = 0.0;
    for (size_t k = 1; k <= targets.size(); ++k) {
        const double e = x.a * std::pow(k_of_layer(static_cast<int>(k)), x.b) + x.c -
                         targets[k - 1];
        s += e * e;
    }
    if (!is_finite(s)) throw NonFiniteError("fit_loss: overflow");
    return s;
}

inline Coefficients fit_gradient(const Coefficients& x, const std::vector<double>& targets) {
    if (targets.empty()) throw EmptySampleError("fit_gradient: no targets");
    if (!is_finite(x.a) || !is_finite(x.b) || !is_finite(x.c))
        throw NonFiniteError("fit_gradient: non-finite coefficients");
    Coefficients g{0.0, 0.0, 0.0};
    for (size_t k = 1; k <= targets.size(); ++k) {
        const double kk = k_of_layer(static_cast<int>(k));
        const double pk = std::pow(kk, x.b);
        const double e = x.a * pk + x.c - targets[k - 1];
        g.a += 2.0 * e * pk;
        g.b += 2.0 * e * x.a * pk * std::log(kk);
        g.c += 2.0 * e;
    }
    if (!is_finite(g.a) || !is_finite(g.b) || !is_finite(g.c))
        throw NonFiniteError("fit_gradient: overflow");
    return g;
}

/// Evaluate the fitted curve and round half-up into a feasible width
/// schedule: 1 <= K_k <= min(Q^k, Q * K_{k-1}).
inline KSchedule build_schedule(const Coefficients& x, int nt, int order) {
    if (nt < 1) throw DimensionError("build_schedule: nt < 1");
    KSchedule s;
    s.a = x.a;
    s.b = x.b;
    s.c = x.c;
    long long prev = 1;
    long long cap = 1;
    bool cap_sat = false;
    for (int k = 1; k <= nt; ++k) {
        const double v = x.a * std::pow(k_of_layer(k), x.b) + x.c;
        if (!is_finite(v)) throw NonFiniteError("build_schedule: non-finite width");
        if (!cap_sat) {
            if (cap > (1ll << 62) / order) cap_sat = true;
            else cap *= order;
        }
        long long w;
        if (v >= 4.0e18) w = 1ll << 62;
        else if (v <= -4.0e18) w = 1;
        else w = static_cast<long long>(std::floor(v + 0.5));
        w = std::max(w, 1ll);
        w = std::min(w, prev * order);
        if (!cap_sat) w = std::min(w, cap);
        s.widths.push_back(w);
        prev = w;
    }
    s.validate(order);
    return s;
}

inline void clamp_exponent(Coefficients& x) {
    if (x.b < kMinExponent) x.b = kMinExponent;
    if (x.b > kMaxExponent) x.b = kMaxExponent;
}

// ---------------------------------------------------------------------------
// F1: predicted-gradient stepper. Maintains an exponential moving average of
// observed gradients and steps against the prediction; decay 0 is plain
// gradient descent.
// ---------------------------------------------------------------------------

struct GradPredParams {
    double step = 3e-3;
    double decay = 0.9;
};

/// Plain gradient descent with the shared default step, used as the
/// comparison baseline for the trained recurrent stepper.
inline GradPredParams plain_gd_params() { return GradPredParams{3e-3, 0.0}; }

struct GradPredState {
    double g[3] = {0.0, 0.0, 0.0};
};

/// Advance the predictor and return the proposed update (da, db, dc).
inline Coefficients gradpred_delta(GradPredState& st, const Coefficients& grad,
                                   const GradPredParams& p) {
    const double in[3] = {grad.a, grad.b, grad.c};
    Coefficients d;
    double* out[3] = {&d.a, &d.b, &d.c};
    for (int i = 0; i < 3; ++i) {
        if (!is_finite(in[i])) throw NonFiniteError("gradpred: non-finite gradient");
        st.g[i] = p.decay * st.g[i] + (1.0 - p.decay) * in[i];
        *out[i] = -p.step * st.g[i];
    }
    return d;
}

inline void step_gradpred(Coefficients& x, GradPredState& st, const Coefficients& grad,
                          const GradPredParams& p) {
    const Coefficients d = gradpred_delta(st, grad, p);
    x.a += d.a;
    x.b += d.b;
    x.c += d.c;
    clamp_exponent(x);
}

// ---------------------------------------------------------------------------
// F2: one LSTM cell applied per coordinate with shared meta-parameters.
// Flat layout: [Wi Wf Wg Wo](4H) [Ui Uf Ug Uo](4H^2) [bi bf bg bo](4H)
// [w_out](H) [out_gain](1).
// ---------------------------------------------------------------------------

inline constexpr int kLstmHidden = 8;

inline constexpr int lstm_theta_size() {
    return 4 * kLstmHidden * kLstmHidden + 9 * kLstmHidden + 1;
}

struct LstmOptState {
    double h[3][kLstmHidden] = {};
    double c[3][kLstmHidden] = {};
    double input_scale = -1.0;  // frozen from the first observed gradient
};

inline std::vector<double> init_theta(RngStream& rng) {
    constexpr int h = kLstmHidden;
    std::vector<double> theta(static_cast<size_t>(lstm_theta_size()), 0.0);
    auto u = [&rng] { return 0.2 * rng.uniform01() - 0.1; };
    for (int i = 0; i < 4 * h; ++i) theta[static_cast<size_t>(i)] = u();
    for (int i = 0; i < 4 * h * h; ++i) theta[static_cast<size_t>(4 * h + i)] = u();
    for (int j = 0; j < h; ++j)  // forget-gate bias starts open
        theta[static_cast<size_t>(4 * h + 4 * h * h + h + j)] = 1.0;
    for (int j = 0; j < h; ++j) theta[static_cast<size_t>(8 * h + 4 * h * h + j)] = u();
    theta[static_cast<size_t>(4 * h * h + 9 * h)] = -0.1;
    return theta;
}

/// Advance all three per-coordinate cells and return the proposed update.
inline Coefficients lstm_delta(LstmOptState& st, const Coefficients& grad,
                               const std::vector<double>& theta) {
    constexpr int h = kLstmHidden;
    if (theta.size() != static_cast<size_t>(lstm_theta_size()))
        throw DimensionError("lstm_delta: bad theta size");
    const double* w = theta.data();           // 4h input weights
    const double* uu = w + 4 * h;             // 4h^2 recurrent weights
    const double* b = uu + 4 * h * h;         // 4h biases
    const double* wout = b + 4 * h;           // h readout weights
    const double gain = wout[h];

    const double in[3] = {grad.a, grad.b, grad.c};
    for (int d = 0; d < 3; ++d)
        if (!is_finite(in[d])) throw NonFiniteError("lstm_delta: non-finite gradient");
    if (st.input_scale < 0.0) {
        st.input_scale =
            std::sqrt((in[0] * in[0] + in[1] * in[1] + in[2] * in[2]) / 3.0) + 1e-12;
    }

    auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    Coefficients delta;
    double* out[3] = {&delta.a, &delta.b, &delta.c};
    for (int d = 0; d < 3; ++d) {
        const double u = in[d] / st.input_scale;
        double acc = 0.0;
        double hnew[h];
        for (int j = 0; j < h; ++j) {
            double pre[4];
            for (int gate = 0; gate < 4; ++gate) {
                double s = w[gate * h + j] * u + b[gate * h + j];
                const double* urow = uu + gate * h * h + j * h;
                for (int l = 0; l < h; ++l) s += urow[l] * st.h[d][l];
                pre[gate] = s;
            }
            const double gi = sigmoid(pre[0]);
            const double gf = sigmoid(pre[1]);
            const double gg = std::tanh(pre[2]);
            const double go = sigmoid(pre[3]);
            const double cn = gf * st.c[d][j] + gi * gg;
            st.c[d][j] = cn;
            hnew[j] = go * std::tanh(cn);
            acc += wout[j] * hnew[j];
        }
        for (int j = 0; j < h; ++j) st.h[d][j] = hnew[j];
        *out[d] = gain * acc;
        if (!is_finite(*out[d])) throw NonFiniteError("lstm_delta: non-finite update");
    }
    return delta;
}

inline void step_recurrent(Coefficients& x, LstmOptState& st, const Coefficients& grad,
                           const std::vector<double>& theta) {
    const Coefficients d = lstm_delta(st, grad, theta);
    x.a += d.a;
    x.b += d.b;
    x.c += d.c;
    clamp_exponent(x);
}

// ---------------------------------------------------------------------------
// Rollouts and fusion.
// ---------------------------------------------------------------------------

/// Task-scaled starting point for coefficient rollouts: the straight line
/// (b = 1) through the first and last targets. Real width targets span more
/// than an order of magnitude and usually fall with depth, so a fixed start
/// would leave both steppers in the wrong basin.
inline Coefficients initial_coefficients(const FitTask& task) {
    const size_t n = task.targets.size();
    if (n == 0) throw EmptySampleError("initial_coefficients: empty task");
    Coefficients x;
    x.b = 1.0;
    x.a = n > 1 ? (task.targets[n - 1] - task.targets[0]) / static_cast<double>(n - 1) : 0.0;
    x.c = task.targets[0] - x.a;
    return x;
}

struct RolloutOpts {
    int steps = 50;
    bool x0_from_task = true;      // start from initial_coefficients(task)
    Coefficients x0{1.0, 1.0, 1.0};  // used when x0_from_task is false
};

/// Fusion mixes the two proposed updates: dX = w1 * dX_gradpred + w2 * dX_lstm.
/// (1, 0) reproduces the predictor exactly and (0, 1) the recurrent stepper.
struct FusionWeights {
    double w1 = 1.0;
    double w2 = 0.0;
};

namespace detail {

template <class StepFn>
inline double rollout_engine(const FitTask& task, const RolloutOpts& opts, StepFn&& advance,
                             Coefficients* final_x) {
    const Coefficients start = opts.x0_from_task ? initial_coefficients(task) : opts.x0;
    Coefficients x = start;
    try {
        for (int t = 0; t < opts.steps; ++t) advance(x, fit_gradient(x, task.targets));
        const double loss = fit_loss(x, task.targets);
        if (final_x) *final_x = x;
        return loss;
    } catch (const NonFiniteError&) {
        if (final_x) *final_x = start;
        return kRolloutPenalty;
    }
}

}  // namespace detail

inline double rollout_gradpred(const FitTask& task, const GradPredParams& p,
                               const RolloutOpts& opts, Coefficients* final_x = nullptr) {
    GradPredState st;
    return detail::rollout_engine(
        task, opts,
        [&](Coefficients& x, const Coefficients& g) { step_gradpred(x, st, g, p); }, final_x);
}

inline double rollout_recurrent(const FitTask& task, const std::vector<double>& theta,
                                const RolloutOpts& opts, Coefficients* final_x = nullptr) {
    LstmOptState st;
    return detail::rollout_engine(
        task, opts,
        [&](Coefficients& x, const Coefficients& g) { step_recurrent(x, st, g, theta); },
        final_x);
}

inline double rollout_fused(const FitTask& task, const GradPredParams& p,
                            const std::vector<double>& theta, const FusionWeights& w,
                            const RolloutOpts& opts, Coefficients* final_x = nullptr) {
    GradPredState s1;
    LstmOptState s2;
    return detail::rollout_engine(
        task, opts,
        [&](Coefficients& x, const Coefficients& g) {
            const Coefficients d1 = gradpred_delta(s1, g, p);
            const Coefficients d2 = lstm_delta(s2, g, theta);
            x.a += w.w1 * d1.a + w.w2 * d2.a;
            x.b += w.w1 * d1.b + w.w2 * d2.b;
            x.c += w.w1 * d1.c + w.w2 * d2.c;
            clamp_exponent(x);
        },
        final_x);
}

// ---------------------------------------------------------------------------
// Meta-training of the recurrent stepper: the meta-objective is the mean
// final fitting loss over a batch of tasks after a fixed rollout, minimized
// over theta with Adam on central-difference gradients.
// ---------------------------------------------------------------------------

using TaskGen = std::function<FitTask(RngStream&)>;

/// Random width curves resembling aggregated rank targets: base curve
/// A * k^B + C with per-layer jitter, floored at one point per layer. Half
/// the tasks fall with depth (negative A, ending near one point), matching
/// real rank profiles whose last layer always has rank one.
inline TaskGen make_synthetic_task_gen(int nt, int order) {
    if (nt < 1) throw DimensionError("make_synthetic_task_gen: nt < 1");
    return [nt, order](RngStream& rng) {
        double a = 0.5 + 2.5 * rng.uniform01();
        const double b = 0.3 + 1.2 * rng.uniform01();
        double c;
        if (rng.uniform01() < 0.5) {
            c = 3.0 * rng.uniform01();
        } else {
            a = -a;
            c = 1.0 + 3.0 * rng.uniform01() - a * std::pow(static_cast<double>(nt), b);
        }
        FitTask task;
        double cap = 1.0;
        for (int k = 1; k <= nt; ++k) {
            cap = std::min(cap * order, 1e6);
            const double jitter = rng.uniform01() - 0.5;
            const double v = a * std::pow(static_cast<double>(k), b) + c + jitter;
            task.targets.push_back(std::min(std::max(v, 1.0), cap));
        }
        return task;
    };
}

struct MetaTrainOpts {
    int batches = 80;
    int tasks_per_batch = 8;
    double fd_eps = 1e-4;
    double lr = 0.01;
    RolloutOpts rollout{};
};

struct MetaTrainReport {
    std::vector<double> batch_loss;  // meta-objective at current theta, per batch
};

inline MetaTrainReport meta_train_recurrent(std::vector<double>& theta, const TaskGen& gen,
                                            const MetaTrainOpts& opts, RngStream& rng) {
    if (opts.batches < 1 || opts.tasks_per_batch < 1 || opts.fd_eps <= 0.0)
        throw ConfigError("meta_train_recurrent: bad options");
    if (theta.size() != static_cast<size_t>(lstm_theta_size()))
        throw DimensionError("meta_train_recurrent: bad theta size");

    Adam adam(theta.size(), AdamOpts{opts.lr, 0.9, 0.999, 1e-8});
    MetaTrainReport report;
    std::vector<double> grad(theta.size());
    for (int batch = 0; batch < opts.batches; ++batch) {
        std::vector<FitTask> tasks;
        for (int t = 0; t < opts.tasks_per_batch; ++t) tasks.push_back(gen(rng));
        auto objective = [&](const std::vector<double>& th) {
            double s = 0.0;
            for (const FitTask& task : tasks) s += rollout_recurrent(task, th, opts.rollout);
            return s / static_cast<double>(tasks.size());
        };
        report.batch_loss.push_back(objective(theta));
        for (size_t i = 0; i < theta.size(); ++i) {
            const double keep = theta[i];
            theta[i] = keep + opts.fd_eps;
            const double hi = objective(theta);
            theta[i] = keep - opts.fd_eps;
            const double lo = objective(theta);
            theta[i] = keep;
            grad[i] = (hi - lo) / (2.0 * opts.fd_eps);
        }
        adam.step(theta, grad);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Fusion weight search: dense grid over [-0.5, 1.5]^2 followed by a short
// finite-difference descent, keeping the best candidate seen. The grid
// contains (1, 0) and (0, 1), so the result can never lose to either input
// stepper on the search tasks.
// ---------------------------------------------------------------------------

struct FusionSearchOpts {
    double lo = -0.5;
    double hi = 1.5;
    double grid_step = 0.01;
    int refine_steps = 20;
    double refine_lr = 5e-3;
    double refine_eps = 1e-3;
};

struct FusionSearchResult {
    FusionWeights weights;
    double mean_loss = 0.0;  // at the chosen weights
    double f1_loss = 0.0;    // at (1, 0)
    double f2_loss = 0.0;    // at (0, 1)
};

inline FusionSearchResult fuse_weights(const std::vector<FitTask>& tasks,
                                       const GradPredParams& p, const std::vector<double>& theta,
                                       const RolloutOpts& rollout,
                                       const FusionSearchOpts& opts = {}) {
    if (tasks.empty()) throw EmptySampleError("fuse_weights: no tasks");
    auto eval = [&](double w1, double w2) {
        double s = 0.0;
        for (const FitTask& task : tasks)
            s += rollout_fused(task, p, theta, FusionWeights{w1, w2}, rollout);
        return s / static_cast<double>(tasks.size());
    };

    FusionSearchResult res;
    res.f1_loss = eval(1.0, 0.0);
    res.f2_loss = eval(0.0, 1.0);
    res.weights = FusionWeights{1.0, 0.0};
    res.mean_loss = res.f1_loss;

    const int cells = static_cast<int>(std::llround((opts.hi - opts.lo) / opts.grid_step));
    for (int i = 0; i <= cells; ++i) {
        for (int j = 0; j <= cells; ++j) {
            const double w1 = opts.lo + opts.grid_step * i;
            const double w2 = opts.lo + opts.grid_step * j;
            const double v = eval(w1, w2);
            if (v < res.mean_loss) {
                res.mean_loss = v;
                res.weights = FusionWeights{w1, w2};
            }
        }
    }

    double w1 = res.weights.w1, w2 = res.weights.w2;
    for (int it = 0; it < opts.refine_steps; ++it) {
        const double g1 =
            (eval(w1 + opts.refine_eps, w2) - eval(w1 - opts.refine_eps, w2)) /
            (2.0 * opts.refine_eps);
        const double g2 =
            (eval(w1, w2 + opts.refine_eps) - eval(w1, w2 - opts.refine_eps)) /
            (2.0 * opts.refine_eps);
        w1 -= opts.refine_lr * g1;
        w2 -= opts.refine_lr * g2;
        const double v = eval(w1, w2);
        if (v < res.mean_loss) {
            res.mean_loss = v;
            res.weights = FusionWeights{w1, w2};
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// End-to-end coefficient training against one measured target set.
// ---------------------------------------------------------------------------

struct CoeffTrainOpts {
    GradPredParams gradpred{};
    MetaTrainOpts meta{};
    RolloutOpts rollout{};
    FusionSearchOpts fusion{};
};

struct CoeffTrainResult {
    Coefficients coeffs;
    KSchedule schedule;
    FusionWeights weights;
    double final_loss = 0.0;
    double f1_loss = 0.0;
    double f2_loss = 0.0;
    std::vector<double> theta;
    MetaTrainReport meta_report;
};

inline CoeffTrainResult train_coefficients(const std::vector<double>& targets, int nt, int order,
                                           const CoeffTrainOpts& opts, std::uint64_t seed) {
    if (static_cast<int>(targets.size()) != nt)
        throw DimensionError("train_coefficients: targets/nt mismatch");
    RngStream rng(seed, 0xC0EFull);
    CoeffTrainResult res;
    res.theta = init_theta(rng);
    res.meta_report =
        meta_train_recurrent(res.theta, make_synthetic_task_gen(nt, order), opts.meta, rng);

    const FitTask real{targets};
    const FusionSearchResult fusion =
        fuse_weights({real}, opts.gradpred, res.theta, opts.rollout, opts.fusion);
    res.weights = fusion.weights;
    res.f1_loss = fusion.f1_loss;
    res.f2_loss = fusion.f2_loss;
    res.final_loss = rollout_fused(real, opts.gradpred, res.theta, res.weights, opts.rollout,
                                   &res.coeffs);
    res.schedule = build_schedule(res.coeffs, nt, order);
    return res;
}

}  // namespace akbest
