#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "akbest/adam.hpp"
#include "akbest/channel.hpp"
#include "akbest/detect.hpp"
#include "akbest/model_io.hpp"

namespace akbest {

/// Per-antenna selector network shape: l convolutional stages with m x m
/// kernels (zero padding, stride 1, `channels` planes each), one fully
/// connected ReLU stage of m*n units, and a 2-unit linear output holding the
/// real and imaginary part of the soft symbol.
struct SelectorHyper {
    int l = 4;
    int m = 3;
    int n = 32;
    int channels = 8;

    int fc_units() const { return m * n; }

    void validate() const {
        if (l < 1 || m < 1 || n < 1 || channels < 1)
            throw ConfigError("SelectorHyper: all sizes must be >= 1");
        if (m % 2 == 0) throw ConfigError("SelectorHyper: kernel size must be odd");
    }
};

/// Dense multi-channel image, data laid out [channel][row][col].
struct Image {
    int channels = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Image() = default;
    Image(int ch, int r, int c)
        : channels(ch), rows(r), cols(c), data(static_cast<size_t>(ch) * r * c, 0.0) {}

    double& at(int ch, int r, int c) {
        return data[(static_cast<size_t>(ch) * rows + r) * cols + c];
    }
    double at(int ch, int r, int c) const {
        return data[(static_cast<size_t>(ch) * rows + r) * cols + c];
    }
};

inline int selector_rows(int nt) { return nt + 2; }
inline int selector_cols(int nt, int nr) { return nr > nt ? nr : nt; }

/// Pack (y, Rbar, z) into the 2-channel network input: rows 0..Nt-1 hold
/// Rbar, row Nt holds z, row Nt+1 holds y; channel 0 real, channel 1
/// imaginary; short rows are zero-padded on the right.
inline Image assemble_input(const ComplexVector& y, const ComplexMatrix& rbar,
                            const ComplexVector& z) {
    const int nt = rbar.cols;
    if (rbar.rows != nt) throw DimensionError("assemble_input: Rbar must be square");
    if (z.len() != nt) throw DimensionError("assemble_input: z length != Nt");
    if (y.len() < nt) throw DimensionError("assemble_input: y shorter than Nt");
    Image g(2, selector_rows(nt), selector_cols(nt, y.len()));
    for (int r = 0; r < nt; ++r) {
        for (int c = 0; c < nt; ++c) {
            g.at(0, r, c) = rbar(r, c).real();
            g.at(1, r, c) = rbar(r, c).imag();
        }
    }
    for (int c = 0; c < nt; ++c) {
        g.at(0, nt, c) = z[c].real();
        g.at(1, nt, c) = z[c].imag();
    }
    for (int c = 0; c < y.len(); ++c) {
        g.at(0, nt + 1, c) = y[c].real();
        g.at(1, nt + 1, c) = y[c].imag();
    }
    return g;
}

/// Inverse of assemble_input given the original dimensions.
struct DisassembledInput {
    ComplexVector y;
    ComplexMatrix rbar;
    ComplexVector z;
};

inline DisassembledInput disassemble_input(const Image& g, int nt, int nr) {
    if (g.channels != 2 || g.rows != selector_rows(nt) || g.cols != selector_cols(nt, nr))
        throw DimensionError("disassemble_input: image shape mismatch");
    DisassembledInput out{ComplexVector(nr), ComplexMatrix(nt, nt), ComplexVector(nt)};
    for (int r = 0; r < nt; ++r)
        for (int c = 0; c < nt; ++c) out.rbar(r, c) = {g.at(0, r, c), g.at(1, r, c)};
    for (int c = 0; c < nt; ++c) out.z[c] = {g.at(0, nt, c), g.at(1, nt, c)};
    for (int c = 0; c < nr; ++c) out.y[c] = {g.at(0, nt + 1, c), g.at(1, nt + 1, c)};
    return out;
}

/// One soft-symbol regression network with a flat parameter vector. Offsets,
/// in order: per-stage conv weights [out][in][m][m] and biases [out], then
/// FC weights [unit][feature] and biases, then the 2-row output layer.
class SelectorNet {
  public:
    SelectorHyper hyper;
    int rows = 0;
    int cols = 0;
    std::vector<double> params;

    static SelectorNet create(const SelectorHyper& hyper, int rows, int cols, RngStream* rng) {
        hyper.validate();
        if (rows < 1 || cols < 1) throw DimensionError("SelectorNet: empty input image");
        SelectorNet net;
        net.hyper = hyper;
        net.rows = rows;
        net.cols = cols;
        net.params.assign(net.param_count(), 0.0);
        if (rng) net.he_init(*rng);
        return net;
    }

    size_t param_count() const {
        size_t count = 0;
        for (int s = 0; s < hyper.l; ++s)
            count += static_cast<size_t>(hyper.channels) * in_ch(s) * hyper.m * hyper.m +
                     hyper.channels;
        count += static_cast<size_t>(hyper.fc_units()) * features() + hyper.fc_units();
        count += 2u * hyper.fc_units() + 2u;
        return count;
    }

    cplx forward(const Image& g) const {
        Workspace ws;
        run_forward(g, ws);
        return {ws.out[0], ws.out[1]};
    }

    /// Mean squared error of the batch (per-sample |target - output|^2).
    double batch_loss(const std::vector<Image>& gs, const std::vector<cplx>& targets) const {
        if (gs.size() != targets.size() || gs.empty())
            throw DimensionError("batch_loss: batch mismatch");
        double total = 0.0;
        Workspace ws;
        for (size_t i = 0; i < gs.size(); ++i) {
            run_forward(gs[i], ws);
            const double e0 = ws.out[0] - targets[i].real();
            const double e1 = ws.out[1] - targets[i].imag();
            total += e0 * e0 + e1 * e1;
        }
        return total / static_cast<double>(gs.size());
    }

    /// Mean loss and its gradient with respect to every parameter.
    double batch_loss_and_grad(const std::vector<Image>& gs, const std::vector<cplx>& targets,
                               std::vector<double>& grad) const {
        if (gs.size() != targets.size() || gs.empty())
            throw DimensionError("batch_loss_and_grad: batch mismatch");
        grad.assign(params.size(), 0.0);
        double total = 0.0;
        Workspace ws;
        for (size_t i = 0; i < gs.size(); ++i) {
            run_forward(gs[i], ws);
            const double e0 = ws.out[0] - targets[i].real();
            const double e1 = ws.out[1] - targets[i].imag();
            total += e0 * e0 + e1 * e1;
            run_backward(gs[i], ws, 2.0 * e0, 2.0 * e1, grad);
        }
        const double inv = 1.0 / static_cast<double>(gs.size());
        for (double& g : grad) g *= inv;
        return total * inv;
    }

  private:
    struct Workspace {
        std::vector<std::vector<double>> act;  // per conv stage, post-ReLU
        std::vector<double> fc_act;
        double out[2] = {0.0, 0.0};
    };

    int in_ch(int stage) const { return stage == 0 ? 2 : hyper.channels; }
    int features() const { return hyper.channels * rows * cols; }

    size_t conv_w_off(int stage) const {
        size_t off = 0;
        for (int s = 0; s < stage; ++s)
            off += static_cast<size_t>(hyper.channels) * in_ch(s) * hyper.m * hyper.m +
                   hyper.channels;
        return off;
    }
    size_t conv_b_off(int stage) const {
        return conv_w_off(stage) +
               static_cast<size_t>(hyper.channels) * in_ch(stage) * hyper.m * hyper.m;
    }
    size_t fc_w_off() const { return conv_w_off(hyper.l); }
    size_t fc_b_off() const { return fc_w_off() + static_cast<size_t>(hyper.fc_units()) * features(); }
    size_t out_w_off() const { return fc_b_off() + hyper.fc_units(); }
    size_t out_b_off() const { return out_w_off() + 2u * hyper.fc_units(); }

    void he_init(RngStream& rng) {
        auto fill = [&rng, this](size_t off, size_t count, int fan_in) {
            const double limit = std::sqrt(6.0 / fan_in);
            for (size_t i = 0; i < count; ++i)
                params[off + i] = limit * (2.0 * rng.uniform01() - 1.0);
        };
        for (int s = 0; s < hyper.l; ++s) {
            const size_t wcount =
                static_cast<size_t>(hyper.channels) * in_ch(s) * hyper.m * hyper.m;
            fill(conv_w_off(s), wcount, in_ch(s) * hyper.m * hyper.m);
        }
        fill(fc_w_off(), static_cast<size_t>(hyper.fc_units()) * features(), features());
        fill(out_w_off(), 2u * hyper.fc_units(), hyper.fc_units());
    }

    // Convolution with zero padding and stride 1; output planes keep the
    // input's spatial size.
    void conv_forward(const double* w, const double* b, const double* in, int ic_count,
                      double* out) const {
        const int m = hyper.m, pad = m / 2, oc_count = hyper.channels;
        const size_t plane = static_cast<size_t>(rows) * cols;
        for (int oc = 0; oc < oc_count; ++oc) {
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    double s = b[oc];
                    for (int ic = 0; ic < ic_count; ++ic) {
                        const double* wk =
                            w + ((static_cast<size_t>(oc) * ic_count + ic) * m) * m;
                        const double* ip = in + plane * ic;
                        for (int kr = 0; kr < m; ++kr) {
                            const int rr = r + kr - pad;
                            if (rr < 0 || rr >= rows) continue;
                            for (int kc = 0; kc < m; ++kc) {
                                const int cc = c + kc - pad;
                                if (cc < 0 || cc >= cols) continue;
                                s += wk[kr * m + kc] * ip[rr * cols + cc];
                            }
                        }
                    }
                    out[plane * oc + r * cols + c] = s > 0.0 ? s : 0.0;  // ReLU
                }
            }
        }
    }

    void run_forward(const Image& g, Workspace& ws) const {
        if (g.channels != 2 || g.rows != rows || g.cols != cols)
            throw DimensionError("SelectorNet: input image shape mismatch");
        ws.act.resize(static_cast<size_t>(hyper.l));
        const double* in = g.data.data();
        int ic = 2;
        for (int s = 0; s < hyper.l; ++s) {
            ws.act[s].assign(static_cast<size_t>(features()), 0.0);
            conv_forward(params.data() + conv_w_off(s), params.data() + conv_b_off(s), in, ic,
                         ws.act[s].data());
            in = ws.act[s].data();
            ic = hyper.channels;
        }
        const int units = hyper.fc_units();
        const int feat = features();
        ws.fc_act.assign(static_cast<size_t>(units), 0.0);
        const double* fw = params.data() + fc_w_off();
        const double* fb = params.data() + fc_b_off();
        for (int u = 0; u < units; ++u) {
            double s = fb[u];
            const double* wrow = fw + static_cast<size_t>(u) * feat;
            for (int f = 0; f < feat; ++f) s += wrow[f] * in[f];
            ws.fc_act[u] = s > 0.0 ? s : 0.0;
        }
        const double* ow = params.data() + out_w_off();
        const double* ob = params.data() + out_b_off();
        for (int k = 0; k < 2; ++k) {
            double s = ob[k];
            for (int u = 0; u < units; ++u) s += ow[static_cast<size_t>(k) * units + u] * ws.fc_act[u];
            ws.out[k] = s;
            if (!is_finite(s)) throw NonFiniteError("SelectorNet: non-finite output");
        }
    }

    void run_backward(const Image& g, const Workspace& ws, double dout0, double dout1,
                      std::vector<double>& grad) const {
        const int units = hyper.fc_units();
        const int feat = features();
        const double* ow = params.data() + out_w_off();
        const double dout[2] = {dout0, dout1};

        std::vector<double> dfc(static_cast<size_t>(units), 0.0);
        for (int k = 0; k < 2; ++k) {
            grad[out_b_off() + k] += dout[k];
            for (int u = 0; u < units; ++u) {
                grad[out_w_off() + static_cast<size_t>(k) * units + u] += dout[k] * ws.fc_act[u];
                dfc[u] += dout[k] * ow[static_cast<size_t>(k) * units + u];
            }
        }
        for (int u = 0; u < units; ++u)
            if (ws.fc_act[u] <= 0.0) dfc[u] = 0.0;

        const double* last = ws.act[static_cast<size_t>(hyper.l - 1)].data();
        std::vector<double> dflat(static_cast<size_t>(feat), 0.0);
        const double* fw = params.data() + fc_w_off();
        for (int u = 0; u < units; ++u) {
            const double d = dfc[u];
            if (d == 0.0) continue;
            grad[fc_b_off() + u] += d;
            const size_t wrow = fc_w_off() + static_cast<size_t>(u) * feat;
            for (int f = 0; f < feat; ++f) {
                grad[wrow + f] += d * last[f];
                dflat[f] += d * fw[static_cast<size_t>(u) * feat + f];
            }
        }

        // Walk conv stages backwards; dflat holds dL/d(stage output).
        const int m = hyper.m, pad = m / 2;
        const size_t plane = static_cast<size_t>(rows) * cols;
        std::vector<double> dcur = std::move(dflat);
        for (int s = hyper.l - 1; s >= 0; --s) {
            const double* act = ws.act[static_cast<size_t>(s)].data();
            const double* in = s == 0 ? g.data.data() : ws.act[static_cast<size_t>(s - 1)].data();
            const int ic_count = in_ch(s);
            std::vector<double> din(plane * ic_count, 0.0);
            for (int oc = 0; oc < hyper.channels; ++oc) {
                for (int r = 0; r < rows; ++r) {
                    for (int c = 0; c < cols; ++c) {
                        const size_t oidx = plane * oc + static_cast<size_t>(r) * cols + c;
                        double d = dcur[oidx];
                        if (d == 0.0 || act[oidx] <= 0.0) continue;  // ReLU gate
                        grad[conv_b_off(s) + oc] += d;
                        for (int icx = 0; icx < ic_count; ++icx) {
                            const size_t wbase =
                                ((static_cast<size_t>(oc) * ic_count + icx) * m) * m;
                            for (int kr = 0; kr < m; ++kr) {
                                const int rr = r + kr - pad;
                                if (rr < 0 || rr >= rows) continue;
                                for (int kc = 0; kc < m; ++kc) {
                                    const int cc = c + kc - pad;
                                    if (cc < 0 || cc >= cols) continue;
                                    const size_t iidx =
                                        plane * icx + static_cast<size_t>(rr) * cols + cc;
                                    grad[conv_w_off(s) + wbase + kr * m + kc] += d * in[iidx];
                                    din[iidx] += params[conv_w_off(s) + wbase + kr * m + kc] * d;
                                }
                            }
                        }
                    }
                }
            }
            dcur = std::move(din);
        }
    }
};

/// Supervised training setup for the per-antenna selector networks.
struct SelectorTrainConfig {
    int batches = 1000;
    int batch_size = 64;
    double lr0 = 0.01;
    int lr_step = 250;       // halve the learning rate every lr_step batches
    double lr_factor = 0.5;
    int val_every = 100;     // 0 disables validation
    int val_size = 256;

    void validate() const {
        if (batches < 1 || batch_size < 1) throw ConfigError("SelectorTrainConfig: bad batch setup");
        if (!(lr0 > 0.0) || !(lr_factor > 0.0) || lr_step < 1)
            throw ConfigError("SelectorTrainConfig: bad learning-rate schedule");
        if (val_every < 0 || val_size < 1) throw ConfigError("SelectorTrainConfig: bad validation setup");
    }
};

struct SelectorTrainReport {
    std::vector<double> batch_loss;       // training loss per batch
    std::vector<double> val_loss;         // recorded every val_every batches
};

/// One trained network per transmit antenna plus the scenario it was fit for.
struct TrainedSelector {
    int nt = 0;
    int nr = 0;
    int order = 0;
    double snr_db = 0.0;
    SelectorHyper hyper;
    std::vector<SelectorNet> nets;                // nets[i] predicts antenna i
    std::vector<SelectorTrainReport> reports;
};

/// One supervised sample: network input plus the transmitted symbols of every
/// antenna (targets[i] feeds net i).
struct SelectorSample {
    Image input;
    std::vector<cplx> targets;
};

inline SelectorSample draw_selector_sample(int nr, int nt, const Constellation& c, double snr_db,
                                           RngStream& rng) {
    const ComplexMatrix h = sample_channel(nr, nt, rng);
    ComplexVector x(nt);
    for (int i = 0; i < nt; ++i)
        x[i] = c.points[static_cast<size_t>(rng.next_u64() %
                                            static_cast<std::uint64_t>(c.order))];
    const double n0 = noise_variance(nt, snr_db);
    const ComplexVector y = transmit_with_n0(h, x, n0, rng);
    PreprocessedProblem p = preprocess(h, y, c);
    SelectorSample s;
    s.input = assemble_input(p.y, p.rbar, p.z);
    s.targets.resize(static_cast<size_t>(nt));
    for (int i = 0; i < nt; ++i) s.targets[static_cast<size_t>(i)] = x[i];
    return s;
}

/// Train all Nt selector networks on freshly drawn channel realizations.
/// Deterministic for a fixed seed: every batch is drawn from its own
/// substream, shared across the per-antenna networks.
inline TrainedSelector train_selector(int nr, int nt, int order, double snr_db,
                                      const SelectorHyper& hyper,
                                      const SelectorTrainConfig& cfg, uint64_t seed) {
    hyper.validate();
    cfg.validate();
    if (nt < 1 || nr < nt) throw DimensionError("train_selector: need Nr >= Nt >= 1");
    const Constellation c = Constellation::make(order);
    TrainedSelector sel;
    sel.nt = nt;
    sel.nr = nr;
    sel.order = order;
    sel.snr_db = snr_db;
    sel.hyper = hyper;
    const int rows = selector_rows(nt);
    const int cols = selector_cols(nt, nr);

    std::vector<Adam> opts;
    for (int i = 0; i < nt; ++i) {
        RngStream init_rng(seed, 0x5E1ull + static_cast<uint64_t>(i));
        sel.nets.push_back(SelectorNet::create(hyper, rows, cols, &init_rng));
        AdamOpts ao;
        ao.lr = cfg.lr0;
        opts.emplace_back(sel.nets.back().params.size(), ao);
    }
    sel.reports.assign(static_cast<size_t>(nt), SelectorTrainReport{});

    std::vector<Image> batch_in(static_cast<size_t>(cfg.batch_size));
    std::vector<std::vector<cplx>> batch_tg(static_cast<size_t>(nt));
    for (auto& t : batch_tg) t.resize(static_cast<size_t>(cfg.batch_size));
    std::vector<double> grad;

    for (int b = 0; b < cfg.batches; ++b) {
        RngStream rng(seed, 0xDA7Aull * 0x10000ull + static_cast<uint64_t>(b));
        for (int s = 0; s < cfg.batch_size; ++s) {
            SelectorSample sample = draw_selector_sample(nr, nt, c, snr_db, rng);
            batch_in[static_cast<size_t>(s)] = std::move(sample.input);
            for (int i = 0; i < nt; ++i) batch_tg[static_cast<size_t>(i)][static_cast<size_t>(s)] = sample.targets[static_cast<size_t>(i)];
        }
        const double lr = cfg.lr0 * std::pow(cfg.lr_factor, b / cfg.lr_step);
        for (int i = 0; i < nt; ++i) {
            opts[static_cast<size_t>(i)].set_lr(lr);
            const double loss = sel.nets[static_cast<size_t>(i)].batch_loss_and_grad(
                batch_in, batch_tg[static_cast<size_t>(i)], grad);
            opts[static_cast<size_t>(i)].step(sel.nets[static_cast<size_t>(i)].params, grad);
            sel.reports[static_cast<size_t>(i)].batch_loss.push_back(loss);
        }
        if (cfg.val_every > 0 && (b + 1) % cfg.val_every == 0) {
            RngStream vrng(seed, 0xA11Dull * 0x10000ull + static_cast<uint64_t>(b));
            std::vector<Image> vin(static_cast<size_t>(cfg.val_size));
            std::vector<std::vector<cplx>> vtg(static_cast<size_t>(nt));
            for (auto& t : vtg) t.resize(static_cast<size_t>(cfg.val_size));
            for (int s = 0; s < cfg.val_size; ++s) {
                SelectorSample sample = draw_selector_sample(nr, nt, c, snr_db, vrng);
                vin[static_cast<size_t>(s)] = std::move(sample.input);
                for (int i = 0; i < nt; ++i) vtg[static_cast<size_t>(i)][static_cast<size_t>(s)] = sample.targets[static_cast<size_t>(i)];
            }
            for (int i = 0; i < nt; ++i)
                sel.reports[static_cast<size_t>(i)].val_loss.push_back(
                    sel.nets[static_cast<size_t>(i)].batch_loss(vin, vtg[static_cast<size_t>(i)]));
        }
    }
    return sel;
}

/// Soft per-antenna symbol estimates for one problem instance; soft[i]
/// corresponds to antenna i (same ordering as the transmit vector).
inline std::vector<cplx> selector_soft_symbols(const PreprocessedProblem& p,
                                               const TrainedSelector& sel) {
    if (sel.nt != p.nt()) throw DimensionError("selector_soft_symbols: antenna mismatch");
    if (static_cast<int>(sel.nets.size()) != sel.nt)
        throw DimensionError("selector_soft_symbols: incomplete selector");
    const Image g = assemble_input(p.y, p.rbar, p.z);
    std::vector<cplx> soft(static_cast<size_t>(sel.nt));
    for (int i = 0; i < sel.nt; ++i) soft[static_cast<size_t>(i)] = sel.nets[static_cast<size_t>(i)].forward(g);
    return soft;
}

/// Beam search restricted to each layer's nearest constellation points around
/// the soft symbol predicted for that layer's antenna. Expansion step k
/// (1-based) places antenna nt-k, so its candidate set comes from
/// soft[nt-k]; the set size is min(K_k, Q) because the beam width may exceed
/// the constellation order at deep layers.
inline DetectResult detect_neural_soft(const PreprocessedProblem& p,
                                       const std::vector<cplx>& soft,
                                       const KSchedule& schedule,
                                       detail::SearchTrace* trace = nullptr) {
    const int n = p.nt();
    const int order = p.constellation.order;
    if (static_cast<int>(soft.size()) != n)
        throw DimensionError("detect_neural_soft: soft symbol count != Nt");
    schedule.validate(order);
    if (static_cast<int>(schedule.widths.size()) != n)
        throw ConfigError("detect_neural_soft: schedule length != Nt");
    std::vector<std::vector<int>> cands(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const long long want = schedule.widths[static_cast<size_t>(k - 1)];
        const int m = static_cast<int>(want < order ? want : order);
        cands[static_cast<size_t>(k - 1)] =
            nearest_points(soft[static_cast<size_t>(n - k)], p.constellation, m);
    }
    DetectResult res;
    const detail::SearchNode leaf =
        detail::beam_search(p, schedule.widths, &cands, res.stats, trace);
    res.xhat = detail::to_symbol_vector(leaf, p);
    return res;
}

/// Adaptive K-best detection guided by the trained path selector.
inline DetectResult detect_neural(const PreprocessedProblem& p, const TrainedSelector& sel,
                                  const KSchedule& schedule,
                                  detail::SearchTrace* trace = nullptr) {
    if (sel.order != p.constellation.order)
        throw DimensionError("detect_neural: constellation order mismatch");
    return detect_neural_soft(p, selector_soft_symbols(p, sel), schedule, trace);
}

/// Serialize a trained selector; tensors hold one flat parameter vector per
/// antenna network.
inline ModelFile selector_to_model(const TrainedSelector& sel) {
    ModelFile mf;
    mf.set_scalar("nt", sel.nt);
    mf.set_scalar("nr", sel.nr);
    mf.set_scalar("order", sel.order);
    mf.set_scalar("snr_db", sel.snr_db);
    mf.set_scalar("conv_stages", sel.hyper.l);
    mf.set_scalar("kernel", sel.hyper.m);
    mf.set_scalar("fc_scale", sel.hyper.n);
    mf.set_scalar("conv_channels", sel.hyper.channels);
    for (size_t i = 0; i < sel.nets.size(); ++i)
        mf.set_tensor("net" + std::to_string(i) + "_params",
                      {static_cast<long long>(sel.nets[i].params.size())}, sel.nets[i].params);
    return mf;
}

inline TrainedSelector selector_from_model(const ModelFile& mf) {
    TrainedSelector sel;
    sel.nt = static_cast<int>(mf.scalar("nt"));
    sel.nr = static_cast<int>(mf.scalar("nr"));
    sel.order = static_cast<int>(mf.scalar("order"));
    sel.snr_db = mf.scalar("snr_db");
    sel.hyper.l = static_cast<int>(mf.scalar("conv_stages"));
    sel.hyper.m = static_cast<int>(mf.scalar("kernel"));
    sel.hyper.n = static_cast<int>(mf.scalar("fc_scale"));
    sel.hyper.channels = static_cast<int>(mf.scalar("conv_channels"));
    sel.hyper.validate();
    if (sel.nt < 1 || sel.nr < sel.nt) throw ModelError("selector model: bad antenna counts");
    const int rows = selector_rows(sel.nt);
    const int cols = selector_cols(sel.nt, sel.nr);
    for (int i = 0; i < sel.nt; ++i) {
        SelectorNet net = SelectorNet::create(sel.hyper, rows, cols, nullptr);
        const std::vector<double>& vals =
            mf.tensor("net" + std::to_string(i) + "_params").values;
        if (vals.size() != net.params.size())
            throw ModelError("selector model: parameter tensor size mismatch");
        net.params = vals;
        sel.nets.push_back(std::move(net));
    }
    sel.reports.assign(static_cast<size_t>(sel.nt), SelectorTrainReport{});
    return sel;
}

inline void save_selector(const TrainedSelector& sel, const std::string& path) {
    selector_to_model(sel).save(path);
}

inline TrainedSelector load_selector(const std::string& path) {
    return selector_from_model(ModelFile::load(path));
}

}  // namespace akbest
