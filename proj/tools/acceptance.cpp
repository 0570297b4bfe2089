// Acceptance suite: one measured PASS/FAIL line per criterion. The binary
// always runs every criterion, prints the measured values next to each
// verdict, and ends with "ACCEPTANCE COMPLETE: <p> pass, <f> fail" so an
// aborted run is distinguishable from a completed one with failures.
//
// Usage: acceptance [work-dir]   (default work dir: acceptance_out)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "akbest/harness.hpp"

using namespace akbest;
namespace fs = std::filesystem;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int g_pass = 0, g_fail = 0;

void verdict(int idx, bool pass, const std::string& name, const std::string& detail,
             double secs) {
    (pass ? g_pass : g_fail) += 1;
    std::printf("[%2d] %s %s: %s (%.1fs)\n", idx, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Interpolated SNR where a detector's BER curve crosses `level` (log-linear).
double crossing(const std::vector<BerRecord>& rec, const std::string& id, double level) {
    std::vector<std::pair<double, double>> pts;
    for (const BerRecord& r : rec)
        if (r.detector == id && r.ber > 0.0) pts.emplace_back(r.snr_db, r.ber);
    std::sort(pts.begin(), pts.end());
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto [s1, b1] = pts[i];
        const auto [s2, b2] = pts[i + 1];
        if (b1 >= level && level >= b2) {
            const double l1 = std::log10(b1), l2 = std::log10(b2), ll = std::log10(level);
            return s1 + (l1 - ll) / (l1 - l2) * (s2 - s1);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

long long min_errors(const std::vector<BerRecord>& rec, const std::string& id) {
    long long m = std::numeric_limits<long long>::max();
    for (const BerRecord& r : rec)
        if (r.detector == id) m = std::min(m, r.errors);
    return m;
}

// ---------------------------------------------------------------------------

void criterion_1_oracle_retention() {
    Stopwatch sw;
    const Constellation c = Constellation::make(16);
    int match = 0;
    const int total = 500;
    for (int i = 0; i < total; ++i) {
        RngStream rng(301, static_cast<std::uint64_t>(i));
        const ComplexMatrix h = sample_channel(4, 4, rng);
        const BitBlock bits = random_bits(16, rng);
        const ComplexVector x = modulate(bits, c);
        const ComplexVector y = transmit_with_n0(h, x, noise_variance(4, 12.0), rng);
        const PreprocessedProblem p = preprocess(h, y, c);
        const DetectResult ml = detect_ml_pre(p);
        const RankProfile prof = rank_profile(p);
        const DetectResult kb = detect_kbest(p, schedule_from_ranks(prof.ranks, 16));
        match += kb.xhat.entries == ml.xhat.entries;
    }
    verdict(1, match == total, "oracle schedule retention",
            fmt("%d/%d rank-profile schedules reproduce the exhaustive solution "
                "(4x4 16-QAM, 12 dB)",
                match, total),
            sw.seconds());
}

void criterion_2_full_width_equivalence() {
    Stopwatch sw;
    int match = 0;
    const int total = 500;
    for (int i = 0; i < total; ++i) {
        const int nt = 2 + i % 3;                    // 2..4 antennas
        const int order = (i % 2 == 0) ? 16 : 4;     // alternate constellations
        const double snr = 6.0 + (i % 7) * 2.0;      // 6..18 dB
        const Constellation c = Constellation::make(order);
        RngStream rng(302, static_cast<std::uint64_t>(i));
        const ComplexMatrix h = sample_channel(nt, nt, rng);
        const BitBlock bits = random_bits(nt * c.bits_per_symbol, rng);
        const ComplexVector x = modulate(bits, c);
        const ComplexVector y = transmit_with_n0(h, x, noise_variance(nt, snr), rng);
        const PreprocessedProblem p = preprocess(h, y, c);
        const DetectResult ml = detect_ml_pre(p);
        const DetectResult kb = detect_kbest(p, KSchedule::full(nt, order));
        match += kb.xhat.entries == ml.xhat.entries;
    }
    verdict(2, match == total, "full-width equivalence",
            fmt("%d/%d full-width searches equal exhaustive search (Nt 2-4, Q 4/16)", match,
                total),
            sw.seconds());
}

// Criteria 3, 4, and 5 share one trained schedule and three sweeps.
void criteria_3_4_5_ber_and_complexity(const std::string& work) {
    Stopwatch sw_all;

    // Train the q = 0.99 schedule. The operating point of the 1e-3 comparison
    // sits near 22 dB; targets measured at 16 dB give the quantiles enough
    // slack that the fitted schedule holds its retention there.
    ExperimentConfig train;
    train.nt = 4;
    train.nr = 4;
    train.order = 16;
    train.train_snr_db = 16.0;
    train.oracle_count = 500;
    train.oracle_quantile = 0.99;
    train.seed = 1;
    train.out = work + "/coeffs";
    const CoeffTrainResult fit = run_train_coeffs(train);
    std::string sched_txt;
    for (long long w : fit.schedule.widths) sched_txt += fmt(" %lld", w);
    std::printf("     trained adaptive schedule:%s  (K = %.3f * k^%.3f + %.3f)\n",
                sched_txt.c_str(), fit.coeffs.a, fit.coeffs.b, fit.coeffs.c);
    const std::string model = train.out + "/coeffs.model";
    const std::string adaptive_id = "adaptive:" + model;

    // Sweep A: the 1e-3 neighborhood, with the whole fixed-K ladder for the
    // matched-cost comparison.
    ExperimentConfig a;
    a.nt = 4;
    a.nr = 4;
    a.order = 16;
    a.snr_db = {21.5, 22.0, 22.5, 23.0, 23.5};
    a.max_frames = 200000;
    a.target_errors = 800;
    a.seed = 1;
    a.out = work + "/sweep_1e3";
    for (const std::string& t :
         {std::string("ml"), std::string("kbest:10"), std::string("kbest:11"),
          std::string("kbest:12"), std::string("kbest:13"), std::string("kbest:14"),
          std::string("kbest:15"), std::string("kbest:16"), adaptive_id})
        a.detectors.push_back(DetectorSpec::parse(t));
    const std::vector<BerRecord> recA = run_sweep(a);

    // Sweep B: the 1e-2 neighborhoods of the adaptive detector and of the
    // linear equalizers (their diversity-1 curves cross 1e-2 far higher).
    ExperimentConfig b1 = a;
    b1.snr_db = {17.0, 18.0, 19.0, 20.0};
    b1.detectors = {DetectorSpec::parse(adaptive_id)};
    b1.out = work + "/sweep_1e2_adaptive";
    const std::vector<BerRecord> recB1 = run_sweep(b1);
    ExperimentConfig b2 = a;
    b2.snr_db = {26.0, 27.0, 28.0, 29.0, 30.0};
    b2.detectors = {DetectorSpec::parse("mmse"), DetectorSpec::parse("zf")};
    b2.out = work + "/sweep_1e2_linear";
    const std::vector<BerRecord> recB2 = run_sweep(b2);

    // --- criterion 3: distance to exhaustive search and to the equalizers ---
    {
        const double c_ml = crossing(recA, "ml", 1e-3);
        const double c_ad = crossing(recA, adaptive_id, 1e-3);
        const double c_ad2 = crossing(recB1, adaptive_id, 1e-2);
        const double c_mm2 = crossing(recB2, "mmse", 1e-2);
        const double c_zf2 = crossing(recB2, "zf", 1e-2);
        const long long errs = std::min({min_errors(recA, "ml"), min_errors(recA, adaptive_id),
                                         min_errors(recB1, adaptive_id),
                                         min_errors(recB2, "mmse"), min_errors(recB2, "zf")});
        const double gap = c_ad - c_ml;
        const double m_mm = c_mm2 - c_ad2;
        const double m_zf = c_zf2 - c_ad2;
        const bool pass = std::isfinite(gap) && gap <= 0.6 && m_mm >= 1.0 && m_zf >= 1.2 &&
                          errs >= 500;
        verdict(3, pass, "adaptive detector BER distance",
                fmt("at 1e-3 adaptive is %.2f dB from exhaustive (limit 0.6); at 1e-2 it "
                    "leads mmse by %.2f dB (need 1.0) and zf by %.2f dB (need 1.2); min "
                    "errors/point %lld",
                    gap, m_mm, m_zf, errs),
                sw_all.seconds());
    }

    // --- criterion 4: ordering on the 10-16 dB grid ---
    {
        Stopwatch sw;
        ExperimentConfig c4 = a;
        c4.snr_db = {10, 11, 12, 13, 14, 15, 16};
        c4.detectors = {DetectorSpec::parse("ml"), DetectorSpec::parse(adaptive_id),
                        DetectorSpec::parse("mmse"), DetectorSpec::parse("zf")};
        c4.out = work + "/sweep_ordering";
        const std::vector<BerRecord> rec = run_sweep(c4);
        auto row = [&](const std::string& id, double snr) -> const BerRecord& {
            for (const BerRecord& r : rec)
                if (r.detector == id && r.snr_db == snr) return r;
            throw EmptySampleError("missing sweep row");
        };
        int ok_points = 0, strict_points = 0;
        long long errs = std::numeric_limits<long long>::max();
        for (double snr : c4.snr_db) {
            const BerRecord* chain[4] = {&row("ml", snr), &row(adaptive_id, snr),
                                         &row("mmse", snr), &row("zf", snr)};
            bool ok = true, strict = true;
            for (int i = 0; i + 1 < 4; ++i) {
                const bool le = chain[i]->ber <= chain[i + 1]->ber;
                const bool overlap = chain[i]->ci_lo <= chain[i + 1]->ci_hi &&
                                     chain[i + 1]->ci_lo <= chain[i]->ci_hi;
                strict = strict && le;
                ok = ok && (le || overlap);
            }
            ok_points += ok;
            strict_points += strict;
            for (const BerRecord* r : chain) errs = std::min(errs, r->errors);
        }
        verdict(4, ok_points == 7, "BER ordering ml <= adaptive <= mmse <= zf",
                fmt("%d/7 grid points ordered (%d strictly) on 10-16 dB, min errors/point "
                    "%lld",
                    ok_points, strict_points, errs),
                sw.seconds());
    }

    // --- criterion 5: children scored vs the BER-matched fixed K ---
    {
        const double c_ad = crossing(recA, adaptive_id, 1e-3);
        double ad_children = 0.0;
        for (const BerRecord& r : recA)
            if (r.detector == adaptive_id) ad_children = r.nodes_mean;
        int matched_k = 0;
        double matched_children = 0.0, matched_cross = 0.0;
        for (int k = 10; k <= 16; ++k) {  // smallest K whose curve is within
            const std::string id = "kbest:" + std::to_string(k);
            const double ck = crossing(recA, id, 1e-3);  // 0.1 dB of adaptive
            if (std::isfinite(ck) && ck <= c_ad + 0.1) {
                matched_k = k;
                matched_cross = ck;
                for (const BerRecord& r : recA)
                    if (r.detector == id) matched_children = r.nodes_mean;
                break;
            }
        }
        const double ratio = matched_k ? ad_children / matched_children : 1.0;
        verdict(5, matched_k != 0 && ratio <= 0.70, "complexity reduction vs matched fixed-K",
                fmt("adaptive scores %.0f children/frame at a %.3f dB 1e-3 crossing; "
                    "smallest fixed K within 0.1 dB is K=%d (%.3f dB, %.0f children); "
                    "ratio %.3f vs 0.70 target",
                    ad_children, c_ad, matched_k, matched_cross, matched_children, ratio),
                sw_all.seconds());
    }
}

void criterion_6_gradient_oracles() {
    Stopwatch sw;
    RngStream rng(306, 1);

    // Fitting-function gradient against central differences.
    int fit_ok = 0;
    const int fit_total = 100;
    double fit_worst = 0.0;
    for (int i = 0; i < fit_total; ++i) {
        Coefficients x{-3.0 + 6.0 * rng.uniform01(), 0.2 + 3.0 * rng.uniform01(),
                       8.0 * rng.uniform01()};
        std::vector<double> targets;
        for (int k = 0; k < 4; ++k) targets.push_back(1.0 + 15.0 * rng.uniform01());
        const Coefficients g = fit_gradient(x, targets);
        double rel = 0.0;
        const double ana[3] = {g.a, g.b, g.c};
        for (int d = 0; d < 3; ++d) {
            Coefficients hi = x, lo = x;
            double* hp = d == 0 ? &hi.a : d == 1 ? &hi.b : &hi.c;
            double* lp = d == 0 ? &lo.a : d == 1 ? &lo.b : &lo.c;
            const double eps = 1e-6 * std::max(1.0, std::abs(*hp));
            *hp += eps;
            *lp -= eps;
            const double fd = (fit_loss(hi, targets) - fit_loss(lo, targets)) / (2.0 * eps);
            rel = std::max(rel, std::abs(ana[d] - fd) /
                                    std::max({std::abs(ana[d]), std::abs(fd), 1e-9}));
        }
        fit_worst = std::max(fit_worst, rel);
        fit_ok += rel < 1e-6;
    }

    // Selector backprop against central differences: 10 inputs x 50 params.
    const SelectorHyper hyper;
    const int rows = selector_rows(4), cols = selector_cols(4, 4);
    SelectorNet net = SelectorNet::create(hyper, rows, cols, &rng);
    const Constellation c = Constellation::make(16);
    int sel_ok = 0, sel_total = 0;
    double sel_worst = 0.0;
    std::vector<double> grad;
    for (int input = 0; input < 10; ++input) {
        const SelectorSample s = draw_selector_sample(4, 4, c, 12.0, rng);
        const std::vector<Image> gs = {s.input};
        const std::vector<cplx> tg = {s.targets[0]};
        net.batch_loss_and_grad(gs, tg, grad);
        for (int probe = 0; probe < 50; ++probe) {
            const size_t idx = rng.next_u64() % net.params.size();
            const double keep = net.params[idx];
            const double eps = 1e-6 * std::max(1.0, std::abs(keep));
            net.params[idx] = keep + eps;
            const double hi = net.batch_loss(gs, tg);
            net.params[idx] = keep - eps;
            const double lo = net.batch_loss(gs, tg);
            net.params[idx] = keep;
            const double fd = (hi - lo) / (2.0 * eps);
            const double rel = std::abs(grad[idx] - fd) /
                               std::max({std::abs(grad[idx]), std::abs(fd), 1e-8});
            sel_worst = std::max(sel_worst, rel);
            ++sel_total;
            sel_ok += rel < 1e-4;
        }
    }

    verdict(6, fit_ok == fit_total && sel_ok == sel_total, "gradient oracles",
            fmt("fit gradient: %d/%d points rel err < 1e-6 (worst %.2e); selector "
                "backprop: %d/%d checks rel err < 1e-4 (worst %.2e)",
                fit_ok, fit_total, fit_worst, sel_ok, sel_total, sel_worst),
            sw.seconds());
}

void criterion_7_fusion_dominance() {
    Stopwatch sw;
    const std::vector<double> targets = {13, 10, 6, 2};  // representative rank targets
    CoeffTrainOpts opts;
    opts.meta.batches = 8;
    opts.meta.tasks_per_batch = 4;
    opts.fusion.grid_step = 0.05;
    int ok = 0;
    const int runs = 20;
    double worst = -1e300;
    for (int r = 0; r < runs; ++r) {
        const CoeffTrainResult res =
            train_coefficients(targets, 4, 16, opts, static_cast<std::uint64_t>(r + 1));
        const double slack = res.final_loss - std::min(res.f1_loss, res.f2_loss);
        worst = std::max(worst, slack);
        ok += slack <= 1e-9;
    }
    verdict(7, ok == runs, "fusion never loses to either stepper",
            fmt("%d/%d runs with fused loss <= min(predictor, recurrent) + 1e-9 "
                "(worst slack %.2e)",
                ok, runs, worst),
            sw.seconds());
}

void criterion_8_meta_vs_plain_gd() {
    Stopwatch sw;
    RngStream meta_rng(308, 1);
    RngStream theta_rng(308, 2);
    std::vector<double> theta = init_theta(theta_rng);
    const TaskGen gen = make_synthetic_task_gen(4, 16);
    MetaTrainOpts mo;  // default budget
    meta_train_recurrent(theta, gen, mo, meta_rng);

    RngStream held(308, 3);
    const RolloutOpts ro;  // 50 steps
    const int tasks = 25;
    double lstm = 0.0, gd = 0.0;
    for (int i = 0; i < tasks; ++i) {
        const FitTask t = gen(held);
        lstm += rollout_recurrent(t, theta, ro);
        gd += rollout_gradpred(t, plain_gd_params(), ro);
    }
    lstm /= tasks;
    gd /= tasks;
    verdict(8, lstm <= gd, "meta-trained optimizer beats plain gradient descent",
            fmt("mean final fit loss over %d held-out tasks, 50 steps: recurrent %.4f vs "
                "plain gd %.4f",
                tasks, lstm, gd),
            sw.seconds());
}

void criterion_9_selector_training(const std::string& work) {
    Stopwatch sw;
    ExperimentConfig train;
    train.nt = 4;
    train.nr = 4;
    train.order = 16;
    train.train_snr_db = 12.0;
    train.seed = 1;
    train.out = work + "/selector";
    const TrainedSelector sel = run_train_selector(train);
    double ratio_sum = 0.0;
    for (const SelectorTrainReport& rep : sel.reports)
        ratio_sum += rep.batch_loss.back() / rep.batch_loss.front();
    const double mean_ratio = ratio_sum / static_cast<double>(sel.reports.size());

    ExperimentConfig sweep = train;
    sweep.snr_db = {12.0};
    sweep.max_frames = 6250;  // 6250 frames x 16 bits = 1e5 bits
    sweep.target_errors = 1ll << 40;
    sweep.detectors = {
        DetectorSpec::parse("zf"),
        DetectorSpec::parse("neural:" + train.out + "/selector.model" + ":" + work +
                            "/coeffs/coeffs.model")};
    sweep.out = work + "/sweep_selector";
    const std::vector<BerRecord> rec = run_sweep(sweep);
    double zf = 1.0, neural = 1.0;
    long long nbits = 0;
    for (const BerRecord& r : rec) {
        if (r.detector == "zf") zf = r.ber;
        if (r.detector.rfind("neural:", 0) == 0) neural = r.ber, nbits = r.bits;
    }
    verdict(9, mean_ratio <= 0.5 && neural < zf && nbits >= 100000,
            "selector training and neural detection",
            fmt("loss after 1000 batches at %.2fx initial (need 0.5); neural BER %.4f < "
                "zf %.4f at 12 dB over %lld bits",
                mean_ratio, neural, zf, nbits),
            sw.seconds());
}

void criterion_10_numerics() {
    Stopwatch sw;
    RngStream rng(310, 1);

    int qr_ok = 0;
    const int qr_total = 1000;
    double qr_worst = 0.0;
    for (int i = 0; i < qr_total; ++i) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 7);  // 2..8
        const int m = n + static_cast<int>(rng.next_u64() % 3);  // m >= n
        ComplexMatrix h(m, n);
        for (int r = 0; r < m; ++r)
            for (int cc = 0; cc < n; ++cc) h(r, cc) = rng.cgauss();
        const auto [q, r] = qr_thin(h);
        double rec = 0.0, orth = 0.0, ref = 0.0;
        for (int rr = 0; rr < m; ++rr)
            for (int cc = 0; cc < n; ++cc) {
                cplx acc = 0.0;
                for (int k = 0; k <= cc; ++k) acc += q(rr, k) * r(k, cc);
                rec += std::norm(h(rr, cc) - acc);
                ref += std::norm(h(rr, cc));
            }
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                cplx acc = 0.0;
                for (int k = 0; k < m; ++k) acc += std::conj(q(k, i1)) * q(k, i2);
                orth += std::norm(acc - (i1 == i2 ? 1.0 : 0.0));
            }
        const double rel = std::sqrt(rec / ref) + std::sqrt(orth);
        qr_worst = std::max(qr_worst, rel);
        qr_ok += rel < 1e-10;
    }

    bool gray_ok = true;
    for (int order : {4, 16, 64}) {
        const Constellation c = Constellation::make(order);
        double spacing = 1e300;
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j)
                spacing = std::min(spacing, std::abs(c.points[i] - c.points[j]));
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j)
                if (std::abs(c.points[i] - c.points[j]) < spacing * 1.001)
                    gray_ok = gray_ok && __builtin_popcount(static_cast<unsigned>(i ^ j)) == 1;
    }

    bool rt_ok = true;
    for (int order : {4, 16, 64}) {
        const Constellation c = Constellation::make(order);
        for (int v = 0; v < order; ++v) {
            BitBlock bits;
            for (int b = c.bits_per_symbol - 1; b >= 0; --b)
                bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
            rt_ok = rt_ok && demodulate_hard(modulate(bits, c), c) == bits;
        }
    }

    verdict(10, qr_ok == qr_total && gray_ok && rt_ok, "numerics",
            fmt("QR reconstruction+orthogonality: %d/%d matrices < 1e-10 (worst %.2e); "
                "Gray adjacency exhaustive for Q in {4,16,64}: %s; modulation round-trip "
                "exact: %s",
                qr_ok, qr_total, qr_worst, gray_ok ? "yes" : "NO", rt_ok ? "yes" : "NO"),
            sw.seconds());
}

void criterion_11_determinism(const std::string& work) {
    Stopwatch sw;
    ExperimentConfig cfg;
    cfg.nt = 4;
    cfg.nr = 4;
    cfg.order = 16;
    cfg.snr_db = {12.0, 16.0};
    cfg.max_frames = 20000;
    cfg.target_errors = 300;
    cfg.seed = 7;
    cfg.detectors = {DetectorSpec::parse("ml"), DetectorSpec::parse("kbest:8"),
                     DetectorSpec::parse("mmse")};
    cfg.workers = 1;
    cfg.out = work + "/det_w1";
    run_sweep(cfg);
    cfg.workers = 8;
    cfg.out = work + "/det_w8";
    run_sweep(cfg);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    const std::string f1 = slurp(work + "/det_w1/ber.csv");
    const std::string f8 = slurp(work + "/det_w8/ber.csv");
    verdict(11, !f1.empty() && f1 == f8, "worker-count determinism",
            fmt("ber.csv byte-identical between 1 and 8 workers (%zu bytes)", f1.size()),
            sw.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    const std::string work = argc > 1 ? argv[1] : "acceptance_out";
    fs::create_directories(work);
    Stopwatch total;

    criterion_1_oracle_retention();
    criterion_2_full_width_equivalence();
    criteria_3_4_5_ber_and_complexity(work);
    criterion_6_gradient_oracles();
    criterion_7_fusion_dominance();
    criterion_8_meta_vs_plain_gd();
    criterion_9_selector_training(work);
    criterion_10_numerics();
    criterion_11_determinism(work);

    std::printf("ACCEPTANCE COMPLETE: %d pass, %d fail (total %.0fs)\n", g_pass, g_fail,
                total.seconds());
    return 0;
}
