// Full workflow on a 2x2 4-QAM link, small enough to run in seconds:
//   1. oracle rank profiles        -> beam-width targets
//   2. fused meta-learned fit      -> coefficient model (K = a*k^b + c)
//   3. soft-symbol selector nets   -> selector model
//   4. Monte-Carlo BER sweep       -> ber.csv, one row per detector and SNR
// Artifacts land in ./pipeline_demo_out.

#include <cstdio>
#include <filesystem>

#include "akbest/harness.hpp"

using namespace akbest;

int main() {
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.seed = 1;
    cfg.out = "pipeline_demo_out";

    // --- oracle targets -----------------------------------------------------
    cfg.train_snr_db = 8.0;
    cfg.oracle_count = 200;
    cfg.oracle_quantile = 0.99;
    const KTargetSet targets = run_oracle_gen(cfg);
    std::printf("oracle targets (q = %.2f, %d instances at %.1f dB):",
                cfg.oracle_quantile, cfg.oracle_count, cfg.train_snr_db);
    for (long long t : targets.targets) std::printf(" %lld", t);
    std::printf("\n");

    // --- coefficient fit ----------------------------------------------------
    cfg.meta_batches = 10;
    cfg.meta_tasks = 4;
    const CoeffTrainResult fit = run_train_coeffs(cfg);
    std::printf("fitted K = %.3f * k^%.3f + %.3f, schedule:", fit.coeffs.a, fit.coeffs.b,
                fit.coeffs.c);
    for (long long w : fit.schedule.widths) std::printf(" %lld", w);
    std::printf("  (fit loss %.4f)\n", fit.final_loss);

    // --- selector training --------------------------------------------------
    cfg.selector_batches = 60;
    cfg.selector_batch_size = 32;
    cfg.selector_val_every = 0;
    const TrainedSelector sel = run_train_selector(cfg);
    for (size_t i = 0; i < sel.reports.size(); ++i) {
        const auto& loss = sel.reports[i].batch_loss;
        std::printf("selector net %zu: loss %.4f -> %.4f over %zu batches\n", i, loss.front(),
                    loss.back(), loss.size());
    }

    // --- BER sweep over every detector family -------------------------------
    const std::string coeffs = (std::filesystem::path(cfg.out) / cfg.coeffs_model).string();
    const std::string selector = (std::filesystem::path(cfg.out) / cfg.selector_model).string();
    cfg.snr_db = {4, 8, 12, 16};
    cfg.max_frames = 20000;
    cfg.target_errors = 400;
    cfg.detectors = {DetectorSpec::parse("ml"),
                     DetectorSpec::parse("kbest:2"),
                     DetectorSpec::parse("adaptive:" + coeffs),
                     DetectorSpec::parse("neural:" + selector + ":" + coeffs),
                     DetectorSpec::parse("mmse"),
                     DetectorSpec::parse("zf")};
    const std::vector<BerRecord> records = run_sweep(cfg);

    std::printf("\n%-34s %8s %10s %12s %10s\n", "detector", "snr", "ber", "ci95",
                "children");
    for (const BerRecord& r : records)
        std::printf("%-34s %8.1f %10.3e [%.1e,%.1e] %8.1f\n", r.detector.c_str(), r.snr_db,
                    r.ber, r.ci_lo, r.ci_hi, r.nodes_mean);

    const std::vector<ComplexityRow> cx = report_complexity(records, cfg);
    std::printf("\nsearch cost (frame-weighted means over the whole sweep):\n");
    for (const ComplexityRow& row : cx)
        std::printf("%-34s %10.1f children  %-10s %s\n", row.detector.c_str(), row.nodes_mean,
                    row.asymptotic.c_str(), row.consistency.c_str());
    std::printf("\nartifacts in %s/\n", cfg.out.c_str());
    return 0;
}
