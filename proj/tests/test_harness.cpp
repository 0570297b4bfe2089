#include "akbest/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using namespace akbest;
namespace fs = std::filesystem;

std::string test_dir(const std::string& tag) {
    const fs::path p = fs::path(::testing::TempDir()) / ("harness_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

std::string write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Minimal valid config body used as a baseline by several tests.
std::string base_config(const std::string& dir) {
    return "akbest-config 1\n"
           "nt = 2\n"
           "nr = 2\n"
           "order = 4\n"
           "snr_db = 8\n"
           "max_frames = 512\n"
           "target_errors = 100\n"
           "detectors = zf\n"
           "out = " + dir + "/out\n";
}

// Writes a coefficient model with the given widths; a/b/c are only carried
// along, detection uses the widths tensor.
std::string write_coeff_model(const std::string& path, int nt, int order,
                              const std::vector<long long>& widths) {
    ModelFile mf;
    mf.set_scalar("nt", nt);
    mf.set_scalar("nr", nt);
    mf.set_scalar("order", order);
    mf.set_scalar("a", 0.0);
    mf.set_scalar("b", 1.0);
    mf.set_scalar("c", static_cast<double>(widths.front()));
    std::vector<double> w(widths.begin(), widths.end());
    mf.set_tensor("widths", {static_cast<long long>(w.size())}, w);
    mf.save(path);
    return path;
}

TEST(DetectorSpec, ParsesEveryKind) {
    EXPECT_EQ(DetectorSpec::parse("ml").kind, DetectorSpec::Kind::Ml);
    EXPECT_EQ(DetectorSpec::parse("zf").kind, DetectorSpec::Kind::Zf);
    EXPECT_EQ(DetectorSpec::parse("mmse").kind, DetectorSpec::Kind::Mmse);

    const DetectorSpec k = DetectorSpec::parse("kbest:12");
    EXPECT_EQ(k.kind, DetectorSpec::Kind::FixedK);
    EXPECT_EQ(k.fixed_k, 12);
    EXPECT_EQ(k.id, "kbest:12");

    const DetectorSpec a = DetectorSpec::parse("adaptive:models/c.model");
    EXPECT_EQ(a.kind, DetectorSpec::Kind::Adaptive);
    EXPECT_EQ(a.schedule_path, "models/c.model");

    const DetectorSpec n = DetectorSpec::parse("neural:s.model:c.model");
    EXPECT_EQ(n.kind, DetectorSpec::Kind::Neural);
    EXPECT_EQ(n.selector_path, "s.model");
    EXPECT_EQ(n.schedule_path, "c.model");
}

TEST(DetectorSpec, RejectsMalformedTokens) {
    EXPECT_THROW(DetectorSpec::parse(""), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("bogus"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("ml:1"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("kbest"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("kbest:"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("kbest:0"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("kbest:4x"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("adaptive:"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("neural:only"), ConfigError);
    EXPECT_THROW(DetectorSpec::parse("neural::c"), ConfigError);
}

TEST(ExperimentConfigLoad, ReadsEveryKey) {
    const std::string dir = test_dir("cfg_all");
    const std::string path = write_file(dir + "/all.cfg",
        "akbest-config 1\n"
        "# comment line\n"
        "nt = 3\n"
        "nr = 4   # trailing comment\n"
        "order = 16\n"
        "snr_db = 10 12.5 15\n"
        "max_frames = 1000\n"
        "target_errors = 99\n"
        "round_frames = 128\n"
        "detectors = ml kbest:5 mmse\n"
        "seed = 42\n"
        "workers = 3\n"
        "out = somewhere\n"
        "ml_budget = 100000\n"
        "train_snr_db = 13.5\n"
        "oracle_count = 77\n"
        "oracle_quantile = 0.9\n"
        "meta_batches = 11\n"
        "meta_tasks = 5\n"
        "rollout_steps = 21\n"
        "selector_batches = 9\n"
        "selector_batch_size = 8\n"
        "selector_lr = 0.005\n"
        "selector_val_every = 4\n"
        "selector_val_size = 16\n"
        "coeffs_model = c.model\n"
        "selector_model = s.model\n");
    const ExperimentConfig cfg = ExperimentConfig::load(path);
    EXPECT_EQ(cfg.nt, 3);
    EXPECT_EQ(cfg.nr, 4);
    EXPECT_EQ(cfg.order, 16);
    ASSERT_EQ(cfg.snr_db.size(), 3u);
    EXPECT_DOUBLE_EQ(cfg.snr_db[1], 12.5);
    EXPECT_EQ(cfg.max_frames, 1000);
    EXPECT_EQ(cfg.target_errors, 99);
    EXPECT_EQ(cfg.round_frames, 128);
    ASSERT_EQ(cfg.detectors.size(), 3u);
    EXPECT_EQ(cfg.detectors[1].fixed_k, 5);
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.workers, 3);
    EXPECT_EQ(cfg.out, "somewhere");
    EXPECT_EQ(cfg.ml_budget, 100000);
    EXPECT_DOUBLE_EQ(cfg.train_snr_db, 13.5);
    EXPECT_EQ(cfg.oracle_count, 77);
    EXPECT_DOUBLE_EQ(cfg.oracle_quantile, 0.9);
    EXPECT_EQ(cfg.meta_batches, 11);
    EXPECT_EQ(cfg.meta_tasks, 5);
    EXPECT_EQ(cfg.rollout_steps, 21);
    EXPECT_EQ(cfg.selector_batches, 9);
    EXPECT_EQ(cfg.selector_batch_size, 8);
    EXPECT_DOUBLE_EQ(cfg.selector_lr, 0.005);
    EXPECT_EQ(cfg.selector_val_every, 4);
    EXPECT_EQ(cfg.selector_val_size, 16);
    EXPECT_EQ(cfg.coeffs_model, "c.model");
    EXPECT_EQ(cfg.selector_model, "s.model");
    EXPECT_NO_THROW(cfg.validate());
}

TEST(ExperimentConfigLoad, RejectsMalformedFiles) {
    const std::string dir = test_dir("cfg_bad");
    EXPECT_THROW(ExperimentConfig::load(dir + "/missing.cfg"), ConfigError);

    auto loads = [&](const std::string& tag, const std::string& text) {
        return ExperimentConfig::load(write_file(dir + "/" + tag + ".cfg", text));
    };
    EXPECT_THROW(loads("empty", ""), ConfigError);
    EXPECT_THROW(loads("magic", "not-a-config\nnt = 2\n"), ConfigError);
    EXPECT_THROW(loads("noeq", "akbest-config 1\nnt 2\n"), ConfigError);
    EXPECT_THROW(loads("dup", "akbest-config 1\nnt = 2\nnt = 3\n"), ConfigError);
    EXPECT_THROW(loads("unknown", "akbest-config 1\nlr = 3\n"), ConfigError);
    EXPECT_THROW(loads("badint", "akbest-config 1\nnt = two\n"), ConfigError);
    EXPECT_THROW(loads("baddbl", "akbest-config 1\nsnr_db = 1 x\n"), ConfigError);
    EXPECT_THROW(loads("baddet", "akbest-config 1\ndetectors = warp\n"), ConfigError);
}

TEST(ExperimentConfigValidate, RejectsBadSettings) {
    ExperimentConfig cfg;
    cfg.nt = 4;
    cfg.nr = 2;  // Nr < Nt
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.order = 5;
    EXPECT_THROW(cfg.validate(), LengthError);
    cfg = ExperimentConfig{};
    cfg.max_frames = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.workers = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.oracle_quantile = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.selector_lr = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = ExperimentConfig{};
    cfg.out.clear();
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(WilsonInterval, MatchesClosedFormAtHalf) {
    // p = 0.5: the interval is symmetric about 0.5.
    const auto [lo, hi] = wilson_interval(500, 1000);
    EXPECT_NEAR(lo + hi, 1.0, 1e-12);
    EXPECT_LT(lo, 0.5);
    EXPECT_GT(hi, 0.5);

    // Known value: p = 0.5, n = 100, z = 1.96 -> approx [0.404, 0.596].
    const auto [lo100, hi100] = wilson_interval(50, 100);
    EXPECT_NEAR(lo100, 0.404, 0.002);
    EXPECT_NEAR(hi100, 0.596, 0.002);
}

TEST(WilsonInterval, EdgeCasesStayInUnitRange) {
    const auto [lo0, hi0] = wilson_interval(0, 50);
    EXPECT_NEAR(lo0, 0.0, 1e-12);
    EXPECT_GT(hi0, 0.0);
    const auto [loF, hiF] = wilson_interval(50, 50);
    EXPECT_LT(loF, 1.0);
    EXPECT_NEAR(hiF, 1.0, 1e-12);
    // More data shrinks the interval.
    const auto [a, b] = wilson_interval(10, 100);
    const auto [c, d] = wilson_interval(100, 1000);
    EXPECT_LT(d - c, b - a);
}

TEST(WilsonInterval, RejectsBadArguments) {
    EXPECT_THROW(wilson_interval(0, 0), EmptySampleError);
    EXPECT_THROW(wilson_interval(-1, 10), EmptySampleError);
    EXPECT_THROW(wilson_interval(11, 10), EmptySampleError);
}

TEST(RunSweep, NoiselessLinearDetectorIsErrorFree) {
    const std::string dir = test_dir("sweep_clean");
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.snr_db = {60.0};
    cfg.max_frames = 4096;
    cfg.target_errors = 1;  // never reached, so all frames run
    cfg.detectors = {DetectorSpec::parse("zf")};
    cfg.out = dir + "/out";
    const std::vector<BerRecord> rec = run_sweep(cfg);
    ASSERT_EQ(rec.size(), 1u);
    EXPECT_GE(rec[0].bits, 10000);
    EXPECT_EQ(rec[0].errors, 0);
    EXPECT_EQ(rec[0].ber, 0.0);
    EXPECT_EQ(rec[0].ci_lo, 0.0);
}

TEST(RunSweep, EarlyStopRunsWholeRounds) {
    const std::string dir = test_dir("sweep_rounds");
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.snr_db = {0.0};  // noisy: errors arrive immediately
    cfg.max_frames = 100000;
    cfg.target_errors = 10;
    cfg.round_frames = 64;
    cfg.detectors = {DetectorSpec::parse("mmse")};
    cfg.out = dir + "/out";
    const std::vector<BerRecord> rec = run_sweep(cfg);
    ASSERT_EQ(rec.size(), 1u);
    const long long frames = rec[0].bits / 4;  // 2 antennas x 2 bits
    EXPECT_EQ(frames % 64, 0);
    EXPECT_GE(rec[0].errors, 10);
    EXPECT_LT(frames, 100000);
}

TEST(RunSweep, WorkerCountDoesNotChangeOutput) {
    const std::string d1 = test_dir("sweep_w1");
    const std::string d3 = test_dir("sweep_w3");
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 16;
    cfg.snr_db = {6.0, 14.0};
    cfg.max_frames = 2000;
    cfg.target_errors = 150;
    cfg.detectors = {DetectorSpec::parse("ml"), DetectorSpec::parse("kbest:4"),
                     DetectorSpec::parse("zf")};
    cfg.workers = 1;
    cfg.out = d1;
    run_sweep(cfg);
    cfg.workers = 3;
    cfg.out = d3;
    run_sweep(cfg);
    const std::string a = slurp(d1 + "/ber.csv");
    const std::string b = slurp(d3 + "/ber.csv");
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a, b);
}

TEST(RunSweep, AdaptiveModelWithFixedWidthsMatchesFixedK) {
    // Paired frames: a schedule of constant width K must reproduce kbest:K
    // numbers exactly, only under a different detector id.
    const std::string dir = test_dir("sweep_paired");
    const std::string model =
        write_coeff_model(dir + "/flat.model", 2, 4, {3, 3});
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.snr_db = {8.0};
    cfg.max_frames = 1500;
    cfg.target_errors = 200;
    cfg.detectors = {DetectorSpec::parse("kbest:3"),
                     DetectorSpec::parse("adaptive:" + model)};
    cfg.out = dir + "/out";
    const std::vector<BerRecord> rec = run_sweep(cfg);
    ASSERT_EQ(rec.size(), 2u);
    EXPECT_EQ(rec[0].bits, rec[1].bits);
    EXPECT_EQ(rec[0].errors, rec[1].errors);
    EXPECT_EQ(rec[0].nodes_mean, rec[1].nodes_mean);
    EXPECT_EQ(rec[0].sort_cmps_mean, rec[1].sort_cmps_mean);
}

TEST(RunSweep, ResolutionErrorsHaveDistinctTypes) {
    const std::string dir = test_dir("sweep_errs");
    ExperimentConfig cfg;
    cfg.nt = 4;
    cfg.nr = 4;
    cfg.order = 16;
    cfg.snr_db = {10.0};
    cfg.detectors = {DetectorSpec::parse("ml")};
    cfg.ml_budget = 1000;  // 16^4 = 65536 > 1000
    cfg.out = dir + "/out";
    EXPECT_THROW(run_sweep(cfg), BudgetError);

    cfg.ml_budget = kDefaultMlBudget;
    cfg.detectors = {DetectorSpec::parse("adaptive:" + dir + "/nope.model")};
    EXPECT_THROW(run_sweep(cfg), ModelError);

    // Model trained for other dimensions is a config error.
    const std::string wrong = write_coeff_model(dir + "/wrong.model", 2, 4, {2, 2});
    cfg.detectors = {DetectorSpec::parse("adaptive:" + wrong)};
    EXPECT_THROW(run_sweep(cfg), ConfigError);

    cfg.detectors.clear();
    EXPECT_THROW(run_sweep(cfg), ConfigError);

    cfg.detectors = {DetectorSpec::parse("zf")};
    cfg.snr_db.clear();
    EXPECT_THROW(run_sweep(cfg), ConfigError);
}

TEST(BerCsv, WriteReadRoundTrip) {
    const std::string dir = test_dir("csv_rt");
    std::vector<BerRecord> rec(2);
    rec[0] = {"ml", 12.0, 160000, 321, 321.0 / 160000, 0.0017, 0.0022, 65536.0, 69904.0, 65536.0};
    rec[1] = {"kbest:8", 12.5, 80000, 100, 0.00125, 0.001, 0.0015, 400.0, 400.0, 901.25};
    const std::string path = dir + "/ber.csv";
    write_ber_csv(rec, path);
    const std::vector<BerRecord> back = read_ber_csv(path);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].detector, "ml");
    EXPECT_EQ(back[0].bits, 160000);
    EXPECT_EQ(back[0].errors, 321);
    EXPECT_DOUBLE_EQ(back[0].ber, rec[0].ber);
    EXPECT_DOUBLE_EQ(back[1].sort_cmps_mean, 901.25);
    EXPECT_EQ(back[1].detector, "kbest:8");
}

TEST(BerCsv, ReadRejectsMalformedFiles) {
    const std::string dir = test_dir("csv_bad");
    EXPECT_THROW(read_ber_csv(dir + "/missing.csv"), ConfigError);
    EXPECT_THROW(read_ber_csv(write_file(dir + "/magic.csv", "nope\n")), ConfigError);
    EXPECT_THROW(read_ber_csv(write_file(dir + "/head.csv",
                                         "# akbest ber 1\ndetector,snr_db\n")),
                 ConfigError);
    EXPECT_THROW(read_ber_csv(write_file(dir + "/row.csv",
                                         std::string("# akbest ber 1\n") + kBerCsvHeader +
                                             "\nml,12,100\n")),
                 ConfigError);
    EXPECT_THROW(read_ber_csv(write_file(dir + "/cell.csv",
                                         std::string("# akbest ber 1\n") + kBerCsvHeader +
                                             "\nml,12,x,1,0,0,0,0,0,0\n")),
                 ConfigError);
}

TEST(ReportComplexity, WeightsMeansByFrameCount) {
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;  // 4 bits per frame
    std::vector<BerRecord> rec(2);
    rec[0] = {"kbest:2", 5.0, 400, 10, 0.025, 0.0, 0.1, 10.0, 10.0, 5.0};   // 100 frames
    rec[1] = {"kbest:2", 9.0, 1200, 10, 0.008, 0.0, 0.1, 20.0, 24.0, 9.0};  // 300 frames
    const std::vector<ComplexityRow> rows = report_complexity(rec, cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].detections, 400);
    EXPECT_DOUBLE_EQ(rows[0].nodes_mean, 17.5);        // (100*10 + 300*20) / 400
    EXPECT_DOUBLE_EQ(rows[0].metric_evals_mean, 20.5);  // (100*10 + 300*24) / 400
    EXPECT_DOUBLE_EQ(rows[0].sort_cmps_mean, 8.0);
    EXPECT_EQ(rows[0].asymptotic, "O(K*2^Nt)");
    EXPECT_EQ(rows[0].consistency, "-");
}

TEST(ReportComplexity, FlagsMlLeafCountMismatch) {
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;  // Q^Nt = 16
    std::vector<BerRecord> rec(1);
    rec[0] = {"ml", 5.0, 400, 10, 0.025, 0.0, 0.1, 16.0, 20.0, 16.0};
    EXPECT_EQ(report_complexity(rec, cfg)[0].consistency, "ok");
    EXPECT_EQ(report_complexity(rec, cfg)[0].asymptotic, "O(Q^Nt)");
    rec[0].nodes_mean = 15.5;
    EXPECT_EQ(report_complexity(rec, cfg)[0].consistency, "MISMATCH");
    EXPECT_THROW(report_complexity({}, cfg), EmptySampleError);
}

TEST(GrayTable, TextMatchesConstellation) {
    const std::string text = gray_table_text(16);
    std::istringstream in(text);
    std::string line;
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "# akbest gray 1");
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(line, "index,bits,re,im");
    const Constellation c = Constellation::make(16);
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream cell(line);
        std::string f0, f1, f2, f3;
        std::getline(cell, f0, ',');
        std::getline(cell, f1, ',');
        std::getline(cell, f2, ',');
        std::getline(cell, f3, ',');
        const int idx = std::stoi(f0);
        EXPECT_EQ(static_cast<int>(f1.size()), c.bits_per_symbol);
        int from_bits = 0;
        for (char b : f1) from_bits = from_bits * 2 + (b - '0');
        EXPECT_EQ(from_bits, idx);
        EXPECT_DOUBLE_EQ(std::stod(f2), c.points[static_cast<size_t>(idx)].real());
        EXPECT_DOUBLE_EQ(std::stod(f3), c.points[static_cast<size_t>(idx)].imag());
        ++rows;
    }
    EXPECT_EQ(rows, 16);
}

TEST(OracleGen, WritesRanksAndTargets) {
    const std::string dir = test_dir("oracle");
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.train_snr_db = 10.0;
    cfg.oracle_count = 25;
    cfg.out = dir;
    const KTargetSet set = run_oracle_gen(cfg);
    ASSERT_EQ(set.targets.size(), 2u);
    EXPECT_EQ(set.targets.back(), 1);  // the full vector is the exact ML solution
    ASSERT_TRUE(fs::exists(dir + "/ranks.csv"));
    ASSERT_TRUE(fs::exists(dir + "/targets.csv"));

    std::istringstream ranks(slurp(dir + "/ranks.csv"));
    std::string line;
    std::getline(ranks, line);
    EXPECT_EQ(line, "# akbest ranks 1");
    std::getline(ranks, line);
    EXPECT_EQ(line, "instance,layer,rank");
    int rows = 0;
    while (std::getline(ranks, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 25 * 2);  // one row per instance and layer

    // Same config, same outputs.
    const std::string again = test_dir("oracle_again");
    cfg.out = again;
    run_oracle_gen(cfg);
    EXPECT_EQ(slurp(dir + "/targets.csv"), slurp(again + "/targets.csv"));
}

TEST(TrainCoeffs, ProducesLoadableScheduleDeterministically) {
    const std::string dir = test_dir("coeffs");
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.train_snr_db = 8.0;
    cfg.oracle_count = 30;
    cfg.meta_batches = 3;
    cfg.meta_tasks = 3;
    cfg.rollout_steps = 20;
    cfg.out = dir;
    const CoeffTrainResult res = run_train_coeffs(cfg);
    EXPECT_LE(res.final_loss, std::min(res.f1_loss, res.f2_loss) + 1e-9);

    const ModelFile mf = ModelFile::load(dir + "/coeffs.model");
    const KSchedule sched = detail::schedule_from_coeff_model(mf, 2, 4);
    ASSERT_EQ(sched.widths.size(), 2u);
    EXPECT_NO_THROW(sched.validate(4));
    EXPECT_TRUE(fs::exists(dir + "/meta_loss.csv"));

    const std::string again = test_dir("coeffs_again");
    cfg.out = again;
    run_train_coeffs(cfg);
    EXPECT_EQ(slurp(dir + "/coeffs.model"), slurp(again + "/coeffs.model"));
}

TEST(TrainSelectorRun, ProducesLoadableSelectorAndLossCsv) {
    const std::string dir = test_dir("selector");
    ExperimentConfig cfg;
    cfg.nt = 2;
    cfg.nr = 2;
    cfg.order = 4;
    cfg.train_snr_db = 10.0;
    cfg.selector_batches = 5;
    cfg.selector_batch_size = 8;
    cfg.selector_val_every = 0;
    cfg.out = dir;
    const TrainedSelector trained = run_train_selector(cfg);
    ASSERT_EQ(trained.reports.size(), 2u);
    EXPECT_EQ(trained.reports[0].batch_loss.size(), 5u);
    const TrainedSelector sel = load_selector(dir + "/selector.model");
    EXPECT_EQ(sel.nt, 2);
    ASSERT_EQ(sel.nets.size(), 2u);

    std::istringstream loss(slurp(dir + "/selector_loss.csv"));
    std::string line;
    std::getline(loss, line);
    EXPECT_EQ(line, "# akbest selector-loss 1");
    std::getline(loss, line);
    EXPECT_EQ(line, "net,batch,loss");
    int rows = 0;
    while (std::getline(loss, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 2 * 5);
}

}  // namespace
