// Command-line front end: config-driven BER sweeps, oracle generation,
// coefficient and selector training, complexity reports, and Gray-table dumps.
//
// Exit codes: 0 success, 2 configuration or model-file error, 3 search budget
// exceeded, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "akbest/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    bool has_seed = false;
    bool has_workers = false;
    bool has_out = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "override the config's RNG seed");
    sub->add_option("--workers", args.workers, "override the config's worker count");
    sub->add_option("--out", args.out, "override the config's output directory");
}

void finish_common(const CLI::App* sub, CommonArgs& args) {
    args.has_seed = sub->count("--seed") > 0;
    args.has_workers = sub->count("--workers") > 0;
    args.has_out = sub->count("--out") > 0;
}

akbest::ExperimentConfig load_config(const CommonArgs& args) {
    akbest::ExperimentConfig cfg = akbest::ExperimentConfig::load(args.config_path);
    if (args.has_seed) cfg.seed = args.seed;
    if (args.has_workers) cfg.workers = args.workers;
    if (args.has_out) cfg.out = args.out;
    return cfg;
}

void cmd_sweep(const CommonArgs& args) {
    const akbest::ExperimentConfig cfg = load_config(args);
    const std::vector<akbest::BerRecord> records = akbest::run_sweep(cfg);
    std::printf("%-24s %8s %12s %8s %12s\n", "detector", "snr_db", "bits", "errors", "ber");
    for (const akbest::BerRecord& r : records)
        std::printf("%-24s %8g %12lld %8lld %12.4e\n", r.detector.c_str(), r.snr_db, r.bits,
                    r.errors, r.ber);
    std::printf("wrote %s/ber.csv\n", cfg.out.c_str());
}

void cmd_oracle_gen(const CommonArgs& args) {
    const akbest::ExperimentConfig cfg = load_config(args);
    const akbest::KTargetSet set = akbest::run_oracle_gen(cfg);
    std::printf("oracle targets (q = %g over %d instances at %g dB):\n", cfg.oracle_quantile,
                cfg.oracle_count, cfg.train_snr_db);
    for (size_t k = 0; k < set.targets.size(); ++k)
        std::printf("  layer %zu: K* = %lld\n", k + 1, set.targets[k]);
    std::printf("wrote %s/ranks.csv and %s/targets.csv\n", cfg.out.c_str(), cfg.out.c_str());
}

void cmd_train_coeffs(const CommonArgs& args) {
    const akbest::ExperimentConfig cfg = load_config(args);
    const akbest::CoeffTrainResult res = akbest::run_train_coeffs(cfg);
    std::printf("fitted K = a*k^b + c: a = %.6g  b = %.6g  c = %.6g\n", res.coeffs.a,
                res.coeffs.b, res.coeffs.c);
    std::printf("fusion weights: w1 = %.6g  w2 = %.6g\n", res.weights.w1, res.weights.w2);
    std::printf("final loss %.6g (gradient stepper %.6g, recurrent %.6g)\n", res.final_loss,
                res.f1_loss, res.f2_loss);
    std::printf("schedule:");
    for (long long w : res.schedule.widths) std::printf(" %lld", w);
    std::printf("\nwrote %s/%s\n", cfg.out.c_str(), cfg.coeffs_model.c_str());
}

void cmd_train_selector(const CommonArgs& args) {
    const akbest::ExperimentConfig cfg = load_config(args);
    const akbest::TrainedSelector sel = akbest::run_train_selector(cfg);
    for (size_t i = 0; i < sel.reports.size(); ++i) {
        const auto& losses = sel.reports[i].batch_loss;
        std::printf("net %zu: initial loss %.6g, final loss %.6g\n", i, losses.front(),
                    losses.back());
    }
    std::printf("wrote %s/%s\n", cfg.out.c_str(), cfg.selector_model.c_str());
}

void cmd_report(const CommonArgs& args) {
    const akbest::ExperimentConfig cfg = load_config(args);
    const std::string ber_path = (std::filesystem::path(cfg.out) / "ber.csv").string();
    const std::vector<akbest::BerRecord> records = akbest::read_ber_csv(ber_path);
    const std::vector<akbest::ComplexityRow> rows = akbest::report_complexity(records, cfg);
    akbest::write_complexity_csv(rows,
                                 (std::filesystem::path(cfg.out) / "complexity.csv").string());
    std::printf("%-24s %10s %14s %14s %14s %-10s %s\n", "detector", "frames", "nodes_mean",
                "evals_mean", "cmps_mean", "asymptotic", "check");
    for (const akbest::ComplexityRow& r : rows)
        std::printf("%-24s %10lld %14.2f %14.2f %14.2f %-10s %s\n", r.detector.c_str(),
                    r.detections, r.nodes_mean, r.metric_evals_mean, r.sort_cmps_mean,
                    r.asymptotic.c_str(), r.consistency.c_str());
    std::printf("wrote %s/complexity.csv\n", cfg.out.c_str());
}

void cmd_dump_gray_table(int order, const std::string& out_dir) {
    const std::string text = akbest::gray_table_text(order);
    std::fputs(text.c_str(), stdout);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(std::filesystem::path(out_dir) / "gray.csv");
        out << text;
        if (!out) throw akbest::ConfigError("cannot write gray.csv");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive K-best MIMO detection workbench"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo BER sweep");
    CLI::App* oracle = app.add_subcommand("oracle-gen", "generate rank profiles and K targets");
    CLI::App* coeffs = app.add_subcommand("train-coeffs", "train fitting-function coefficients");
    CLI::App* selector = app.add_subcommand("train-selector", "train the neural path selector");
    CLI::App* report = app.add_subcommand("report", "summarize search cost from a sweep's ber.csv");
    CLI::App* gray = app.add_subcommand("dump-gray-table", "print the Gray-labelled constellation");
    for (CLI::App* sub : {sweep, oracle, coeffs, selector, report}) add_common(sub, args);

    int gray_order = 16;
    std::string gray_out;
    gray->add_option("--order", gray_order, "constellation order (4, 16, or 64)");
    gray->add_option("--out", gray_out, "also write gray.csv into this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad flags are configuration errors
    }

    try {
        for (const CLI::App* sub : {sweep, oracle, coeffs, selector, report})
            if (sub->parsed()) finish_common(sub, args);
        if (sweep->parsed()) cmd_sweep(args);
        if (oracle->parsed()) cmd_oracle_gen(args);
        if (coeffs->parsed()) cmd_train_coeffs(args);
        if (selector->parsed()) cmd_train_selector(args);
        if (report->parsed()) cmd_report(args);
        if (gray->parsed()) cmd_dump_gray_table(gray_order, gray_out);
        return 0;
    } catch (const akbest::BudgetError& e) {
        std::fprintf(stderr, "budget exceeded: %s\n", e.what());
        return 3;
    } catch (const akbest::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const akbest::ModelError& e) {
        std::fprintf(stderr, "model file error: %s\n", e.what());
        return 2;
    } catch (const akbest::DimensionError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const akbest::LengthError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const akbest::EmptySampleError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    }
}
