#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "akbest/channel.hpp"
#include "akbest/detect.hpp"
#include "akbest/fitcoef.hpp"
#include "akbest/model_io.hpp"
#include "akbest/neuralsel.hpp"
#include "akbest/oracle.hpp"

namespace akbest {

/// One detector requested in a sweep, parsed from a config token:
///   ml | zf | mmse | kbest:<K> | adaptive:<coeff-model> |
///   neural:<selector-model>:<coeff-model>
struct DetectorSpec {
    enum class Kind { Ml, Zf, Mmse, FixedK, Adaptive, Neural };

    Kind kind = Kind::Ml;
    long long fixed_k = 0;
    std::string schedule_path;  // Adaptive and Neural
    std::string selector_path;  // Neural only
    std::string id;             // verbatim token, used in CSV output

    static DetectorSpec parse(const std::string& token) {
        DetectorSpec d;
        d.id = token;
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : token) {
            if (ch == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        parts.push_back(cur);
        const std::string& head = parts[0];
        if (head == "ml" && parts.size() == 1) {
            d.kind = Kind::Ml;
        } else if (head == "zf" && parts.size() == 1) {
            d.kind = Kind::Zf;
        } else if (head == "mmse" && parts.size() == 1) {
            d.kind = Kind::Mmse;
        } else if (head == "kbest" && parts.size() == 2) {
            d.kind = Kind::FixedK;
            char* end = nullptr;
            d.fixed_k = std::strtoll(parts[1].c_str(), &end, 10);
            if (end != parts[1].c_str() + parts[1].size() || parts[1].empty() || d.fixed_k < 1)
                throw ConfigError("detector '" + token + "': bad K");
        } else if (head == "adaptive" && parts.size() == 2 && !parts[1].empty()) {
            d.kind = Kind::Adaptive;
            d.schedule_path = parts[1];
        } else if (head == "neural" && parts.size() == 3 && !parts[1].empty() &&
                   !parts[2].empty()) {
            d.kind = Kind::Neural;
            d.selector_path = parts[1];
            d.schedule_path = parts[2];
        } else {
            throw ConfigError("unknown detector token '" + token + "'");
        }
        return d;
    }
};

/// Plain-text key=value experiment configuration. The file starts with the
/// schema line "akbest-config 1"; '#' starts a comment, blank lines are
/// ignored, keys may appear at most once, unknown keys are rejected.
struct ExperimentConfig {
    int nt = 4;
    int nr = 4;
    int order = 16;
    std::vector<double> snr_db;
    long long max_frames = 200000;   // per (detector, SNR) point
    long long target_errors = 500;   // early-stop threshold, checked per round
    long long round_frames = 256;    // frames between early-stop checks
    std::vector<DetectorSpec> detectors;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out = "out";
    long long ml_budget = kDefaultMlBudget;

    // Training-related settings (oracle-gen, train-coeffs, train-selector).
    double train_snr_db = 12.0;
    int oracle_count = 200;
    double oracle_quantile = 0.99;
    int meta_batches = 80;
    int meta_tasks = 8;
    int rollout_steps = 50;
    int selector_batches = 1000;
    int selector_batch_size = 64;
    double selector_lr = 0.01;
    int selector_val_every = 100;
    int selector_val_size = 256;
    std::string coeffs_model = "coeffs.model";
    std::string selector_model = "selector.model";

    void validate() const {
        if (nt < 1 || nr < nt) throw ConfigError("config: need Nr >= Nt >= 1");
        if (nt > kMaxAntennas) throw ConfigError("config: Nt exceeds supported maximum");
        Constellation::make(order);  // throws on unsupported order
        if (max_frames < 1 || round_frames < 1 || target_errors < 1)
            throw ConfigError("config: frame budgets must be >= 1");
        if (workers < 1) throw ConfigError("config: workers must be >= 1");
        if (ml_budget < 1) throw ConfigError("config: ml_budget must be >= 1");
        if (!(oracle_quantile >= 0.0 && oracle_quantile <= 1.0))
            throw ConfigError("config: oracle_quantile outside [0, 1]");
        if (oracle_count < 1) throw ConfigError("config: oracle_count must be >= 1");
        if (meta_batches < 1 || meta_tasks < 1 || rollout_steps < 1)
            throw ConfigError("config: meta-training sizes must be >= 1");
        if (selector_batches < 1 || selector_batch_size < 1 || selector_val_size < 1 ||
            selector_val_every < 0)
            throw ConfigError("config: selector training sizes invalid");
        if (!(selector_lr > 0.0)) throw ConfigError("config: selector_lr must be > 0");
        if (out.empty()) throw ConfigError("config: out directory must be nonempty");
    }

    static ExperimentConfig load(const std::string& path);
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline long long parse_ll(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long r = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
    return r;
}

inline double parse_dbl(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double r = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
    return r;
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);

    std::string line;
    bool magic_seen = false;
    ExperimentConfig cfg;
    cfg.snr_db.clear();
    std::vector<std::string> seen;

    while (std::getline(in, line)) {
        if (const size_t hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (!magic_seen) {
            if (line != "akbest-config 1")
                throw ConfigError("config: first line must be 'akbest-config 1'");
            magic_seen = true;
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key = value: " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key");
        for (const std::string& s : seen)
            if (s == key) throw ConfigError("config: duplicate key " + key);
        seen.push_back(key);

        if (key == "nt") {
            cfg.nt = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "nr") {
            cfg.nr = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "order") {
            cfg.order = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "snr_db") {
            for (const std::string& tok : detail::split_ws(val))
                cfg.snr_db.push_back(detail::parse_dbl(key, tok));
        } else if (key == "max_frames") {
            cfg.max_frames = detail::parse_ll(key, val);
        } else if (key == "target_errors") {
            cfg.target_errors = detail::parse_ll(key, val);
        } else if (key == "round_frames") {
            cfg.round_frames = detail::parse_ll(key, val);
        } else if (key == "detectors") {
            for (const std::string& tok : detail::split_ws(val))
                cfg.detectors.push_back(DetectorSpec::parse(tok));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(detail::parse_ll(key, val));
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "out") {
            cfg.out = val;
        } else if (key == "ml_budget") {
            cfg.ml_budget = detail::parse_ll(key, val);
        } else if (key == "train_snr_db") {
            cfg.train_snr_db = detail::parse_dbl(key, val);
        } else if (key == "oracle_count") {
            cfg.oracle_count = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "oracle_quantile") {
            cfg.oracle_quantile = detail::parse_dbl(key, val);
        } else if (key == "meta_batches") {
            cfg.meta_batches = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "meta_tasks") {
            cfg.meta_tasks = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "rollout_steps") {
            cfg.rollout_steps = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "selector_batches") {
            cfg.selector_batches = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "selector_batch_size") {
            cfg.selector_batch_size = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "selector_lr") {
            cfg.selector_lr = detail::parse_dbl(key, val);
        } else if (key == "selector_val_every") {
            cfg.selector_val_every = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "selector_val_size") {
            cfg.selector_val_size = static_cast<int>(detail::parse_ll(key, val));
        } else if (key == "coeffs_model") {
            cfg.coeffs_model = val;
        } else if (key == "selector_model") {
            cfg.selector_model = val;
        } else {
            throw ConfigError("config: unknown key " + key);
        }
    }
    if (!magic_seen) throw ConfigError("config: empty file " + path);
    return cfg;
}

/// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(long long errors, long long bits) {
    if (bits < 1 || errors < 0 || errors > bits)
        throw EmptySampleError("wilson_interval: need 0 <= errors <= bits, bits >= 1");
    const double z = 1.959963984540054;  // Phi^-1(0.975)
    const double n = static_cast<double>(bits);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    double lo = center - half, hi = center + half;
    if (lo < 0.0) lo = 0.0;
    if (hi > 1.0) hi = 1.0;
    return {lo, hi};
}

struct BerRecord {
    std::string detector;
    double snr_db = 0.0;
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double nodes_mean = 0.0;
    double metric_evals_mean = 0.0;
    double sort_cmps_mean = 0.0;
};

namespace detail {

struct ResolvedDetector {
    DetectorSpec spec;
    KSchedule schedule;        // FixedK, Adaptive, Neural
    TrainedSelector selector;  // Neural
};

inline KSchedule schedule_from_coeff_model(const ModelFile& mf, int nt, int order) {
    if (static_cast<int>(mf.scalar("nt")) != nt || static_cast<int>(mf.scalar("order")) != order)
        throw ConfigError("coefficient model was trained for different dimensions");
    const ModelFile::Tensor& t = mf.tensor("widths");
    if (t.dims.size() != 1 || static_cast<int>(t.values.size()) != nt)
        throw ConfigError("coefficient model: widths tensor has wrong shape");
    KSchedule s;
    for (double v : t.values) s.widths.push_back(static_cast<long long>(v));
    s.a = mf.scalar("a");
    s.b = mf.scalar("b");
    s.c = mf.scalar("c");
    s.validate(order);
    return s;
}

inline std::vector<ResolvedDetector> resolve_detectors(const ExperimentConfig& cfg) {
    if (cfg.detectors.empty()) throw ConfigError("sweep: no detectors configured");
    std::vector<ResolvedDetector> out;
    for (const DetectorSpec& spec : cfg.detectors) {
        ResolvedDetector r;
        r.spec = spec;
        switch (spec.kind) {
            case DetectorSpec::Kind::Ml: {
                long long leaves = 1;
                for (int i = 0; i < cfg.nt; ++i) {
                    leaves *= cfg.order;
                    if (leaves > cfg.ml_budget)
                        throw BudgetError("sweep: ml needs Q^Nt <= ml_budget");
                }
                break;
            }
            case DetectorSpec::Kind::Zf:
            case DetectorSpec::Kind::Mmse:
                break;
            case DetectorSpec::Kind::FixedK:
                r.schedule = KSchedule::fixed(cfg.nt, cfg.order, spec.fixed_k);
                break;
            case DetectorSpec::Kind::Adaptive:
                r.schedule = schedule_from_coeff_model(ModelFile::load(spec.schedule_path),
                                                       cfg.nt, cfg.order);
                break;
            case DetectorSpec::Kind::Neural:
                r.selector = load_selector(spec.selector_path);
                if (r.selector.nt != cfg.nt || r.selector.nr != cfg.nr ||
                    r.selector.order != cfg.order)
                    throw ConfigError("selector model was trained for different dimensions");
                r.schedule = schedule_from_coeff_model(ModelFile::load(spec.schedule_path),
                                                       cfg.nt, cfg.order);
                break;
        }
        out.push_back(std::move(r));
    }
    return out;
}

struct FrameOutcome {
    long long bit_errors = 0;
    DetectorStats stats;
};

/// One Monte-Carlo frame: the RNG stream id depends only on (seed, SNR index,
/// frame index), so every detector sees the same channel, bits, and noise.
inline FrameOutcome run_frame(const ExperimentConfig& cfg, const Constellation& c,
                              const ResolvedDetector& det, double snr_db,
                              std::uint64_t stream) {
    RngStream rng(cfg.seed, stream);
    const ComplexMatrix h = sample_channel(cfg.nr, cfg.nt, rng);
    const BitBlock bits = random_bits(cfg.nt * c.bits_per_symbol, rng);
    const ComplexVector x = modulate(bits, c);
    const double n0 = noise_variance(cfg.nt, snr_db);
    const ComplexVector y = transmit_with_n0(h, x, n0, rng);

    DetectResult dr;
    switch (det.spec.kind) {
        case DetectorSpec::Kind::Ml:
            dr = detect_ml(h, y, c, cfg.ml_budget);
            break;
        case DetectorSpec::Kind::Zf:
            dr = detect_linear(h, y, c, LinearMode::ZF);
            break;
        case DetectorSpec::Kind::Mmse:
            dr = detect_linear(h, y, c, LinearMode::MMSE, n0);
            break;
        case DetectorSpec::Kind::FixedK:
        case DetectorSpec::Kind::Adaptive:
            dr = detect_kbest(preprocess(h, y, c), det.schedule);
            break;
        case DetectorSpec::Kind::Neural:
            dr = detect_neural(preprocess(h, y, c), det.selector, det.schedule);
            break;
    }

    FrameOutcome o;
    o.stats = dr.stats;
    const BitBlock hat = demodulate_hard(dr.xhat, c);
    for (size_t i = 0; i < bits.size(); ++i) o.bit_errors += bits[i] != hat[i];
    return o;
}

/// Run `count` frames starting at `frame0`, splitting the range across
/// cfg.workers threads. Outcomes land in frame order, so the reduction below
/// is independent of the thread count.
inline void run_round(const ExperimentConfig& cfg, const Constellation& c,
                      const ResolvedDetector& det, double snr_db, std::uint64_t snr_index,
                      long long frame0, long long count, std::vector<FrameOutcome>& out) {
    out.assign(static_cast<size_t>(count), FrameOutcome{});
    const int workers = static_cast<int>(std::min<long long>(cfg.workers, count));
    auto task = [&](long long lo, long long hi, std::exception_ptr& err) {
        try {
            for (long long i = lo; i < hi; ++i) {
                const std::uint64_t stream =
                    (snr_index << 32) | static_cast<std::uint64_t>(frame0 + i);
                out[static_cast<size_t>(i)] = run_frame(cfg, c, det, snr_db, stream);
            }
        } catch (...) {
            err = std::current_exception();
        }
    };
    if (workers <= 1) {
        std::exception_ptr err;
        task(0, count, err);
        if (err) std::rethrow_exception(err);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const long long lo = count * w / workers;
        const long long hi = count * (w + 1) / workers;
        pool.emplace_back(task, lo, hi, std::ref(errs[static_cast<size_t>(w)]));
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
}

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kBerCsvHeader =
    "detector,snr_db,bits,errors,ber,ci_lo,ci_hi,nodes_mean,metric_evals_mean,sort_cmps_mean";

inline void write_ber_csv(const std::vector<BerRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "# akbest ber 1\n" << kBerCsvHeader << '\n';
    for (const BerRecord& r : records) {
        out << r.detector << ',' << detail::fmt_g(r.snr_db) << ',' << r.bits << ',' << r.errors
            << ',' << detail::fmt_g(r.ber) << ',' << detail::fmt_g(r.ci_lo) << ','
            << detail::fmt_g(r.ci_hi) << ',' << detail::fmt_g(r.nodes_mean) << ','
            << detail::fmt_g(r.metric_evals_mean) << ',' << detail::fmt_g(r.sort_cmps_mean)
            << '\n';
    }
    if (!out) throw ConfigError("write failure on " + path);
}

inline std::vector<BerRecord> read_ber_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "# akbest ber 1")
        throw ConfigError(path + ": not an akbest ber csv");
    if (!std::getline(in, line) || line != kBerCsvHeader)
        throw ConfigError(path + ": unexpected ber csv header");
    std::vector<BerRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        cells.push_back(cur);
        if (cells.size() != 10) throw ConfigError(path + ": malformed row: " + line);
        BerRecord r;
        r.detector = cells[0];
        r.snr_db = detail::parse_dbl("snr_db", cells[1]);
        r.bits = detail::parse_ll("bits", cells[2]);
        r.errors = detail::parse_ll("errors", cells[3]);
        r.ber = detail::parse_dbl("ber", cells[4]);
        r.ci_lo = detail::parse_dbl("ci_lo", cells[5]);
        r.ci_hi = detail::parse_dbl("ci_hi", cells[6]);
        r.nodes_mean = detail::parse_dbl("nodes_mean", cells[7]);
        r.metric_evals_mean = detail::parse_dbl("metric_evals_mean", cells[8]);
        r.sort_cmps_mean = detail::parse_dbl("sort_cmps_mean", cells[9]);
        records.push_back(std::move(r));
    }
    return records;
}

/// Monte-Carlo BER sweep over the config's SNR grid and detector list.
/// Frames run in rounds of cfg.round_frames; after each completed round the
/// loop stops once cfg.target_errors bit errors were seen or cfg.max_frames
/// frames are done. Every completed frame counts, so early stopping does not
/// bias the estimate, and output is byte-identical for any worker count.
inline std::vector<BerRecord> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.snr_db.empty()) throw ConfigError("sweep: snr_db grid is empty");
    const std::vector<detail::ResolvedDetector> dets = detail::resolve_detectors(cfg);
    const Constellation c = Constellation::make(cfg.order);
    const long long bits_per_frame = static_cast<long long>(cfg.nt) * c.bits_per_symbol;

    std::vector<BerRecord> records;
    std::vector<detail::FrameOutcome> round;
    for (const detail::ResolvedDetector& det : dets) {
        for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
            const double snr = cfg.snr_db[si];
            long long frames = 0, errors = 0;
            DetectorStats total;
            while (frames < cfg.max_frames && errors < cfg.target_errors) {
                const long long count = std::min(cfg.round_frames, cfg.max_frames - frames);
                detail::run_round(cfg, c, det, snr, static_cast<std::uint64_t>(si), frames,
                                  count, round);
                for (const detail::FrameOutcome& o : round) {
                    errors += o.bit_errors;
                    total += o.stats;
                }
                frames += count;
            }
            BerRecord r;
            r.detector = det.spec.id;
            r.snr_db = snr;
            r.bits = frames * bits_per_frame;
            r.errors = errors;
            r.ber = static_cast<double>(errors) / static_cast<double>(r.bits);
            std::tie(r.ci_lo, r.ci_hi) = wilson_interval(errors, r.bits);
            const double inv = 1.0 / static_cast<double>(frames);
            r.nodes_mean = static_cast<double>(total.nodes_expanded) * inv;
            r.metric_evals_mean = static_cast<double>(total.metric_evals) * inv;
            r.sort_cmps_mean = static_cast<double>(total.sort_comparisons) * inv;
            records.push_back(std::move(r));
        }
    }

    std::filesystem::create_directories(cfg.out);
    write_ber_csv(records, (std::filesystem::path(cfg.out) / "ber.csv").string());
    return records;
}

/// Generate oracle rank profiles and quantile beam-width targets, writing
/// ranks.csv (one row per instance and layer) and targets.csv.
inline KTargetSet run_oracle_gen(const ExperimentConfig& cfg) {
    cfg.validate();
    const KTargetSet set =
        generate_targets(cfg.nr, cfg.nt, cfg.order, cfg.train_snr_db, cfg.oracle_count,
                         cfg.oracle_quantile, cfg.seed, cfg.ml_budget);
    std::filesystem::create_directories(cfg.out);

    {
        std::ofstream out(std::filesystem::path(cfg.out) / "ranks.csv");
        if (!out) throw ConfigError("cannot write ranks.csv");
        out << "# akbest ranks 1\ninstance,layer,rank\n";
        for (size_t i = 0; i < set.samples.size(); ++i)
            for (size_t k = 0; k < set.samples[i].size(); ++k)
                out << i << ',' << k + 1 << ',' << set.samples[i][k] << '\n';
    }
    {
        std::ofstream out(std::filesystem::path(cfg.out) / "targets.csv");
        if (!out) throw ConfigError("cannot write targets.csv");
        out << "# akbest targets 1\nlayer,k_target\n";
        for (size_t k = 0; k < set.targets.size(); ++k)
            out << k + 1 << ',' << set.targets[k] << '\n';
    }
    return set;
}

/// Oracle targets -> fused meta-learned coefficient fit -> model file.
/// Also writes meta_loss.csv (meta-objective per training batch).
inline CoeffTrainResult run_train_coeffs(const ExperimentConfig& cfg) {
    cfg.validate();
    const KTargetSet set =
        generate_targets(cfg.nr, cfg.nt, cfg.order, cfg.train_snr_db, cfg.oracle_count,
                         cfg.oracle_quantile, cfg.seed, cfg.ml_budget);
    std::vector<double> targets(set.targets.begin(), set.targets.end());

    CoeffTrainOpts opts;
    opts.meta.batches = cfg.meta_batches;
    opts.meta.tasks_per_batch = cfg.meta_tasks;
    opts.meta.rollout.steps = cfg.rollout_steps;
    opts.rollout.steps = cfg.rollout_steps;
    const CoeffTrainResult res =
        train_coefficients(targets, cfg.nt, cfg.order, opts, cfg.seed);

    ModelFile mf;
    mf.set_scalar("nt", cfg.nt);
    mf.set_scalar("nr", cfg.nr);
    mf.set_scalar("order", cfg.order);
    mf.set_scalar("snr_db", cfg.train_snr_db);
    mf.set_scalar("quantile", cfg.oracle_quantile);
    mf.set_scalar("a", res.coeffs.a);
    mf.set_scalar("b", res.coeffs.b);
    mf.set_scalar("c", res.coeffs.c);
    mf.set_scalar("w1", res.weights.w1);
    mf.set_scalar("w2", res.weights.w2);
    mf.set_scalar("final_loss", res.final_loss);
    mf.set_scalar("f1_loss", res.f1_loss);
    mf.set_scalar("f2_loss", res.f2_loss);
    mf.set_tensor("theta", {static_cast<long long>(res.theta.size())}, res.theta);
    std::vector<double> widths(res.schedule.widths.begin(), res.schedule.widths.end());
    mf.set_tensor("widths", {static_cast<long long>(widths.size())}, widths);
    mf.set_tensor("targets", {static_cast<long long>(targets.size())}, targets);

    std::filesystem::create_directories(cfg.out);
    mf.save((std::filesystem::path(cfg.out) / cfg.coeffs_model).string());

    {
        std::ofstream out(std::filesystem::path(cfg.out) / "meta_loss.csv");
        if (!out) throw ConfigError("cannot write meta_loss.csv");
        out << "# akbest meta-loss 1\nbatch,loss\n";
        for (size_t i = 0; i < res.meta_report.batch_loss.size(); ++i)
            out << i << ',' << detail::fmt_g(res.meta_report.batch_loss[i]) << '\n';
    }
    return res;
}

/// Train the per-antenna soft-symbol networks and persist them, together with
/// selector_loss.csv (training loss per batch and network).
inline TrainedSelector run_train_selector(const ExperimentConfig& cfg) {
    cfg.validate();
    SelectorHyper hyper;
    SelectorTrainConfig tc;
    tc.batches = cfg.selector_batches;
    tc.batch_size = cfg.selector_batch_size;
    tc.lr0 = cfg.selector_lr;
    tc.val_every = cfg.selector_val_every;
    tc.val_size = cfg.selector_val_size;
    const TrainedSelector sel =
        train_selector(cfg.nr, cfg.nt, cfg.order, cfg.train_snr_db, hyper, tc, cfg.seed);

    std::filesystem::create_directories(cfg.out);
    save_selector(sel, (std::filesystem::path(cfg.out) / cfg.selector_model).string());
    {
        std::ofstream out(std::filesystem::path(cfg.out) / "selector_loss.csv");
        if (!out) throw ConfigError("cannot write selector_loss.csv");
        out << "# akbest selector-loss 1\nnet,batch,loss\n";
        for (size_t i = 0; i < sel.reports.size(); ++i)
            for (size_t b = 0; b < sel.reports[i].batch_loss.size(); ++b)
                out << i << ',' << b << ',' << detail::fmt_g(sel.reports[i].batch_loss[b])
                    << '\n';
    }
    return sel;
}

/// Aggregated per-detector search-cost summary with the matching asymptotic
/// order and an internal consistency check for exhaustive ML (mean leaves
/// scored must equal Q^Nt exactly).
struct ComplexityRow {
    std::string detector;
    long long detections = 0;
    double nodes_mean = 0.0;
    double metric_evals_mean = 0.0;
    double sort_cmps_mean = 0.0;
    std::string asymptotic;
    std::string consistency;
};

inline std::vector<ComplexityRow> report_complexity(const std::vector<BerRecord>& records,
                                                    const ExperimentConfig& cfg) {
    if (records.empty()) throw EmptySampleError("report_complexity: no records");
    const Constellation c = Constellation::make(cfg.order);
    const long long bits_per_frame = static_cast<long long>(cfg.nt) * c.bits_per_symbol;
    double ml_leaves = 1.0;
    for (int i = 0; i < cfg.nt; ++i) ml_leaves *= cfg.order;

    std::vector<ComplexityRow> rows;
    for (const BerRecord& r : records) {
        const long long frames = r.bits / bits_per_frame;
        ComplexityRow* row = nullptr;
        for (ComplexityRow& existing : rows)
            if (existing.detector == r.detector) row = &existing;
        if (!row) {
            rows.push_back(ComplexityRow{});
            row = &rows.back();
            row->detector = r.detector;
            const DetectorSpec spec = DetectorSpec::parse(r.detector);
            switch (spec.kind) {
                case DetectorSpec::Kind::Ml: row->asymptotic = "O(Q^Nt)"; break;
                case DetectorSpec::Kind::Zf:
                case DetectorSpec::Kind::Mmse: row->asymptotic = "O(Nt^3)"; break;
                case DetectorSpec::Kind::FixedK: row->asymptotic = "O(K*2^Nt)"; break;
                case DetectorSpec::Kind::Adaptive:
                case DetectorSpec::Kind::Neural: row->asymptotic = "O(K*Nt^3)"; break;
            }
        }
        // Weighted running means over all SNR points of this detector.
        const double fprev = static_cast<double>(row->detections);
        const double fnew = static_cast<double>(frames);
        const double scale = 1.0 / (fprev + fnew);
        row->nodes_mean = (row->nodes_mean * fprev + r.nodes_mean * fnew) * scale;
        row->metric_evals_mean =
            (row->metric_evals_mean * fprev + r.metric_evals_mean * fnew) * scale;
        row->sort_cmps_mean = (row->sort_cmps_mean * fprev + r.sort_cmps_mean * fnew) * scale;
        row->detections += frames;
    }
    for (ComplexityRow& row : rows) {
        if (DetectorSpec::parse(row.detector).kind == DetectorSpec::Kind::Ml)
            row.consistency = row.nodes_mean == ml_leaves ? "ok" : "MISMATCH";
        else
            row.consistency = "-";
    }
    return rows;
}

inline void write_complexity_csv(const std::vector<ComplexityRow>& rows,
                                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "# akbest complexity 1\n"
        << "detector,detections,nodes_mean,metric_evals_mean,sort_cmps_mean,asymptotic,"
           "consistency\n";
    for (const ComplexityRow& r : rows) {
        out << r.detector << ',' << r.detections << ',' << detail::fmt_g(r.nodes_mean) << ','
            << detail::fmt_g(r.metric_evals_mean) << ',' << detail::fmt_g(r.sort_cmps_mean)
            << ',' << r.asymptotic << ',' << r.consistency << '\n';
    }
    if (!out) throw ConfigError("write failure on " + path);
}

/// Gray-labelled constellation table as CSV text (index == label).
inline std::string gray_table_text(int order) {
    const Constellation c = Constellation::make(order);
    std::ostringstream out;
    out << "# akbest gray 1\nindex,bits,re,im\n";
    for (int i = 0; i < c.order; ++i) {
        out << i << ',';
        for (int b = c.bits_per_symbol - 1; b >= 0; --b) out << ((i >> b) & 1);
        char buf[64];
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", c.points[static_cast<size_t>(i)].real(),
                      c.points[static_cast<size_t>(i)].imag());
        out << buf;
    }
    return out.str();
}

}  // namespace akbest
