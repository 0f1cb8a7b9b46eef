// Command-line front end: filtering experiments, signal conditioning,
// synthetic inputs, segmentation planning, resource accounting.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "qmf/core.hpp"
#include "qmf/encoding.hpp"
#include "qmf/hybrid.hpp"
#include "qmf/io.hpp"
#include "qmf/plan.hpp"
#include "qmf/rng.hpp"
#include "qmf/sigproc.hpp"
#include "qmf/stats.hpp"
#include "qmf/time_series.hpp"

namespace fs = std::filesystem;
using namespace qmf;

namespace {

struct CommonOpts {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::uint64_t shots = 10000;
    std::string kd = "auto";
    std::size_t kt = 2;
    double margin = 0.0;
    std::string backend = "ideal";
    double p_cx = 0.00875;
    double p_ro = 0.0175;
    bool exact = false;
    int threads = 0;
};

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed: " << s << "\n";
    return s;
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

Backend backend_from_string(const std::string& s) {
    if (s == "ideal") return Backend::Ideal;
    if (s == "statevector") return Backend::Statevector;
    if (s == "noisy") return Backend::Noisy;
    throw std::invalid_argument("unknown backend: " + s);
}

std::optional<std::size_t> parse_kd(const std::string& kd) {
    if (kd == "auto") return std::nullopt;
    long v = std::stol(kd);
    if (v < 1) throw std::invalid_argument("kd must be positive or 'auto'");
    return static_cast<std::size_t>(v);
}

io::Provenance base_meta(const std::string& command, const CommonOpts& c,
                         std::uint64_t seed) {
    io::Provenance meta;
    meta.emplace_back("generated-by", "qmf " + command);
    meta.emplace_back("seed", std::to_string(seed));
    meta.emplace_back("shots", std::to_string(c.shots));
    meta.emplace_back("kd", c.kd);
    meta.emplace_back("kt", std::to_string(c.kt));
    meta.emplace_back("margin", std::to_string(c.margin));
    meta.emplace_back("backend", c.backend);
    meta.emplace_back("p_cx", std::to_string(c.p_cx));
    meta.emplace_back("p_ro", std::to_string(c.p_ro));
    meta.emplace_back("exact", c.exact ? "1" : "0");
    return meta;
}

void add_common(CLI::App* cmd, CommonOpts& c, bool with_backend = true) {
    cmd->add_option("--out-dir", c.out_dir, "output directory");
    cmd->add_option("--seed", c.seed,
                    "master seed (a random one is picked and printed if omitted)");
    cmd->add_option("--shots", c.shots, "shots per circuit run");
    cmd->add_option("--kd", c.kd, "data segment length, integer or 'auto'");
    cmd->add_option("--kt", c.kt, "template chunk length");
    cmd->add_option("--margin", c.margin, "extra positivity margin");
    if (with_backend) {
        cmd->add_option("--backend", c.backend,
                        "ideal | statevector | noisy");
        cmd->add_option("--p-cx", c.p_cx,
                        "depolarizing probability per CNOT-equivalent");
        cmd->add_option("--p-ro", c.p_ro, "readout bit-flip probability");
        cmd->add_flag("--exact", c.exact,
                      "use exact joint probabilities (infinite-shot limit)");
    }
    cmd->add_option("--threads", c.threads,
                    "worker threads (0 = available parallelism)");
}

void print_peak(const std::string& label, const SnrSeries& series,
                double seconds) {
    std::size_t peak_lag = 0;
    double peak = 0.0;
    for (const auto& est : series.estimates)
        if (std::abs(est.value) > std::abs(peak)) {
            peak = est.value;
            peak_lag = est.lag;
        }
    std::printf("%s: peak lag %zu, peak SNR %.6g, %.3f s\n", label.c_str(),
                peak_lag, peak, seconds);
}

HybridOptions make_hybrid_opts(const CommonOpts& c, std::uint64_t seed) {
    HybridOptions opts;
    opts.backend = backend_from_string(c.backend);
    opts.noise.p_two_qubit = c.p_cx;
    opts.noise.p_readout = c.p_ro;
    opts.margin = c.margin;
    opts.seed = seed;
    opts.exact = c.exact;
    opts.threads = resolve_threads(c.threads);
    return opts;
}

std::string comparison_csv(const ComparisonReport& rep, const SnrSeries& est,
                           const SnrSeries& truth, const io::Provenance& meta) {
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "# value_correlation=" << rep.value_correlation << "\n";
    out << "# error_truth_correlation=" << rep.error_truth_correlation << "\n";
    out << "# error_correlation_defined="
        << (rep.error_correlation_defined ? 1 : 0) << "\n";
    out << "# max_abs_error=" << rep.max_abs_error << "\n";
    out << "lag,truth,estimate,error,sigma,z\n";
    for (std::size_t j = 0; j < truth.estimates.size(); ++j) {
        out << truth.estimates[j].lag << "," << truth.estimates[j].value << ","
            << est.estimates[j].value << "," << rep.errors[j] << ",";
        if (est.estimates[j].sigma) out << *est.estimates[j].sigma;
        out << "," << rep.z_scores[j] << "\n";
    }
    return out.str();
}

void print_comparison_summary(const ComparisonReport& rep) {
    std::printf(
        "compare: corr=%.4f err-corr=%.4f%s max|err|=%.6g\n",
        rep.value_correlation, rep.error_truth_correlation,
        rep.error_correlation_defined ? "" : " (undefined, reported as 0)",
        rep.max_abs_error);
}

int cmd_filter(const CommonOpts& c, const std::string& template_path,
               const std::string& data_path, const std::string& mode) {
    TimeSeries tmpl = io::read_time_series(template_path);
    TimeSeries data = io::read_time_series(data_path);
    std::uint64_t seed = resolve_seed(c.seed);
    fs::create_directories(c.out_dir);
    auto meta = base_meta("filter", c, seed);
    meta.emplace_back("template", template_path);
    meta.emplace_back("data", data_path);

    if (mode == "classical" || mode == "both") {
        auto t0 = std::chrono::steady_clock::now();
        SnrSeries oracle = oracle_snr(tmpl, data);
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        io::write_snr_series(fs::path(c.out_dir) / "snr_classical.csv", oracle,
                             data.sample_rate, data.epoch, meta);
        print_peak("classical", oracle, dt.count());
    }
    if (mode == "hybrid" || mode == "both") {
        auto t0 = std::chrono::steady_clock::now();
        SegmentPlan plan = plan_segments(data.size(), tmpl.size(),
                                         parse_kd(c.kd), c.kt, c.shots);
        SnrSeries hybrid = estimate_snr(tmpl, data, plan,
                                        make_hybrid_opts(c, seed));
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        std::string name = "snr_" + std::string(c.exact ? "exact" : c.backend)
                           + ".csv";
        io::write_snr_series(fs::path(c.out_dir) / name, hybrid,
                             data.sample_rate, data.epoch, meta);
        print_peak("hybrid-" + c.backend, hybrid, dt.count());
    }
    return 0;
}

// Randomized small-scale benchmark: 2-point template [2,-1] against many
// 4-point normal datasets, run noiseless and noisy, with scatter data of
// estimate vs truth and error vs truth.
int cmd_benchmark(CommonOpts c, std::size_t datasets, bool skip_noisy) {
    std::uint64_t seed = resolve_seed(c.seed);
    fs::create_directories(c.out_dir);
    c.kd = "4";
    c.kt = 2;
    c.margin = 0.1;

    TimeSeries tmpl;
    tmpl.samples = {2.0, -1.0};

    struct Row {
        double truth, ideal, noisy;
    };
    std::vector<Row> rows;
    rng::SplitMix64 data_gen(rng::derive_stream(seed, 0xda7a));
    SegmentPlan plan = plan_segments(4, 2, 4, 2, c.shots);

    HybridOptions ideal = make_hybrid_opts(c, seed);
    ideal.backend = Backend::Ideal;
    HybridOptions noisy = make_hybrid_opts(c, seed);
    noisy.backend = Backend::Noisy;

    for (std::size_t d = 0; d < datasets; ++d) {
        TimeSeries data;
        data.samples.resize(4);
        for (double& x : data.samples) x = data_gen.gaussian();

        SnrSeries truth = oracle_snr(tmpl, data);
        ideal.seed = rng::derive_stream(seed, 1, d);
        SnrSeries est_ideal = estimate_snr(tmpl, data, plan, ideal);
        SnrSeries est_noisy;
        if (!skip_noisy) {
            noisy.seed = rng::derive_stream(seed, 2, d);
            est_noisy = estimate_snr(tmpl, data, plan, noisy);
        }
        for (std::size_t j = 0; j < truth.estimates.size(); ++j)
            rows.push_back({truth.estimates[j].value,
                            est_ideal.estimates[j].value,
                            skip_noisy ? 0.0 : est_noisy.estimates[j].value});
    }

    auto meta = base_meta("appendix-c", c, seed);
    meta.emplace_back("datasets", std::to_string(datasets));
    std::ostringstream scatter;
    for (const auto& [k, v] : meta) scatter << "# " << k << "=" << v << "\n";
    scatter << "truth,ideal,noisy\n";
    for (const Row& r : rows)
        scatter << r.truth << "," << r.ideal << "," << r.noisy << "\n";
    io::write_file_atomic(fs::path(c.out_dir) / "scatter.csv", scatter.str());

    std::vector<double> truth_v, ideal_v, noisy_v, err_ideal, err_noisy;
    for (const Row& r : rows) {
        truth_v.push_back(r.truth);
        ideal_v.push_back(r.ideal);
        noisy_v.push_back(r.noisy);
        err_ideal.push_back(r.ideal - r.truth);
        err_noisy.push_back(r.noisy - r.truth);
    }
    std::printf("noiseless: corr=%.4f err-corr=%.4f\n",
                pearson(ideal_v, truth_v), pearson(err_ideal, truth_v));
    if (!skip_noisy)
        std::printf("noisy:     corr=%.4f err-corr=%.4f\n",
                    pearson(noisy_v, truth_v), pearson(err_noisy, truth_v));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid Monte Carlo matched filtering toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file");
    app.allow_config_extras(true);

    // filter
    CommonOpts fc;
    std::string f_template, f_data, f_mode = "both";
    auto* filter = app.add_subcommand("filter", "matched filter a data file");
    filter->add_option("--template", f_template, "template CSV")->required();
    filter->add_option("--data", f_data, "data CSV")->required();
    filter->add_option("--mode", f_mode, "classical | hybrid | both");
    add_common(filter, fc);

    // appendix-c
    CommonOpts ac;
    ac.shots = 20000;
    std::size_t a_datasets = 100;
    bool a_skip_noisy = false;
    auto* appc = app.add_subcommand(
        "appendix-c", "randomized 2-point-template benchmark vs ground truth");
    appc->add_option("--datasets", a_datasets, "number of random datasets");
    appc->add_flag("--skip-noisy", a_skip_noisy, "noiseless runs only");
    add_common(appc, ac);

    // condition
    CommonOpts cc;
    std::string c_in, c_out, c_psd;
    double c_cutoff = 99.98, c_out_rate = 200.0;
    std::size_t c_seg_len = 512;
    bool c_whiten = false;
    auto* cond = app.add_subcommand("condition",
                                    "low-pass, downsample, optionally whiten");
    cond->add_option("--in", c_in, "input time-series CSV")->required();
    cond->add_option("--out", c_out, "output time-series CSV")->required();
    cond->add_option("--cutoff", c_cutoff, "low-pass cutoff in Hz");
    cond->add_option("--out-rate", c_out_rate, "output sample rate in Hz");
    cond->add_flag("--whiten", c_whiten, "whiten after downsampling");
    cond->add_option("--psd", c_psd,
                     "PSD CSV for whitening (estimated from input if empty)");
    cond->add_option("--seg-len", c_seg_len, "PSD segment length");

    // psd
    std::string p_in, p_out, p_window = "hann";
    std::size_t p_seg_len = 512;
    double p_overlap = 0.0;
    auto* psd = app.add_subcommand("psd", "Welch power spectral density");
    psd->add_option("--in", p_in, "input time-series CSV")->required();
    psd->add_option("--out", p_out, "output PSD CSV")->required();
    psd->add_option("--seg-len", p_seg_len, "segment length");
    psd->add_option("--window", p_window, "hann | rectangular");
    psd->add_option("--overlap", p_overlap, "overlap fraction in [0,1)");

    // synth
    CommonOpts sc;
    std::string s_kind = "chirp", s_out, s_psd, s_inject_into;
    double s_f0 = 30.0, s_f1 = 90.0, s_duration = 0.5, s_rate = 4000.0;
    double s_amplitude = 1.0, s_taper = 0.1, s_sigma = 1.0, s_scale = 1.0;
    std::size_t s_length = 4000, s_at = 0;
    auto* synth = app.add_subcommand("synth", "synthesize chirps and noise");
    synth->add_option("--kind", s_kind, "chirp | white | colored");
    synth->add_option("--out", s_out, "output time-series CSV")->required();
    synth->add_option("--f0", s_f0, "chirp start frequency Hz");
    synth->add_option("--f1", s_f1, "chirp end frequency Hz");
    synth->add_option("--duration", s_duration, "chirp duration s");
    synth->add_option("--rate", s_rate, "sample rate Hz");
    synth->add_option("--amplitude", s_amplitude, "chirp amplitude");
    synth->add_option("--taper", s_taper, "envelope taper fraction");
    synth->add_option("--sigma", s_sigma, "white noise standard deviation");
    synth->add_option("--length", s_length, "noise length in samples");
    synth->add_option("--psd", s_psd, "PSD CSV shaping colored noise");
    synth->add_option("--inject-into", s_inject_into,
                      "add the synthesized signal into this series");
    synth->add_option("--at", s_at, "injection index");
    synth->add_option("--scale", s_scale, "injection scale");
    synth->add_option("--seed", sc.seed, "noise seed");

    // plan
    CommonOpts plc;
    std::size_t pl_data_len = 0, pl_template_len = 0;
    auto* planc = app.add_subcommand("plan", "segmentation plan");
    planc->add_option("--data-len", pl_data_len, "data length L")->required();
    planc->add_option("--template-len", pl_template_len, "template length N")
        ->required();
    planc->add_option("--kd", plc.kd, "segment length, integer or 'auto'");
    planc->add_option("--kt", plc.kt, "chunk length");
    planc->add_option("--shots", plc.shots, "shots per segment");

    // resources
    CommonOpts rc;
    std::size_t r_data_len = 0, r_template_len = 0;
    auto* res = app.add_subcommand("resources", "resource accounting");
    res->add_option("--data-len", r_data_len, "data length L")->required();
    res->add_option("--template-len", r_template_len, "template length N")
        ->required();
    res->add_option("--kd", rc.kd, "segment length, integer or 'auto'");
    res->add_option("--kt", rc.kt, "chunk length");
    res->add_option("--shots", rc.shots, "shots per segment");

    // compare
    std::string cm_est, cm_truth, cm_out;
    auto* cmp = app.add_subcommand("compare", "compare two SNR series");
    cmp->add_option("--estimate", cm_est, "estimate SNR CSV")->required();
    cmp->add_option("--truth", cm_truth, "truth SNR CSV")->required();
    cmp->add_option("--out", cm_out, "comparison report CSV");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }

        if (filter->parsed())
            return cmd_filter(fc, f_template, f_data, f_mode);

        if (appc->parsed()) return cmd_benchmark(ac, a_datasets, a_skip_noisy);

        if (cond->parsed()) {
            TimeSeries ts = io::read_time_series(c_in);
            TimeSeries conditioned =
                lowpass_downsample(ts, c_cutoff, c_out_rate);
            if (c_whiten) {
                PsdEstimate est = c_psd.empty()
                                      ? welch_psd(conditioned, c_seg_len)
                                      : io::read_psd(c_psd);
                conditioned = whiten(conditioned, est);
            }
            io::Provenance meta{{"generated-by", "qmf condition"},
                                {"cutoff", std::to_string(c_cutoff)},
                                {"out_rate", std::to_string(c_out_rate)},
                                {"whitened", c_whiten ? "1" : "0"}};
            io::write_time_series(c_out, conditioned, meta);
            std::printf("condition: %zu samples at %g Hz\n",
                        conditioned.size(), conditioned.sample_rate);
            return 0;
        }

        if (psd->parsed()) {
            TimeSeries ts = io::read_time_series(p_in);
            PsdEstimate est = welch_psd(ts, p_seg_len,
                                        window_from_string(p_window), p_overlap);
            io::Provenance meta{{"generated-by", "qmf psd"},
                                {"input", p_in},
                                {"overlap", std::to_string(p_overlap)}};
            io::write_psd(p_out, est, meta);
            std::printf("psd: %zu bins up to %g Hz\n", est.power.size(),
                        est.frequencies.back());
            return 0;
        }

        if (synth->parsed()) {
            std::uint64_t seed = resolve_seed(sc.seed);
            TimeSeries out;
            if (s_kind == "chirp") {
                out = synth_chirp(
                    {s_f0, s_f1, s_duration, s_amplitude, s_taper}, s_rate);
            } else if (s_kind == "white") {
                out = synth_noise_white(s_length, s_rate, s_sigma, seed);
            } else if (s_kind == "colored") {
                if (s_psd.empty())
                    throw std::invalid_argument("colored noise needs --psd");
                out = synth_noise_psd(io::read_psd(s_psd), s_length, s_rate,
                                      seed);
            } else {
                throw std::invalid_argument("unknown synth kind: " + s_kind);
            }
            if (!s_inject_into.empty())
                out = inject(io::read_time_series(s_inject_into), out, s_at,
                             s_scale);
            io::Provenance meta{{"generated-by", "qmf synth"},
                                {"kind", s_kind},
                                {"seed", std::to_string(seed)}};
            io::write_time_series(s_out, out, meta);
            std::printf("synth: %zu samples at %g Hz\n", out.size(),
                        out.sample_rate);
            return 0;
        }

        if (planc->parsed()) {
            SegmentPlan plan =
                plan_segments(pl_data_len, pl_template_len, parse_kd(plc.kd),
                              plc.kt, plc.shots);
            if (plan.k_star)
                std::printf("stationary k* = %.4f\n", *plan.k_star);
            std::printf(
                "plan: kd=%zu kt=%zu segments=%zu chunks=%zu lags/segment=%zu "
                "shots/segment=%llu\n",
                plan.k_d, plan.k_t, plan.data_starts.size(), plan.num_chunks,
                plan.lags_per_segment,
                static_cast<unsigned long long>(plan.shots_per_segment));
            return 0;
        }

        if (res->parsed()) {
            SegmentPlan plan = plan_segments(r_data_len, r_template_len,
                                             parse_kd(rc.kd), rc.kt, rc.shots);
            ResourceReport rep =
                resource_report(r_template_len, r_data_len, plan);
            std::printf("%zu data qubits + %zu template qubits per run\n",
                        rep.data_qubits_per_segment,
                        rep.template_qubits_per_chunk);
            std::printf(
                "segments=%zu chunks=%zu runs=%zu lags/segment=%zu depth=%zu\n",
                rep.num_segments, rep.num_chunks, rep.total_runs,
                rep.lags_per_segment, rep.combine_depth);
            std::printf("cswaps: data loader %zu, template loader %zu\n",
                        rep.data_loader_cswaps, rep.template_loader_cswaps);
            std::printf("total shots = %llu\n",
                        static_cast<unsigned long long>(rep.total_shots));
            std::printf("decoder estimates: OR ~ %.3g, AND+INV ~ %.3g\n",
                        rep.or_gate_estimate, rep.and_inverter_estimate);
            return 0;
        }

        if (cmp->parsed()) {
            SnrSeries est = io::read_snr_series(cm_est);
            SnrSeries truth = io::read_snr_series(cm_truth);
            ComparisonReport rep = compare_runs(est, truth);
            if (!cm_out.empty()) {
                io::Provenance meta{{"generated-by", "qmf compare"},
                                    {"estimate", cm_est},
                                    {"truth", cm_truth}};
                io::write_file_atomic(cm_out,
                                      comparison_csv(rep, est, truth, meta));
            }
            print_comparison_summary(rep);
            return 0;
        }

        return 2;
    } catch (const io::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
