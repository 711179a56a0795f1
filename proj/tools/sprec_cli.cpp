#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sprec/sprec.hpp"

namespace fs = std::filesystem;
using namespace sprec;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
    std::vector<std::string> config_paths;
    std::string config_path; // first of config_paths
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<double> snr;
    int trials = 0;
    int draws = 0;
    double lambda = -1.0;
    double mu = 0.0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config = true) {
    auto* c = cmd->add_option("--config", o.config_paths,
                              "experiment config file(s); one output set per config");
    if (need_config) c->required();
    cmd->add_option("--out", o.out_dir, "output directory (default: $SPREC_OUT_DIR or .)");
    cmd->add_option("--seed", o.seed, "RNG seed override")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--snr", o.snr, "SNR grid override, dB (-10 log10 sigma^2)")
        ->delimiter(',');
    cmd->add_option("--trials", o.trials, "symbol vectors per channel draw override");
    cmd->add_option("--draws", o.draws, "channel draw count override");
    cmd->add_option("--lambda", o.lambda, "l12 weight override");
    cmd->add_option("--mu", o.mu, "ISTA step size override");
}

fs::path resolve_out_dir(const CommonOpts& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv(kOutDirEnv)) return env;
    return ".";
}

ExperimentConfig load_config(const CommonOpts& o) {
    ExperimentConfig cfg = parse_config(read_file(o.config_path));
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.snr.empty()) cfg.snr_grid_db = o.snr;
    if (o.trials > 0) cfg.n_symbols_per_draw = o.trials;
    if (o.draws > 0) cfg.n_channel_draws = o.draws;
    if (o.lambda >= 0.0) cfg.lambda = o.lambda;
    if (o.mu > 0.0) cfg.mu = o.mu;
    return cfg;
}

void write_run(const fs::path& dir, const ExperimentConfig& cfg, const MetricSeries& m,
               const std::string& name, double duration_s) {
    const fs::path csv = dir / (name + ".csv");
    const fs::path man = dir / (name + "_manifest.json");
    atomic_write(csv, metric_to_csv(m));
    nlohmann::json j = make_manifest(cfg, cfg.seed, duration_s, {csv.string()});
    j["metric"] = metric_to_json(m);
    atomic_write(man, j.dump(2) + "\n");
    std::cout << "wrote " << csv.string() << "\n";
    std::cout << "wrote " << man.string() << "\n";
    if (m.n_design_failures > 0)
        std::cerr << "warning: " << m.n_design_failures << " design failure(s) were skipped\n";
}

CMat load_channel_csv(const std::string& path) { return precoder_from_csv(read_file(path)); }

int cmd_design(const CommonOpts& o, const std::string& channel_path) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = load_config(o);
    cfg.validate_common();
    const fs::path dir = resolve_out_dir(o);

    CMat H;
    if (!channel_path.empty()) {
        H = load_channel_csv(channel_path);
        if (H.rows() != cfg.n_users || H.cols() != cfg.n_antennas)
            throw DimensionError("design: channel file shape disagrees with config");
    } else {
        RngStream rng(split_seed(cfg.seed, 0, 0));
        H = draw_channel(cfg.n_users, cfg.n_antennas, rng);
    }

    const double sigma2 =
        cfg.snr_grid_db.empty() ? 0.0 : std::pow(10.0, -cfg.snr_grid_db.front() / 10.0);
    const bool qam = cfg.modulation == Modulation::QAM16Superposition;

    IstaConfig ic;
    ic.mu = cfg.mu;
    ic.lambda = cfg.lambda;
    ic.n_users = cfg.n_users;
    ic.n_antennas = cfg.n_antennas;
    ic.max_iters = cfg.max_iters;
    ic.rel_tol = cfg.rel_tol;
    ic.abs_variant = cfg.nonlinearity.kind == Nonlinearity::OneBit ? AbsVariant::SplitOneBit
                                                                   : AbsVariant::ComplexModulus;

    DesignReport rep;
    switch (cfg.precoder) {
    case PrecoderKind::ZF:
        rep = design_zf(H);
        if (qam) {
            rep.precoder *= SuperpositionSpec{cfg.n_users}.expansion();
            detail::fill_report_stats(rep, ic.abs_variant);
        }
        break;
    case PrecoderKind::L12:
        ic.sigma_eta_sq = 0.0;
        rep = design_ista(H, ic, CMat::Identity(cfg.n_users, cfg.n_users));
        break;
    case PrecoderKind::ElasticNet:
        ic.sigma_eta_sq = sigma2;
        rep = design_ista(H, ic, CMat::Identity(cfg.n_users, cfg.n_users));
        break;
    case PrecoderKind::Superposition:
        ic.sigma_eta_sq = sigma2;
        rep = design_superposition(H, ic, SuperpositionSpec{cfg.n_users});
        break;
    case PrecoderKind::None:
        throw ConfigError("design: precoder=none has nothing to design");
    }

    const CMat target = qam ? CMat(SuperpositionSpec{cfg.n_users}.expansion())
                            : CMat(CMat::Identity(cfg.n_users, cfg.n_users));
    const double residual = (H * rep.precoder - target).cwiseAbs().maxCoeff();

    nlohmann::json report = {
        {"iterations_used", rep.iterations_used},
        {"sparsity_fraction", rep.sparsity_fraction},
        {"row_l1_norms", rep.row_l1_norms},
        {"objective_trace", rep.objective_trace},
        {"max_abs_constraint_residual", residual},
        {"step_size_warning", rep.step_size_warning},
    };
    if (!rep.pair_asymmetry.empty()) report["pair_asymmetry"] = rep.pair_asymmetry;

    // built-in self-check: at lambda = 0 the ISTA designs have a closed form
    if (cfg.lambda == 0.0 &&
        (cfg.precoder == PrecoderKind::ElasticNet || cfg.precoder == PrecoderKind::L12 ||
         cfg.precoder == PrecoderKind::Superposition)) {
        const double c = double(cfg.n_users) * ic.sigma_eta_sq / (2.0 * cfg.n_antennas);
        const CMat oracle = ridge_right_inverse(H, c, target);
        report["ridge_oracle_max_abs_diff"] = (rep.precoder - oracle).cwiseAbs().maxCoeff();
    }

    const fs::path pcsv = dir / "precoder.csv";
    const fs::path prep = dir / "design_report.json";
    const fs::path man = dir / "design_manifest.json";
    atomic_write(pcsv, precoder_to_csv(rep.precoder));
    atomic_write(prep, report.dump(2) + "\n");
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    atomic_write(man,
                 make_manifest(cfg, cfg.seed, dt, {pcsv.string(), prep.string()}).dump(2) + "\n");
    std::cout << "wrote " << pcsv.string() << "\n";
    std::cout << "wrote " << prep.string() << "\n";
    std::cout << "wrote " << man.string() << "\n";
    std::cout << "max |HP - target| = " << residual << ", sparsity = " << rep.sparsity_fraction
              << ", iterations = " << rep.iterations_used << "\n";
    return 0;
}

int cmd_metric(CommonOpts o, bool ccdf) {
    for (const std::string& path : o.config_paths) {
        o.config_path = path;
        const auto t0 = std::chrono::steady_clock::now();
        const ExperimentConfig cfg = load_config(o);
        const MetricSeries m = ccdf ? run_ccdf(cfg) : run_ber(cfg);
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // one curve per config, named after the config so the curves of one
        // figure can share a directory
        std::string name = fs::path(path).stem().string();
        if (name.empty()) name = ccdf ? "ccdf" : "ber";
        write_run(resolve_out_dir(o), cfg, m, name, dt);
    }
    return 0;
}

int cmd_papr(const CommonOpts& o, const std::vector<int>& ms) {
    std::ostringstream csv;
    csv << "M,sc_peak_exact,sc_peak_bound,ofdm_worst_case\n";
    std::printf("%8s %16s %16s %16s\n", "M", "sc_peak_exact", "sc_peak_bound", "ofdm_worst");
    for (int M : ms) {
        if (M < 2 || M % 4 != 0)
            throw ConfigError("papr: M must be >= 2 and divisible by 4, got " +
                              std::to_string(M));
        const double ex = sc_peak_power_exact(M), bd = sc_peak_power_bound(M);
        std::printf("%8d %16.6f %16.6f %16d\n", M, ex, bd, M);
        csv << M << "," << ex << "," << bd << "," << M << "\n";
    }
    if (!o.out_dir.empty() || std::getenv(kOutDirEnv)) {
        const fs::path f = resolve_out_dir(o) / "papr.csv";
        atomic_write(f, csv.str());
        std::cout << "wrote " << f.string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse precoder design and link simulation"};
    app.require_subcommand(1);

    CommonOpts od, ob, oc, op;
    std::string channel_path;
    std::vector<int> papr_ms;

    auto* design = app.add_subcommand("design", "design a precoder and write it as CSV");
    add_common(design, od);
    design->add_option("--channel", channel_path, "channel CSV (re/im pairs); default: drawn from seed");

    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER curve");
    add_common(ber, ob);

    auto* ccdf = app.add_subcommand("ccdf", "output-power CCDF");
    add_common(ccdf, oc);

    auto* papr = app.add_subcommand("papr", "peak-power table for a list of block sizes");
    add_common(papr, op, false);
    papr->add_option("--m", papr_ms, "block sizes M")
        ->default_val(std::vector<int>{8, 32, 128, 512, 2048});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (design->parsed()) {
            if (od.config_paths.size() != 1)
                throw ConfigError("design: exactly one --config is expected");
            od.config_path = od.config_paths.front();
            return cmd_design(od, channel_path);
        }
        if (ber->parsed()) return cmd_metric(ob, false);
        if (ccdf->parsed()) return cmd_metric(oc, true);
        if (papr->parsed()) return cmd_papr(op, papr_ms);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDimension;
    } catch (const RankDeficiencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
