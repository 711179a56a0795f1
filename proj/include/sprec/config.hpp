#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sprec/simulation.hpp"

namespace sprec {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_list(const std::string& v, int line) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("line " + std::to_string(line) + ": expected [a, b, ...] list");
    std::vector<double> out;
    std::istringstream is(v.substr(1, v.size() - 2));
    std::string cell;
    while (std::getline(is, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(line) + ": bad number '" + cell + "'");
        }
    }
    return out;
}

inline double parse_num(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(line) + ": bad number '" + v + "'");
}

} // namespace detail

// Flat key = value experiment description ('#' starts a comment).
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    bool eta_listed = false;
    double eta_max_db = 12.0;
    int eta_points = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        if (const auto h = s.find('#'); h != std::string::npos) s.resize(h);
        s = detail::trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));

        if (key == "n_antennas") cfg.n_antennas = int(detail::parse_num(val, line));
        else if (key == "n_users") cfg.n_users = int(detail::parse_num(val, line));
        else if (key == "modulation") {
            if (val == "qpsk") cfg.modulation = Modulation::QPSK;
            else if (val == "16qam-superposition") cfg.modulation = Modulation::QAM16Superposition;
            else throw ConfigError("line " + std::to_string(line) + ": unknown modulation '" + val + "'");
        } else if (key == "waveform") {
            if (val == "symbol-rate") cfg.waveform = WaveformKind::SymbolRate;
            else if (val == "ofdm") cfg.waveform = WaveformKind::OFDM;
            else if (val == "sc-fdma") cfg.waveform = WaveformKind::SCFDMA;
            else throw ConfigError("line " + std::to_string(line) + ": unknown waveform '" + val + "'");
        } else if (key == "block_m") cfg.block_m = int(detail::parse_num(val, line));
        else if (key == "nonlinearity") {
            if (val == "ideal") cfg.nonlinearity.kind = Nonlinearity::Ideal;
            else if (val == "one-bit") cfg.nonlinearity.kind = Nonlinearity::OneBit;
            else if (val == "constant-envelope") cfg.nonlinearity.kind = Nonlinearity::ConstantEnvelope;
            else throw ConfigError("line " + std::to_string(line) + ": unknown nonlinearity '" + val + "'");
        } else if (key == "precoder") {
            if (val == "none") cfg.precoder = PrecoderKind::None;
            else if (val == "zf") cfg.precoder = PrecoderKind::ZF;
            else if (val == "l12") cfg.precoder = PrecoderKind::L12;
            else if (val == "elastic-net") cfg.precoder = PrecoderKind::ElasticNet;
            else if (val == "superposition") cfg.precoder = PrecoderKind::Superposition;
            else throw ConfigError("line " + std::to_string(line) + ": unknown precoder '" + val + "'");
        } else if (key == "lambda") cfg.lambda = detail::parse_num(val, line);
        else if (key == "mu") cfg.mu = detail::parse_num(val, line);
        else if (key == "max_iters") cfg.max_iters = int(detail::parse_num(val, line));
        else if (key == "rel_tol") cfg.rel_tol = detail::parse_num(val, line);
        else if (key == "snr_grid_db") cfg.snr_grid_db = detail::parse_list(val, line);
        else if (key == "eta_grid") { cfg.eta_grid = detail::parse_list(val, line); eta_listed = true; }
        else if (key == "eta_max_db") eta_max_db = detail::parse_num(val, line);
        else if (key == "eta_points") eta_points = int(detail::parse_num(val, line));
        else if (key == "n_channel_draws") cfg.n_channel_draws = int(detail::parse_num(val, line));
        else if (key == "n_symbols_per_draw") cfg.n_symbols_per_draw = int(detail::parse_num(val, line));
        else if (key == "seed") {
            try {
                cfg.seed = std::stoull(val);
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(line) + ": bad seed '" + val + "'");
            }
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    // convenience grid: eta_points log-spaced power thresholds from 0 dB to eta_max_db
    if (!eta_listed && eta_points > 0) {
        cfg.eta_grid.clear();
        for (int i = 0; i < eta_points; ++i)
            cfg.eta_grid.push_back(std::pow(10.0, eta_max_db * i / (10.0 * (eta_points - 1))));
    }
    return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    auto list = [&os](const std::vector<double>& v) {
        os << "[";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
        os << "]\n";
    };
    os << "n_antennas = " << cfg.n_antennas << "\n";
    os << "n_users = " << cfg.n_users << "\n";
    os << "modulation = "
       << (cfg.modulation == Modulation::QPSK ? "qpsk" : "16qam-superposition") << "\n";
    os << "waveform = "
       << (cfg.waveform == WaveformKind::SymbolRate
               ? "symbol-rate"
               : cfg.waveform == WaveformKind::OFDM ? "ofdm" : "sc-fdma")
       << "\n";
    os << "block_m = " << cfg.block_m << "\n";
    os << "nonlinearity = "
       << (cfg.nonlinearity.kind == Nonlinearity::Ideal
               ? "ideal"
               : cfg.nonlinearity.kind == Nonlinearity::OneBit ? "one-bit" : "constant-envelope")
       << "\n";
    switch (cfg.precoder) {
    case PrecoderKind::None: os << "precoder = none\n"; break;
    case PrecoderKind::ZF: os << "precoder = zf\n"; break;
    case PrecoderKind::L12: os << "precoder = l12\n"; break;
    case PrecoderKind::ElasticNet: os << "precoder = elastic-net\n"; break;
    case PrecoderKind::Superposition: os << "precoder = superposition\n"; break;
    }
    os << "lambda = " << cfg.lambda << "\n";
    os << "mu = " << cfg.mu << "\n";
    os << "max_iters = " << cfg.max_iters << "\n";
    os << "rel_tol = " << cfg.rel_tol << "\n";
    if (!cfg.snr_grid_db.empty()) { os << "snr_grid_db = "; list(cfg.snr_grid_db); }
    if (!cfg.eta_grid.empty()) { os << "eta_grid = "; list(cfg.eta_grid); }
    os << "n_channel_draws = " << cfg.n_channel_draws << "\n";
    os << "n_symbols_per_draw = " << cfg.n_symbols_per_draw << "\n";
    os << "seed = " << cfg.seed << "\n";
    return os.str();
}

inline bool operator==(const NonlinearitySpec& a, const NonlinearitySpec& b) {
    return a.kind == b.kind && a.zero_phase_policy == b.zero_phase_policy &&
           a.sign_zero_policy == b.sign_zero_policy;
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.n_antennas == b.n_antennas && a.n_users == b.n_users &&
           a.modulation == b.modulation && a.waveform == b.waveform && a.block_m == b.block_m &&
           a.nonlinearity == b.nonlinearity && a.precoder == b.precoder &&
           a.lambda == b.lambda && a.mu == b.mu && a.max_iters == b.max_iters &&
           a.rel_tol == b.rel_tol && a.snr_grid_db == b.snr_grid_db &&
           a.eta_grid == b.eta_grid && a.n_channel_draws == b.n_channel_draws &&
           a.n_symbols_per_draw == b.n_symbols_per_draw && a.seed == b.seed;
}

} // namespace sprec
