// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmiso/asymptotics.hpp"
#include "rmiso/model.hpp"
#include "rmiso/pareto.hpp"

namespace {

using namespace rmiso;

std::string sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::size_t at = 0;
    while (at <= text.size()) {
        const std::size_t comma = text.find(',', at);
        const std::string item =
            text.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
        if (item.empty()) throw Error("empty entry in list '" + text + "'");
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw Error("bad number '" + item + "'");
        if (comma == std::string::npos) break;
        at = comma + 1;
    }
    return out;
}

/// Scalar broadcast or exact-length list.
std::vector<double> expand_list(const std::string& text, std::size_t n, const char* what) {
    std::vector<double> vals = parse_list(text);
    if (vals.size() == 1) return std::vector<double>(n, vals[0]);
    if (vals.size() != n) {
        throw Error(std::string(what) + ": expected 1 or " + std::to_string(n) + " entries");
    }
    return vals;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::infeasible:
            return "infeasible";
        case SolveStatus::numerical_failure:
            return "numerical_failure";
    }
    return "unknown";
}

struct GenerateConfig {
    int k = 3;
    std::string antennas = "3";
    std::string eps = "0.5";
    std::string powers = "1";
    double noise = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_generate(const GenerateConfig& cfg) {
    const std::size_t K = static_cast<std::size_t>(cfg.k);
    const std::vector<double> ant = expand_list(cfg.antennas, K, "--antennas");
    std::vector<Eigen::Index> antennas;
    for (double a : ant) {
        if (a < 1 || a != std::floor(a)) throw Error("--antennas: entries must be positive integers");
        antennas.push_back(static_cast<Eigen::Index>(a));
    }
    std::vector<double> eps = parse_list(cfg.eps);
    RMatrix epsilons(K, K);
    if (eps.size() == 1) {
        epsilons.setConstant(eps[0]);
    } else if (eps.size() == K * K) {
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t l = 0; l < K; ++l) epsilons(k, l) = eps[k * K + l];
        }
    } else {
        throw Error("--eps: expected 1 or K*K entries");
    }
    if ((epsilons.array() < 0.0).any()) throw Error("--eps: entries must be nonnegative");
    const std::vector<double> powers = expand_list(cfg.powers, K, "--powers");

    const Scenario s = generate_scenario(static_cast<Eigen::Index>(K), antennas, epsilons, powers,
                                         cfg.noise, cfg.seed);
    save_scenario(s, cfg.out);
    std::cout << "scenario " << scenario_digest(s) << " -> " << cfg.out << "\n";
    return 0;
}

struct RegionConfig {
    std::string scenario;
    double step = 0.05;
    std::string out;
    std::string format = "csv";
    std::string log;
    bool allow_failures = false;
};

int cmd_region(const RegionConfig& cfg) {
    const Scenario s = load_scenario(cfg.scenario);
    std::vector<SolveRecord> records;
    const RegionSample sample = sweep_region(s, cfg.step, &records);
    export_region(sample, cfg.out,
                  cfg.format == "structured" ? ExportFormat::structured : ExportFormat::csv);
    int failures = 0;
    if (!cfg.log.empty()) {
        std::ofstream log(cfg.log);
        if (!log) throw Error("cannot open log file " + cfg.log);
        for (const SolveRecord& r : records) {
            log << "transmitter=" << (r.transmitter + 1) << " lambda=";
            for (std::size_t i = 0; i < r.lambda.size(); ++i) {
                log << (i ? "," : "") << sig12(r.lambda[i]);
            }
            log << " status=" << status_name(r.status) << "\n";
        }
    }
    for (const SolveRecord& r : records) {
        if (r.status != SolveStatus::optimal) ++failures;
    }
    std::cout << "scenario " << sample.scenario_digest << ": " << sample.points.size()
              << " boundary points, " << failures << " solver failures -> " << cfg.out << "\n";
    return failures == 0 || cfg.allow_failures ? 0 : 1;
}

struct SumrateConfig {
    std::string scenario;
    std::string strategy = "robust_pareto_grid";
    std::string law = "perfect";
    double coeff = 0.0;
    double exponent = 0.5;
    double snr_min = 0.0;
    double snr_max = 60.0;
    double snr_step = 5.0;
    double grid_step = 0.001;
    std::string out;
    std::string log;
    bool allow_failures = false;
};

int cmd_sumrate(const SumrateConfig& cfg) {
    const Scenario s = load_scenario(cfg.scenario);
    ErrorScalingLaw law;
    if (cfg.law == "perfect") {
        law = ErrorScalingLaw::constant(0.0);
    } else if (cfg.law == "constant") {
        law = ErrorScalingLaw::constant(cfg.coeff);
    } else if (cfg.law == "inv_sqrt_snr") {
        law = ErrorScalingLaw::inverse_sqrt_snr(cfg.coeff);
    } else if (cfg.law == "inv_cbrt_snr") {
        law = ErrorScalingLaw::inverse_cbrt_snr(cfg.coeff);
    } else if (cfg.law == "custom") {
        law = ErrorScalingLaw::custom(cfg.coeff, cfg.exponent);
    } else {
        throw Error("--law: unknown law '" + cfg.law + "'");
    }
    SweepStrategy strategy;
    if (cfg.strategy == "robust_pareto_grid") {
        strategy = SweepStrategy::robust_pareto_grid;
    } else if (cfg.strategy == "zero_forcing") {
        strategy = SweepStrategy::zero_forcing;
    } else if (cfg.strategy == "single_user_mrt") {
        strategy = SweepStrategy::single_user_mrt;
    } else if (cfg.strategy == "joint_mrt") {
        strategy = SweepStrategy::joint_mrt;
    } else {
        throw Error("--strategy: unknown strategy '" + cfg.strategy + "'");
    }
    if (!(cfg.snr_step > 0.0) || cfg.snr_max < cfg.snr_min) {
        throw Error("--snr-min/--snr-max/--snr-step: bad SNR grid");
    }
    std::vector<double> grid_db;
    for (double db = cfg.snr_min; db <= cfg.snr_max + 1e-9; db += cfg.snr_step) {
        grid_db.push_back(db);
    }

    const std::vector<SumRatePoint> sweep =
        sum_rate_sweep(s, uniform_law(s.user_count(), law), grid_db, strategy, cfg.grid_step);

    std::ofstream out(cfg.out);
    if (!out) throw Error("cannot open output file " + cfg.out);
    out << "snr_db,sum_rate\n";
    for (const SumRatePoint& p : sweep) {
        out << sig12(p.snr_db) << ',' << sig12(p.sum_rate) << '\n';
    }
    int failures = 0;
    for (const SumRatePoint& p : sweep) failures += p.solver_failures;
    if (!cfg.log.empty()) {
        std::ofstream log(cfg.log);
        if (!log) throw Error("cannot open log file " + cfg.log);
        for (const SumRatePoint& p : sweep) {
            log << "snr_db=" << sig12(p.snr_db) << " sum_rate=" << sig12(p.sum_rate)
                << " active_links=" << p.active_links << " solver_failures=" << p.solver_failures
                << "\n";
        }
    }
    std::cout << sweep.size() << " sweep points, " << failures << " solver failures -> "
              << cfg.out << "\n";
    return failures == 0 || cfg.allow_failures ? 0 : 1;
}

struct LowsnrConfig {
    std::string scenario;
    double grid_step = 0.001;
    int link = 1;
    double ebno_min_db = -2.0;
    double ebno_max_db = 10.0;
    double ebno_step_db = 0.25;
    std::string out_metrics;
    std::string out_region;
    std::string out_slopes;
    std::string out_curve;
    bool allow_failures = false;
};

int cmd_lowsnr(const LowsnrConfig& cfg) {
    const Scenario s = load_scenario(cfg.scenario);
    const Eigen::Index K = s.user_count();
    if (cfg.out_metrics.empty() && cfg.out_region.empty() && cfg.out_slopes.empty() &&
        cfg.out_curve.empty()) {
        throw Error("lowsnr: no output file requested");
    }
    const BeamformerSet mrt = joint_robust_mrt(s);

    if (!cfg.out_metrics.empty()) {
        const LowSnrMetrics m = low_snr_metrics(s, mrt);
        std::ofstream out(cfg.out_metrics);
        if (!out) throw Error("cannot open output file " + cfg.out_metrics);
        out << "link,ebno_min,ebno_min_db,wideband_slope\n";
        for (Eigen::Index l = 0; l < K; ++l) {
            out << (l + 1) << ',' << sig12(m.ebno_min(l)) << ','
                << sig12(10.0 * std::log10(m.ebno_min(l))) << ',' << sig12(m.wideband_slope(l))
                << '\n';
        }
    }
    int failures = 0;
    if (!cfg.out_region.empty()) {
        int region_failures = 0;
        const EbnoRegion region = ebno_region_sweep(s, cfg.grid_step, &region_failures);
        failures += region_failures;
        std::ofstream out(cfg.out_region);
        if (!out) throw Error("cannot open output file " + cfg.out_region);
        for (Eigen::Index l = 0; l < K; ++l) out << (l ? "," : "") << "ebno" << (l + 1);
        out << '\n';
        for (const RVector& t : region.boundary) {
            for (Eigen::Index l = 0; l < K; ++l) out << (l ? "," : "") << sig12(t(l));
            out << '\n';
        }
    }
    if (!cfg.out_slopes.empty()) {
        int scatter_failures = 0;
        const std::vector<RVector> scatter = slope_scatter(s, cfg.grid_step, &scatter_failures);
        failures += scatter_failures;
        std::ofstream out(cfg.out_slopes);
        if (!out) throw Error("cannot open output file " + cfg.out_slopes);
        for (Eigen::Index l = 0; l < K; ++l) out << (l ? "," : "") << "S0_" << (l + 1);
        out << '\n';
        for (const RVector& t : scatter) {
            for (Eigen::Index l = 0; l < K; ++l) out << (l ? "," : "") << sig12(t(l));
            out << '\n';
        }
    }
    if (!cfg.out_curve.empty()) {
        if (cfg.link < 1 || cfg.link > static_cast<int>(K)) {
            throw Error("--link: out of range");
        }
        if (!(cfg.ebno_step_db > 0.0) || cfg.ebno_max_db < cfg.ebno_min_db) {
            throw Error("--ebno-min-db/--ebno-max-db/--ebno-step-db: bad grid");
        }
        std::vector<double> grid;
        for (double db = cfg.ebno_min_db; db <= cfg.ebno_max_db + 1e-9; db += cfg.ebno_step_db) {
            grid.push_back(std::pow(10.0, db / 10.0));
        }
        const std::vector<EfficiencyPoint> curve =
            spectral_efficiency_curve(s, mrt, cfg.link - 1, grid);
        std::ofstream out(cfg.out_curve);
        if (!out) throw Error("cannot open output file " + cfg.out_curve);
        out << "ebno_db,spectral_efficiency\n";
        for (const EfficiencyPoint& p : curve) {
            out << sig12(10.0 * std::log10(p.ebno)) << ',' << sig12(p.efficiency) << '\n';
        }
    }
    std::cout << "lowsnr outputs written, " << failures << " solver failures\n";
    return failures == 0 || cfg.allow_failures ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Worst-case rates, robust rate-region boundaries and SNR-asymptotic\n"
        "efficiency metrics for multi-antenna interference links with\n"
        "ellipsoidal channel uncertainty. Set RMISO_THREADS to bound the\n"
        "worker count."};
    app.require_subcommand(1);

    GenerateConfig gen;
    CLI::App* cg = app.add_subcommand("generate", "Generate a random scenario file");
    cg->add_option("--k", gen.k, "Number of links")->required()->check(CLI::PositiveNumber);
    cg->add_option("--antennas", gen.antennas, "Antenna count, scalar or per-transmitter list");
    cg->add_option("--eps", gen.eps, "Uncertainty radii, scalar or K*K row-major list");
    cg->add_option("--powers", gen.powers, "Power budgets, scalar or per-transmitter list");
    cg->add_option("--noise", gen.noise, "Noise power")->check(CLI::PositiveNumber);
    cg->add_option("--seed", gen.seed, "RNG seed");
    cg->add_option("--out", gen.out, "Output scenario file")->required();

    RegionConfig reg;
    CLI::App* cr = app.add_subcommand("region", "Sweep the rate-region boundary");
    cr->add_option("--scenario", reg.scenario, "Scenario file")->required();
    cr->add_option("--step", reg.step, "Allowance grid step")
        ->check(CLI::Range(1e-6, 1.0));
    cr->add_option("--out", reg.out, "Output CSV/JSON file")->required();
    cr->add_option("--format", reg.format, "csv or structured")
        ->check(CLI::IsMember({"csv", "structured"}));
    cr->add_option("--log", reg.log, "Per-grid-point solver status sidecar file");
    cr->add_flag("--allow-failures", reg.allow_failures,
                 "Exit 0 even when some grid points failed to solve");

    SumrateConfig sr;
    CLI::App* cs = app.add_subcommand("sumrate", "Sum rate versus SNR for one strategy");
    cs->add_option("--scenario", sr.scenario, "Scenario file")->required();
    cs->add_option("--strategy", sr.strategy,
                   "robust_pareto_grid, zero_forcing, single_user_mrt or joint_mrt");
    cs->add_option("--law", sr.law,
                   "perfect, constant, inv_sqrt_snr, inv_cbrt_snr or custom");
    cs->add_option("--coeff", sr.coeff, "Law coefficient")->check(CLI::NonNegativeNumber);
    cs->add_option("--exponent", sr.exponent, "Law exponent (custom only)");
    cs->add_option("--snr-min", sr.snr_min, "Lowest SNR in dB");
    cs->add_option("--snr-max", sr.snr_max, "Highest SNR in dB");
    cs->add_option("--snr-step", sr.snr_step, "SNR grid step in dB");
    cs->add_option("--grid-step", sr.grid_step, "Allowance grid step for the grid strategy")
        ->check(CLI::Range(1e-6, 1.0));
    cs->add_option("--out", sr.out, "Output CSV file")->required();
    cs->add_option("--log", sr.log, "Per-SNR-point sidecar log");
    cs->add_flag("--allow-failures", sr.allow_failures,
                 "Exit 0 even when some grid points failed to solve");

    LowsnrConfig ls;
    CLI::App* cl = app.add_subcommand("lowsnr", "Low-SNR metrics, regions and curves");
    cl->add_option("--scenario", ls.scenario, "Scenario file")->required();
    cl->add_option("--grid-step", ls.grid_step, "Allowance grid step for sweeps")
        ->check(CLI::Range(1e-6, 1.0));
    cl->add_option("--link", ls.link, "Link for the efficiency curve (1-based)");
    cl->add_option("--ebno-min-db", ls.ebno_min_db, "Curve grid start (dB)");
    cl->add_option("--ebno-max-db", ls.ebno_max_db, "Curve grid end (dB)");
    cl->add_option("--ebno-step-db", ls.ebno_step_db, "Curve grid step (dB)");
    cl->add_option("--out-metrics", ls.out_metrics, "Per-link metrics CSV");
    cl->add_option("--out-region", ls.out_region, "Energy-per-bit boundary CSV");
    cl->add_option("--out-slopes", ls.out_slopes, "Wideband-slope scatter CSV");
    cl->add_option("--out-curve", ls.out_curve, "Spectral-efficiency curve CSV");
    cl->add_flag("--allow-failures", ls.allow_failures,
                 "Exit 0 even when some grid points failed to solve");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cg->parsed()) return cmd_generate(gen);
        if (cr->parsed()) return cmd_region(reg);
        if (cs->parsed()) return cmd_sumrate(sr);
        if (cl->parsed()) return cmd_lowsnr(ls);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
