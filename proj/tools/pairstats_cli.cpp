// pairstats: photon-pair counting statistics from the command line.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairstats/app.hpp"
#include "pairstats/coherence.hpp"
#include "pairstats/detection.hpp"
#include "pairstats/errors.hpp"
#include "pairstats/fitting.hpp"
#include "pairstats/metrics.hpp"
#include "pairstats/waveguide.hpp"

namespace {

using namespace pairstats;

struct SetupFlags {
    std::string config_path;
    SetupConfig setup;
    std::string topology = "beam_split_5050";
};

void add_setup_flags(CLI::App* cmd, SetupFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Run config JSON; its setup block replaces the flags below")
        ->check(CLI::ExistingFile);
    cmd->add_option("--rate-hz", flags.setup.pulse_rate_hz, "Pulse rate R")->capture_default_str();
    cmd->add_option("--eta1", flags.setup.eta1, "Efficiency of D1")->capture_default_str();
    cmd->add_option("--eta2", flags.setup.eta2, "Efficiency of D2")->capture_default_str();
    cmd->add_option("--dark1", flags.setup.dark1_per_gate, "Dark-count probability per gate, D1")
        ->capture_default_str();
    cmd->add_option("--dark2", flags.setup.dark2_per_gate, "Dark-count probability per gate, D2")
        ->capture_default_str();
    cmd->add_option("--t-total", flags.setup.t_total, "Overall transmittivity T")->capture_default_str();
    cmd->add_option("--topology", flags.topology, "beam_split_5050 or separated_pairs")
        ->capture_default_str();
}

SetupConfig resolve_setup(const SetupFlags& flags) {
    if (!flags.config_path.empty()) return app::load_run_config(flags.config_path).setup;
    SetupConfig setup = flags.setup;
    setup.topology = parse_topology(flags.topology);
    setup.validate();
    return setup;
}

std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

/// tau in seconds shown in fs with three significant figures.
std::string femtoseconds(double tau_s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g fs", tau_s * 1e15);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Photon-pair counting statistics: model, simulate and fit count rates"};
    cli.require_subcommand(1);

    // fit
    std::string fit_config, fit_data, fit_report = "report.json", fit_curves = "curves.csv";
    auto* fit_cmd = cli.add_subcommand("fit", "Fit the pump constant to measured counts");
    fit_cmd->add_option("--config", fit_config, "Run config JSON")->required();
    fit_cmd->add_option("--data", fit_data, "Counts CSV (" + std::string(app::kCountsHeader) + ")")
        ->required();
    fit_cmd->add_option("--report", fit_report, "Report JSON output")->capture_default_str();
    fit_cmd->add_option("--curves", fit_curves, "Model curves CSV output")->capture_default_str();

    // predict
    SetupFlags predict_setup;
    std::string predict_family = "poissonian";
    double predict_constant = 18.5, predict_min = 0.0, predict_max = 0.05;
    std::size_t predict_points = app::kCurvePoints;
    auto* predict_cmd = cli.add_subcommand("predict", "Model count-rate curves versus pump power");
    add_setup_flags(predict_cmd, predict_setup);
    predict_cmd->add_option("--family", predict_family, "squeezed_vacuum, thermal or poissonian")
        ->capture_default_str();
    predict_cmd->add_option("--constant-per-mw", predict_constant, "Pump constant")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    predict_cmd->add_option("--pump-min-mw", predict_min)->check(CLI::NonNegativeNumber)->capture_default_str();
    predict_cmd->add_option("--pump-max-mw", predict_max)->check(CLI::NonNegativeNumber)->capture_default_str();
    predict_cmd->add_option("--points", predict_points)->check(CLI::PositiveNumber)->capture_default_str();

    // simulate
    SetupFlags sim_setup;
    std::string sim_family = "poissonian";
    std::optional<double> sim_mean, sim_constant, sim_pump;
    std::uint64_t sim_pulses = 1'000'000, sim_seed = 1;
    std::size_t sim_shards = 0;
    bool sim_darks = false;
    auto* sim_cmd = cli.add_subcommand("simulate", "Monte Carlo count rates with standard errors");
    add_setup_flags(sim_cmd, sim_setup);
    sim_cmd->add_option("--family", sim_family)->capture_default_str();
    auto* mean_opt = sim_cmd->add_option("--mean", sim_mean, "Distribution mean parameter")
                         ->check(CLI::NonNegativeNumber);
    auto* const_opt = sim_cmd->add_option("--constant-per-mw", sim_constant)->check(CLI::PositiveNumber);
    auto* pump_opt = sim_cmd->add_option("--pump-mw", sim_pump)->check(CLI::NonNegativeNumber);
    const_opt->needs(pump_opt);
    pump_opt->needs(const_opt);
    mean_opt->excludes(const_opt);
    const_opt->excludes(mean_opt);
    sim_cmd->add_option("--pulses", sim_pulses)->check(CLI::PositiveNumber)->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed)->capture_default_str();
    sim_cmd->add_option("--shards", sim_shards, "Worker threads (0: all cores)")->capture_default_str();
    sim_cmd->add_flag("--darks", sim_darks, "Inject dark counts");

    // coherence
    double coh_center = 1548.0, coh_bandwidth = 30.0, coh_b_min = 0.1, coh_b_max = 100.0;
    std::optional<double> coh_pump_ps;
    std::vector<double> coh_centers{400.0, 800.0, 1550.0};
    std::size_t coh_points = 100;
    bool coh_sweep = false;
    auto* coh_cmd = cli.add_subcommand("coherence", "Filter-limited coherence time and regime");
    coh_cmd->add_option("--center-nm", coh_center)->check(CLI::PositiveNumber)->capture_default_str();
    coh_cmd->add_option("--bandwidth-nm", coh_bandwidth)->check(CLI::PositiveNumber)->capture_default_str();
    coh_cmd->add_option("--pump-coherence-ps", coh_pump_ps, "Classify the pair-statistics regime")
        ->check(CLI::PositiveNumber);
    coh_cmd->add_flag("--sweep", coh_sweep, "Emit coherence time versus bandwidth as CSV");
    coh_cmd->add_option("--centers-nm", coh_centers)->delimiter(',')->capture_default_str();
    coh_cmd->add_option("--b-min-nm", coh_b_min)->check(CLI::PositiveNumber)->capture_default_str();
    coh_cmd->add_option("--b-max-nm", coh_b_max)->check(CLI::PositiveNumber)->capture_default_str();
    coh_cmd->add_option("--points", coh_points)->check(CLI::PositiveNumber)->capture_default_str();

    // transmittivity
    WaveguideSpec wg;
    std::string wg_config;
    auto* wg_cmd = cli.add_subcommand("transmittivity", "Transmittivity budget of the waveguide source");
    wg_cmd->add_option("--config", wg_config, "Run config JSON with a waveguide block")->check(CLI::ExistingFile);
    wg_cmd->add_option("--length-cm", wg.length_cm)->capture_default_str();
    wg_cmd->add_option("--loss-pump-db-per-cm", wg.loss_pump_db_per_cm)->capture_default_str();
    wg_cmd->add_option("--loss-dc-db-per-cm", wg.loss_dc_db_per_cm)->capture_default_str();
    wg_cmd->add_option("--t-ar", wg.t_ar)->capture_default_str();
    wg_cmd->add_option("--t-ext", wg.t_ext)->capture_default_str();

    // efficiency
    std::optional<double> eff_c, eff_p, eff_r;
    std::string eff_table;
    auto* eff_cmd = cli.add_subcommand("efficiency", "Coincidence efficiency C/(P_ave R)");
    eff_cmd->add_option("--c", eff_c, "Coincidence rate, counts/s")->check(CLI::PositiveNumber);
    eff_cmd->add_option("--p-ave-mw", eff_p, "Average pump power")->check(CLI::PositiveNumber);
    eff_cmd->add_option("--rate-hz", eff_r, "Repetition rate")->check(CLI::PositiveNumber);
    eff_cmd->add_option("--table", eff_table, "Print the reference comparison table (text or csv)")
        ->check(CLI::IsMember({"text", "csv"}));

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*fit_cmd) {
            return app::run_fit_files(fit_config, fit_data, fit_report, fit_curves, std::cerr);
        }
        if (*predict_cmd) {
            const SetupConfig setup = resolve_setup(predict_setup);
            if (predict_max < predict_min) throw UsageError("--pump-max-mw must not be below --pump-min-mw");
            const auto grid = app::linear_grid(predict_min, predict_max, predict_points);
            const auto curves =
                predict_curves(setup, parse_family(predict_family), predict_constant, grid);
            std::cout << app::curves_csv(curves);
            return 0;
        }
        if (*sim_cmd) {
            const SetupConfig setup = resolve_setup(sim_setup);
            const Family family = parse_family(sim_family);
            if (!sim_mean && !sim_constant) throw UsageError("give --mean or --constant-per-mw with --pump-mw");
            const PairDistribution dist = sim_mean ? PairDistribution(family, *sim_mean)
                                                   : mean_from_pump({*sim_constant, *sim_pump}, family);
            const auto mc = monte_carlo(dist, setup, sim_pulses, sim_seed, {sim_darks, sim_shards});
            const Rates model = model_rates(dist, setup);
            std::cout << "observable,rate_per_s,std_error_per_s,model_per_s\n";
            std::cout << "s1," << app::format_number(mc.s1.rate) << ','
                      << app::format_number(mc.s1.std_error) << ',' << app::format_number(model.s1) << '\n';
            std::cout << "s2," << app::format_number(mc.s2.rate) << ','
                      << app::format_number(mc.s2.std_error) << ',' << app::format_number(model.s2) << '\n';
            std::cout << "c," << app::format_number(mc.c.rate) << ','
                      << app::format_number(mc.c.std_error) << ',' << app::format_number(model.c) << '\n';
            return 0;
        }
        if (*coh_cmd) {
            if (coh_sweep) {
                std::cout << app::sweep_csv(coherence_sweep(coh_centers, coh_b_min, coh_b_max, coh_points));
                return 0;
            }
            const FilterSpec filter(coh_center, coh_bandwidth);
            std::cout << "tau_dc " << femtoseconds(coherence_time(filter)) << '\n';
            std::cout << "tau_dc_approx " << femtoseconds(coherence_time_approx(filter)) << '\n';
            if (coh_pump_ps) {
                PumpModel pump;
                pump.coherence_time_ps = *coh_pump_ps;
                std::cout << "regime " << to_string(regime(pump, filter)) << '\n';
            }
            return 0;
        }
        if (*wg_cmd) {
            if (!wg_config.empty()) {
                const auto cfg = app::load_run_config(wg_config);
                if (!cfg.waveguide) throw ValidationError("config has no waveguide block");
                wg = *cfg.waveguide;
            }
            std::cout << "t_int " << fixed(internal_transmittivity(wg), 3) << '\n';
            std::cout << "t_total " << fixed(overall_transmittivity(wg), 3) << '\n';
            return 0;
        }
        if (*eff_cmd) {
            if (!eff_table.empty()) {
                const auto rows = reference_comparison();
                std::cout << (eff_table == "csv" ? render_comparison_csv(rows)
                                                 : render_comparison_text(rows));
                return 0;
            }
            if (!eff_c || !eff_p || !eff_r) throw UsageError("give --c, --p-ave-mw and --rate-hz, or --table");
            ComparisonRecord rec;
            rec.label = "input";
            rec.p_ave_mw = *eff_p;
            rec.rep_rate_hz = eff_r;
            rec.c = eff_c;
            const double eff = *efficiency(rec);
            std::cout << format_significant(eff, 2) << " W^-1 (" << app::format_number(eff) << ")\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    }
    return 1;
}
