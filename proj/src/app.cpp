#include "pairstats/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pairstats/errors.hpp"

namespace pairstats::app {

namespace {

using nlohmann::json;

double number_field(const json& block, std::string_view block_name, const char* key) {
    const auto it = block.find(key);
    if (it == block.end()) {
        throw ParseError("config: missing key '" + std::string(block_name) + "." + key + "'");
    }
    if (!it->is_number()) {
        throw ParseError("config: '" + std::string(block_name) + "." + key + "' must be a number");
    }
    return it->get<double>();
}

double number_field_or(const json& block, std::string_view block_name, const char* key,
                       double fallback) {
    return block.contains(key) ? number_field(block, block_name, key) : fallback;
}

const json& object_block(const json& doc, const char* key) {
    const auto& block = doc.at(key);
    if (!block.is_object()) throw ParseError(std::string("config: '") + key + "' must be an object");
    return block;
}

std::string trim_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t line_no,
                  std::string_view column) {
    double value = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": column '" +
                         std::string(column) + "' is not a number: '" + std::string(cell) + "'");
    }
    if (value < 0.0) {
        throw ValidationError(std::string(source) + ":" + std::to_string(line_no) +
                              ": column '" + std::string(column) + "' is negative");
    }
    return value;
}

json residual_json(const Residual& r) {
    return {{"pump_mw", r.pump_mw},
            {"observable", std::string(to_string(r.observable))},
            {"experimental", r.experimental},
            {"theoretical", r.theoretical},
            {"weighted_sq_error", r.weighted_sq_error}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object()) throw ParseError("config: top level must be an object");
    if (!doc.contains("setup")) throw ParseError("config: missing 'setup' block");
    RunConfig cfg;

    const json& setup = object_block(doc, "setup");
    cfg.setup.pulse_rate_hz = number_field(setup, "setup", "pulse_rate_hz");
    cfg.setup.eta1 = number_field(setup, "setup", "eta1");
    cfg.setup.eta2 = number_field(setup, "setup", "eta2");
    cfg.setup.dark1_per_gate = number_field_or(setup, "setup", "dark1_per_gate", 0.0);
    cfg.setup.dark2_per_gate = number_field_or(setup, "setup", "dark2_per_gate", 0.0);
    if (setup.contains("topology")) {
        if (!setup["topology"].is_string()) throw ParseError("config: 'setup.topology' must be a string");
        cfg.setup.topology = parse_topology(setup["topology"].get<std::string>());
    }

    const bool has_t_total = setup.contains("t_total");
    const bool has_waveguide = doc.contains("waveguide");
    if (has_t_total == has_waveguide) {
        throw ValidationError("config: give exactly one of 'setup.t_total' or a 'waveguide' block");
    }
    if (has_waveguide) {
        const json& wg = object_block(doc, "waveguide");
        WaveguideSpec spec;
        spec.length_cm = number_field(wg, "waveguide", "length_cm");
        spec.loss_pump_db_per_cm = number_field(wg, "waveguide", "loss_pump_db_per_cm");
        spec.loss_dc_db_per_cm = number_field(wg, "waveguide", "loss_dc_db_per_cm");
        spec.t_ar = number_field(wg, "waveguide", "t_ar");
        spec.t_ext = number_field(wg, "waveguide", "t_ext");
        spec.kappa = number_field_or(wg, "waveguide", "kappa", 1.0);
        spec.validate();
        cfg.waveguide = spec;
        cfg.setup.t_total = overall_transmittivity(spec);
    } else {
        cfg.setup.t_total = number_field(setup, "setup", "t_total");
    }
    cfg.setup.validate();

    if (doc.contains("filter")) {
        const json& f = object_block(doc, "filter");
        cfg.filter = FilterSpec(number_field(f, "filter", "center_nm"),
                                number_field(f, "filter", "bandwidth_nm"));
    }
    if (doc.contains("pump")) {
        const json& p = object_block(doc, "pump");
        PumpModel pump;
        pump.coherence_time_ps = number_field(p, "pump", "coherence_time_ps");
        pump.pulse_rate_hz = number_field_or(p, "pump", "pulse_rate_hz", cfg.setup.pulse_rate_hz);
        pump.wavelength_nm = number_field(p, "pump", "wavelength_nm");
        pump.validate();
        cfg.pump = pump;
    }
    if (doc.contains("fit")) {
        const json& f = object_block(doc, "fit");
        if (f.contains("family")) {
            if (!f["family"].is_string()) throw ParseError("config: 'fit.family' must be a string");
            cfg.fit.family = parse_family(f["family"].get<std::string>());
        }
        if (f.contains("bracket_per_mw")) {
            const json& b = f["bracket_per_mw"];
            if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
                throw ParseError("config: 'fit.bracket_per_mw' must be [lo, hi]");
            }
            cfg.fit.bracket_lo = b[0].get<double>();
            cfg.fit.bracket_hi = b[1].get<double>();
        }
        cfg.fit.tolerance = number_field_or(f, "fit", "tolerance", cfg.fit.tolerance);
        if (f.contains("observables")) {
            const json& obs = f["observables"];
            if (!obs.is_array()) throw ParseError("config: 'fit.observables' must be an array");
            cfg.fit.observables.clear();
            for (const auto& o : obs) {
                if (!o.is_string()) throw ParseError("config: observables must be strings");
                cfg.fit.observables.push_back(parse_observable(o.get<std::string>()));
            }
        }
    }
    if (!(cfg.fit.bracket_lo > 0.0 && cfg.fit.bracket_lo < cfg.fit.bracket_hi)) {
        throw ValidationError("config: fit bracket needs 0 < lo < hi");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("config file '" + path.string() + "': " + e.what());
    }
    try {
        return parse_run_config(doc);
    } catch (const json::exception& e) {
        throw ParseError("config file '" + path.string() + "': " + e.what());
    }
}

std::vector<CountRecord> parse_counts(std::istream& in, std::string_view source) {
    static constexpr std::string_view columns[] = {"pump_mw", "s1_raw", "s2_raw", "c_raw"};
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(std::string(source) + ": no records");
    line = trim_cr(line);
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line != kCountsHeader) {
        throw ParseError(std::string(source) + ":1: expected header '" +
                         std::string(kCountsHeader) + "'");
    }

    std::vector<CountRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_cr(line);
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 4) {
            throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                             ": expected 4 fields, found " + std::to_string(cells.size()));
        }
        CountRecord rec;
        rec.pump_mw = parse_cell(cells[0], source, line_no, columns[0]);
        rec.s1_raw = parse_cell(cells[1], source, line_no, columns[1]);
        rec.s2_raw = parse_cell(cells[2], source, line_no, columns[2]);
        rec.c_raw = parse_cell(cells[3], source, line_no, columns[3]);
        records.push_back(rec);
    }
    if (records.empty()) throw ValidationError(std::string(source) + ": no records");

    std::stable_sort(records.begin(), records.end(),
                     [](const CountRecord& a, const CountRecord& b) { return a.pump_mw < b.pump_mw; });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].pump_mw == records[i - 1].pump_mw) {
            throw ValidationError(std::string(source) + ": duplicate pump power " +
                                  format_number(records[i].pump_mw) + " mW");
        }
    }
    return records;
}

std::vector<CountRecord> ingest_counts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open counts file '" + path.string() + "'");
    return parse_counts(in, path.string());
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = i + 1 == n ? hi : lo + frac * (hi - lo);
    }
    return grid;
}

FitRun run_fit(const RunConfig& config, std::span<const CountRecord> raw) {
    FitRun run;
    run.config = config;
    run.corrected.reserve(raw.size());
    for (const auto& rec : raw) {
        run.corrected.push_back(correct_counts(rec, config.setup));
        if (run.corrected.back().clamped()) {
            run.warnings.push_back("corrected rate clamped to zero at pump " +
                                   format_number(rec.pump_mw) + " mW");
        }
    }

    FitProblem problem{run.corrected, config.setup, config.fit.family, config.fit.observables};
    run.fit = fit(problem, config.fit.bracket_lo, config.fit.bracket_hi, config.fit.tolerance);
    for (const auto& ex : run.fit.excluded) {
        run.warnings.push_back("zero " + std::string(to_string(ex.observable)) + " at pump " +
                               format_number(ex.pump_mw) + " mW excluded from the objective");
    }
    if (run.fit.edge_warning) {
        run.warnings.push_back("fitted constant lies on the bracket edge; widen fit.bracket_per_mw");
    }

    const auto [lo, hi] = std::minmax_element(
        raw.begin(), raw.end(),
        [](const CountRecord& a, const CountRecord& b) { return a.pump_mw < b.pump_mw; });
    const auto grid = linear_grid(lo->pump_mw, hi->pump_mw, kCurvePoints);
    run.curves = predict_curves(config.setup, config.fit.family, run.fit.constant_per_mw, grid);
    return run;
}

nlohmann::json make_report(const FitRun& run) {
    const auto& cfg = run.config;
    json fit_block = {
        {"family", std::string(to_string(cfg.fit.family))},
        {"constant_per_mw", run.fit.constant_per_mw},
        {"objective", run.fit.objective},
        {"bracket", {run.fit.bracket_lo, run.fit.bracket_hi}},
        {"tolerance", cfg.fit.tolerance},
        {"edge_warning", run.fit.edge_warning},
        {"iterations", run.fit.iterations},
    };
    json observables = json::array();
    for (Observable o : cfg.fit.observables) observables.push_back(std::string(to_string(o)));
    fit_block["observables"] = observables;
    json residuals = json::array();
    for (const auto& r : run.fit.residuals) residuals.push_back(residual_json(r));
    fit_block["residuals"] = residuals;
    json excluded = json::array();
    for (const auto& e : run.fit.excluded) {
        excluded.push_back({{"pump_mw", e.pump_mw}, {"observable", std::string(to_string(e.observable))}});
    }
    fit_block["excluded"] = excluded;

    json corrections = json::array();
    for (const auto& rec : run.corrected) {
        corrections.push_back({
            {"pump_mw", rec.pump_mw},
            {"s1_raw", rec.s1_raw},
            {"s2_raw", rec.s2_raw},
            {"c_raw", rec.c_raw},
            {"s1", rec.s1},
            {"s2", rec.s2},
            {"c", rec.c},
            {"accidental_c", accidental_coincidence_rate(rec.s1, rec.s2, cfg.setup)},
            {"clamped", {{"s1", rec.s1_clamped}, {"s2", rec.s2_clamped}, {"c", rec.c_clamped}}},
        });
    }

    json transmittivity = {{"t_total", cfg.setup.t_total}};
    transmittivity["t_int"] =
        cfg.waveguide ? json(internal_transmittivity(*cfg.waveguide)) : json(nullptr);

    json report = {
        {"fit", fit_block},
        {"corrections", corrections},
        {"transmittivity", transmittivity},
        {"dark_rates", {{"delta1", cfg.setup.delta1()}, {"delta2", cfg.setup.delta2()}}},
    };
    if (cfg.filter && cfg.pump) {
        const double tau = coherence_time(*cfg.filter);
        report["coherence"] = {
            {"tau_dc_fs", tau * 1e15},
            {"pump_to_dc_ratio", cfg.pump->coherence_time_ps * 1e-12 / tau},
            {"regime", std::string(to_string(regime(*cfg.pump, *cfg.filter)))},
        };
    }
    return report;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string curves_csv(std::span<const CurvePoint> curves) {
    std::ostringstream out;
    out << kCurvesHeader << '\n';
    for (const auto& p : curves) {
        out << format_number(p.pump_mw) << ',' << format_number(p.s1) << ','
            << format_number(p.s2) << ',' << format_number(p.c) << '\n';
    }
    return out.str();
}

std::string sweep_csv(std::span<const SweepPoint> sweep) {
    std::ostringstream out;
    out << kSweepHeader << '\n';
    for (const auto& p : sweep) {
        out << format_number(p.center_nm) << ',' << format_number(p.bandwidth_nm) << ','
            << format_number(p.tau_fs) << '\n';
    }
    return out.str();
}

int run_fit_files(const std::filesystem::path& config_path,
                  const std::filesystem::path& data_path,
                  const std::filesystem::path& report_path,
                  const std::filesystem::path& curves_path, std::ostream& diag) {
    try {
        const RunConfig config = load_run_config(config_path);
        const auto raw = ingest_counts(data_path);
        const FitRun run = run_fit(config, raw);
        for (const auto& w : run.warnings) diag << "warning: " << w << '\n';
        write_file(report_path, make_report(run).dump(2) + "\n");
        write_file(curves_path, curves_csv(run.curves));
        return 0;
    } catch (const Error& e) {
        diag << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        diag << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::Parse);
    }
}

}  // namespace pairstats::app
