#include "pairstats/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "pairstats/errors.hpp"

namespace pairstats {

namespace {

constexpr int kDisplayDigits = 2;

bool positive_or_absent(const std::optional<double>& v) {
    return !v || (std::isfinite(*v) && *v > 0.0);
}

// Input columns are echoed as given; only derived values are rounded.
std::string display(const std::optional<double>& v, double scale, const char* unit) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *v * scale);
    return buf + std::string(unit);
}

std::string percent_pair(const ComparisonRecord& r) {
    if (!r.eta1 || !r.eta2) return "NA";
    // Efficiencies are shown as given (up to one decimal place).
    auto pct = [](double eta) {
        char buf[32];
        const double p = eta * 100.0;
        if (std::abs(p - std::round(p)) < 1e-9) {
            std::snprintf(buf, sizeof buf, "%.0f%%", p);
        } else {
            std::snprintf(buf, sizeof buf, "%.1f%%", p);
        }
        return std::string(buf);
    };
    return pct(*r.eta1) + ", " + pct(*r.eta2);
}

std::string csv_value(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

}  // namespace

void ComparisonRecord::validate() const {
    if (!std::isfinite(p_ave_mw) || p_ave_mw <= 0.0) {
        throw ValidationError("comparison row '" + label + "': p_ave_mw must be positive");
    }
    for (const auto* v : {&p_peak_w, &rep_rate_hz, &eta1, &eta2, &s_ave, &c}) {
        if (!positive_or_absent(*v)) {
            throw ValidationError("comparison row '" + label + "': values must be positive");
        }
    }
}

std::optional<double> efficiency(const ComparisonRecord& rec) {
    rec.validate();
    if (!rec.c || !rec.rep_rate_hz) return std::nullopt;
    return (*rec.c / *rec.rep_rate_hz) / (rec.p_ave_mw * 1e-3);
}

double dark_rate(double dark_per_gate, double rep_rate_hz) {
    if (!(dark_per_gate >= 0.0 && dark_per_gate < 1.0)) {
        throw ValidationError("dark-count probability must lie in [0, 1)");
    }
    if (!(rep_rate_hz > 0.0)) throw ValidationError("repetition rate must be positive");
    return dark_per_gate * rep_rate_hz;
}

double round_significant(double x, int digits) {
    if (digits < 1) throw ValidationError("need at least one significant digit");
    if (x == 0.0 || !std::isfinite(x)) return x;
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(x))));
    const int shift = digits - 1 - exponent;
    const double scale = std::pow(10.0, std::abs(shift));
    const double y = shift >= 0 ? x * scale : x / scale;
    double r = std::round(y);
    const double frac = std::abs(y - std::trunc(y));
    if (std::abs(frac - 0.5) < 1e-9 * std::max(1.0, std::abs(y))) {
        r = 2.0 * std::round(y / 2.0);
    }
    return shift >= 0 ? r / scale : r * scale;
}

std::string format_significant(double x, int digits) {
    const double r = round_significant(x, digits);
    int decimals = 0;
    if (r != 0.0) {
        const int exponent = static_cast<int>(std::floor(std::log10(std::abs(r))));
        decimals = std::max(0, digits - 1 - exponent);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
    return buf;
}

std::vector<ComparisonRecord> reference_comparison() {
    return {
        {"PPLN-WG", "SC (pulsed)", 0.05, 0.34, 0.8e6, 0.25, 0.10, 17000.0, 600.0},
        {"PPLN-WG (cw)", "SC (cw)", 0.15, std::nullopt, 2e6, 0.190, 0.173, 24000.0, 800.0},
        {"FWM in DSF", "Ti:S (pulsed)", 2.0, 9.0, 0.588e6, 0.25, 0.20, 18000.0, 1000.0},
        {"PPSF", "Ti:S (cw)", 600.0, std::nullopt, std::nullopt, 0.017, 0.014, 275000.0, 500.0},
        {"Bulk PPLN", "SC (pulsed)", 0.05, 0.34, 0.8e6, 0.25, 0.25, 88.0, 0.5},
    };
}

std::string render_comparison_text(std::span<const ComparisonRecord> rows) {
    std::vector<std::vector<std::string>> table;
    table.push_back({"Source"});
    table.push_back({"Pump"});
    table.push_back({"P_ave"});
    table.push_back({"P_peak"});
    table.push_back({"R"});
    table.push_back({"eta1, eta2"});
    table.push_back({"S_ave"});
    table.push_back({"C"});
    table.push_back({"C/(P_ave R)"});
    for (const auto& r : rows) {
        table[0].push_back(r.label);
        table[1].push_back(r.pump_kind);
        table[2].push_back(display(r.p_ave_mw, 1.0, " mW"));
        table[3].push_back(display(r.p_peak_w, 1.0, " W"));
        table[4].push_back(display(r.rep_rate_hz, 1e-6, " MHz"));
        table[5].push_back(percent_pair(r));
        table[6].push_back(display(r.s_ave, 1.0, " s^-1"));
        table[7].push_back(display(r.c, 1.0, " s^-1"));
        const auto eff = efficiency(r);
        table[8].push_back(eff ? format_significant(*eff, kDisplayDigits) + " W^-1" : "NA");
    }
    std::vector<std::size_t> widths(rows.size() + 1, 0);
    for (const auto& line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
    }
    std::ostringstream out;
    for (const auto& line : table) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << line[i];
            if (i + 1 < line.size()) out << std::string(widths[i] - line[i].size() + 2, ' ');
        }
        out << '\n';
    }
    return out.str();
}

std::string render_comparison_csv(std::span<const ComparisonRecord> rows) {
    std::ostringstream out;
    out << "label,pump_kind,p_ave_mw,p_peak_w,rep_rate_hz,eta1,eta2,s_ave,c,efficiency_per_w\n";
    for (const auto& r : rows) {
        out << r.label << ',' << r.pump_kind << ',' << csv_value(r.p_ave_mw) << ','
            << csv_value(r.p_peak_w) << ',' << csv_value(r.rep_rate_hz) << ','
            << csv_value(r.eta1) << ',' << csv_value(r.eta2) << ',' << csv_value(r.s_ave)
            << ',' << csv_value(r.c) << ',' << csv_value(efficiency(r)) << '\n';
    }
    return out.str();
}

}  // namespace pairstats
