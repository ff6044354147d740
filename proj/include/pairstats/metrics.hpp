#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pairstats {

/// One row of a cross-experiment comparison. Optional fields are "not
/// available", which is distinct from zero.
struct ComparisonRecord {
    std::string label;
    std::string pump_kind;
    double p_ave_mw = 0.0;
    std::optional<double> p_peak_w;
    std::optional<double> rep_rate_hz;
    std::optional<double> eta1;
    std::optional<double> eta2;
    std::optional<double> s_ave;
    std::optional<double> c;

    void validate() const;
};

/// Coincidence probability per pulse per watt of average pump power,
/// C / (P_ave R) in W^-1. Absent when C or R is absent.
std::optional<double> efficiency(const ComparisonRecord& rec);

/// Dark-count rate (counts/s) from a per-gate probability.
double dark_rate(double dark_per_gate, double rep_rate_hz);

/// Rounds to the given number of significant figures; exact ties go to the
/// even neighbour.
double round_significant(double x, int digits);

/// Fixed-point text of round_significant(x, digits) without exponent, e.g.
/// 2.667 -> "2.7", 0.0125 -> "0.012", 17000 -> "17000".
std::string format_significant(double x, int digits);

/// Rows of the 1550-nm band comparison, including this source at 50 uW.
std::vector<ComparisonRecord> reference_comparison();

/// Aligned text table, one column per record, with the efficiency line.
std::string render_comparison_text(std::span<const ComparisonRecord> rows);

/// CSV with one line per record; absent values are written as NA.
std::string render_comparison_csv(std::span<const ComparisonRecord> rows);

}  // namespace pairstats
