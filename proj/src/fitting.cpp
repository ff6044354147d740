#include "pairstats/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairstats/errors.hpp"

namespace pairstats {

namespace {

constexpr std::size_t kMaxGoldenIterations = 500;

double pick(const Rates& r, Observable o) {
    switch (o) {
        case Observable::S1: return r.s1;
        case Observable::S2: return r.s2;
        case Observable::C: return r.c;
    }
    return 0.0;
}

double pick(const CountRecord& rec, Observable o) {
    switch (o) {
        case Observable::S1: return rec.s1;
        case Observable::S2: return rec.s2;
        case Observable::C: return rec.c;
    }
    return 0.0;
}

Rates forward(const SetupConfig& cfg, Family family, double constant, double pump_mw) {
    return model_rates(mean_from_pump({constant, pump_mw}, family), cfg);
}

}  // namespace

std::string_view to_string(Observable observable) noexcept {
    switch (observable) {
        case Observable::S1: return "s1";
        case Observable::S2: return "s2";
        case Observable::C: return "c";
    }
    return "unknown";
}

Observable parse_observable(std::string_view name) {
    if (name == "s1" || name == "S1") return Observable::S1;
    if (name == "s2" || name == "S2") return Observable::S2;
    if (name == "c" || name == "C") return Observable::C;
    throw ValidationError("unknown observable '" + std::string(name) + "'");
}

void FitProblem::validate() const {
    cfg.validate();
    if (records.size() < 2) throw ValidationError("a fit needs at least two records");
    std::vector<double> pumps;
    pumps.reserve(records.size());
    for (const auto& rec : records) {
        if (!std::isfinite(rec.pump_mw) || rec.pump_mw < 0.0) {
            throw ValidationError("pump powers must be nonnegative");
        }
        if (!(rec.s1 >= 0.0) || !(rec.s2 >= 0.0) || !(rec.c >= 0.0)) {
            throw ValidationError("corrected rates must be nonnegative");
        }
        pumps.push_back(rec.pump_mw);
    }
    std::sort(pumps.begin(), pumps.end());
    if (std::adjacent_find(pumps.begin(), pumps.end()) != pumps.end()) {
        throw ValidationError("pump powers must be distinct");
    }
    if (include.empty()) throw ValidationError("no observables selected for the fit");
    auto obs = include;
    std::sort(obs.begin(), obs.end());
    if (std::adjacent_find(obs.begin(), obs.end()) != obs.end()) {
        throw ValidationError("observables listed twice");
    }
}

Evaluation evaluate(const FitProblem& problem, double constant_per_mw) {
    problem.validate();
    if (!std::isfinite(constant_per_mw) || constant_per_mw <= 0.0) {
        throw ValidationError("pump constant must be positive");
    }
    Evaluation ev;
    for (const auto& rec : problem.records) {
        const Rates model = forward(problem.cfg, problem.family, constant_per_mw, rec.pump_mw);
        for (Observable o : problem.include) {
            const double e = pick(rec, o);
            if (e <= 0.0) {
                ev.excluded.push_back({rec.pump_mw, o});
                continue;
            }
            const double t = pick(model, o);
            const double rel = (e - t) / e;
            ev.residuals.push_back({rec.pump_mw, o, e, t, rel * rel});
            ev.objective += rel * rel;
        }
    }
    if (ev.residuals.empty()) {
        throw NumericError("objective is empty: every experimental value is zero");
    }
    return ev;
}

double objective(const FitProblem& problem, double constant_per_mw) {
    return evaluate(problem, constant_per_mw).objective;
}

FitResult fit(const FitProblem& problem, double lo, double hi, double tol) {
    problem.validate();
    if (!(lo > 0.0 && lo < hi && std::isfinite(hi))) {
        throw ValidationError("fit bracket needs 0 < lo < hi");
    }
    if (!(tol > 0.0 && tol < 1.0)) throw ValidationError("fit tolerance must lie in (0, 1)");

    auto f = [&](double k) {
        const double v = objective(problem, k);
        if (!std::isfinite(v)) throw NumericError("objective is not finite at " + std::to_string(k));
        return v;
    };

    std::vector<double> grid(kCoarseGridPoints);
    std::vector<double> values(kCoarseGridPoints);
    const double log_span = std::log(hi / lo);
    for (std::size_t i = 0; i < kCoarseGridPoints; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(kCoarseGridPoints - 1);
        grid[i] = i + 1 == kCoarseGridPoints ? hi : lo * std::exp(frac * log_span);
        values[i] = f(grid[i]);
    }
    const auto best = static_cast<std::size_t>(
        std::distance(values.begin(), std::min_element(values.begin(), values.end())));

    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, kCoarseGridPoints - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    std::size_t iterations = 0;
    while (b - a >= tol * 0.5 * (a + b) && iterations < kMaxGoldenIterations) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++iterations;
    }

    double estimate = 0.5 * (a + b);
    if (values[best] < f(estimate)) estimate = grid[best];

    const Evaluation ev = evaluate(problem, estimate);
    FitResult result;
    result.constant_per_mw = estimate;
    result.objective = ev.objective;
    result.residuals = ev.residuals;
    result.excluded = ev.excluded;
    result.iterations = iterations;
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    const double edge_band = 10.0 * tol * estimate;
    result.edge_warning = (estimate - lo) <= edge_band || (hi - estimate) <= edge_band;
    return result;
}

std::vector<CurvePoint> predict_curves(const SetupConfig& cfg, Family family,
                                       double constant_per_mw,
                                       std::span<const double> pump_grid_mw) {
    if (pump_grid_mw.empty()) throw ValidationError("pump grid is empty");
    std::vector<CurvePoint> curves;
    curves.reserve(pump_grid_mw.size());
    for (double p : pump_grid_mw) {
        if (!std::isfinite(p) || p < 0.0) throw ValidationError("pump grid values must be nonnegative");
        const Rates r = forward(cfg, family, constant_per_mw, p);
        curves.push_back({p, r.s1, r.s2, r.c});
    }
    return curves;
}

}  // namespace pairstats
