#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "pairstats/detection.hpp"
#include "pairstats/errors.hpp"

using namespace pairstats;

namespace {

constexpr Family kFamilies[] = {Family::SqueezedVacuum, Family::Thermal, Family::Poissonian};

SetupConfig reference_setup() { return SetupConfig{8e5, 0.25, 0.10, 6e-5, 4e-4, 0.148}; }

double poisson_single_closed(double nu, double rate, double a) {
    const double q = 1.0 - (1.0 - a / 2.0) * (1.0 - a / 2.0);
    return rate * (1.0 - std::exp(-nu * q));
}

double poisson_coincidence_closed(double nu, const SetupConfig& cfg) {
    const double t = cfg.t_total;
    auto q = [](double a) { return 1.0 - (1.0 - a / 2.0) * (1.0 - a / 2.0); };
    return cfg.pulse_rate_hz * (1.0 - std::exp(-nu * q(t * cfg.eta1)) - std::exp(-nu * q(t * cfg.eta2)) +
                                std::exp(-nu * q(t * (cfg.eta1 + cfg.eta2))));
}

}  // namespace

TEST_SUITE("detection") {

TEST_CASE("zero mean gives zero rates") {
    const auto cfg = reference_setup();
    for (Family f : kFamilies) {
        const PairDistribution d(f, 0.0);
        CHECK(single_rate(d, cfg, Detector::First) == 0.0);
        CHECK(single_rate(d, cfg, Detector::Second) == 0.0);
        CHECK(coincidence_rate(d, cfg) == 0.0);
    }
    auto sep = cfg;
    sep.topology = Topology::SeparatedPairs;
    CHECK(separated_coincidence_rate(PairDistribution(Family::Poissonian, 0.0), sep) == 0.0);
}

TEST_CASE("Poissonian single rate at 0.925 pairs per pulse") {
    const auto cfg = reference_setup();
    const PairDistribution d(Family::Poissonian, 0.925);
    const double closed = poisson_single_closed(0.925, 8e5, 0.148 * 0.25);
    CHECK(single_rate(d, cfg, Detector::First) == doctest::Approx(closed).epsilon(1e-6));
    CHECK(single_rate(d, cfg, Detector::First, SeriesMode::Literal) == doctest::Approx(closed).epsilon(1e-6));
    CHECK(single_rate(d, cfg, Detector::First) == doctest::Approx(26671.977185905871).epsilon(1e-9));
    CHECK(single_rate(d, cfg, Detector::First) == doctest::Approx(2.69e4).epsilon(0.01));
    CHECK(single_rate(d, cfg, Detector::Second) == doctest::Approx(10837.402048523001).epsilon(1e-9));
}

TEST_CASE("thermal rates against the literal double sum") {
    const auto cfg = reference_setup();
    const PairDistribution d(Family::Thermal, 0.5);
    auto p = [](std::size_t m) { return oracle::thermal_pmf(0.5L, m); };
    const double s2 = static_cast<double>(oracle::single_rate_literal(p, 8e5L, 0.148L * 0.10L, 60));
    const double c = static_cast<double>(oracle::coincidence_rate_literal(p, 8e5L, 0.148L * 0.25L, 0.148L * 0.10L, 60));
    CHECK(s2 == doctest::Approx(5854.9298272569687).epsilon(1e-12));
    CHECK(single_rate(d, cfg, Detector::Second) == doctest::Approx(s2).epsilon(1e-9));
    CHECK(coincidence_rate(d, cfg) == doctest::Approx(c).epsilon(1e-9));
    CHECK(coincidence_rate(d, cfg) == doctest::Approx(312.23890512747131).epsilon(1e-9));
}

TEST_CASE("Poissonian coincidence rate") {
    const auto cfg = reference_setup();
    const PairDistribution d(Family::Poissonian, 0.925);
    CHECK(coincidence_rate(d, cfg) == doctest::Approx(poisson_coincidence_closed(0.925, cfg)).epsilon(1e-6));
    CHECK(coincidence_rate(d, cfg) == doctest::Approx(554.54683961601587).epsilon(1e-9));
    CHECK(coincidence_rate(d, cfg) == doctest::Approx(5.5e2).epsilon(0.01));

    const auto low = mean_from_pump({18.5, 0.0054}, Family::Poissonian);
    CHECK(coincidence_rate(low, cfg) == doctest::Approx(26.074824608717609).epsilon(1e-9));
}

TEST_CASE("series and closed forms agree for Poissonian means") {
    const auto cfg = reference_setup();
    for (double nu : {0.01, 0.1, 1.0, 3.0}) {
        CAPTURE(nu);
        const PairDistribution d(Family::Poissonian, nu);
        for (SeriesMode mode : {SeriesMode::Reduced, SeriesMode::Literal}) {
            CHECK(single_rate(d, cfg, Detector::First, mode) ==
                  doctest::Approx(poisson_single_closed(nu, 8e5, 0.148 * 0.25)).epsilon(1e-6));
            CHECK(single_rate(d, cfg, Detector::Second, mode) ==
                  doctest::Approx(poisson_single_closed(nu, 8e5, 0.148 * 0.10)).epsilon(1e-6));
            CHECK(coincidence_rate(d, cfg, mode) ==
                  doctest::Approx(poisson_coincidence_closed(nu, cfg)).epsilon(1e-6));
        }
    }
}

TEST_CASE("binomial inner-sum identity") {
    for (double a : {1e-3, 0.037, 0.25, 0.5, 0.9, 1.0}) {
        for (std::size_t m = 0; m <= 40; ++m) {
            CAPTURE(a);
            CAPTURE(m);
            const auto w = oracle::split_weights(m);
            long double literal = 0.0L;
            for (std::size_t n = 0; n <= 2 * m; ++n) {
                literal += w[n] * (1.0L - std::pow(1.0L - a, static_cast<long double>(n)));
            }
            const double reduced = 1.0 - std::pow(1.0 - a / 2.0, 2.0 * static_cast<double>(m));
            CHECK(std::abs(static_cast<double>(literal) - reduced) < 1e-12);
            CHECK(std::abs(split_click_probability(m, a) - reduced) < 1e-12);
            CHECK(std::abs(split_click_probability(m, a, SeriesMode::Literal) - reduced) < 1e-12);
            CHECK(std::abs(split_coincidence_probability(m, a, 0.5 * a) -
                           split_coincidence_probability(m, a, 0.5 * a, SeriesMode::Literal)) < 1e-12);
        }
    }
}

TEST_CASE("rate bounds") {
    auto cfg = reference_setup();
    for (Family f : kFamilies) {
        for (double mean : {0.01, 0.5, 2.0, 8.0}) {
            const PairDistribution d(f, mean);
            const double s1 = single_rate(d, cfg, Detector::First);
            const double s2 = single_rate(d, cfg, Detector::Second);
            const double c = coincidence_rate(d, cfg);
            CHECK(c >= 0.0);
            CHECK(c <= std::min(s1, s2));
            CHECK(std::max(s1, s2) <= cfg.pulse_rate_hz);
        }
    }
}

TEST_CASE("rates are nondecreasing in T, efficiency and mean") {
    for (Family f : kFamilies) {
        Rates previous;
        for (double t = 0.05; t <= 1.0; t += 0.05) {
            auto cfg = reference_setup();
            cfg.t_total = t;
            const Rates r = model_rates(PairDistribution(f, 0.5), cfg);
            CHECK(r.s1 >= previous.s1);
            CHECK(r.s2 >= previous.s2);
            CHECK(r.c >= previous.c);
            previous = r;
        }
        previous = {};
        for (double eta = 0.0; eta <= 1.0; eta += 0.05) {
            auto cfg = reference_setup();
            cfg.eta2 = eta;
            const Rates r = model_rates(PairDistribution(f, 0.5), cfg);
            CHECK(r.s2 >= previous.s2);
            CHECK(r.c >= previous.c);
            previous = r;
        }
        previous = {};
        for (double mean = 0.0; mean <= 5.0; mean += 0.25) {
            const Rates r = model_rates(PairDistribution(f, mean), reference_setup());
            CHECK(r.s1 >= previous.s1);
            CHECK(r.s2 >= previous.s2);
            CHECK(r.c >= previous.c);
            previous = r;
        }
    }
}

TEST_CASE("thermal statistics raise coincidences at equal mean pair number") {
    const auto cfg = reference_setup();
    CHECK(coincidence_rate(PairDistribution(Family::Thermal, 0.2), cfg) >
          coincidence_rate(PairDistribution(Family::Poissonian, 0.2), cfg));
}

TEST_CASE("separated pairs") {
    SetupConfig perfect{1e6, 1.0, 1.0, 0.0, 0.0, 1.0, Topology::SeparatedPairs};
    // p(1) = 1 is not one of the families; check the single-pair term directly.
    const PairDistribution d(Family::Poissonian, 1e-6);
    const double per_pair = separated_coincidence_rate(d, perfect) / (1e6 * d.pmf(1));
    CHECK(per_pair == doctest::Approx(1.0).epsilon(1e-5));

    // A single pair coincides twice as often as behind the 50/50 coupler.
    const double a1 = 0.3, a2 = 0.2;
    CHECK(split_coincidence_probability(1, a1, a2) == doctest::Approx(a1 * a2 / 2.0).epsilon(1e-14));

    SetupConfig improved{1e7, 0.25, 0.25, 6e-5, 4e-4, 0.8796997095361944 * 0.99 * 0.50,
                         Topology::SeparatedPairs};
    const double c = separated_coincidence_rate(PairDistribution(Family::Poissonian, 0.1), improved);
    const double a = improved.t_total * 0.25;
    const double closed = 1e7 * (1.0 - 2.0 * std::exp(-0.1 * a) + std::exp(-0.1 * (1.0 - (1.0 - a) * (1.0 - a))));
    CHECK(c == doctest::Approx(closed).epsilon(1e-9));
    CHECK(c == doctest::Approx(1.28e4).epsilon(0.01));
    CHECK(c == doctest::Approx(14000.0).epsilon(0.2));

    CHECK_THROWS_AS(separated_coincidence_rate(d, reference_setup()), ValidationError);
    CHECK_THROWS_AS(coincidence_rate(d, improved), ValidationError);
    CHECK(model_rates(PairDistribution(Family::Poissonian, 0.1), improved).c == c);
}

TEST_CASE("accidental coincidences") {
    auto cfg = reference_setup();
    CHECK(cfg.delta1() == doctest::Approx(48.0).epsilon(1e-14));
    CHECK(cfg.delta2() == doctest::Approx(320.0).epsilon(1e-14));
    CHECK(accidental_coincidence_rate(26900.0, 10880.0, cfg) == doctest::Approx(11.432).epsilon(1e-13));
    cfg.dark1_per_gate = 0.0;
    cfg.dark2_per_gate = 0.0;
    CHECK(accidental_coincidence_rate(26900.0, 10880.0, cfg) == 0.0);
    CHECK_THROWS_AS(accidental_coincidence_rate(-1.0, 0.0, cfg), ValidationError);
}

TEST_CASE("dark-count correction") {
    auto cfg = reference_setup();
    cfg.dark1_per_gate = 0.0;
    cfg.dark2_per_gate = 0.0;
    const auto zero = correct_counts(CountRecord{}, cfg);
    CHECK(zero.s1 == 0.0);
    CHECK(zero.s2 == 0.0);
    CHECK(zero.c == 0.0);
    CHECK_FALSE(zero.clamped());

    cfg = reference_setup();
    CountRecord rec;
    rec.pump_mw = 0.01;
    rec.s1_raw = 48.0;
    rec.s2_raw = 1000.0;
    rec.c_raw = 0.0;
    const auto out = correct_counts(rec, cfg);
    CHECK(out.s1 == 0.0);
    CHECK(out.s1_clamped);
    CHECK_FALSE(out.s2_clamped);
    CHECK(out.s2 == doctest::Approx(680.0));
    CHECK(out.c == 0.0);
    CHECK(out.c_clamped);
}

TEST_CASE("correction inverts the dark-count model") {
    const auto cfg = reference_setup();
    for (Family f : kFamilies) {
        for (double mean : {0.05, 0.5, 1.5}) {
            const Rates model = model_rates(PairDistribution(f, mean), cfg);
            CountRecord rec;
            rec.s1_raw = model.s1 + cfg.delta1();
            rec.s2_raw = model.s2 + cfg.delta2();
            rec.c_raw = model.c + accidental_coincidence_rate(model.s1, model.s2, cfg);
            const auto out = correct_counts(rec, cfg);
            CHECK(out.s1 == doctest::Approx(model.s1).epsilon(1e-12));
            CHECK(out.s2 == doctest::Approx(model.s2).epsilon(1e-12));
            CHECK(out.c == doctest::Approx(model.c).epsilon(1e-10));
            CHECK_FALSE(out.clamped());
        }
    }
}

TEST_CASE("Monte Carlo: zero mean without darks never clicks") {
    const auto mc = monte_carlo(PairDistribution(Family::Thermal, 0.0), reference_setup(), 100'000, 1);
    CHECK(mc.clicks1 == 0);
    CHECK(mc.clicks2 == 0);
    CHECK(mc.coincidences == 0);
}

TEST_CASE("Monte Carlo matches the closed forms at 0.925 pairs per pulse") {
    const auto cfg = reference_setup();
    const PairDistribution d(Family::Poissonian, 0.925);
    const auto mc = monte_carlo(d, cfg, 1'000'000, 17);
    CHECK(std::abs(mc.s1.rate - single_rate(d, cfg, Detector::First)) < 3.0 * mc.s1.std_error);
    CHECK(std::abs(mc.s2.rate - single_rate(d, cfg, Detector::Second)) < 3.0 * mc.s2.std_error);
    CHECK(std::abs(mc.c.rate - coincidence_rate(d, cfg)) < 3.0 * mc.c.std_error);
}

TEST_CASE("Monte Carlo pure dark counts") {
    const auto cfg = reference_setup();
    MonteCarloOptions opts;
    opts.dark_counts = true;
    // Enough gates to see a few hundred dark coincidences (p = 2.4e-8 per gate).
    const auto mc = monte_carlo(PairDistribution(Family::Poissonian, 0.0), cfg, 20'000'000, 5, opts);
    CHECK(std::abs(mc.s1.rate - cfg.delta1()) < 3.0 * mc.s1.std_error);
    CHECK(std::abs(mc.s2.rate - cfg.delta2()) < 3.0 * mc.s2.std_error);
    const double dark_c = cfg.delta1() * cfg.delta2() / cfg.pulse_rate_hz;
    const double se = cfg.pulse_rate_hz * std::sqrt(dark_c / cfg.pulse_rate_hz / 20'000'000.0);
    CHECK(std::abs(mc.c.rate - dark_c) < 3.0 * se);
}

TEST_CASE("Monte Carlo with dark counts and signal matches the corrected model") {
    const auto cfg = reference_setup();
    const PairDistribution d(Family::Poissonian, 0.5);
    MonteCarloOptions opts;
    opts.dark_counts = true;
    const auto mc = monte_carlo(d, cfg, 2'000'000, 8, opts);
    CountRecord rec;
    rec.s1_raw = mc.s1.rate;
    rec.s2_raw = mc.s2.rate;
    rec.c_raw = mc.c.rate;
    const auto out = correct_counts(rec, cfg);
    const Rates model = model_rates(d, cfg);
    // Subtraction is first-order in the dark probabilities.
    CHECK(out.s1 == doctest::Approx(model.s1).epsilon(4.0 * mc.s1.std_error / model.s1));
    CHECK(out.s2 == doctest::Approx(model.s2).epsilon(4.0 * mc.s2.std_error / model.s2));
    CHECK(out.c == doctest::Approx(model.c).epsilon(4.0 * mc.c.std_error / model.c));
}

TEST_CASE("Monte Carlo counts do not depend on the shard count") {
    const auto cfg = reference_setup();
    const PairDistribution d(Family::SqueezedVacuum, 1.0);
    MonteCarloOptions one{false, 1}, four{false, 4}, seven{true, 7}, seven_single{true, 1};
    const auto a = monte_carlo(d, cfg, 300'001, 99, one);
    const auto b = monte_carlo(d, cfg, 300'001, 99, four);
    CHECK(a.clicks1 == b.clicks1);
    CHECK(a.clicks2 == b.clicks2);
    CHECK(a.coincidences == b.coincidences);
    const auto c = monte_carlo(d, cfg, 300'001, 99, seven);
    const auto e = monte_carlo(d, cfg, 300'001, 99, seven_single);
    CHECK(c.clicks1 == e.clicks1);
    CHECK(c.coincidences == e.coincidences);
    const auto other_seed = monte_carlo(d, cfg, 300'001, 100, one);
    CHECK(other_seed.clicks1 != a.clicks1);
}

TEST_CASE("Monte Carlo separated topology") {
    SetupConfig cfg{1e6, 0.25, 0.25, 0.0, 0.0, 0.5, Topology::SeparatedPairs};
    const PairDistribution d(Family::Thermal, 0.5);
    const auto mc = monte_carlo(d, cfg, 1'000'000, 21);
    const Rates model = model_rates(d, cfg);
    CHECK(std::abs(mc.s1.rate - model.s1) < 3.0 * mc.s1.std_error);
    CHECK(std::abs(mc.s2.rate - model.s2) < 3.0 * mc.s2.std_error);
    CHECK(std::abs(mc.c.rate - model.c) < 3.0 * mc.c.std_error);
}

TEST_CASE("invalid setups are rejected") {
    auto cfg = reference_setup();
    cfg.eta1 = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = reference_setup();
    cfg.t_total = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = reference_setup();
    cfg.dark2_per_gate = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = reference_setup();
    cfg.pulse_rate_hz = -1.0;
    CHECK_THROWS_AS(single_rate(PairDistribution(Family::Thermal, 0.1), cfg, Detector::First), ValidationError);
    CHECK_THROWS_AS(monte_carlo(PairDistribution(Family::Thermal, 0.1), reference_setup(), 0, 1), ValidationError);
    CHECK(parse_topology("separated_pairs") == Topology::SeparatedPairs);
    CHECK_THROWS_AS(parse_topology("triangle"), ValidationError);
}

}  // TEST_SUITE

TEST_CASE("rates stay finite at means far beyond the truncation cap") {
    const auto cfg = reference_setup();
    for (Family f : {Family::SqueezedVacuum, Family::Thermal, Family::Poissonian}) {
        const PairDistribution d(f, 1e8);
        CHECK_THROWS_AS(truncation_index(d), NumericError);
        const Rates r = model_rates(d, cfg);
        CHECK(r.s1 <= cfg.pulse_rate_hz);
        CHECK(r.s1 > 0.99 * cfg.pulse_rate_hz);
        CHECK(r.c <= r.s2);
        CHECK(r.c > 0.9 * cfg.pulse_rate_hz);
    }
}
