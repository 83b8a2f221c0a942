#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qbound/experiment.hpp"
#include "qbound/rng.hpp"

using namespace qbound;

TEST_CASE("spectrum amplitudes") {
    CHECK(spectrum_amplitudes({0, SpectrumShape::exponential, 1.0}) == std::vector<double>{1.0});

    const auto flat = spectrum_amplitudes({2, SpectrumShape::exponential, 1e12});
    for (double c : flat) CHECK(c == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-9));

    // decay = 1/ln 2 makes each step halve the amplitude: (1/2, 1, 1/2)/norm
    const auto stepped = spectrum_amplitudes({1, SpectrumShape::exponential, 1.0 / std::log(2.0)});
    CHECK(stepped[0] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(stepped[1] == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(stepped[2] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));

    const auto lorentz = spectrum_amplitudes({3, SpectrumShape::lorentzian, 2.0});
    for (int l = 0; l <= 3; ++l) CHECK(lorentz[3 - l] == doctest::Approx(lorentz[3 + l]));
    CHECK(lorentz[3] > lorentz[4]);

    CHECK_THROWS_AS(spectrum_amplitudes({2, SpectrumShape::exponential, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spectrum_amplitudes({-1, SpectrumShape::exponential, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("subspace selection") {
    const SpiralSpectrum spec{4, SpectrumShape::exponential, 2.0};
    auto [state, weight] = select_subspace(spec, {2, {-2, 2}});
    CHECK(state.dim == 2);
    CHECK(state.amps[0] == doctest::Approx(state.amps[1]).epsilon(1e-12));  // symmetric modes
    CHECK(weight > 0.0);
    CHECK(weight < 1.0);

    CHECK_THROWS_AS(select_subspace(spec, {2, {-5, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(select_subspace(spec, {2, {1, 1}}), std::invalid_argument);

    for (int d = 2; d <= 6; ++d) CHECK(static_cast<int>(default_subspace(d).modes.size()) == d);
    CHECK_THROWS_AS(default_subspace(7), std::invalid_argument);
}

TEST_CASE("procrustean concentration") {
    SUBCASE("uniform input passes through with efficiency 1") {
        auto [state, eff] = procrustean_concentrate(make_maximally_entangled(3));
        CHECK(eff == doctest::Approx(1.0).epsilon(1e-12));
        for (double a : state.amps) CHECK(a == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    }
    SUBCASE("skewed pair concentrates at efficiency 0.4") {
        auto [state, eff] = procrustean_concentrate(SchmidtState(2, {std::sqrt(0.8), std::sqrt(0.2)}));
        CHECK(eff == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(state.amps[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(state.amps[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("zero amplitude cannot concentrate") {
        CHECK_THROWS_AS(procrustean_concentrate(SchmidtState(3, {0.8, 0.6, 0.0})),
                        std::invalid_argument);
    }
    SUBCASE("efficiency is 1 only for uniform inputs") {
        auto [state, eff] = procrustean_concentrate(SchmidtState(2, {std::sqrt(0.55), std::sqrt(0.45)}));
        CHECK(eff < 1.0);
        CHECK(eff > 0.0);
        (void)state;
    }
}

TEST_CASE("noise application") {
    const auto ideal = born_joint_table(make_maximally_entangled(2), SettingsFamily(2, 6));
    const double i6 = evaluate_in(ideal).value;

    SUBCASE("identity noise leaves the table unchanged") {
        const auto noisy = apply_noise(ideal, NoiseModel::ideal(2));
        for (std::size_t i = 0; i < ideal.probs.size(); ++i)
            CHECK(noisy.probs[i] == doctest::Approx(ideal.probs[i]).epsilon(1e-14));
    }
    SUBCASE("zero visibility gives the uniform table") {
        NoiseModel m = NoiseModel::ideal(2);
        m.visibility = 1e-9;  // visibility 0 itself is invalid
        const auto noisy = apply_noise(ideal, m);
        for (double p : noisy.probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-6));
    }
    SUBCASE("isotropic mixing acts linearly on the chained value") {
        NoiseModel m = NoiseModel::ideal(2);
        m.visibility = 0.95;
        const double mixed = evaluate_in(apply_noise(ideal, m)).value;
        CHECK(mixed == doctest::Approx(0.95 * i6 + 0.05 * 6.0).epsilon(1e-10));
        CHECK(mixed > i6);
    }
    SUBCASE("value is non-increasing as visibility rises") {
        double prev = 1e9;
        for (double v : {0.80, 0.85, 0.90, 0.95, 1.0}) {
            NoiseModel m = NoiseModel::ideal(2);
            m.visibility = v;
            const double value = evaluate_in(apply_noise(ideal, m)).value;
            CHECK(value <= prev + 1e-12);
            prev = value;
        }
    }
    SUBCASE("crosstalk validation") {
        NoiseModel m = NoiseModel::ideal(2);
        m.crosstalk = {0.9, 0.2, 0.1, 0.8};  // rows do not sum to 1
        CHECK_THROWS_AS(apply_noise(ideal, m), std::invalid_argument);
        m.crosstalk = {0.9, 0.1, 0.1};
        CHECK_THROWS_AS(apply_noise(ideal, m), std::invalid_argument);
        m = NoiseModel::ideal(3);
        CHECK_THROWS_AS(apply_noise(ideal, m), std::invalid_argument);  // dim mismatch
    }
    SUBCASE("symmetric crosstalk raises the ideal value") {
        NoiseModel m = NoiseModel::ideal(2);
        m.crosstalk = {0.97, 0.03, 0.03, 0.97};
        CHECK(evaluate_in(apply_noise(ideal, m)).value > i6);
    }
}

TEST_CASE("count simulation") {
    const auto ideal = born_joint_table(make_maximally_entangled(2), SettingsFamily(2, 3));

    SUBCASE("zero rates give zero counts") {
        NoiseModel m = NoiseModel::ideal(2, 0.0);
        const auto rec = simulate_counts(ideal, m, 4);
        for (long long c : rec.counts) CHECK(c == 0);
    }
    SUBCASE("fixed seed reproduces counts") {
        const auto a = simulate_counts(ideal, NoiseModel::ideal(2, 1e4), 99);
        const auto b = simulate_counts(ideal, NoiseModel::ideal(2, 1e4), 99);
        CHECK(a.counts == b.counts);
        const auto c = simulate_counts(ideal, NoiseModel::ideal(2, 1e4), 100);
        CHECK(a.counts != c.counts);
    }
    SUBCASE("empirical frequencies stay within 5 sigma bands") {
        const double rate = 1e6;
        const auto rec = simulate_counts(ideal, NoiseModel::ideal(2, rate), 7);
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y) {
                        const double mean = rate * ideal.prob(a, b, x, y);
                        CHECK(std::abs(rec.count(a, b, x, y) - mean) <=
                              5.0 * std::sqrt(mean) + 1.0);
                    }
    }
    SUBCASE("dark counts populate an otherwise empty table") {
        NoiseModel m = NoiseModel::ideal(2, 0.0);
        m.dark_rate = 400.0;
        const auto rec = simulate_counts(ideal, m, 12);
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) CHECK(rec.slice_total(a, b) > 0);
    }
}

TEST_CASE("estimation from counts") {
    const auto ideal = born_joint_table(make_maximally_entangled(2), SettingsFamily(2, 6));
    const double exact = evaluate_in(ideal).value;

    SUBCASE("counts proportional to the ideal table recover the exact value") {
        CountRecord rec;
        rec.dim = 2;
        rec.n_settings = 6;
        rec.counts.resize(ideal.probs.size());
        for (int a = 1; a <= 6; ++a)
            for (int b = 1; b <= 6; ++b)
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y)
                        rec.counts[rec.index(a, b, x, y)] =
                            std::llround(1e6 * ideal.prob(a, b, x, y));
        const auto boot = estimate_in(rec, ErrorMethod::bootstrap, 1000, 5);
        CHECK(boot.value == doctest::Approx(exact).epsilon(2e-4));
        CHECK(boot.std_err > 1e-4);
        CHECK(boot.std_err < 2e-3);
        const auto gauss = estimate_in(rec, ErrorMethod::gaussian, 0, 0);
        CHECK(gauss.value == doctest::Approx(boot.value).epsilon(1e-12));
        CHECK(std::abs(gauss.std_err - boot.std_err) <= 0.2 * gauss.std_err);
    }

    SUBCASE("degenerate counts give the strategy value with zero error") {
        CountRecord rec;
        rec.dim = 2;
        rec.n_settings = 2;
        rec.counts.assign(16, 0);
        // x = 0, y = 0 always: only the wraparound term contributes 1
        for (int a = 1; a <= 2; ++a)
            for (int b = 1; b <= 2; ++b) rec.counts[rec.index(a, b, 0, 0)] = 50000;
        const auto boot = estimate_in(rec, ErrorMethod::bootstrap, 200, 3);
        CHECK(boot.value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(boot.std_err == doctest::Approx(0.0).epsilon(1e-12));
        const auto gauss = estimate_in(rec, ErrorMethod::gaussian, 0, 0);
        CHECK(gauss.std_err == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("error paths") {
        CountRecord rec;
        rec.dim = 2;
        rec.n_settings = 2;
        rec.counts.assign(16, 0);
        rec.counts[rec.index(1, 1, 0, 0)] = 10;
        CHECK_THROWS_AS(estimate_in(rec, ErrorMethod::bootstrap, 1000, 1), std::invalid_argument);
        for (int a = 1; a <= 2; ++a)
            for (int b = 1; b <= 2; ++b) rec.counts[rec.index(a, b, 0, 0)] = 10;
        CHECK_THROWS_AS(estimate_in(rec, ErrorMethod::bootstrap, 50, 1), std::invalid_argument);
    }
}

TEST_CASE("estimator consistency across rates") {
    const auto ideal = born_joint_table(make_maximally_entangled(2), SettingsFamily(2, 4));
    const double exact = evaluate_in(ideal).value;
    double err_low = 0.0, err_high = 0.0;
    int within = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const auto rec_low = simulate_counts(ideal, NoiseModel::ideal(2, 1e4), 100 + t);
        const auto rec_high = simulate_counts(ideal, NoiseModel::ideal(2, 1e6), 100 + t);
        const auto est_low = estimate_in(rec_low, ErrorMethod::gaussian, 0, 0);
        const auto est_high = estimate_in(rec_high, ErrorMethod::gaussian, 0, 0);
        err_low += std::abs(est_low.value - exact);
        err_high += std::abs(est_high.value - exact);
        if (std::abs(est_high.value - exact) <= 5.0 * est_high.std_err) ++within;
    }
    CHECK(err_high < err_low);
    CHECK(within >= 198);  // 99% coverage at 5 sigma
}

TEST_CASE("visibility fit inverts the isotropic mix") {
    const double v = fit_visibility(2, 6, 0.245);
    CHECK(v > 0.9);
    CHECK(v < 1.0);
    const auto ideal = born_joint_table(make_maximally_entangled(2), SettingsFamily(2, 6));
    NoiseModel m = NoiseModel::ideal(2);
    m.visibility = v;
    CHECK(evaluate_in(apply_noise(ideal, m)).value == doctest::Approx(0.245).epsilon(1e-9));
    CHECK_THROWS_AS(fit_visibility(2, 6, 0.1), std::invalid_argument);   // below the ideal value
    CHECK_THROWS_AS(fit_visibility(2, 6, 6.5), std::invalid_argument);   // above the uniform value
}

TEST_CASE("scan protocol with near-ideal apparatus tracks the exact curve") {
    const SpiralSpectrum spec{6, SpectrumShape::exponential, 6.0};
    const auto scan = run_scan_protocol(spec, default_subspace(2), NoiseModel::ideal(2, 4e6),
                                        {2, 3, 4, 5, 6}, 31, ErrorMethod::gaussian, 0);
    CHECK(scan.argmin_n == 6);  // ideal value decreases in N
    for (const auto& [n, point] : scan.scanned) {
        const double exact = oracle::closed_form_d2(n);
        CHECK(std::abs(point.value - exact) <= 5.0 * point.std_err);
    }
    CHECK(scan.i_star == doctest::Approx(scan.scanned.at(6).value));
}

TEST_CASE("scan protocol calibrated to a target lands on it") {
    const SpiralSpectrum spec{6, SpectrumShape::exponential, 6.0};
    NoiseModel noise = NoiseModel::ideal(2, 4e6);
    noise.visibility = fit_visibility(2, 6, 0.245);
    const auto scan = run_scan_protocol(spec, default_subspace(2), noise, {2, 3, 4, 5, 6}, 77,
                                        ErrorMethod::bootstrap, 400);
    CHECK(scan.argmin_n == 6);
    CHECK(std::abs(scan.i_star - 0.245) <= 2.0 * 0.007);
    CHECK(scan.scanned.at(6).std_err > 0.0);
}
