#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "adota/analysis.hpp"
#include "adota/channel.hpp"
#include "adota/rng.hpp"
#include "oracles.hpp"

using adota::BoundInputs;
using adota::RngPurpose;
using adota::RngStream;

namespace {

BoundInputs reference_inputs() {
    BoundInputs in;
    in.f0_minus_fstar = 1.0;
    in.L = 1.0;
    in.C = 1.0;
    in.G = 0.5;
    in.mu_c = 1.5;
    in.sigma_c = 0.5;
    in.N = 50;
    in.d = 10;
    in.eta = 0.1;
    in.epsilon = 0.01;
    in.beta2 = 0.9;
    in.T = 1000;
    in.alpha = 1.5;
    return in;
}

oracles::BoundParams to_hp(const BoundInputs& in) {
    return {static_cast<long double>(in.f0_minus_fstar),
            static_cast<long double>(in.L),
            static_cast<long double>(in.C),
            static_cast<long double>(in.G),
            static_cast<long double>(in.mu_c),
            static_cast<long double>(in.sigma_c),
            static_cast<long double>(in.N),
            static_cast<long double>(in.d),
            static_cast<long double>(in.eta),
            static_cast<long double>(in.epsilon),
            static_cast<long double>(in.beta2),
            static_cast<long double>(in.T),
            static_cast<long double>(in.alpha)};
}

std::vector<double> pareto_samples(double alpha, std::size_t n, RngStream& rng) {
    std::vector<double> xs(n);
    for (double& x : xs) x = std::pow(rng.uniform01(), -1.0 / alpha);
    return xs;
}

}  // namespace

TEST_CASE("upsilon closed forms") {
    BoundInputs unit;
    unit.G = 0.0;
    unit.d = 1;
    unit.mu_c = 1.0;
    unit.sigma_c = 0.0;
    unit.C = 1.0;
    unit.N = 1;
    unit.alpha = 2.0;
    CHECK(adota::upsilon(unit) == doctest::Approx(1.0));

    BoundInputs pure_g = unit;
    pure_g.C = 0.0;
    pure_g.G = 2.0;
    CHECK(adota::upsilon(pure_g) == doctest::Approx(8.0));

    BoundInputs mixed;
    mixed.G = 0.5;
    mixed.d = 10;
    mixed.mu_c = 1.0;
    mixed.sigma_c = 0.52;
    mixed.C = 1.0;
    mixed.N = 50;
    mixed.alpha = 1.5;
    // frozen from an arbitrary-precision evaluation of the formula
    CHECK(adota::upsilon(mixed) == doctest::Approx(2.1131690996020959).epsilon(1e-14));
}

TEST_CASE("upsilon monotonicity grid") {
    const BoundInputs base = reference_inputs();
    double prev = -1.0;
    for (double g : {0.0, 0.5, 1.0, 2.0}) {
        BoundInputs in = base;
        in.G = g;
        const double u = adota::upsilon(in);
        CHECK(u >= prev);
        prev = u;
    }
    prev = -1.0;
    for (double c : {0.0, 0.5, 1.0, 2.0}) {
        BoundInputs in = base;
        in.C = c;
        const double u = adota::upsilon(in);
        CHECK(u >= prev);
        prev = u;
    }
    prev = -1.0;
    for (std::size_t d : {1u, 5u, 20u, 100u}) {
        BoundInputs in = base;
        in.d = d;
        const double u = adota::upsilon(in);
        CHECK(u >= prev);
        prev = u;
    }
    prev = -1.0;
    for (double s : {0.0, 0.3, 0.8, 2.0}) {
        BoundInputs in = base;
        in.sigma_c = s;
        const double u = adota::upsilon(in);
        CHECK(u >= prev);
        prev = u;
    }
    prev = 1e18;
    for (std::size_t n : {1u, 10u, 100u, 1000u}) {
        BoundInputs in = base;
        in.N = n;
        const double u = adota::upsilon(in);
        CHECK(u <= prev);
        prev = u;
    }
}

TEST_CASE("adagrad bound structure") {
    const BoundInputs base = reference_inputs();
    const auto terms = adota::adagrad_bound_terms(base);
    CHECK(terms.bound > 0.0);

    // doubling the initial gap moves only the first additive term, linearly
    BoundInputs doubled = base;
    doubled.f0_minus_fstar *= 2.0;
    const auto t2 = adota::adagrad_bound_terms(doubled);
    CHECK(t2.initial_term == doctest::Approx(2.0 * terms.initial_term).epsilon(1e-12));
    CHECK(t2.log_coefficient == doctest::Approx(terms.log_coefficient).epsilon(1e-12));
    CHECK(t2.bound - terms.bound == doctest::Approx(terms.initial_term).epsilon(1e-9));

    // monotone decreasing over a wide T range
    double prev = 1e300;
    for (std::uint64_t T : {100ull, 1000ull, 10000ull, 100000ull, 1000000ull}) {
        BoundInputs in = base;
        in.T = T;
        const double b = adota::adagrad_bound(in);
        CHECK(b < prev);
        prev = b;
    }

    // rejection names the failing denominator
    BoundInputs bad = base;
    bad.mu_c = 1.0;
    try {
        adota::adagrad_bound(bad);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mu_c - 1") != std::string::npos);
    }
}

TEST_CASE("adagrad bound asymptotic order ln(T)/T^(1/gamma)") {
    const BoundInputs base = reference_inputs();
    auto corrected = [&](std::uint64_t T) {
        BoundInputs in = base;
        in.T = T;
        const double gamma = in.alpha / (in.alpha - 1.0);
        return adota::adagrad_bound(in) * std::pow(static_cast<double>(T), 1.0 / gamma) /
               std::log(static_cast<double>(T));
    };
    const double g5 = corrected(100000);
    const double g6 = corrected(1000000);
    // ln-corrected prediction of the ratio from the log factor itself
    const double u = adota::upsilon(base);
    const double pred = (std::log1p(u * 1e6 / base.epsilon) / std::log(1e6)) /
                        (std::log1p(u * 1e5 / base.epsilon) / std::log(1e5));
    CHECK(g6 / g5 == doctest::Approx(pred).epsilon(0.1));
}

TEST_CASE("adam bound structure") {
    const BoundInputs base = reference_inputs();
    const auto terms = adota::adam_bound_terms(base);
    CHECK(terms.bound > 0.0);

    // T -> infinity floor: coefficient times -ln(beta2), within 1% at T = 1e8
    BoundInputs large = base;
    large.T = 100000000ull;
    const auto lt = adota::adam_bound_terms(large);
    const double floor = lt.log_coefficient * (-std::log(base.beta2));
    CHECK(adota::adam_bound(large) == doctest::Approx(floor).epsilon(0.01));

    // the first additive term halves when T doubles
    BoundInputs doubled = base;
    doubled.T = base.T * 2;
    const auto dt = adota::adam_bound_terms(doubled);
    CHECK(dt.initial_term == doctest::Approx(0.5 * terms.initial_term).epsilon(1e-12));

    BoundInputs bad = base;
    bad.mu_c = 0.05;  // mu_c + beta2 = 0.95 <= 1
    try {
        adota::adam_bound(bad);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mu_c + beta2 - 1") != std::string::npos);
    }
}

TEST_CASE("bound formulas agree with the long-double twin transcription") {
    RngStream rng(60, RngPurpose::Test);
    for (int it = 0; it < 100; ++it) {
        BoundInputs in;
        in.f0_minus_fstar = rng.uniform(0.0, 5.0);
        in.L = rng.uniform(0.1, 10.0);
        in.C = rng.uniform(0.0, 3.0);
        in.G = rng.uniform(0.0, 3.0);
        in.mu_c = rng.uniform(1.05, 3.0);
        in.sigma_c = rng.uniform(0.0, 1.0);
        in.N = 1 + rng.next_u64() % 200;
        in.d = 1 + rng.next_u64() % 1000;
        in.eta = rng.uniform(0.001, 1.0);
        in.epsilon = rng.uniform(1e-8, 1.0);
        in.beta2 = rng.uniform(0.05, 0.95);
        in.T = 1 + rng.next_u64() % 10000000;
        in.alpha = rng.uniform(1.05, 2.0);

        const auto hp = to_hp(in);
        const double ag = adota::adagrad_bound(in);
        const double ag_hp = static_cast<double>(oracles::adagrad_bound_hp(hp));
        CHECK(std::abs(ag - ag_hp) <= 1e-10 * std::abs(ag_hp));

        const double am = adota::adam_bound(in);
        const double am_hp = static_cast<double>(oracles::adam_bound_hp(hp));
        CHECK(std::abs(am - am_hp) <= 1e-10 * std::abs(am_hp));

        const double u = adota::upsilon(in);
        const double u_hp = static_cast<double>(oracles::upsilon_hp(hp));
        CHECK(std::abs(u - u_hp) <= 1e-12 * std::abs(u_hp));
    }
}

TEST_CASE("adam bound eventually undercuts the adagrad bound") {
    BoundInputs in = reference_inputs();
    in.T = 1000000ull;
    const double ratio = adota::adam_bound(in) / adota::adagrad_bound(in);
    CHECK(ratio < 0.1);
}

TEST_CASE("alpha = 2 specialization scales as ln(T)/sqrt(T)") {
    BoundInputs in = reference_inputs();
    in.alpha = 2.0;
    in.epsilon = 1.0;
    auto corrected = [&](std::uint64_t T) {
        BoundInputs c = in;
        c.T = T;
        return adota::adagrad_bound(c) * std::sqrt(static_cast<double>(T)) /
               std::log(static_cast<double>(T));
    };
    const double r = corrected(10000000) / corrected(100000);
    CHECK(r > 0.9);
    CHECK(r < 1.1);
}

TEST_CASE("hill estimator on exact pareto tails") {
    RngStream rng(61, RngPurpose::Test);
    const std::size_t n = 100000;
    const auto xs = pareto_samples(1.5, n, rng);
    const auto est = adota::estimate_tail_index(xs, adota::default_hill_k(n));
    CHECK(est.raw > 1.4);
    CHECK(est.raw < 1.6);
    CHECK(est.k == 316);
}

TEST_CASE("hill estimator on alpha-stable samples") {
    RngStream rng(62, RngPurpose::Test);
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (double& x : xs) x = adota::sample_alpha_stable(1.5, 0.1, rng);
    const auto est = adota::estimate_tail_index(xs, adota::default_hill_k(n));
    CHECK(est.alpha_hat > 1.35);
    CHECK(est.alpha_hat < 1.65);
}

TEST_CASE("hill estimator error shrinks with the sample size") {
    for (const double alpha : {1.3, 1.5, 1.8}) {
        double prev_err = 1e9;
        for (const std::size_t n : {1000u, 10000u, 100000u}) {
            double err = 0.0;
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                RngStream rng(7000 + seed, RngPurpose::Test);
                const auto xs = pareto_samples(alpha, n, rng);
                const auto est = adota::estimate_tail_index(xs, adota::default_hill_k(n));
                err += std::abs(est.raw - alpha);
            }
            err /= 50.0;
            CHECK(err <= prev_err);
            prev_err = err;
        }
    }
}

TEST_CASE("hill estimator input validation") {
    std::vector<double> flat(100, 3.0);
    CHECK_THROWS_AS(adota::estimate_tail_index(flat, 10), std::invalid_argument);

    std::vector<double> tiny{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(adota::estimate_tail_index(tiny, 2), std::invalid_argument);

    std::vector<double> ok{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    CHECK_THROWS_AS(adota::estimate_tail_index(ok, 1), std::invalid_argument);

    // clamped result flags out-of-range raw values
    RngStream rng(63, RngPurpose::Test);
    const auto nearly_gaussian = [&] {
        std::vector<double> xs(20000);
        for (double& x : xs) x = rng.gaussian();
        return xs;
    }();
    const auto est = adota::estimate_tail_index(nearly_gaussian, 140);
    CHECK(est.alpha_hat <= 2.0);
    if (est.raw > 2.0) CHECK(!est.in_range);
}

TEST_CASE("lemma3_sides closed cases and random sweep") {
    const std::vector<double> zeros{0.0, 0.0, 0.0};
    const auto [zl, zr] = adota::lemma3_sides(zeros, 0.5);
    CHECK(zl == 0.0);
    CHECK(zr == 0.0);

    const double eps = 0.37;
    const std::vector<double> single{eps};
    const auto [sl, sr] = adota::lemma3_sides(single, eps);
    CHECK(sl == doctest::Approx(0.5));
    CHECK(sr == doctest::Approx(0.69314718055994531));

    CHECK_THROWS_AS(adota::lemma3_sides(std::vector<double>{-1.0}, 0.5), std::invalid_argument);

    RngStream rng(64, RngPurpose::Test);
    for (int it = 0; it < 10000; ++it) {
        std::vector<double> seq(1 + rng.next_u64() % 100);
        for (double& a : seq) a = rng.uniform(0.0, 10.0);
        const double e = std::pow(10.0, rng.uniform(-8.0, 0.0));
        const auto [lhs, rhs] = adota::lemma3_sides(seq, e);
        CHECK(rhs - lhs >= -1e-9);
    }
}

TEST_CASE("lemma4_sides closed cases and random sweep") {
    const std::vector<double> zeros(5, 0.0);
    const double phi = 0.4, eps = 0.01;
    const auto [zl, zr] = adota::lemma4_sides(zeros, phi, eps);
    CHECK(zl == 0.0);
    CHECK(zr == doctest::Approx(-4.0 * std::log(phi) / (1.0 - phi)));
    CHECK(zr > 0.0);

    // single-element grid
    RngStream rng(65, RngPurpose::Test);
    for (const double p : {0.1, 0.5, 0.9}) {
        for (int it = 0; it < 100; ++it) {
            const std::vector<double> seq{rng.uniform(0.0, 10.0)};
            const auto [lhs, rhs] = adota::lemma4_sides(seq, p, 0.05);
            CHECK(rhs - lhs >= -1e-9);
        }
    }

    CHECK_THROWS_AS(adota::lemma4_sides(zeros, 1.0, eps), std::invalid_argument);
    CHECK_THROWS_AS(adota::lemma4_sides(zeros, 0.0, eps), std::invalid_argument);
    CHECK_THROWS_AS(adota::lemma4_sides(std::vector<double>{-0.1}, 0.5, eps),
                    std::invalid_argument);

    for (int it = 0; it < 10000; ++it) {
        std::vector<double> seq(1 + rng.next_u64() % 100);
        for (double& a : seq) a = rng.uniform(0.0, 10.0);
        const double p = rng.uniform(0.05, 0.95);
        const double e = std::pow(10.0, rng.uniform(-8.0, 0.0));
        const auto [lhs, rhs] = adota::lemma4_sides(seq, p, e);
        CHECK(rhs - lhs >= -1e-9);
    }
}
