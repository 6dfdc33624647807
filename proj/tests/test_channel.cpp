#include <doctest.h>

#include <cmath>
#include <vector>

#include "adota/channel.hpp"
#include "adota/param_math.hpp"
#include "adota/rng.hpp"
#include "oracles.hpp"

using adota::FadingModel;
using adota::InterferenceModel;
using adota::ParamVector;
using adota::RngPurpose;
using adota::RngStream;

TEST_CASE("fading model validation") {
    CHECK_NOTHROW(FadingModel::rayleigh(1.0).validate());
    CHECK_NOTHROW(FadingModel::constant(2.0).validate());
    CHECK_NOTHROW(FadingModel::gaussian_truncated(1.0, 0.5).validate());
    CHECK_THROWS_AS(FadingModel::constant(0.0), std::invalid_argument);

    FadingModel broken = FadingModel::rayleigh(1.0);
    broken.std = 0.9;  // violates the one-scale relation
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

    FadingModel c = FadingModel::constant(1.0);
    c.std = 0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("constant fading returns the mean exactly") {
    RngStream rng(1, RngPurpose::Test);
    const FadingModel m = FadingModel::constant(1.0);
    for (int i = 0; i < 10; ++i) CHECK(sample_fading(m, rng) == 1.0);
}

TEST_CASE("rayleigh fading matches its configured moments") {
    RngStream rng(2, RngPurpose::Test);
    const FadingModel m = FadingModel::rayleigh(1.0);
    const int n = 1000000;
    std::vector<double> draws(n);
    for (double& h : draws) {
        h = sample_fading(m, rng);
        CHECK(h >= 0.0);
    }
    const double mean = oracles::mean(draws);
    CHECK(mean > 0.997);
    CHECK(mean < 1.003);
    // Rayleigh with mean 1: variance = 4/pi - 1
    CHECK(oracles::variance(draws) == doctest::Approx(0.27323954473516269).epsilon(0.01));
}

TEST_CASE("truncated gaussian fading stays nonnegative") {
    RngStream rng(3, RngPurpose::Test);
    const FadingModel m = FadingModel::gaussian_truncated(0.5, 1.0);
    for (int i = 0; i < 20000; ++i) CHECK(sample_fading(m, rng) >= 0.0);
}

TEST_CASE("alpha-stable sampler analytic limits") {
    const int n = 100000;

    // alpha = 2 is Gaussian with std scale*sqrt(2)
    {
        RngStream rng(4, RngPurpose::Test);
        const double s = 0.7;
        std::vector<double> xs(n);
        for (double& x : xs) x = sample_alpha_stable(2.0, s, rng);
        const double ks = oracles::ks_statistic(
            xs, [&](double x) { return oracles::normal_cdf(x, 0.0, s * std::sqrt(2.0)); });
        CHECK(ks < 0.02);
    }
    // alpha = 1 boundary is Cauchy(scale)
    {
        RngStream rng(5, RngPurpose::Test);
        const double s = 1.3;
        std::vector<double> xs(n);
        for (double& x : xs) x = sample_alpha_stable(1.0, s, rng);
        const double ks =
            oracles::ks_statistic(xs, [&](double x) { return oracles::cauchy_cdf(x, s); });
        CHECK(ks < 0.02);
    }
    // scale = 0 collapses to zero
    {
        RngStream rng(6, RngPurpose::Test);
        for (int i = 0; i < 100; ++i) CHECK(sample_alpha_stable(1.5, 0.0, rng) == 0.0);
    }
    RngStream rng(7, RngPurpose::Test);
    CHECK_THROWS_AS(sample_alpha_stable(0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_alpha_stable(2.5, 1.0, rng), std::invalid_argument);
}

TEST_CASE("interference vector symmetry and tail") {
    InterferenceModel model{1.5, 0.1, 100000};
    RngStream rng(8, RngPurpose::Test);
    const ParamVector noise = sample_interference(model, rng);

    std::vector<double> xs(noise.coords().begin(), noise.coords().end());
    std::sort(xs.begin(), xs.end());
    const double median = 0.5 * (xs[xs.size() / 2 - 1] + xs[xs.size() / 2]);
    CHECK(std::abs(median) < 0.002);

    // tail mass beyond 10*scale against the stable series approximation
    // P(|X| > x) ~ 2 * C_alpha * (x/scale)^(-alpha),
    // C_alpha = sin(pi*alpha/2) * Gamma(alpha) / pi
    int exceed = 0;
    for (double x : xs) {
        if (std::abs(x) > 10.0 * model.scale) ++exceed;
    }
    const double c_alpha = std::sin(M_PI * 1.5 / 2.0) * std::tgamma(1.5) / M_PI;
    const double predicted = 2.0 * c_alpha * std::pow(10.0, -1.5);
    const double observed = static_cast<double>(exceed) / static_cast<double>(xs.size());
    CHECK(observed > predicted * 0.7);
    CHECK(observed < predicted * 1.3);

    // scale = 0 gives exact zeros
    InterferenceModel silent{1.5, 0.0, 3};
    const ParamVector z = sample_interference(silent, rng);
    for (std::size_t i = 0; i < z.dim(); ++i) CHECK(z[i] == 0.0);
}

TEST_CASE("fractional moments of stable samples") {
    // p < alpha: the empirical moment stabilizes as the sample grows.
    // p > alpha: its typical value keeps growing like M^(p/alpha - 1).
    // A single path can be dominated by one early whale, so compare the
    // median across independent streams at each size.
    const double alpha = 1.5;
    const std::size_t sizes[] = {1000, 10000, 100000};
    const int streams = 51;

    auto median_moment = [&](double p, std::size_t m_target) {
        std::vector<double> per_stream;
        for (int s = 0; s < streams; ++s) {
            RngStream rng(900 + s, RngPurpose::Test);
            double acc = 0.0;
            for (std::size_t i = 0; i < m_target; ++i) {
                acc += std::pow(std::abs(sample_alpha_stable(alpha, 1.0, rng)), p);
            }
            per_stream.push_back(acc / static_cast<double>(m_target));
        }
        std::sort(per_stream.begin(), per_stream.end());
        return per_stream[per_stream.size() / 2];
    };

    const double finite_small = median_moment(alpha / 2.0, sizes[0]);
    const double finite_mid = median_moment(alpha / 2.0, sizes[1]);
    const double finite_big = median_moment(alpha / 2.0, sizes[2]);
    CHECK(finite_mid / finite_small > 0.8);
    CHECK(finite_mid / finite_small < 1.25);
    CHECK(finite_big / finite_mid > 0.8);
    CHECK(finite_big / finite_mid < 1.25);

    const double inf_small = median_moment(alpha + 0.2, sizes[0]);
    const double inf_mid = median_moment(alpha + 0.2, sizes[1]);
    const double inf_big = median_moment(alpha + 0.2, sizes[2]);
    CHECK(inf_mid > inf_small);
    CHECK(inf_big > inf_mid);
}

TEST_CASE("ota_aggregate closed forms") {
    // plain average
    std::vector<ParamVector> grads;
    grads.emplace_back(std::vector<double>{1.0, 2.0});
    grads.emplace_back(std::vector<double>{3.0, 4.0});
    const std::vector<double> ones{1.0, 1.0};
    const ParamVector no_noise(2);
    const ParamVector avg = ota_aggregate(grads, ones, no_noise, 2);
    CHECK(avg[0] == doctest::Approx(2.0));
    CHECK(avg[1] == doctest::Approx(3.0));

    // single-client reduction: h*g + xi
    std::vector<ParamVector> one_grad;
    one_grad.emplace_back(std::vector<double>{2.0, -1.0});
    const std::vector<double> h{0.5};
    const ParamVector xi(std::vector<double>{0.1, 0.2});
    const ParamVector single = ota_aggregate(one_grad, h, xi, 1);
    CHECK(single[0] == doctest::Approx(1.1));
    CHECK(single[1] == doctest::Approx(-0.3));

    // random instance vs a brute-force oracle
    RngStream rng(10, RngPurpose::Test);
    const std::size_t n = 5, d = 3;
    std::vector<ParamVector> gs;
    std::vector<double> hs(n);
    ParamVector noise(d);
    for (std::size_t i = 0; i < d; ++i) noise[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t c = 0; c < n; ++c) {
        ParamVector g(d);
        for (std::size_t i = 0; i < d; ++i) g[i] = rng.uniform(-2.0, 2.0);
        gs.push_back(g);
        hs[c] = rng.uniform(0.0, 2.0);
    }
    const ParamVector got = ota_aggregate(gs, hs, noise, n);
    for (std::size_t i = 0; i < d; ++i) {
        double expect = 0.0;
        for (std::size_t c = 0; c < n; ++c) expect += hs[c] * gs[c][i];
        expect = expect / static_cast<double>(n) + noise[i];
        CHECK(got[i] == doctest::Approx(expect).epsilon(1e-12));
    }

    // errors
    CHECK_THROWS_AS(ota_aggregate(gs, hs, noise, 0), std::invalid_argument);
    CHECK_THROWS_AS(ota_aggregate(gs, ones, noise, n), std::invalid_argument);
    const ParamVector wrong_dim(2);
    CHECK_THROWS_AS(ota_aggregate(gs, hs, wrong_dim, n), std::invalid_argument);
}

TEST_CASE("ota aggregation is unbiased up to the fading mean") {
    // fixed true gradients, Monte-Carlo over channel draws
    const std::size_t n = 20, d = 4;
    const int monte_carlo = 100000;
    std::vector<ParamVector> grads;
    RngStream setup(11, RngPurpose::Test);
    for (std::size_t c = 0; c < n; ++c) {
        ParamVector g(d);
        for (std::size_t i = 0; i < d; ++i) g[i] = setup.uniform(-1.0, 1.0);
        grads.push_back(g);
    }
    ParamVector truth(d);
    for (const auto& g : grads) adota::axpy(truth, 1.0, g);
    truth = adota::scale(truth, 1.0 / static_cast<double>(n));

    const FadingModel fading = FadingModel::rayleigh(1.0);
    const double alpha = 1.5, scale = 0.01;
    const InterferenceModel interference{alpha, scale, d};

    ParamVector acc(d);
    std::vector<double> hs(n);
    RngStream rng(12, RngPurpose::Test);
    for (int it = 0; it < monte_carlo; ++it) {
        for (std::size_t c = 0; c < n; ++c) hs[c] = sample_fading(fading, rng);
        const ParamVector noise = sample_interference(interference, rng);
        adota::axpy(acc, 1.0, ota_aggregate(grads, hs, noise, n));
    }
    acc = adota::scale(acc, 1.0 / monte_carlo);

    const double grad_norm = adota::lp_norm(truth, 2.0);
    const double m = static_cast<double>(monte_carlo);
    const double tol = 5.0 * scale * std::pow(m, 1.0 / alpha - 1.0) +
                       3.0 * fading.std * grad_norm / std::sqrt(static_cast<double>(n) * m);
    for (std::size_t i = 0; i < d; ++i) {
        CHECK(std::abs(acc[i] - fading.mean * truth[i]) < tol);
    }
}

TEST_CASE("seeded streams replay bit-exactly") {
    RngStream a(123, RngPurpose::Fading, 7, 3);
    RngStream b(123, RngPurpose::Fading, 7, 3);
    const FadingModel m = FadingModel::rayleigh(1.0);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_fading(m, a) == sample_fading(m, b));
    }
    RngStream c(123, RngPurpose::Fading, 7, 4);  // different client
    bool any_diff = false;
    RngStream a2(123, RngPurpose::Fading, 7, 3);
    for (int i = 0; i < 10; ++i) {
        any_diff = any_diff || (sample_fading(m, a2) != sample_fading(m, c));
    }
    CHECK(any_diff);
}
