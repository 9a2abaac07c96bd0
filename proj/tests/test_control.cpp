#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "burgersim/control.hpp"
#include "support.hpp"

using namespace burgersim;

TEST_CASE("gain thresholds", "[control]") {
    CHECK(gain_threshold(Variant::theorem1) == Catch::Approx(1.0 / 6.0));
    CHECK(gain_threshold(Variant::theorem2) == 0.0);

    CHECK(gain_ok(Variant::theorem1, 15.0));
    CHECK_FALSE(gain_ok(Variant::theorem1, 1.0 / 6.0));
    CHECK(gain_ok(Variant::theorem1, 1.0 / 6.0 + 1e-9));
    CHECK(gain_ok(Variant::theorem2, 1e-12));
    CHECK_FALSE(gain_ok(Variant::theorem2, 0.0));
    CHECK_FALSE(gain_ok(Variant::theorem2, -1.0));

    CHECK_THROWS_AS(validate_gain(Variant::theorem1, 1.0 / 6.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_gain(Variant::theorem2, 0.0), std::invalid_argument);
    CHECK_NOTHROW(validate_gain(Variant::theorem1, 1.0 / 6.0 + 1e-9));
    CHECK_NOTHROW(validate_gain(Variant::theorem2, 1e-12));

    CHECK(std::string(variant_name(Variant::theorem1)) == "theorem1");
    CHECK(std::string(variant_name(Variant::theorem2)) == "theorem2");
}

TEST_CASE("feedback flux frozen values", "[control]") {
    const FluxPair t1 = feedback_fluxes(Variant::theorem1, 15.0, 1.0, -1.0);
    CHECK(t1.f0 == Catch::Approx(30.0).margin(1e-12));
    CHECK(t1.f1 == Catch::Approx(30.0).margin(1e-12));

    const FluxPair t2 = feedback_fluxes(Variant::theorem2, 3.0, 1.0, 2.0);
    CHECK(t2.f0 == Catch::Approx(3.0).margin(1e-12));
    CHECK(t2.f1 == Catch::Approx(-6.0).margin(1e-12));
}

TEST_CASE("feedback flux structure", "[control]") {
    std::mt19937 rng(2024);
    std::normal_distribution<double> nd(0.0, 2.0);
    std::uniform_real_distribution<double> kd(0.2, 30.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double k = kd(rng), u0 = nd(rng), u1 = nd(rng);
        for (Variant v : {Variant::theorem1, Variant::theorem2}) {
            const FluxPair f = feedback_fluxes(v, k, u0, u1);
            const FluxPair m = feedback_fluxes(v, k, -u0, -u1);
            // odd in the boundary value
            CHECK(m.f0 == Catch::Approx(-f.f0).margin(1e-12));
            CHECK(m.f1 == Catch::Approx(-f.f1).margin(1e-12));
            // dissipative sign: inflow flux aligned with u0, outflow against u1
            CHECK(f.f0 * u0 >= -1e-15);
            CHECK(f.f1 * u1 <= 1e-15);
        }
    }
}

TEST_CASE("feedforward flux frozen values", "[control]") {
    // theorem1, zero stabilization boundary values
    const FluxPair a =
        feedforward_fluxes(Variant::theorem1, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0);
    CHECK(a.f0 == Catch::Approx(2.0).margin(1e-12));
    CHECK(a.f1 == Catch::Approx(1.0).margin(1e-12));

    // theorem2 adds the quadratic stabilization terms
    const FluxPair b =
        feedforward_fluxes(Variant::theorem2, 1.0, 2.0, 3.0, 4.0, 0.5, 0.25);
    CHECK(b.f0 == Catch::Approx(1.0 * 3.0 + 0.5 * (1.0 + 9.0)).margin(1e-12));
    CHECK(b.f1 ==
          Catch::Approx(2.0 * 4.0 + 0.5 * (4.0 + 16.0) + 0.5 - 0.25).margin(1e-12));
}

TEST_CASE("controller laws match independent transcription", "[control]") {
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> ud(-4.0, 4.0);
    std::uniform_real_distribution<double> kd(0.2, 40.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double k = kd(rng);
        const double u0 = ud(rng), u1 = ud(rng);
        const double uh0 = ud(rng), uh1 = ud(rng);
        const double U0 = ud(rng), U1 = ud(rng);
        const double rp = ud(rng), ci = ud(rng);
        for (Variant v : {Variant::theorem1, Variant::theorem2}) {
            const FluxPair fb = feedback_fluxes(v, k, u0, u1);
            const testsupport::OraclePair ofb =
                testsupport::oracle_feedback(v, k, u0, u1);
            CHECK(std::abs(fb.f0 - ofb.f0) <=
                  1e-12 * std::max(1.0, std::abs(ofb.f0)));
            CHECK(std::abs(fb.f1 - ofb.f1) <=
                  1e-12 * std::max(1.0, std::abs(ofb.f1)));

            const FluxPair ff = feedforward_fluxes(v, uh0, uh1, U0, U1, rp, ci);
            const testsupport::OraclePair off =
                testsupport::oracle_feedforward(v, uh0, uh1, U0, U1, rp, ci);
            CHECK(std::abs(ff.f0 - off.f0) <=
                  1e-12 * std::max(1.0, std::abs(off.f0)));
            CHECK(std::abs(ff.f1 - off.f1) <=
                  1e-12 * std::max(1.0, std::abs(off.f1)));
        }
    }
}

TEST_CASE("decay rate frozen values", "[control]") {
    CHECK(decay_rate(Variant::theorem1, 5.0, 15.0) == Catch::Approx(5.0));
    CHECK(decay_rate(Variant::theorem1, 5.0, 1.0 / 6.0 + 1.0 / 30.0) ==
          Catch::Approx(1.0 / 30.0).margin(1e-15));
    CHECK(decay_rate(Variant::theorem2, 5.0, 15.0) == Catch::Approx(5.0));
    CHECK(decay_rate(Variant::theorem2, 0.75, 2.0) == Catch::Approx(0.75));
    CHECK_THROWS_AS(decay_rate(Variant::theorem1, 5.0, 0.1),
                    std::invalid_argument);
}

TEST_CASE("decay rate is nondecreasing in the gain and capped by viscosity",
          "[control]") {
    for (Variant v : {Variant::theorem1, Variant::theorem2}) {
        double prev = -1.0;
        for (double k = gain_threshold(v) + 0.01; k < 20.0; k += 0.37) {
            const double lam = decay_rate(v, 5.0, k);
            CHECK(lam >= prev - 1e-15);
            CHECK(lam <= 5.0 + 1e-15);
            CHECK(lam > 0.0);
            prev = lam;
        }
    }
}

TEST_CASE("tracking envelope values and structure", "[control]") {
    CHECK(tracking_bound(0.0, 6.0, 5.0) == Catch::Approx(6.0));
    CHECK(tracking_bound(1.0, 6.0, 5.0) ==
          Catch::Approx(6.0 * std::exp(-2.5)).epsilon(1e-12));

    // homogeneous in the initial norm, decreasing in time
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ud(0.1, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double n0 = ud(rng), lam = ud(rng), t = ud(rng), c = ud(rng);
        CHECK(tracking_bound(t, c * n0, lam) ==
              Catch::Approx(c * tracking_bound(t, n0, lam)).epsilon(1e-12));
        CHECK(tracking_bound(t + 0.5, n0, lam) < tracking_bound(t, n0, lam));
    }
}
