#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "skycast/committee.hpp"
#include "skycast/errors.hpp"

using namespace skycast;

namespace {

// arma member with chosen coefficients and an explicit bic via sigma2/n.
std::unique_ptr<ArmaMember> handmade_member(const std::string& name, double phi0,
                                            std::vector<double> phi, double sigma2) {
    arma::ArmaModel m;
    m.spec = {static_cast<int>(phi.size()), 0};
    m.phi0 = phi0;
    m.phi = std::move(phi);
    m.n_params = 1 + m.spec.p;
    m.n_train = 1000;
    m.sigma2 = sigma2;
    return std::make_unique<ArmaMember>(name, std::move(m));
}

struct Fixture {
    ClearSkyIndexSeries kcls;
    ClearSkySeries cls;
    IrradianceSeries ghi;
};

// 48 hourly samples with 8 daytime hours per day.
Fixture two_day_fixture() {
    Fixture f;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uk(0.3, 1.1);
    for (int i = 0; i < 48; ++i) {
        const int hour = i % 24;
        const bool day = hour >= 8 && hour < 16;
        const double cls = day ? 600.0 : 0.0;
        const double k = uk(rng);
        f.kcls.timestamps.push_back(i * kHourStep);
        f.cls.timestamps.push_back(i * kHourStep);
        f.ghi.timestamps.push_back(i * kHourStep);
        f.cls.values.push_back(cls);
        if (day) {
            f.kcls.values.push_back(k);
            f.kcls.valid.push_back(1);
            f.ghi.values.push_back(k * cls);
        } else {
            f.kcls.values.push_back(std::nan(""));
            f.kcls.valid.push_back(0);
            f.ghi.values.push_back(0.0);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("pmp: paper-table anchor within the stated bands") {
    const double bics[] = {-2.33, -2.59};
    const auto pmps = pmp_from_bics(bics);

    CHECK(std::fabs(pmps[0] - 0.4663) < 0.002);
    CHECK(std::fabs(pmps[1] - 0.5337) < 0.002);
    CHECK(pmps[0] + pmps[1] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(std::fabs(std::exp(-bics[0] / 2) - 3.20) < 0.01);
    CHECK(std::fabs(std::exp(-bics[1] / 2) - 3.66) < 0.01);
}

TEST_CASE("pmp: symmetry, extremes, singleton") {
    const double equal[] = {-1.7, -1.7};
    const auto w = pmp_from_bics(equal);
    CHECK(w[0] == 0.5);
    CHECK(w[1] == 0.5);

    const double wide[] = {0.0, 20.0};
    const auto v = pmp_from_bics(wide);
    CHECK(v[0] == doctest::Approx(0.999954602131).epsilon(1e-9));
    CHECK(v[1] == doctest::Approx(4.539786870243e-05).epsilon(1e-9));

    const double one[] = {-2.0};
    CHECK(pmp_from_bics(one)[0] == 1.0);
}

TEST_CASE("pmp: invariant under a common BIC shift") {
    std::mt19937_64 rng(999);
    std::uniform_real_distribution<double> ub(-5.0, 5.0);
    std::uniform_real_distribution<double> uc(-100.0, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> bics(4);
        for (auto& b : bics) b = ub(rng);
        const double c = uc(rng);
        std::vector<double> shifted = bics;
        for (auto& b : shifted) b += c;
        const auto a = pmp_from_bics(bics);
        const auto s = pmp_from_bics(shifted);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k] == doctest::Approx(s[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("pmp: non-uniform priors tilt the weights") {
    const double bics[] = {-2.0, -2.0};
    const double priors[] = {0.8, 0.2};
    const auto w = pmp_from_bics(bics, priors);
    CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("committee_forecast: arithmetic and convexity") {
    const double pmps[] = {0.5337, 0.4663};
    const double fc[] = {0.8, 0.6};
    CHECK(committee_forecast(pmps, fc) ==
          doctest::Approx(0.70674).epsilon(1e-12));

    const double same[] = {0.9, 0.9};
    CHECK(committee_forecast(pmps, same) == doctest::Approx(0.9).epsilon(1e-12));

    const double degenerate[] = {1.0, 0.0};
    CHECK(committee_forecast(degenerate, fc) == doctest::Approx(0.8));

    const double three[] = {0.1, 0.2};
    CHECK_THROWS_AS(committee_forecast(pmps, std::span<const double>(three, 1)),
                    MemberCountMismatch);

    // convexity: output within member range, per-sample error bounded
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        double b[3];
        for (auto& x : b) x = u(rng);
        const auto w3 = pmp_from_bics(b);
        double f[3];
        for (auto& x : f) x = u(rng);
        const double out = committee_forecast(w3, f);
        CHECK(out >= std::min({f[0], f[1], f[2]}) - 1e-12);
        CHECK(out <= std::max({f[0], f[1], f[2]}) + 1e-12);
        const double truth = u(rng);
        const double max_err = std::max({std::fabs(f[0] - truth), std::fabs(f[1] - truth),
                                         std::fabs(f[2] - truth)});
        CHECK(std::fabs(out - truth) <= max_err + 1e-12);
    }
}

TEST_CASE("committee build: validation and pmp ordering") {
    std::vector<std::unique_ptr<ForecastMember>> one;
    one.push_back(handmade_member("solo", 0.0, {0.5}, 0.01));
    CHECK_THROWS_AS(Committee::build(std::move(one)), MemberCountMismatch);

    std::vector<std::unique_ptr<ForecastMember>> pair;
    pair.push_back(handmade_member("a", 0.0, {0.5}, 0.01));
    pair.push_back(handmade_member("b", 0.0, {0.5, 0.1}, 0.02));
    const auto committee = Committee::build(std::move(pair));
    CHECK(committee.pmps.size() == 2);
    CHECK(committee.pmps[0] + committee.pmps[1] == doctest::Approx(1.0).epsilon(1e-12));
    // lower sigma2 (and fewer parameters) means the first member dominates
    CHECK(committee.pmps[0] > committee.pmps[1]);

    std::vector<std::unique_ptr<ForecastMember>> bad_priors;
    bad_priors.push_back(handmade_member("a", 0.0, {0.5}, 0.01));
    bad_priors.push_back(handmade_member("b", 0.0, {0.5}, 0.01));
    CHECK_THROWS_AS(Committee::build(std::move(bad_priors), {0.4, 0.4}), ConfigError);
}

TEST_CASE("run_committee: persistence-equivalent members reproduce persistence") {
    auto fixture = two_day_fixture();
    std::vector<std::unique_ptr<ForecastMember>> members;
    members.push_back(handmade_member("p1", 0.0, {1.0}, 0.01));
    members.push_back(handmade_member("p2", 0.0, {1.0}, 0.02));
    auto committee = Committee::build(std::move(members));

    const auto run = run_committee(committee, fixture.kcls, fixture.cls, fixture.ghi);
    REQUIRE(run.records.size() == 16);  // two 8-hour days

    for (std::size_t i = 0; i < run.records.size(); ++i) {
        const auto& rec = run.records[i];
        if (rec.status != RecordStatus::Scored) continue;
        // previous valid sample within the same day
        const auto& prev = run.records[i - 1];
        CHECK(rec.committee_kcls == doctest::Approx(prev.kcls_measured).epsilon(1e-12));
    }
}

TEST_CASE("run_committee: stream matches a straight-line reference walk") {
    auto fixture = two_day_fixture();

    std::vector<std::unique_ptr<ForecastMember>> members;
    members.push_back(handmade_member("last", 0.0, {1.0}, 0.01));   // persistence
    members.push_back(handmade_member("flat", 0.5, {0.0}, 0.015));  // constant 0.5
    auto committee = Committee::build(std::move(members));
    const auto pmps = committee.pmps;

    const auto run = run_committee(committee, fixture.kcls, fixture.cls, fixture.ghi);

    // reference: iterate the valid samples per day, first sample unscored
    std::size_t rec_idx = 0;
    for (int day = 0; day < 2; ++day) {
        double prev = 0.0;
        bool have_prev = false;
        for (int i = 0; i < 48; ++i) {
            if (!fixture.kcls.valid[i]) continue;
            if (i / 24 != day) continue;
            const auto& rec = run.records[rec_idx++];
            CHECK(rec.timestamp == fixture.kcls.timestamps[i]);
            CHECK(rec.kcls_measured == doctest::Approx(fixture.kcls.values[i]));
            if (!have_prev) {
                CHECK(rec.status == RecordStatus::InsufficientHistory);
                CHECK(std::isnan(rec.committee_kcls));
            } else {
                CHECK(rec.status == RecordStatus::Scored);
                CHECK(rec.member_kcls[0] == doctest::Approx(prev).epsilon(1e-12));
                CHECK(rec.member_kcls[1] == doctest::Approx(0.5).epsilon(1e-12));
                const double expect = pmps[0] * prev + pmps[1] * 0.5;
                CHECK(rec.committee_kcls == doctest::Approx(expect).epsilon(1e-12));
                CHECK(rec.committee_ghi ==
                      doctest::Approx(std::max(0.0, expect * rec.ghi_clearsky)));
            }
            prev = fixture.kcls.values[i];
            have_prev = true;
        }
    }
    CHECK(rec_idx == run.records.size());
    CHECK(run.n_scored == 14);
    CHECK(run.n_skipped == 2);
}

TEST_CASE("run_committee: empty test set gives an empty stream") {
    ClearSkyIndexSeries kcls;
    ClearSkySeries cls;
    IrradianceSeries ghi;
    std::vector<std::unique_ptr<ForecastMember>> members;
    members.push_back(handmade_member("a", 0.0, {1.0}, 0.01));
    members.push_back(handmade_member("b", 0.5, {0.0}, 0.01));
    auto committee = Committee::build(std::move(members));
    const auto run = run_committee(committee, kcls, cls, ghi);
    CHECK(run.records.empty());
    CHECK(run.n_scored == 0);
}

TEST_CASE("run_committee: night bridging carries lags across days") {
    auto fixture = two_day_fixture();
    std::vector<std::unique_ptr<ForecastMember>> members;
    members.push_back(handmade_member("p1", 0.0, {1.0}, 0.01));
    members.push_back(handmade_member("p2", 0.0, {1.0}, 0.02));
    auto committee = Committee::build(std::move(members));

    const auto run = run_committee(committee, fixture.kcls, fixture.cls, fixture.ghi, true);
    CHECK(run.n_skipped == 1);  // only the very first valid sample lacks history
    CHECK(run.n_scored == 15);
}
