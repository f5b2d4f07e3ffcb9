#include "weightlab/czd.hpp"

#include "weightlab/corpus.hpp"
#include "weightlab/maximal.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace weightlab;

namespace {

struct Setup {
    QuasiMetricSpace space;
    LocalBasis basis;
};

Setup line_setup(Index n, Index center, double radius, double delta = 1.0) {
    Setup out{line_space(n), {}};
    out.basis = make_local_basis(out.space, Ball{center, radius}, delta);
    return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace

TEST_CASE("configuration validation") {
    const auto s = line_space(16);
    CHECK_THROWS_AS(make_cz_config(s, 1.0, 1.0, 1.0), PreconditionError);   // N < 2 kappa
    CHECK_THROWS_AS(make_cz_config(s, 0.0, 2.0, 1.0), PreconditionError);   // delta <= 0
    CHECK_THROWS_AS(make_cz_config(s, 1.0, 2.0, -1.0), PreconditionError);  // lambda <= 0
    const auto cfg = make_cz_config(s, 1.0, 2.0, 5.0);
    CHECK(cfg.theta == doctest::Approx(5.0));
    CHECK(cfg.gamma == doctest::Approx(std::pow(8.0, s.doublingOrder())));
    CHECK(cfg.localization == doctest::Approx(std::pow(8.0, s.doublingOrder())));
}

TEST_CASE("single-scale spaces are rejected for decomposition") {
    const auto tiny = QuasiMetricSpace::fromDistanceMatrix(MatrixXd::Zero(1, 1), ArrayXd::Ones(1));
    CHECK_THROWS_AS(make_cz_config(tiny, 1.0, 2.0, 1.0), PreconditionError);
}

TEST_CASE("level below the threshold is rejected, naming it") {
    const auto [s, basis] = line_setup(16, 8, 4.5);
    const ArrayXd f = ArrayXd::Ones(16);
    auto cfg = make_cz_config(s, 1.0, 2.0, 1.0);  // threshold is gamma * 1
    try {
        cz_decompose(f, basis, cfg, s);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("threshold") != std::string::npos);
    }
}

TEST_CASE("constant f above the threshold: empty level set, empty family") {
    const auto [s, basis] = line_setup(16, 8, 4.5);
    const ArrayXd f = ArrayXd::Ones(16);
    const double gamma = make_cz_config(s, 1.0, 2.0, 1.0).gamma;
    const auto cfg = make_cz_config(s, 1.0, 2.0, 2.0 * gamma);
    const auto dec = cz_decompose(f, basis, cfg, s);
    CHECK(dec.balls.empty());
    CHECK(dec.omega.empty());
    const auto results = verify_cz(dec, f, basis, s, "empty");
    CHECK(results.size() == 6);
    CHECK(all_pass(results));
}

TEST_CASE("single spike selects one ball around it and satisfies every postcondition") {
    const auto [s, basis] = line_setup(33, 16, 10.5);
    ArrayXd f = ArrayXd::Ones(33);
    f[16] = 5000.0;
    const double hatAvg = ball_average(f, basis.hat, s);
    const double gamma = make_cz_config(s, 1.0, 2.0, 1.0).gamma;
    const auto cfg = make_cz_config(s, 1.0, 2.0, 1.05 * gamma * hatAvg);
    const auto dec = cz_decompose(f, basis, cfg, s);
    REQUIRE(!dec.balls.empty());
    bool spikeCovered = false;
    for (const auto& b : dec.balls)
        if (s.dist(b.ball.center, 16) < cfg.theta * b.ball.radius) spikeCovered = true;
    CHECK(spikeCovered);
    CHECK(all_pass(verify_cz(dec, f, basis, s, "spike")));
}

TEST_CASE("random cascade on a line at the threshold passes the postcondition checker") {
    const auto [s, basis] = line_setup(8, 4, 2.5);
    const ArrayXd f = cascade_values(3, 8.0, 21);
    const double hatAvg = ball_average(f, basis.hat, s);
    const auto cfg =
        make_cz_config(s, 1.0, 2.0, make_cz_config(s, 1.0, 2.0, 1.0).gamma * hatAvg);
    const auto dec = cz_decompose(f, basis, cfg, s);
    CHECK(all_pass(verify_cz(dec, f, basis, s, "cascade")));
}

TEST_CASE("selected balls are pairwise disjoint and inside the level set") {
    Lcg64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 16 + static_cast<Index>(rng.below(33));
        const auto s = line_space(n);
        const Ball base{n / 2, n / 4 + 0.5};
        const auto basis = make_local_basis(s, base, 1.0);
        ArrayXd f(n);
        for (Index i = 0; i < n; ++i) f[i] = rng.uniform(0.5, 1.5);
        f[rng.below(static_cast<std::uint64_t>(n))] += rng.uniform(50.0, 500.0);
        const double N = 2.0;
        const double hatAvg = ball_average(f, basis.hat, s);
        const double gamma = make_cz_config(s, 1.0, N, 1.0).gamma;
        const double lambda = gamma * hatAvg * rng.uniform(1.0, 2.0);
        const auto cfg = make_cz_config(s, 1.0, N, lambda);
        const auto dec = cz_decompose(f, basis, cfg, s);

        const ArrayXd m = local_maximal(f, basis, s);
        std::set<Index> used;
        for (const auto& b : dec.balls) {
            for (Index y : oracles::members_of(b.ball, s)) {
                CHECK(used.insert(y).second);  // disjoint
                CHECK(m[y] > lambda);          // inside the level set
            }
        }
        // covering of the level set by the theta-dilations
        for (Index x : dec.omega) {
            bool covered = false;
            for (const auto& b : dec.balls)
                if (s.dist(b.ball.center, x) < cfg.theta * b.ball.radius) covered = true;
            CHECK(covered);
        }
        CHECK(all_pass(verify_cz(dec, f, basis, s, "trial")));
    }
}

TEST_CASE("level sets shrink as the level grows") {
    const auto [s, basis] = line_setup(24, 12, 6.5);
    const ArrayXd f = cascade_values(4, 6.0, 9).segment(0, 24).array() + 0.1;
    const ArrayXd m = local_maximal(f, basis, s);
    for (double lo : {0.1, 0.5, 1.0}) {
        const double hi = 2.0 * lo;
        for (Index x = 0; x < 24; ++x)
            if (m[x] > hi) CHECK(m[x] > lo);
    }
}

TEST_CASE("hand-corrupted decomposition fails the radius postcondition") {
    const auto [s, basis] = line_setup(33, 16, 10.5);
    ArrayXd f = ArrayXd::Ones(33);
    f[16] = 5000.0;
    const double hatAvg = ball_average(f, basis.hat, s);
    const double gamma = make_cz_config(s, 1.0, 2.0, 1.0).gamma;
    const auto cfg = make_cz_config(s, 1.0, 2.0, 1.05 * gamma * hatAvg);
    auto dec = cz_decompose(f, basis, cfg, s);
    REQUIRE(!dec.balls.empty());
    dec.balls[0].ball.radius = 2.0 * basis.base.radius;  // beyond (delta/N) r(B0)
    bool radiusFailed = false;
    for (const auto& r : verify_cz(dec, f, basis, s, "corrupt"))
        if (r.name == "cz-ii-radius" && !r.pass) radiusFailed = true;
    CHECK(radiusFailed);
}

TEST_CASE("localization level works on every produced decomposition") {
    // for each selected ball, points of the dilated ball above the boosted
    // level see only the theta^2-localized data
    Lcg64 rng(47);
    int nonEmpty = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 32 + static_cast<Index>(rng.below(33));
        const auto s = line_space(n);
        const auto basis = make_local_basis(s, Ball{n / 2, n / 4 + 0.5}, 1.0);
        ArrayXd f(n);
        for (Index i = 0; i < n; ++i) f[i] = rng.uniform(0.5, 1.5);
        f[rng.below(static_cast<std::uint64_t>(n))] += rng.uniform(100.0, 1000.0);
        const double hatAvg = ball_average(f, basis.hat, s);
        const double gamma = make_cz_config(s, 1.0, 2.0, 1.0).gamma;
        const auto cfg = make_cz_config(s, 1.0, 2.0, gamma * hatAvg);
        const auto dec = cz_decompose(f, basis, cfg, s);
        if (!dec.balls.empty()) ++nonEmpty;

        const ArrayXd m = local_maximal(f, basis, s);
        for (const auto& b : dec.balls) {
            ArrayXd masked = ArrayXd::Zero(n);
            for (Index y : oracles::members_of(dilate(b.ball, cfg.theta * cfg.theta), s))
                masked[y] = f[y];
            const ArrayXd mMasked = local_maximal(masked, basis, s);
            for (Index x : oracles::members_of(dilate(b.ball, cfg.theta), s))
                if (m[x] > cfg.localization * cfg.lambda)
                    CHECK(m[x] <= mMasked[x] * (1.0 + 1e-12));
        }
    }
    CHECK(nonEmpty > 0);
}

TEST_CASE("decomposition serialization fields") {
    const auto [s, basis] = line_setup(33, 16, 10.5);
    ArrayXd f = ArrayXd::Ones(33);
    f[20] = 4000.0;
    const double hatAvg = ball_average(f, basis.hat, s);
    const double gamma = make_cz_config(s, 1.0, 2.0, 1.0).gamma;
    const auto cfg = make_cz_config(s, 1.0, 2.0, gamma * hatAvg);
    const auto dec = cz_decompose(f, basis, cfg, s);
    for (const auto& b : dec.balls) {
        CHECK(b.average > cfg.lambda);
        CHECK(b.memberCount == s.memberCount(b.ball));
    }
}
