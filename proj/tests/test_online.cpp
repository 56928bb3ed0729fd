#include "ctsconf/online/acmcp.hpp"
#include "ctsconf/online/aci.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <random>

using namespace ctsconf;

TEST(Aci, StepArithmetic) {
    auto s = make_aci_state(0.1, 0.005);
    EXPECT_NEAR(aci_step(s, true).alpha_t, 0.0955, 1e-15);
    EXPECT_NEAR(aci_step(s, false).alpha_t, 0.1005, 1e-15);
    EXPECT_EQ(aci_step(s, true).err_history, (std::vector<std::uint8_t>{1}));
}

TEST(Aci, IntervalEdgeCases) {
    const std::vector<double> scores{1, 2, 3, 4, 5, 6, 7, 8, 9};
    auto s = make_aci_state(0.1, 0.01);
    s.alpha_t = -0.02;
    const auto inf = aci_interval(s, 3.0, scores);
    EXPECT_EQ(inf.lower, -kInf);
    EXPECT_EQ(inf.upper, kInf);
    s.alpha_t = 1e-18;
    EXPECT_EQ(aci_interval(s, 3.0, scores).upper, kInf);
    s.alpha_t = 1.3;
    const auto point = aci_interval(s, 3.0, scores);
    EXPECT_EQ(point.lower, 3.0);
    EXPECT_EQ(point.upper, 3.0);
    s.alpha_t = 0.1;
    const auto mid = aci_interval(s, 0.0, scores);
    EXPECT_EQ(mid.lower, -9.0);
    EXPECT_EQ(mid.upper, 9.0);
}

TEST(Aci, RejectsBadParameters) {
    EXPECT_THROW(make_aci_state(0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(make_aci_state(1.0, 0.01), std::invalid_argument);
    EXPECT_THROW(aci_warm_up(std::vector<double>{1.0}, 0, make_aci_state(0.1, 0.01)), std::invalid_argument);
}

TEST(Aci, ClosedLoopMissRateWithinBound) {
    std::mt19937_64 eng(1);
    std::uniform_real_distribution<double> ud;
    auto s = make_aci_state(0.1, 0.01);
    const std::size_t T = 10000;
    double alpha_sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        // Uniform scores: the interval at alpha_t covers with probability 1 - alpha_t.
        alpha_sum += s.alpha_t;
        s = aci_step(std::move(s), ud(eng) < s.alpha_t);
    }
    double err = 0.0;
    for (auto e : s.err_history) err += e;
    EXPECT_LE(std::abs(err / T - 0.1), aci_long_run_bound(0.1, 0.01, T));
    EXPECT_NEAR(alpha_sum / T, 0.1, 0.01);
}

TEST(Aci, WarmUpUsesOnlyRealizedScores) {
    // Horizon 2: the first radius is issued at origin 2 from score 0 only.
    const std::vector<double> scores{5.0, 1.0, 1.0, 1.0};
    auto s = aci_warm_up(scores, 2, make_aci_state(0.5, 0.1));
    // Origins 2 and 3 are issued; their outcomes arrive at 4 and 5.
    EXPECT_EQ(s.err_history.size(), 2u);
}

TEST(Acmcp, ProportionalTermOnly) {
    AcmcpConfig c;
    c.eta = 1.0;
    c.k_i = 0.0;
    c.alpha = 0.1;
    const auto s = make_acmcp_state(c, 10.0);
    EXPECT_NEAR(acmcp_step(s, {0, 1, true, 0.0}, {}).q, 10.9, 1e-12);
    EXPECT_NEAR(acmcp_step(s, {0, 1, false, 0.0}, {}).q, 9.9, 1e-12);
}

TEST(Acmcp, MissStreakRaisesQuantile) {
    AcmcpConfig c;
    c.eta = 1.0;
    c.k_i = 0.0;
    auto s = make_acmcp_state(c, 1.0);
    for (int i = 0; i < 5; ++i) s = acmcp_step(std::move(s), {0, 1, true, 0.0}, {});
    EXPECT_GE(s.q - 1.0, 5 * 0.9 - 1e-12);
}

TEST(Acmcp, IntegralTermSaturates) {
    EXPECT_NEAR(saturation(1e6, 2.0, 20.0), 2.0, 1e-12);
    EXPECT_NEAR(saturation(-1e6, 2.0, 20.0), -2.0, 1e-12);
    EXPECT_DOUBLE_EQ(saturation(0.0, 2.0, 20.0), 0.0);
}

TEST(Acmcp, IntervalClampsNegativeQuantile) {
    auto s = make_acmcp_state({}, 5.0);
    auto iv = acmcp_interval(s, 100.0);
    EXPECT_EQ(iv.lower, 95.0);
    EXPECT_EQ(iv.upper, 105.0);
    s.q = -2.0;
    iv = acmcp_interval(s, 100.0);
    EXPECT_EQ(iv.lower, 100.0);
    EXPECT_EQ(iv.upper, 100.0);
}

TEST(Acmcp, RejectsHorizonMismatch) {
    AcmcpConfig c;
    c.horizon = 2;
    EXPECT_THROW(acmcp_step(make_acmcp_state(c, 1.0), {0, 1, false, 0.0}, {}), std::invalid_argument);
}

TEST(Acmcp, IidScoresLeaveScoreModelInert) {
    std::mt19937_64 eng(2);
    std::normal_distribution<double> nd;
    AcmcpConfig c;
    c.horizon = 2;
    c.eta = 0.05;
    c.k_i = 0.5;
    auto with_model = make_acmcp_state(c, 1.6);
    auto without = with_model;
    const std::size_t T = 20000;
    std::vector<double> scores(T), innov(T);
    for (std::size_t t = 0; t < T; ++t) {
        scores[t] = std::abs(nd(eng));
        innov[t] = nd(eng);
    }
    std::deque<double> issued_a, issued_b;
    double diff = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < T; ++t) {
        if (t >= 2) {
            const std::size_t j = t - 2;
            const std::vector<double> x{innov[t - 1]};
            with_model = acmcp_step(std::move(with_model), {j, 2, scores[j] > issued_a.front(), scores[j]}, x);
            without = acmcp_step(std::move(without), {j, 2, scores[j] > issued_b.front(), scores[j]}, {});
            issued_a.pop_front();
            issued_b.pop_front();
            if (t > 1000) {
                diff += std::abs(with_model.q - without.q);
                ++n;
            }
        }
        issued_a.push_back(with_model.q);
        issued_b.push_back(without.q);
    }
    ASSERT_EQ(with_model.coefficients.size(), 2u);
    EXPECT_LT(std::abs(with_model.coefficients[1]), 0.1);
    EXPECT_LT(diff / static_cast<double>(n), 0.2);
}
