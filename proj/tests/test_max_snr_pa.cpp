#include "airis/baselines.hpp"
#include "airis/channel.hpp"
#include "airis/error.hpp"
#include "airis/max_snr_pa.hpp"
#include "airis/model.hpp"
#include "airis/pa_beta.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace airis;
using namespace airis::max_snr;

namespace {

Scenario standard(int n) {
    Scenario scn;
    scn.n_elements = n;
    return scn;
}

double total_power(const Scenario& scn, const ChannelSet& ch, const PaState& st) {
    return st.beta * scn.p_max + irs_power_pa(scn, ch, st);
}

}  // namespace

TEST_CASE("build_theta_forms") {
    const Scenario scn = standard(8);
    ChannelSet ch = channel::generate(scn, 1);
    oracle::Rng rng(1);
    const CVec v = oracle::unit(oracle::random_cvec(2, rng));

    SUBCASE("f = 0") {
        ChannelSet z = ch;
        z.f.setZero();
        const ThetaForms fm = build_theta_forms(scn, z, 0.5, v);
        CHECK(fm.a.norm() == 0.0);
        CHECK(fm.t.norm() == 0.0);
        CHECK(fm.e.norm() == 0.0);
    }
    SUBCASE("beta = 0") {
        const ThetaForms fm = build_theta_forms(scn, ch, 0.0, v);
        for (int i = 0; i < 8; ++i) CHECK(fm.f(i) == doctest::Approx(scn.sigma2_irs).epsilon(1e-15));
    }
    SUBCASE("quadratic-form SNR equals the direct SNR") {
        for (int t = 0; t < 5; ++t) {
            const CVec theta = oracle::random_cvec(8, rng, 300.0);
            const ThetaForms fm = build_theta_forms(scn, ch, 0.6, v);
            const double want = oracle::snr_pa(scn, 0.6, ch, v, theta);
            CHECK(forms_ratio(fm, theta) == doctest::Approx(want).epsilon(1e-9));
            CHECK(forms_power(fm, theta) ==
                  doctest::Approx(oracle::irs_power_pa(scn, 0.6, ch, v, theta)).epsilon(1e-12));
        }
    }
    SUBCASE("dimension mismatch") { CHECK_THROWS_AS(build_theta_forms(scn, ch, 0.5, CVec::Ones(3)), DimensionError); }
}

TEST_CASE("dinkelbach") {
    oracle::Rng rng(2);
    SUBCASE("no IRS signal: theta = 0 after one iteration") {
        ThetaForms fm;
        const int n = 5;
        fm.a = CVec::Zero(n);
        fm.t = CVec::Zero(n);
        fm.e = RVec::Constant(n, 1e-12);
        fm.f = RVec::Constant(n, 1e-3);
        fm.direct = 0.0;
        fm.budget = 0.5;
        fm.sigma2_user = 1e-13;
        fm.signal_scale = 0.5 / 1e-13;
        const DinkelbachResult r = dinkelbach(fm, oracle::random_cvec(n, rng, 1.0), 1e-6);
        CHECK(r.theta.norm() == 0.0);
        CHECK(r.history.size() == 1);
        CHECK(r.converged);
    }
    SUBCASE("E = 0 ends on the budget boundary") {
        ThetaForms fm;
        const int n = 6;
        fm.a = oracle::random_cvec(n, rng, 1e-6);
        const cd direct = oracle::randn_c(rng) * 1e-5;
        fm.t = std::conj(direct) * fm.a;
        fm.direct = std::norm(direct);
        fm.e = RVec::Zero(n);
        fm.f = RVec::Constant(n, 1e-9) + RVec::Random(n).cwiseAbs() * 1e-9;
        fm.budget = 0.5;
        fm.sigma2_user = 1e-13;
        fm.signal_scale = 0.5 / 1e-13;
        const DinkelbachResult r = dinkelbach(fm, CVec::Zero(n), 1e-6);
        CHECK(r.converged);
        CHECK(std::abs(forms_power(fm, r.theta) - fm.budget) <= 1e-8 * fm.budget);
    }
    SUBCASE("random N = 8: ascent and nondecreasing eta") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Scenario scn = standard(8);
            const ChannelSet ch = channel::generate(scn, seed);
            const PaState init = initial_state(scn, ch);
            const ThetaForms fm = build_theta_forms(scn, ch, init.beta, init.v);
            const DinkelbachResult r = dinkelbach(fm, init.theta, 1e-6);
            CHECK(forms_ratio(fm, r.theta) >= forms_ratio(fm, init.theta));
            for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].eta >= r.history[i - 1].eta);
            CHECK(std::abs(r.history.back().f_of_eta) <= 1e-6);
            CHECK(forms_power(fm, r.theta) <= fm.budget * (1.0 + 1e-9));
            for (const auto& k : r.kkt) CHECK(k.stationarity_residual <= 1e-8);
        }
    }
    SUBCASE("infeasible start") {
        const Scenario scn = standard(8);
        const ChannelSet ch = channel::generate(scn, 3);
        const PaState init = initial_state(scn, ch);
        CHECK_THROWS_AS(dinkelbach_theta(scn, ch, init.beta, init.v, 2.0 * init.theta, 1e-6), DomainError);
    }
}

TEST_CASE("update_v") {
    const Scenario scn = standard(8);
    const ChannelSet ch = channel::generate(scn, 4);
    oracle::Rng rng(4);
    SUBCASE("theta = 0 gives MRT") {
        // one step is limited by the linearized constraint; repeated steps reach MRT
        CVec v = oracle::unit(oracle::random_cvec(2, rng));
        double prev = std::abs(ch.h.dot(v));
        for (int i = 0; i < 200; ++i) {
            const VUpdate u = update_v(scn, ch, 0.5, CVec::Zero(8), v);
            CHECK(u.status == VStatus::Updated);
            v = u.v;
            const double now = std::abs(ch.h.dot(v));
            CHECK(now >= prev * (1.0 - 1e-12));
            prev = now;
        }
        CHECK(prev == doctest::Approx(ch.h.norm()).epsilon(1e-9));
    }
    SUBCASE("MRT is a fixed point") {
        const CVec mrt = ch.h / ch.h.norm();
        const VUpdate u = update_v(scn, ch, 0.5, CVec::Zero(8), mrt);
        CHECK((u.v - mrt).norm() <= 1e-9);
    }
    SUBCASE("SCA ascent on random instances") {
        for (std::uint64_t seed = 10; seed < 20; ++seed) {
            const ChannelSet c = channel::generate(scn, seed);
            const PaState init = initial_state(scn, c);
            const CVec r = combined_channel(c, init.theta);
            const VUpdate u = update_v(scn, c, init.beta, init.theta, init.v);
            CHECK(std::abs(u.v.norm() - 1.0) <= 1e-12);
            CHECK(std::abs(r.dot(u.v)) >= std::abs(r.dot(init.v)) - 1e-8 * std::abs(r.dot(init.v)));
        }
    }
    SUBCASE("budget already spent") {
        const PaState init = initial_state(scn, ch);
        const CVec big = init.theta * std::sqrt(0.6 * scn.p_max / (scn.sigma2_irs * init.theta.squaredNorm()));
        const VUpdate u = update_v(scn, ch, 0.5, big, init.v);
        CHECK(u.status == VStatus::BudgetExhausted);
        CHECK(u.v == init.v);
    }
}

TEST_CASE("initial_state") {
    const Scenario scn = standard(16);
    const ChannelSet ch = channel::generate(scn, 5);
    const PaState st = initial_state(scn, ch);
    CHECK(st.beta == 0.5);
    CHECK((st.v - ch.h / ch.h.norm()).norm() <= 1e-14);
    CHECK(std::abs(st.theta_dir.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(budget_residual_pa(scn, ch, st)) <= 1e-9 * scn.p_max);
    // every cascaded term in phase with the direct path
    const CVec a = cascade_vector(ch, st.v);
    const cd direct = ch.h.dot(st.v);
    for (int n = 0; n < 16; ++n) {
        const cd term = std::conj(st.theta(n)) * a(n);
        CHECK(std::abs(std::arg(term) - std::arg(direct)) <= 1e-9);
    }
}

TEST_CASE("run_max_snr_pa") {
    SUBCASE("N = 0") {
        const Scenario scn = standard(0);
        const ChannelSet ch = channel::generate(scn, 6);
        const SnrPaRun run = run_max_snr_pa(scn, ch, initial_state(scn, ch));
        CHECK(run.trace.converged);
        CHECK(run.trace.iterations.size() <= 3);
        CHECK(run.state.beta == doctest::Approx(1.0));
        const double want = std::log2(1.0 + scn.p_max * ch.h.squaredNorm() / scn.sigma2_user);
        CHECK(run.trace.iterations.back().ar_bits == doctest::Approx(want).epsilon(1e-9));
    }
    SUBCASE("default setup N = 32, 50 seeds") {
        const Scenario scn = standard(32);
        int fast = 0, dominant = 0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const ChannelSet ch = channel::generate(scn, seed);
            const SnrPaRun run = run_max_snr_pa(scn, ch, initial_state(scn, ch));
            const auto& its = run.trace.iterations;
            fast += run.trace.converged && its.size() - 1 <= 20 ? 1 : 0;
            for (std::size_t i = 1; i < its.size(); ++i) CHECK(its[i].ar_bits >= its[i - 1].ar_bits - 1e-6);
            for (const auto& it : its) CHECK(it.p_bs + it.p_irs <= scn.p_max * (1.0 + 1e-9));
            CHECK(total_power(scn, ch, run.state) <= scn.p_max * (1.0 + 1e-9));
            const auto fixed = baselines::run_fixed_beta(scn, ch, 0.5);
            dominant += its.back().ar_bits >= fixed.trace.iterations.back().ar_bits ? 1 : 0;
        }
        CHECK(fast >= 45);
        CHECK(dominant >= 45);
    }
    SUBCASE("infeasible init") {
        const Scenario scn = standard(8);
        const ChannelSet ch = channel::generate(scn, 7);
        PaState bad = initial_state(scn, ch);
        bad.theta *= 3.0;
        CHECK_THROWS_AS(run_max_snr_pa(scn, ch, bad), DomainError);
    }
}
