#include "airis/baselines.hpp"
#include "airis/channel.hpp"
#include "airis/max_snr_pa.hpp"
#include "airis/model.hpp"

#include <doctest.h>

using namespace airis;
using namespace airis::baselines;

namespace {

Scenario standard(int n, double alpha_bu = 4.0) {
    Scenario scn;
    scn.n_elements = n;
    scn.alpha_bu = alpha_bu;
    return scn;
}

ChannelSet direct_only(const Scenario& scn, std::uint64_t seed) {
    ChannelSet ch = channel::generate(scn, seed);
    ch.g.setZero();
    ch.f.setZero();
    return ch;
}

}  // namespace

TEST_CASE("run_fixed_beta") {
    SUBCASE("pinned beta stays pinned and the rate never drops") {
        const Scenario scn = standard(32);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const ChannelSet ch = channel::generate(scn, seed);
            const auto pa = max_snr::run_max_snr_pa(scn, ch, max_snr::initial_state(scn, ch));
            const double beta_star = pa.state.beta;
            if (!(beta_star > 0.0 && beta_star < 1.0)) continue;
            const auto fixed = run_fixed_beta(scn, ch, beta_star);
            for (const auto& it : fixed.trace.iterations) CHECK(it.beta == beta_star);
            const auto& its = fixed.trace.iterations;
            for (std::size_t i = 1; i < its.size(); ++i) CHECK(its[i].ar_bits >= its[i - 1].ar_bits - 1e-9);
        }
    }
    SUBCASE("beta = 0.99 without an IRS path") {
        const Scenario scn = standard(8);
        const ChannelSet ch = direct_only(scn, 2);
        const auto run = run_fixed_beta(scn, ch, 0.99);
        const double want = std::log2(1.0 + 0.99 * scn.p_max * ch.h.squaredNorm() / scn.sigma2_user);
        CHECK(run.trace.iterations.back().ar_bits == doctest::Approx(want).epsilon(1e-9));
    }
    SUBCASE("beta = 0.5 is below Max-SNR-PA on average") {
        const Scenario scn = standard(128);
        double fixed = 0.0, pa = 0.0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const ChannelSet ch = channel::generate(scn, seed);
            fixed += run_fixed_beta(scn, ch, 0.5).trace.iterations.back().ar_bits;
            pa += max_snr::run_max_snr_pa(scn, ch, max_snr::initial_state(scn, ch)).trace.iterations.back().ar_bits;
        }
        CHECK(fixed < pa);
    }
    SUBCASE("beta must be inside (0, 1)") {
        const Scenario scn = standard(8);
        const ChannelSet ch = channel::generate(scn, 3);
        CHECK_THROWS(run_fixed_beta(scn, ch, 0.0));
        CHECK_THROWS(run_fixed_beta(scn, ch, 1.0));
    }
}

TEST_CASE("run_passive_irs") {
    SUBCASE("single real element adds coherently") {
        Scenario scn = standard(1);
        scn.m_antennas = 1;
        ChannelSet ch;
        ch.g = CMat::Constant(1, 1, 0.5e-3);
        ch.f = CVec::Constant(1, 0.3e-3);
        ch.h = CVec::Constant(1, 0.2e-6);
        const BaselineRun run = run_passive_irs(scn, ch);
        CHECK(std::abs(run.state.theta(0) - cd(1.0)) <= 1e-15);
        const double gain = 0.5e-3 * 0.3e-3 + 0.2e-6;
        CHECK(run.snr == doctest::Approx(scn.p_max * gain * gain / scn.sigma2_user).epsilon(1e-12));
    }
    SUBCASE("unit moduli and monotone rounds") {
        const Scenario scn = standard(64);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const ChannelSet ch = channel::generate(scn, seed);
            const BaselineRun run = run_passive_irs(scn, ch, 4);
            for (int n = 0; n < 64; ++n) CHECK(std::abs(std::abs(run.state.theta(n)) - 1.0) <= 1e-15);
            for (std::size_t i = 1; i < run.ar_trace.size(); ++i) CHECK(run.ar_trace[i] >= run.ar_trace[i - 1]);
            CHECK(run.p_bs == scn.p_max);
            CHECK(run.p_irs == 0.0);
        }
    }
}

TEST_CASE("run_random_phase") {
    const Scenario scn = standard(128);
    const ChannelSet ch = channel::generate(scn, 4);
    CHECK(run_random_phase(scn, ch, 4).ar_bits == run_random_phase(scn, ch, 4).ar_bits);

    double random = 0.0, pa = 0.0, none = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const ChannelSet c = channel::generate(scn, seed);
        const BaselineRun r = run_random_phase(scn, c, seed);
        CHECK(std::abs(r.state.theta_dir.norm() - 1.0) <= 1e-12);
        CHECK(r.p_bs + r.p_irs <= scn.p_max * (1.0 + 1e-9));
        random += r.ar_bits;
        pa += max_snr::run_max_snr_pa(scn, c, max_snr::initial_state(scn, c)).trace.iterations.back().ar_bits;
        none += run_no_irs(scn, c).ar_bits;
    }
    CHECK(random <= pa);
    CHECK(random >= none);
}

TEST_CASE("run_no_irs") {
    const Scenario scn = standard(8);
    ChannelSet ch = channel::generate(scn, 5);
    SUBCASE("closed form") {
        const BaselineRun r = run_no_irs(scn, ch);
        CHECK(r.ar_bits == doctest::Approx(std::log2(1.0 + scn.p_max * ch.h.squaredNorm() / scn.sigma2_user)));
    }
    SUBCASE("h = 0") {
        ch.h.setZero();
        CHECK(run_no_irs(scn, ch).ar_bits == 0.0);
    }
    SUBCASE("one bit") {
        ch.h = CVec::Zero(2);
        ch.h(0) = std::sqrt(scn.sigma2_user / scn.p_max);
        CHECK(run_no_irs(scn, ch).ar_bits == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("Max-SNR-PA without an IRS path") {
        const ChannelSet d = direct_only(scn, 6);
        const auto pa = max_snr::run_max_snr_pa(scn, d, max_snr::initial_state(scn, d));
        CHECK(std::abs(pa.trace.iterations.back().ar_bits - run_no_irs(scn, d).ar_bits) <= 1e-6);
    }
}
