#include "airis/channel.hpp"
#include "airis/philox.hpp"
#include "airis/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace airis;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("airis_test_" + name);
}

}  // namespace

TEST_CASE("Philox4x64-10 known answers") {
    using P = Philox4x64;
    CHECK(P::block({0, 0, 0, 0}, {0, 0}) ==
          P::Counter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
    CHECK(P::block({~0ULL, ~0ULL, ~0ULL, ~0ULL}, {~0ULL, ~0ULL}) ==
          P::Counter{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL});
    CHECK(P::block({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                   {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}) ==
          P::Counter{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});
}

TEST_CASE("path_gain") {
    CHECK(channel::path_gain(1.0, 3.7, -30.0) == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(channel::path_gain(25.0, 4.0, -30.0) == doctest::Approx(2.56e-9).epsilon(1e-12));
    CHECK(channel::path_gain(10.0, 2.0, -30.0) == doctest::Approx(1e-5).epsilon(1e-12));
    CHECK_THROWS_AS(channel::path_gain(0.0, 2.0, -30.0), DomainError);
    CHECK_THROWS_AS(channel::path_gain(-1.0, 2.0, -30.0), DomainError);
}

TEST_CASE("default geometry distances") {
    const Scenario scn;
    CHECK(scn.dist_bs_irs() == doctest::Approx(std::sqrt(3500.0)));
    CHECK(scn.dist_bs_irs() == doctest::Approx(59.161).epsilon(1e-5));
    CHECK(scn.dist_irs_user() == doctest::Approx(std::sqrt(1625.0)));
    CHECK(scn.dist_irs_user() == doctest::Approx(40.311).epsilon(1e-5));
    CHECK(scn.dist_bs_user() == doctest::Approx(25.0));
}

TEST_CASE("generate") {
    Scenario scn;
    scn.n_elements = 16;

    SUBCASE("deterministic") {
        const ChannelSet a = channel::generate(scn, 42);
        const ChannelSet b = channel::generate(scn, 42);
        CHECK(a.g == b.g);
        CHECK(a.f == b.f);
        CHECK(a.h == b.h);
        const ChannelSet c = channel::generate(scn, 43);
        CHECK(a.h != c.h);
    }
    SUBCASE("direct link does not depend on N; f is nested") {
        Scenario big = scn;
        big.n_elements = 64;
        const ChannelSet a = channel::generate(scn, 9);
        const ChannelSet b = channel::generate(big, 9);
        CHECK(a.h == b.h);
        CHECK(a.f == b.f.head(16));
    }
    SUBCASE("second moment of the direct link") {
        Scenario one = scn;
        one.m_antennas = 1;
        one.n_elements = 1;
        double sum = 0.0;
        const int samples = 10000;
        for (int s = 0; s < samples; ++s) sum += std::norm(channel::generate(one, 1000 + s).h(0));
        const double expect = channel::path_gain(25.0, one.alpha_bu, one.pl0_db);
        CHECK(std::abs(sum / samples / expect - 1.0) <= 0.05);
    }
    SUBCASE("shapes") {
        const ChannelSet ch = channel::generate(scn, 1);
        CHECK(ch.g.rows() == 16);
        CHECK(ch.g.cols() == 2);
        CHECK(ch.f.size() == 16);
        CHECK(ch.h.size() == 2);
        CHECK_NOTHROW(ch.check(scn));
    }
}

TEST_CASE("save and load") {
    Scenario scn;
    scn.n_elements = 8;
    const ChannelSet ch = channel::generate(scn, 5);
    const auto path = temp_file("roundtrip.bin");
    channel::save(ch, scn, 5, path);

    SUBCASE("bitwise round trip") {
        const ChannelSet back = channel::load(path, scn);
        CHECK(back.g == ch.g);
        CHECK(back.f == ch.f);
        CHECK(back.h == ch.h);
        const channel::FileHeader hdr = channel::read_header(path);
        CHECK(hdr.n_elements == 8);
        CHECK(hdr.m_antennas == 2);
        CHECK(hdr.seed == 5);
    }
    SUBCASE("wrong N") {
        Scenario other = scn;
        other.n_elements = 9;
        CHECK_THROWS_AS(channel::load(path, other), DimensionError);
    }
    SUBCASE("different geometry") {
        Scenario other = scn;
        other.alpha_bu = 3.0;
        CHECK_THROWS_AS(channel::load(path, other), IoError);
    }
    SUBCASE("power settings do not change the digest") {
        Scenario other = scn;
        other.p_max = 10.0;
        CHECK_NOTHROW(channel::load(path, other));
    }
    SUBCASE("truncated payload") {
        const auto bad = temp_file("truncated.bin");
        std::filesystem::copy_file(path, bad, std::filesystem::copy_options::overwrite_existing);
        std::filesystem::resize_file(bad, std::filesystem::file_size(path) - 5);
        CHECK_THROWS_AS(channel::load(bad, scn), CorruptFileError);
        std::filesystem::remove(bad);
    }
    SUBCASE("bad magic") {
        const auto bad = temp_file("magic.bin");
        std::filesystem::copy_file(path, bad, std::filesystem::copy_options::overwrite_existing);
        {
            std::fstream f(bad, std::ios::binary | std::ios::in | std::ios::out);
            f.seekp(0);
            f.put('X');
        }
        CHECK_THROWS_AS(channel::load(bad, scn), CorruptFileError);
        std::filesystem::remove(bad);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(channel::load(temp_file("does_not_exist.bin"), scn), IoError);
    }
    std::filesystem::remove(path);
}
