#include "airis/channel.hpp"

#include "airis/error.hpp"
#include "airis/philox.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

namespace airis::channel {

namespace {

class ByteWriter {
public:
    void u32(std::uint32_t x) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    }
    void u64(std::uint64_t x) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    }
    void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
    void raw(const std::uint8_t* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return x;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t x = 0;
        for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return x;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void raw(std::uint8_t* out, std::size_t n) {
        need(n);
        std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), n, out);
        pos_ += n;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CorruptFileError("channel file truncated");
    }

    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open channel file '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return bytes;
}

FileHeader parse_header(ByteReader& rd) {
    std::array<std::uint8_t, 8> magic{};
    rd.raw(magic.data(), magic.size());
    for (std::size_t i = 0; i < magic.size(); ++i) {
        if (magic[i] != static_cast<std::uint8_t>(kMagic[i])) throw CorruptFileError("channel file: bad magic");
    }
    FileHeader hdr;
    hdr.n_elements = rd.u32();
    hdr.m_antennas = rd.u32();
    hdr.seed = rd.u64();
    rd.raw(hdr.digest.data(), hdr.digest.size());
    return hdr;
}

// Circularly-symmetric complex Gaussian with E|x|^2 = variance.
cd draw_cn(PhiloxStream& rng, double variance) {
    const double u1 = rng.next_open01();
    const double u2 = rng.next_open01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    const double s = std::sqrt(variance / 2.0);
    return {s * r * std::cos(phi), s * r * std::sin(phi)};
}

}  // namespace

double path_gain(double d, double alpha, double pl0_db) {
    if (!(d > 0.0)) throw DomainError("path_gain: distance must be positive");
    return std::pow(10.0, pl0_db / 10.0) * std::pow(d, -alpha);
}

ChannelSet generate(const Scenario& scn, std::uint64_t seed) {
    scn.validate();
    const int n = scn.n_elements;
    const int m = scn.m_antennas;
    const double g_bi = path_gain(scn.dist_bs_irs(), scn.alpha_bi, scn.pl0_db);
    const double g_iu = path_gain(scn.dist_irs_user(), scn.alpha_iu, scn.pl0_db);
    const double g_bu = path_gain(scn.dist_bs_user(), scn.alpha_bu, scn.pl0_db);

    PhiloxStream rng_g({seed, kStreamTag});
    PhiloxStream rng_f({seed, kStreamTag + 1});
    PhiloxStream rng_h({seed, kStreamTag + 2});
    ChannelSet ch;
    ch.g.resize(n, m);
    ch.f.resize(n);
    ch.h.resize(m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) ch.g(r, c) = draw_cn(rng_g, g_bi);
    }
    for (int i = 0; i < n; ++i) ch.f(i) = draw_cn(rng_f, g_iu);
    for (int i = 0; i < m; ++i) ch.h(i) = draw_cn(rng_h, g_bu);
    return ch;
}

Digest scenario_digest(const Scenario& scn) {
    ByteWriter w;
    w.raw(reinterpret_cast<const std::uint8_t*>(kMagic.data()), kMagic.size());
    w.u32(static_cast<std::uint32_t>(scn.n_elements));
    w.u32(static_cast<std::uint32_t>(scn.m_antennas));
    for (const Point3* p : {&scn.bs_pos, &scn.irs_pos, &scn.user_pos}) {
        for (int i = 0; i < 3; ++i) w.f64((*p)(i));
    }
    w.f64(scn.alpha_bi);
    w.f64(scn.alpha_iu);
    w.f64(scn.alpha_bu);
    w.f64(scn.pl0_db);

    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(w.bytes().data(), w.bytes().size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw Error("scenario_digest: SHA-256 failed");
    }
    return out;
}

void save(const ChannelSet& ch, const Scenario& scn, std::uint64_t seed, const std::filesystem::path& path) {
    ch.check(scn);
    ByteWriter w;
    w.raw(reinterpret_cast<const std::uint8_t*>(kMagic.data()), kMagic.size());
    w.u32(static_cast<std::uint32_t>(scn.n_elements));
    w.u32(static_cast<std::uint32_t>(scn.m_antennas));
    w.u64(seed);
    const Digest dg = scenario_digest(scn);
    w.raw(dg.data(), dg.size());
    auto put = [&w](cd z) {
        w.f64(z.real());
        w.f64(z.imag());
    };
    for (Eigen::Index r = 0; r < ch.g.rows(); ++r) {
        for (Eigen::Index c = 0; c < ch.g.cols(); ++c) put(ch.g(r, c));
    }
    for (Eigen::Index i = 0; i < ch.f.size(); ++i) put(ch.f(i));
    for (Eigen::Index i = 0; i < ch.h.size(); ++i) put(ch.h(i));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

FileHeader read_header(const std::filesystem::path& path) {
    ByteReader rd(read_all(path));
    return parse_header(rd);
}

ChannelSet load(const std::filesystem::path& path, const Scenario& scn) {
    ByteReader rd(read_all(path));
    const FileHeader hdr = parse_header(rd);
    if (static_cast<long>(hdr.n_elements) != scn.n_elements) {
        throw DimensionError("channel file N", scn.n_elements, hdr.n_elements);
    }
    if (static_cast<long>(hdr.m_antennas) != scn.m_antennas) {
        throw DimensionError("channel file M", scn.m_antennas, hdr.m_antennas);
    }
    if (hdr.digest != scenario_digest(scn)) {
        throw IoError("channel file '" + path.string() + "' was generated for a different scenario");
    }
    const std::size_t n = hdr.n_elements;
    const std::size_t m = hdr.m_antennas;
    const std::size_t expected = 16 * (n * m + n + m);
    if (rd.remaining() != expected) {
        throw CorruptFileError("channel file payload has " + std::to_string(rd.remaining()) + " bytes, expected " +
                               std::to_string(expected));
    }
    auto get = [&rd]() {
        const double re = rd.f64();
        const double im = rd.f64();
        return cd{re, im};
    };
    ChannelSet ch;
    ch.g.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    ch.f.resize(static_cast<Eigen::Index>(n));
    ch.h.resize(static_cast<Eigen::Index>(m));
    for (Eigen::Index r = 0; r < ch.g.rows(); ++r) {
        for (Eigen::Index c = 0; c < ch.g.cols(); ++c) ch.g(r, c) = get();
    }
    for (Eigen::Index i = 0; i < ch.f.size(); ++i) ch.f(i) = get();
    for (Eigen::Index i = 0; i < ch.h.size(); ++i) ch.h(i) = get();
    return ch;
}

}  // namespace airis::channel
