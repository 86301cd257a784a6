#include "airis/harness/output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

namespace airis::harness {

namespace {

class TextFile {
public:
    explicit TextFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    }
    ~TextFile() noexcept(false) {
        out_.flush();
        if (!out_ && std::uncaught_exceptions() == 0) throw IoError("write failure on '" + path_.string() + "'");
    }

    void line(const std::string& s) { out_ << s << '\n'; }
    void raw(const std::string& s) { out_ << s; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string tick_label(double v) { return fmt::format("{:.4g}", v); }

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    TextFile f(path);
    f.line("algorithm,variant,seed,n_elements,p_max_dbm,ar_bits,iterations,p_bs_w,p_irs_w,converged,status");
    for (const ResultRow& r : rows) {
        f.line(fmt::format("{},{},{},{},{},{},{},{},{},{},{}", r.algorithm, r.variant, r.seed, r.n_elements,
                           format_double(r.p_max_dbm), format_double(r.ar_bits), r.iterations,
                           format_double(r.p_bs), format_double(r.p_irs), r.converged ? 1 : 0, r.status));
    }
}

void write_timings_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    TextFile f(path);
    f.line("algorithm,seed,n_elements,p_max_dbm,wall_ms");
    for (const ResultRow& r : rows) {
        f.line(fmt::format("{},{},{},{},{:.3f}", r.algorithm, r.seed, r.n_elements, format_double(r.p_max_dbm),
                           r.wall_ms));
    }
}

void write_traces_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    TextFile f(path);
    f.line("algorithm,variant,seed,n_elements,p_max_dbm,iteration,ar_bits");
    for (const ResultRow& r : rows) {
        for (std::size_t i = 0; i < r.ar_trace.size(); ++i) {
            f.line(fmt::format("{},{},{},{},{},{},{}", r.algorithm, r.variant, r.seed, r.n_elements,
                               format_double(r.p_max_dbm), i, format_double(r.ar_trace[i])));
        }
    }
}

void write_summary_csv(const std::filesystem::path& path, SweepAxis axis, const std::vector<SweepStat>& stats) {
    TextFile f(path);
    f.line(fmt::format("algorithm,variant,{},mean_ar_bits,stderr_ar_bits,count", to_string(axis)));
    for (const SweepStat& s : stats) {
        f.line(fmt::format("{},{},{},{},{},{}", s.algorithm, s.variant, format_double(s.axis_value),
                           format_double(s.mean), format_double(s.stderr_mean), s.count));
    }
}

void write_fit_csv(const std::filesystem::path& curves_path, const std::filesystem::path& summary_path,
                   const FitBetaResult& fit) {
    auto ar = [](double snr) { return std::log2(1.0 + std::max(snr, 0.0)); };
    {
        TextFile f(curves_path);
        f.line("curve,beta,snr,ar_bits");
        for (std::size_t i = 0; i < fit.grid.size(); ++i) {
            f.line(fmt::format("true,{},{},{}", format_double(fit.grid[i]), format_double(fit.snr[i]),
                               format_double(ar(fit.snr[i]))));
        }
        for (const FitCurve& c : fit.fits) {
            const std::string name = fmt::format("fit_J{}_Q{}", c.j_samples, c.q_order);
            for (std::size_t i = 0; i < fit.grid.size(); ++i) {
                f.line(fmt::format("{},{},{},{}", name, format_double(fit.grid[i]), format_double(c.snr[i]),
                                   format_double(ar(c.snr[i]))));
            }
        }
    }
    TextFile f(summary_path);
    f.line("j_samples,q_order,mse,max_abs_err_snr,beta_opt");
    for (const FitCurve& c : fit.fits) {
        f.line(fmt::format("{},{},{},{},{}", c.j_samples, c.q_order, format_double(c.mse),
                           format_double(c.max_abs_err), format_double(c.beta_opt)));
    }
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceCurve>& curves) {
    TextFile f(path);
    f.line("algorithm,variant,n_elements,iteration,mean_ar_bits");
    for (const ConvergenceCurve& c : curves) {
        for (std::size_t i = 0; i < c.mean_ar.size(); ++i) {
            f.line(fmt::format("{},{},{},{},{}", c.algorithm, c.variant, c.n_elements, i,
                               format_double(c.mean_ar[i])));
        }
    }
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    nlohmann::json m;
    m["version"] = AIRIS_VERSION;
    m["config_sha256"] = config_sha256(cfg);
    m["config"] = to_json(cfg);
    TextFile f(path);
    f.line(m.dump(2));
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
    constexpr double kW = 720.0, kH = 480.0;
    constexpr double kLeft = 70.0, kRight = 190.0, kTop = 40.0, kBottom = 55.0;
    const double pw = kW - kLeft - kRight;
    const double ph = kH - kTop - kBottom;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

    static constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    TextFile f(path);
    f.line(fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", kW,
                       kH, kW, kH));
    f.line(R"(<rect width="100%" height="100%" fill="white"/>)");
    f.line(fmt::format(R"(<text x="{}" y="22" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>)",
                       kLeft + pw / 2, xml_escape(title)));
    f.line(fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", kLeft, kTop, pw,
                       ph));
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        f.line(fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#ddd"/>)", sx(xv), kTop,
                           kTop + ph));
        f.line(fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="#ddd"/>)", kLeft, sy(yv),
                           kLeft + pw));
        f.line(fmt::format(
            R"(<text x="{:.2f}" y="{:.2f}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>)",
            sx(xv), kTop + ph + 16, tick_label(xv)));
        f.line(fmt::format(
            R"(<text x="{:.2f}" y="{:.2f}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>)",
            kLeft - 6, sy(yv) + 4, tick_label(yv)));
    }
    f.line(fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>)",
                       kLeft + pw / 2, kH - 14, xml_escape(x_label)));
    f.line(fmt::format(
        R"svg(<text x="16" y="{0}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>)svg",
        kTop + ph / 2, xml_escape(y_label)));

    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        const char* color = kColors[k % kColors.size()];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += fmt::format("{:.2f},{:.2f} ", sx(s.x[i]), sy(s.y[i]));
        }
        f.line(fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.6" points="{}"/>)", color, pts));
        const double ly = kTop + 14 + 18 * static_cast<double>(k);
        f.line(fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", kW - kRight + 12,
                           ly, kW - kRight + 36, ly, color));
        f.line(fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>)",
                           kW - kRight + 42, ly + 4, xml_escape(s.name)));
    }
    f.line("</svg>");
}

}  // namespace airis::harness
