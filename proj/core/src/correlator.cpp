#include "pairtime/correlator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "pairtime/errors.hpp"

namespace pairtime {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;

double gauss_const(double x, const std::array<double, 4>& p) {
    const double z = (x - p[1]) / p[2];
    return p[0] * std::exp(-0.5 * z * z) + p[3];
}

// Solves m * x = rhs for a 4x4 system in place; returns false when singular.
bool solve4(std::array<std::array<double, 4>, 4>& m, std::array<double, 4>& rhs,
            std::array<double, 4>& x) {
    std::array<int, 4> idx = {0, 1, 2, 3};
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(m[idx[r]][col]) > std::fabs(m[idx[piv]][col])) piv = r;
        std::swap(idx[col], idx[piv]);
        const double d = m[idx[col]][col];
        if (std::fabs(d) < 1e-300) return false;
        for (int r = col + 1; r < 4; ++r) {
            const double f = m[idx[r]][col] / d;
            for (int c = col; c < 4; ++c) m[idx[r]][c] -= f * m[idx[col]][c];
            rhs[idx[r]] -= f * rhs[idx[col]];
        }
    }
    for (int col = 3; col >= 0; --col) {
        double s = rhs[idx[col]];
        for (int c = col + 1; c < 4; ++c) s -= m[idx[col]][c] * x[c];
        x[col] = s / m[idx[col]][col];
    }
    return true;
}

bool invert4(const std::array<std::array<double, 4>, 4>& a,
             std::array<std::array<double, 4>, 4>& inv) {
    for (int col = 0; col < 4; ++col) {
        auto m = a;
        std::array<double, 4> e{}, x{};
        e[col] = 1.0;
        if (!solve4(m, e, x)) return false;
        for (int r = 0; r < 4; ++r) inv[r][col] = x[r];
    }
    return true;
}

struct FitData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;
};

double chi2(const FitData& d, const std::array<double, 4>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double r = d.y[i] - gauss_const(d.x[i], p);
        s += d.w[i] * r * r;
    }
    return s;
}

void normal_equations(const FitData& d, const std::array<double, 4>& p,
                      std::array<std::array<double, 4>, 4>& jtj,
                      std::array<double, 4>& jtr) {
    for (auto& row : jtj) row.fill(0.0);
    jtr.fill(0.0);
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double z = (d.x[i] - p[1]) / p[2];
        const double e = std::exp(-0.5 * z * z);
        const std::array<double, 4> g = {e, p[0] * e * z / p[2],
                                         p[0] * e * z * z / p[2], 1.0};
        const double r = d.y[i] - gauss_const(d.x[i], p);
        for (int a = 0; a < 4; ++a) {
            jtr[a] += d.w[i] * g[a] * r;
            for (int b = 0; b < 4; ++b) jtj[a][b] += d.w[i] * g[a] * g[b];
        }
    }
}

// Levenberg-Marquardt on the Gaussian-plus-constant model. Returns true on
// convergence, filling p and the parameter covariance scaled by the reduced
// chi-square.
bool lm_fit(const FitData& d, std::array<double, 4>& p,
            std::array<std::array<double, 4>, 4>& cov, double& red_chi2) {
    double lambda = 1e-3;
    double c2 = chi2(d, p);
    bool converged = false;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        std::array<std::array<double, 4>, 4> jtj;
        std::array<double, 4> jtr;
        normal_equations(d, p, jtj, jtr);
        bool stepped = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            auto damped = jtj;
            for (int a = 0; a < 4; ++a)
                damped[a][a] += lambda * std::max(jtj[a][a], 1e-12);
            auto rhs = jtr;
            std::array<double, 4> delta{};
            if (!solve4(damped, rhs, delta)) {
                lambda *= 10.0;
                continue;
            }
            std::array<double, 4> trial = {p[0] + delta[0], p[1] + delta[1],
                                           p[2] + delta[2], p[3] + delta[3]};
            if (trial[2] == 0.0 || !std::isfinite(trial[2])) {
                lambda *= 10.0;
                continue;
            }
            const double t2 = chi2(d, trial);
            if (std::isfinite(t2) && t2 <= c2) {
                const double drop = c2 - t2;
                p = trial;
                if (drop <= 1e-10 * std::max(c2, 1e-30)) converged = true;
                c2 = t2;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
    }
    if (!converged) return false;

    std::array<std::array<double, 4>, 4> jtj;
    std::array<double, 4> jtr;
    normal_equations(d, p, jtj, jtr);
    if (!invert4(jtj, cov)) return false;
    const double dof = static_cast<double>(d.x.size()) - 4.0;
    red_chi2 = dof > 0.0 ? c2 / dof : 0.0;
    const double scale = dof > 0.0 ? std::max(red_chi2, 0.0) : 1.0;
    for (auto& row : cov)
        for (auto& v : row) v *= scale;
    return true;
}

// Interpolated half-maximum crossings around the peak bin. Returns false
// when either side never drops below the half level inside the histogram.
bool half_max_width(const CorrelationHistogram& hist, std::size_t k_peak,
                    double background, double& fwhm, double& center) {
    const double peak = static_cast<double>(hist.counts[k_peak]);
    const double level = background + 0.5 * (peak - background);
    const auto n = hist.counts.size();

    double right = 0.0, left = 0.0;
    bool have_right = false, have_left = false;
    for (std::size_t k = k_peak; k + 1 < n; ++k) {
        const double y0 = static_cast<double>(hist.counts[k]);
        const double y1 = static_cast<double>(hist.counts[k + 1]);
        if (y0 >= level && y1 < level) {
            const double f = (y0 - level) / (y0 - y1);
            right = hist.bin_center_ps(k) + f * hist.bin_width_ps;
            have_right = true;
            break;
        }
    }
    for (std::size_t k = k_peak; k > 0; --k) {
        const double y0 = static_cast<double>(hist.counts[k]);
        const double y1 = static_cast<double>(hist.counts[k - 1]);
        if (y0 >= level && y1 < level) {
            const double f = (y0 - level) / (y0 - y1);
            left = hist.bin_center_ps(k) - f * hist.bin_width_ps;
            have_left = true;
            break;
        }
    }
    if (!have_left || !have_right || !(right > left)) return false;
    fwhm = right - left;
    center = 0.5 * (left + right);
    return true;
}

}  // namespace

uint64_t CorrelationHistogram::total() const {
    uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

CorrelationHistogram cross_correlate(const TimestampStream& a,
                                     const TimestampStream& b,
                                     double bin_width_ps, double tau_min_ps,
                                     double tau_max_ps) {
    if (!(bin_width_ps > 0.0)) throw ConfigError("bin_width_ps must be positive");
    if (!(tau_min_ps < tau_max_ps)) throw ConfigError("tau window must be non-empty");
    if (a.resolution_ps != b.resolution_ps)
        throw ConfigError("streams use different resolutions; rescale first");

    CorrelationHistogram hist;
    hist.bin_width_ps = bin_width_ps;
    hist.tau_start_ps = tau_min_ps;
    const auto n_bins = static_cast<std::size_t>(
        std::ceil((tau_max_ps - tau_min_ps) / bin_width_ps));
    hist.counts.assign(std::max<std::size_t>(n_bins, 1), 0);
    const double tau_end_ps =
        tau_min_ps + static_cast<double>(hist.counts.size()) * bin_width_ps;

    const double res = a.resolution_ps;
    const std::size_t na = a.ticks.size();
    std::size_t lo = 0, hi = 0;
    for (std::size_t j = 0; j < b.ticks.size(); ++j) {
        const double tb = static_cast<double>(b.ticks[j]) * res;
        // keep t_a in (tb - tau_end, tb - tau_min], i.e. tau in [tau_min, tau_end)
        while (lo < na && static_cast<double>(a.ticks[lo]) * res <= tb - tau_end_ps)
            ++lo;
        if (hi < lo) hi = lo;
        while (hi < na && static_cast<double>(a.ticks[hi]) * res <= tb - tau_min_ps)
            ++hi;
        for (std::size_t i = lo; i < hi; ++i) {
            const double tau = tb - static_cast<double>(a.ticks[i]) * res;
            const auto k =
                static_cast<std::size_t>((tau - tau_min_ps) / bin_width_ps);
            if (k < hist.counts.size()) ++hist.counts[k];
        }
    }
    return hist;
}

double find_peak_ps(const CorrelationHistogram& hist) {
    if (hist.counts.empty()) throw FitError("empty histogram");
    std::size_t best = 0;
    uint64_t best_count = 0;
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        if (hist.counts[k] > best_count) {
            best_count = hist.counts[k];
            best = k;
        }
    }
    if (best_count == 0) throw FitError("histogram has no counts");
    return hist.bin_center_ps(best);
}

PeakFit fit_fwhm(const CorrelationHistogram& hist) {
    const double mu0 = find_peak_ps(hist);
    const auto n = hist.counts.size();
    std::size_t k_peak = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (hist.bin_center_ps(k) == mu0) {
            k_peak = k;
            break;
        }

    std::vector<uint64_t> sorted_counts(hist.counts);
    std::sort(sorted_counts.begin(), sorted_counts.end());
    const double bg0 = static_cast<double>(sorted_counts[n / 2]);
    const double peak = static_cast<double>(hist.counts[k_peak]);
    const double amp0 = peak - bg0;

    double fwhm0 = 2.0 * hist.bin_width_ps;
    double hm_center = mu0;
    const bool have_hm = half_max_width(hist, k_peak, bg0, fwhm0, hm_center);

    const double half_window =
        5.0 * std::max(fwhm0, 2.0 * hist.bin_width_ps);
    FitData data;
    std::size_t usable = 0;
    const double threshold = bg0 + std::max(3.0 * std::sqrt(std::max(bg0, 0.0)), 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = hist.bin_center_ps(k);
        if (std::fabs(x - mu0) > half_window) continue;
        const double y = static_cast<double>(hist.counts[k]);
        data.x.push_back(x);
        data.y.push_back(y);
        data.w.push_back(1.0 / std::max(y, 1.0));
        if (y > threshold) ++usable;
    }
    if (usable < 5)
        throw FitError("peak fit needs at least 5 bins above background");

    std::array<double, 4> p = {std::max(amp0, 1.0), mu0,
                               std::max(fwhm0 / kFwhmPerSigma, 0.25 * hist.bin_width_ps),
                               bg0};
    std::array<std::array<double, 4>, 4> cov{};
    double red_chi2 = 0.0;
    const double span_lo = hist.tau_start_ps;
    const double span_hi =
        hist.tau_start_ps + static_cast<double>(n) * hist.bin_width_ps;

    if (data.x.size() >= 5 && lm_fit(data, p, cov, red_chi2)) {
        const double sigma = std::fabs(p[2]);
        const double fwhm = kFwhmPerSigma * sigma;
        const bool valid = std::isfinite(fwhm) && fwhm > 0.0 && p[0] > 0.0 &&
                           p[1] >= span_lo && p[1] <= span_hi &&
                           std::isfinite(red_chi2);
        if (valid) {
            PeakFit fit;
            fit.center_ps = p[1];
            fit.fwhm_ps = fwhm;
            fit.fwhm_stderr_ps =
                kFwhmPerSigma * std::sqrt(std::max(cov[2][2], 0.0));
            fit.amplitude = p[0];
            fit.background_per_bin = p[3];
            fit.goodness = red_chi2;
            return fit;
        }
    }

    if (!have_hm)
        throw FitError("peak fit failed and no half-maximum crossings exist");
    PeakFit fit;
    fit.center_ps = hm_center;
    fit.fwhm_ps = fwhm0;
    fit.fwhm_stderr_ps = 0.5 * hist.bin_width_ps;
    fit.amplitude = amp0;
    fit.background_per_bin = bg0;
    fit.goodness = -1.0;
    return fit;
}

EventPairing pair_events(const TimestampStream& a, const TimestampStream& b,
                         double tau_peak_ps, double window_ps) {
    if (!(window_ps > 0.0)) throw ConfigError("window_ps must be positive");
    if (a.resolution_ps != b.resolution_ps)
        throw ConfigError("streams use different resolutions; rescale first");

    const double res = a.resolution_ps;
    auto greedy_count = [&](double center, EventPairing* out) {
        const double lo_off = center - 0.5 * window_ps;
        const double hi_off = center + 0.5 * window_ps;
        std::size_t matched = 0, j = 0;
        for (std::size_t i = 0; i < a.ticks.size() && j < b.ticks.size(); ++i) {
            const double ta = static_cast<double>(a.ticks[i]) * res;
            while (j < b.ticks.size() &&
                   static_cast<double>(b.ticks[j]) * res < ta + lo_off)
                ++j;
            if (j >= b.ticks.size()) break;
            if (static_cast<double>(b.ticks[j]) * res <= ta + hi_off) {
                if (out) out->pairs.emplace_back(i, j);
                ++matched;
                ++j;
            }
        }
        return matched;
    };

    EventPairing result;
    greedy_count(tau_peak_ps, &result);
    result.accidental_estimate = static_cast<double>(
        greedy_count(tau_peak_ps + 10.0 * window_ps, nullptr));
    return result;
}

void write_histogram_csv(const std::filesystem::path& path,
                         const CorrelationHistogram& hist) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << histogram_csv(hist);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string histogram_csv(const CorrelationHistogram& hist) {
    std::string s = "tau_ps,count\n";
    char buf[64];
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.3f,%llu\n", hist.bin_center_ps(k),
                      static_cast<unsigned long long>(hist.counts[k]));
        s += buf;
    }
    return s;
}

std::string peak_fit_text(const PeakFit& fit) {
    char buf[256];
    std::string s;
    const auto add = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.6f\n", key, v);
        s += buf;
    };
    add("center_ps", fit.center_ps);
    add("fwhm_ps", fit.fwhm_ps);
    add("fwhm_stderr_ps", fit.fwhm_stderr_ps);
    add("amplitude", fit.amplitude);
    add("background", fit.background_per_bin);
    add("goodness", fit.goodness);
    return s;
}

}  // namespace pairtime
