#include "spinkin/diagnostics.hpp"

#include "spinkin/spectral.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spinkin::diagnostics {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

FrequencyFit inconclusive(std::string reason, double ratio = nan, double periods = nan) {
    FrequencyFit f;
    f.reason = std::move(reason);
    f.omega = f.gamma = f.omega_uncertainty = f.gamma_uncertainty = nan;
    f.peak_ratio = ratio;
    f.periods = periods;
    return f;
}

struct Data {
    const std::vector<double>* t;
    const std::vector<double>* y;
};

// p = (a, b, omega, gamma, c)
int model_f(const gsl_vector* p, void* data, gsl_vector* r) {
    const auto& d = *static_cast<Data*>(data);
    const double a = gsl_vector_get(p, 0), b = gsl_vector_get(p, 1), w = gsl_vector_get(p, 2),
                 g = gsl_vector_get(p, 3), c = gsl_vector_get(p, 4);
    for (std::size_t i = 0; i < d.t->size(); ++i) {
        const double t = (*d.t)[i];
        const double e = std::exp(-g * t);
        gsl_vector_set(r, i, e * (a * std::cos(w * t) + b * std::sin(w * t)) + c - (*d.y)[i]);
    }
    return GSL_SUCCESS;
}

int model_df(const gsl_vector* p, void* data, gsl_matrix* J) {
    const auto& d = *static_cast<Data*>(data);
    const double a = gsl_vector_get(p, 0), b = gsl_vector_get(p, 1), w = gsl_vector_get(p, 2),
                 g = gsl_vector_get(p, 3);
    for (std::size_t i = 0; i < d.t->size(); ++i) {
        const double t = (*d.t)[i];
        const double e = std::exp(-g * t), cs = std::cos(w * t), sn = std::sin(w * t);
        gsl_matrix_set(J, i, 0, e * cs);
        gsl_matrix_set(J, i, 1, e * sn);
        gsl_matrix_set(J, i, 2, e * t * (-a * sn + b * cs));
        gsl_matrix_set(J, i, 3, -t * e * (a * cs + b * sn));
        gsl_matrix_set(J, i, 4, 1.0);
    }
    return GSL_SUCCESS;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

FrequencyFit fit_frequency(const std::vector<double>& t_in, const std::vector<double>& y) {
    const std::size_t n = t_in.size();
    if (n != y.size()) throw InvalidArgument("fit_frequency: time and value lengths differ");
    if (n < 16) return inconclusive("too few samples");
    const double dt = (t_in.back() - t_in.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(t_in[i] - t_in[i - 1] - dt) > 1e-6 * dt)
            throw InvalidArgument("fit_frequency: samples must be uniformly spaced");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t_in[i] - t_in.front();
    const double duration = t.back();

    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double spread = 0.0;
    for (double v : y) spread = std::max(spread, std::abs(v - mean));
    if (!(spread > 1e-14 * std::max(1.0, std::abs(mean)))) return inconclusive("constant series");

    const std::size_t m = next_pow2(16 * n);
    std::vector<cplx> buf(m, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) / static_cast<double>(n - 1));
        buf[i] = (y[i] - mean) * w;
    }
    const auto spec = spectral::fft(buf);
    std::vector<double> power(m / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(spec[k]);
    std::size_t peak = 1;
    for (std::size_t k = 1; k < power.size(); ++k)
        if (power[k] > power[peak]) peak = k;
    std::vector<double> sorted(power.begin() + 1, power.end());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double ratio = median > 0 ? power[peak] / median : std::numeric_limits<double>::infinity();

    double shift = 0.0;
    if (peak > 0 && peak + 1 < power.size()) {
        const double l = std::log(power[peak - 1] + 1e-300), c = std::log(power[peak]), r = std::log(power[peak + 1] + 1e-300);
        const double den = l - 2.0 * c + r;
        if (den < 0) shift = 0.5 * (l - r) / den;
    }
    const double omega0 = two_pi * (static_cast<double>(peak) + shift) / (static_cast<double>(m) * dt);
    const double periods = omega0 * duration / two_pi;
    if (ratio < 10.0) return inconclusive("no dominant spectral peak", ratio, periods);
    if (periods < 8.0) return inconclusive("fewer than 8 periods", ratio, periods);

    // Log-envelope: RMS over whole periods, regressed against window centre.
    const double period = two_pi / omega0;
    const auto per = std::max<std::size_t>(2, static_cast<std::size_t>(std::round(period / dt)));
    std::vector<double> tc, le;
    for (std::size_t s = 0; s + per <= n; s += per) {
        double acc = 0.0;
        for (std::size_t i = s; i < s + per; ++i) acc += (y[i] - mean) * (y[i] - mean);
        const double rms = std::sqrt(acc / static_cast<double>(per));
        if (rms > 0) {
            tc.push_back(0.5 * (t[s] + t[s + per - 1]));
            le.push_back(std::log(rms));
        }
    }
    double gamma0 = 0.0;
    if (tc.size() >= 2) {
        const double mt = std::accumulate(tc.begin(), tc.end(), 0.0) / static_cast<double>(tc.size());
        const double ml = std::accumulate(le.begin(), le.end(), 0.0) / static_cast<double>(le.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < tc.size(); ++i) {
            sxy += (tc[i] - mt) * (le[i] - ml);
            sxx += (tc[i] - mt) * (tc[i] - mt);
        }
        gamma0 = -sxy / sxx;
    }

    // Linear amplitudes for the seeded (omega, gamma) by projection.
    double a0 = 0.0, b0 = 0.0;
    {
        double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::exp(-gamma0 * t[i]);
            const double c = e * std::cos(omega0 * t[i]), s = e * std::sin(omega0 * t[i]);
            cc += c * c, ss += s * s, cs += c * s, yc += (y[i] - mean) * c, ys += (y[i] - mean) * s;
        }
        const double det = cc * ss - cs * cs;
        if (det > 0) {
            a0 = (yc * ss - ys * cs) / det;
            b0 = (ys * cc - yc * cs) / det;
        }
    }

    gsl_set_error_handler_off();
    Data data{&t, &y};
    gsl_multifit_nlinear_fdf fdf;
    fdf.f = model_f;
    fdf.df = model_df;
    fdf.fvv = nullptr;
    fdf.n = n;
    fdf.p = 5;
    fdf.params = &data;
    auto fparams = gsl_multifit_nlinear_default_parameters();
    auto* work = gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fparams, n, 5);
    gsl_vector* p = gsl_vector_alloc(5);
    gsl_vector_set(p, 0, a0);
    gsl_vector_set(p, 1, b0);
    gsl_vector_set(p, 2, omega0);
    gsl_vector_set(p, 3, gamma0);
    gsl_vector_set(p, 4, mean);
    gsl_multifit_nlinear_init(p, &fdf, work);
    int info = 0;
    const int status = gsl_multifit_nlinear_driver(200, 1e-14, 1e-14, 1e-14, nullptr, nullptr, &info, work);

    gsl_matrix* cov = gsl_matrix_alloc(5, 5);
    gsl_multifit_nlinear_covar(gsl_multifit_nlinear_jac(work), 0.0, cov);
    double chisq = 0.0;
    gsl_blas_ddot(gsl_multifit_nlinear_residual(work), gsl_multifit_nlinear_residual(work), &chisq);
    const double sigma2 = chisq / static_cast<double>(n - 5);
    double total = 0.0;
    for (double v : y) total += (v - mean) * (v - mean);
    const double explained = 1.0 - chisq / total;

    FrequencyFit out;
    const gsl_vector* x = gsl_multifit_nlinear_position(work);
    out.omega = std::abs(gsl_vector_get(x, 2));
    out.gamma = gsl_vector_get(x, 3);
    out.omega_uncertainty = std::sqrt(std::max(0.0, sigma2 * gsl_matrix_get(cov, 2, 2)));
    out.gamma_uncertainty = std::sqrt(std::max(0.0, sigma2 * gsl_matrix_get(cov, 3, 3)));
    out.peak_ratio = ratio;
    out.periods = out.omega * duration / two_pi;
    out.conclusive = true;
    gsl_matrix_free(cov);
    gsl_vector_free(p);
    gsl_multifit_nlinear_free(work);

    if ((status != GSL_SUCCESS && status != GSL_EMAXITER) || !std::isfinite(out.omega) || std::abs(out.omega - omega0) > 0.5 * two_pi / duration * 4)
        return inconclusive("phase fit did not converge", ratio, periods);
    if (explained < 0.5) return inconclusive("fit explains less than half the variance", ratio, periods);
    return out;
}

FrequencyFit fit_frequency(const io::DiagnosticsSeries& series, const std::string& column) {
    return fit_frequency(series.time(), series.column(column));
}

double relative_drift(const std::vector<double>& y) {
    if (y.empty()) return 0.0;
    double d = 0.0;
    for (double v : y) d = std::max(d, std::abs(v - y.front()));
    return y.front() != 0.0 ? d / std::abs(y.front()) : d;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need two or more matching points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw InvalidArgument("loglog_slope: values must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace spinkin::diagnostics
