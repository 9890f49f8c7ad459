#include "spinkin/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace spinkin::spectral {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
fftw_plan cached_plan(std::size_t n, int sign) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(std::make_pair(n, sign), p);
    return p;
}

std::vector<cplx> transform(std::span<const cplx> in, int sign) {
    std::vector<cplx> src(in.begin(), in.end());
    std::vector<cplx> out(in.size());
    fftw_execute_dft(cached_plan(in.size(), sign),
                     reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<cplx> to_complex(std::span<const double> f) {
    return {f.begin(), f.end()};
}

std::vector<double> real_part(const std::vector<cplx>& z) {
    std::vector<double> r(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i].real();
    return r;
}

}  // namespace

std::vector<cplx> fft(std::span<const cplx> in) { return transform(in, FFTW_FORWARD); }

std::vector<cplx> ifft(std::span<const cplx> in) {
    auto out = transform(in, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (auto& z : out) z *= scale;
    return out;
}

std::vector<double> wavenumbers(const Grid1D& grid) {
    const std::size_t n = grid.n;
    const double dk = two_pi / grid.length;
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<long>(j);
        const auto nn = static_cast<long>(n);
        k[j] = dk * static_cast<double>(2 * jj < nn ? jj : jj - nn);
    }
    return k;
}

std::vector<cplx> derivative(std::span<const cplx> f, const Grid1D& grid, int order) {
    if (f.size() != grid.n) throw InvalidArgument("derivative: size does not match grid");
    auto fk = fft(f);
    const auto k = wavenumbers(grid);
    const bool even_n = grid.n % 2 == 0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        if (even_n && j == grid.n / 2 && order % 2 != 0) {
            fk[j] = 0.0;
            continue;
        }
        fk[j] *= std::pow(cplx(0.0, k[j]), order);
    }
    return ifft(fk);
}

std::vector<double> derivative(std::span<const double> f, const Grid1D& grid, int order) {
    const auto z = to_complex(f);
    return real_part(derivative(std::span<const cplx>(z), grid, order));
}

std::vector<cplx> shifted(std::span<const cplx> f, const Grid1D& grid, double shift) {
    if (f.size() != grid.n) throw InvalidArgument("shifted: size does not match grid");
    auto fk = fft(f);
    const auto k = wavenumbers(grid);
    const bool even_n = grid.n % 2 == 0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        if (even_n && j == grid.n / 2)
            fk[j] *= std::cos(k[j] * shift);  // Nyquist mode read as a cosine
        else
            fk[j] *= std::exp(cplx(0.0, k[j] * shift));
    }
    return ifft(fk);
}

std::vector<double> shifted(std::span<const double> f, const Grid1D& grid, double shift) {
    const auto z = to_complex(f);
    return real_part(shifted(std::span<const cplx>(z), grid, shift));
}

std::vector<cplx> upsample2(std::span<const cplx> f, const Grid1D& grid) {
    const auto half = shifted(f, grid, 0.5 * grid.dx());
    std::vector<cplx> out(2 * grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        out[2 * i] = f[i];
        out[2 * i + 1] = half[i];
    }
    return out;
}

cplx mode_amplitude(std::span<const double> f, std::size_t mode) {
    const auto z = to_complex(f);
    const auto fk = fft(z);
    return fk.at(mode) / static_cast<double>(f.size());
}

double integrate(std::span<const double> f, const Grid1D& grid) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * grid.dx();
}

}  // namespace spinkin::spectral
