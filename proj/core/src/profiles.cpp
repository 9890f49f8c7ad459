#include "spinkin/profiles.hpp"

#include "spinkin/spectral.hpp"

#include <utility>

namespace spinkin {

Profile Profile::uniform(double value) {
    Profile p;
    p.kind_ = Kind::uniform;
    p.coeffs_ = {value};
    return p;
}

Profile Profile::polynomial(std::vector<double> coeffs, double center) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    Profile p;
    p.kind_ = Kind::polynomial;
    p.coeffs_ = std::move(coeffs);
    p.center_ = center;
    return p;
}

Profile Profile::single_mode(double amplitude, double k, double phase) {
    Profile p;
    p.kind_ = Kind::single_mode;
    p.amplitude_ = amplitude;
    p.k_ = k;
    p.phase_ = phase;
    return p;
}

Profile Profile::sampled(const Grid1D& grid, std::vector<double> values) {
    if (values.size() != grid.n) throw InvalidArgument("Profile::sampled: size mismatch");
    Profile p;
    p.kind_ = Kind::sampled;
    p.grid_ = grid;
    std::vector<cplx> z(values.begin(), values.end());
    p.spectrum_ = spectral::fft(z);
    for (auto& c : p.spectrum_) c /= static_cast<double>(grid.n);
    return p;
}

double Profile::derivative(double x, int order) const {
    switch (kind_) {
    case Kind::uniform:
        return order == 0 ? coeffs_[0] : 0.0;
    case Kind::polynomial: {
        const double dx = x - center_;
        double sum = 0.0;
        for (std::size_t n = static_cast<std::size_t>(order); n < coeffs_.size(); ++n) {
            double falling = 1.0;
            for (int j = 0; j < order; ++j) falling *= static_cast<double>(n - static_cast<std::size_t>(j));
            sum += coeffs_[n] * falling * std::pow(dx, static_cast<double>(n - static_cast<std::size_t>(order)));
        }
        return sum;
    }
    case Kind::single_mode:
        // d^n/dx^n cos(kx + p) = k^n cos(kx + p + n pi/2)
        return amplitude_ * std::pow(k_, order) * std::cos(k_ * x + phase_ + order * pi / 2.0);
    case Kind::sampled: {
        const auto k = spectral::wavenumbers(grid_);
        const std::size_t nyq = grid_.n % 2 == 0 ? grid_.n / 2 : grid_.n;
        double sum = 0.0;
        for (std::size_t j = 0; j < grid_.n; ++j) {
            if (j == nyq) {
                if (order == 0)
                    sum += spectrum_[j].real() * std::cos(k[j] * x);
                else if (order % 2 == 0)
                    sum += spectrum_[j].real() * std::pow(k[j], order) * std::cos(k[j] * x) *
                           ((order / 2) % 2 == 0 ? 1.0 : -1.0);
                continue;
            }
            sum += (spectrum_[j] * std::pow(cplx(0.0, k[j]), order) * std::exp(cplx(0.0, k[j] * x))).real();
        }
        return sum;
    }
    }
    return 0.0;
}

std::vector<double> Profile::sample(const Grid1D& grid, int order) const {
    std::vector<double> out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = derivative(grid.x(i), order);
    return out;
}

bool Profile::is_uniform() const {
    switch (kind_) {
    case Kind::uniform: return true;
    case Kind::polynomial:
        for (std::size_t n = 1; n < coeffs_.size(); ++n)
            if (coeffs_[n] != 0.0) return false;
        return true;
    case Kind::single_mode: return amplitude_ == 0.0 || k_ == 0.0;
    case Kind::sampled:
        for (std::size_t j = 1; j < spectrum_.size(); ++j)
            if (std::abs(spectrum_[j]) > 0.0) return false;
        return true;
    }
    return false;
}

VectorProfile VectorProfile::uniform(const Vec3& v) {
    VectorProfile p;
    for (int i = 0; i < 3; ++i) p.c[static_cast<std::size_t>(i)] = Profile::uniform(v[i]);
    return p;
}

Vec3 VectorProfile::derivative(double x, int order) const {
    return {c[0].derivative(x, order), c[1].derivative(x, order), c[2].derivative(x, order)};
}

bool VectorProfile::is_uniform() const {
    return c[0].is_uniform() && c[1].is_uniform() && c[2].is_uniform();
}

}  // namespace spinkin
