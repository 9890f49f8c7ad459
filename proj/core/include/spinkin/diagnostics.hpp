#pragma once

#include "spinkin/io.hpp"

#include <string>
#include <vector>

namespace spinkin::diagnostics {

/// Result of fit_frequency. When conclusive is false the numbers are NaN and reason says why.
struct FrequencyFit {
    bool conclusive = false;
    std::string reason;
    double omega = 0.0;
    double gamma = 0.0;              ///< amplitude decays as exp(-gamma t)
    double omega_uncertainty = 0.0;  ///< one standard deviation
    double gamma_uncertainty = 0.0;
    double peak_ratio = 0.0;         ///< spectral peak power over median power
    double periods = 0.0;
};

/// Model exp(-gamma t)(a cos wt + b sin wt) + c. The spectral peak of a Hann-windowed, zero-padded
/// periodogram seeds a log-envelope regression for gamma, and both are refined by nonlinear least squares.
/// Inconclusive when the series is constant, the peak is weak (ratio < 10), fewer than 8 periods are covered
/// or the fitted model explains less than half the variance.
FrequencyFit fit_frequency(const std::vector<double>& t, const std::vector<double>& y);
FrequencyFit fit_frequency(const io::DiagnosticsSeries& series, const std::string& column);

/// max |y - y[0]| / |y[0]|, or the absolute drift when y[0] is zero.
double relative_drift(const std::vector<double>& y);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spinkin::diagnostics
