#include <cmath>
#include <sstream>

#include "mfglab/errors.hpp"
#include "mfglab/stability.hpp"

namespace mfglab::stability {

namespace {

constexpr double kImaginaryTolerance = 1e-10;
constexpr double kDegenerateTolerance = 1e-12;

struct Spectrum {
    std::array<std::complex<double>, 2> eigenvalues;
    Classification classification;
};

// A = [[p, q], [r, −p]] has eigenvalues ±√(p² + qr).
Spectrum spectrum(const std::array<double, 4>& a) {
    const double disc = a[0] * a[0] + a[1] * a[2];
    if (std::abs(disc) < kDegenerateTolerance) return {{0.0, 0.0}, Classification::not_las_degenerate};
    if (disc > 0.0) {
        const double r = std::sqrt(disc);
        const auto c = r >= kImaginaryTolerance ? Classification::las : Classification::not_las_imaginary;
        return {{std::complex<double>(r, 0.0), std::complex<double>(-r, 0.0)}, c};
    }
    const double w = std::sqrt(-disc);
    return {{std::complex<double>(0.0, w), std::complex<double>(0.0, -w)}, Classification::not_las_imaginary};
}

}  // namespace

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::las: return "linearly asymptotically stable";
        case Classification::not_las_imaginary: return "not LAS (imaginary)";
        case Classification::not_las_degenerate: return "not LAS (degenerate)";
    }
    return "unknown";
}

StabilityReport linear_stability(mfg::Game game, double eta, mfg::XYState point) {
    const auto grad = mfg::hamiltonian_gradient(game, eta, point);
    if (std::abs(grad[0]) > 1e-9 || std::abs(grad[1]) > 1e-9) {
        std::ostringstream msg;
        msg << "linear_stability: (" << point.x << ", " << point.y << ") is not an equilibrium, ∇H = (" << grad[0]
            << ", " << grad[1] << ")";
        throw InvalidArgument(msg.str());
    }
    const auto [hxx, hxy, hyy] = mfg::hamiltonian_hessian(game, eta, point);

    StabilityReport report;
    report.point = point;
    report.exact_a = {hxy, hyy, -hxx, -hxy};
    report.a = report.exact_a;
    if (game == mfg::Game::follow) {
        const double d = 2.0 * eta + std::abs(point.y);
        report.a = {-d, 1.0, -1.0, d};
    }
    const Spectrum printed = spectrum(report.a);
    report.eigenvalues = printed.eigenvalues;
    report.classification = printed.classification;
    const Spectrum exact = spectrum(report.exact_a);
    report.exact_eigenvalues = exact.eigenvalues;
    report.exact_classification = exact.classification;
    return report;
}

}  // namespace mfglab::stability
