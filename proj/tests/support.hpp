// Shared fixtures and independent oracles for the test binaries.

#pragma once

#include "eigenflow/flow.hpp"
#include "eigenflow/presets.hpp"
#include "eigenflow/spectra.hpp"
#include "eigenflow/transport.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testing {

using eigenflow::Complex;
using eigenflow::ParamPoint;

inline constexpr double pi = std::numbers::pi;

inline std::uint64_t seed() {
    if (const char* s = std::getenv("EIGENFLOW_SEED")) return std::strtoull(s, nullptr, 10);
    return 20211015u;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(seed());
    return g;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline Complex random_unit_annulus(double rmin = 0.5, double rmax = 2.0) {
    return std::polar(uniform(rmin, rmax), uniform(-pi, pi));
}

inline eigenflow::FamilySpec preset(const std::string& name) {
    return eigenflow::parse_family(*eigenflow::preset_family(name));
}

inline eigenflow::expr::SymbolTable path_table() { return {{"t"}, {{"pi", pi}}}; }

inline eigenflow::PathSpec parametric(const std::string& coords) {
    return eigenflow::PathSpec::parametric(eigenflow::expr::parse_list(coords, path_table()));
}

inline eigenflow::PathSpec polyline(std::vector<std::vector<double>> pts) {
    std::vector<ParamPoint> v;
    for (auto& p : pts) v.push_back(Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
    return eigenflow::PathSpec::polyline(std::move(v));
}

// Counter-clockwise loop around the exceptional point at +i, basepoint 0.
inline eigenflow::PathSpec ep2_loop(int turns = 1) {
    const std::string w = std::to_string(2 * turns);
    return polyline({{0, 0}, {0, 0.5}})
        .then(parametric("0.5*cos(" + w + "*pi*t - pi/2), 1 + 0.5*sin(" + w + "*pi*t - pi/2)"))
        .then(polyline({{0, 0.5}, {0, 0}}));
}

// Straight out from the origin, once counter-clockwise around `center` at
// radius r, and straight back.
inline eigenflow::PathSpec loop_around(Complex center, double r, int turns = 1) {
    const Complex a = center - r * center / std::abs(center);
    const double phi = std::arg(a - center);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g + %.17g*cos(%d*pi*t + %.17g), %.17g + %.17g*sin(%d*pi*t + %.17g)",
                  center.real(), r, 2 * turns, phi, center.imag(), r, 2 * turns, phi);
    return polyline({{0, 0}, {a.real(), a.imag()}}).then(parametric(buf)).then(polyline({{a.real(), a.imag()}, {0, 0}}));
}

// Three levels, z = re + i im; exceptional points near +-0.2289 + 1.1323i swap
// slots (1 2) and (2 3) of the descending basepoint order.
inline eigenflow::FamilySpec three_level() {
    return eigenflow::parse_family(
        "params re, im; H = [[2, re + i*im, 0.3*(re + i*im)], [re + i*im, 0, re + i*im], [0.3*(re + i*im), re + i*im, -2]]");
}
inline const Complex kEpA(0.22888073429675249, 1.1322672027965774);
inline const Complex kEpB(-0.22888073429675249, 1.1322672027965774);

inline eigenflow::PathSpec unit_circle() { return parametric("cos(2*pi*t), sin(2*pi*t)"); }

// Ordered (by `order`) canonical-gauge frame at the path start.
inline eigenflow::EigenSystem start_frame(const eigenflow::FamilySpec& f, const ParamPoint& x,
                                          eigenflow::BandOrder order = eigenflow::BandOrder::Descending) {
    return eigenflow::canonical_gauge(eigenflow::order_bands(eigenflow::decompose(f.eval(x)), order));
}

inline eigenflow::TransportResult transport(const eigenflow::FamilySpec& f, const eigenflow::PathSpec& p, int samples,
                                            eigenflow::BandOrder order = eigenflow::BandOrder::Descending) {
    const auto s0 = start_frame(f, p.start(), order);
    eigenflow::LiftOptions o;
    o.init_samples = samples;
    return eigenflow::transport_frame(f, eigenflow::lift_path(f, p, o, s0), s0);
}

// Slot of the eigenvalue nearest to `e`.
inline int nearest(const eigenflow::EigenSystem& s, Complex e) {
    int best = 0;
    for (int k = 1; k < s.dim(); ++k) {
        if (std::abs(s.lambda(k) - e) < std::abs(s.lambda(best) - e)) best = k;
    }
    return best;
}

// Finite-difference covariant-derivative oracle for the geometric tensor:
// eigenvector field in the gauge theta_0(psi(y)) = 1, central differences,
// G_ij = (d_i theta)(1 - psi theta)(d_j psi).
inline Eigen::MatrixXcd fd_qgt(const eigenflow::FamilySpec& f, const ParamPoint& x, int band,
                               eigenflow::BandOrder order = eigenflow::BandOrder::Ascending, double h = 1e-4) {
    const auto base = eigenflow::order_bands(eigenflow::decompose(f.eval(x)), order);
    const Complex e0 = base.lambda(band);
    const Eigen::RowVectorXcd theta0 = base.covec(band);
    auto field = [&](const ParamPoint& y, Eigen::VectorXcd& psi, Eigen::RowVectorXcd& theta) {
        const auto s = eigenflow::decompose(f.eval(y));
        const int k = nearest(s, e0);
        const Complex c = (theta0 * s.vec(k))(0);
        psi = s.vec(k) / c;
        theta = s.covec(k) * c;
    };
    const int d = f.num_params();
    std::vector<Eigen::VectorXcd> dpsi(static_cast<std::size_t>(d));
    std::vector<Eigen::RowVectorXcd> dtheta(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        ParamPoint xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        Eigen::VectorXcd pp, pm;
        Eigen::RowVectorXcd tp, tm;
        field(xp, pp, tp);
        field(xm, pm, tm);
        dpsi[static_cast<std::size_t>(i)] = (pp - pm) / (2 * h);
        dtheta[static_cast<std::size_t>(i)] = (tp - tm) / (2 * h);
    }
    Eigen::VectorXcd psi;
    Eigen::RowVectorXcd theta;
    field(x, psi, theta);
    const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(psi.size(), psi.size()) - psi * theta;
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) g(i, j) = (dtheta[static_cast<std::size_t>(i)] * q * dpsi[static_cast<std::size_t>(j)])(0);
    }
    return g;
}

// RK4 integration of the transport equation theta(dPsi) = 0 for an
// eigenvector, dPsi/dt = sum_{m != k} v_m theta^m (dH/dt) Psi / (E_k - E_m).
// Returns Psi at t = 1.
inline Eigen::VectorXcd rk4_transport(const eigenflow::FamilySpec& f, const eigenflow::PathSpec& p,
                                      Eigen::VectorXcd psi, int steps) {
    auto rhs = [&](double t, const Eigen::VectorXcd& y) {
        const double dt = 1e-6;
        const ParamPoint x = p.at(t);
        const ParamPoint xdot = (p.at(std::min(1.0, t + dt)) - p.at(std::max(0.0, t - dt))) /
                                (std::min(1.0, t + dt) - std::max(0.0, t - dt));
        Eigen::MatrixXcd hdot = Eigen::MatrixXcd::Zero(y.size(), y.size());
        const auto grad = f.eval_gradient(x);
        for (int i = 0; i < f.num_params(); ++i) hdot += xdot(i) * grad[static_cast<std::size_t>(i)];
        const auto s = eigenflow::decompose(f.eval(x));
        const Eigen::VectorXcd c = s.coframe() * y;
        int k = 0;
        c.cwiseAbs().maxCoeff(&k);
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(y.size());
        for (int m = 0; m < s.dim(); ++m) {
            if (m != k) out += s.vec(m) * (s.covec(m) * hdot * y)(0) / (s.lambda(k) - s.lambda(m));
        }
        return out;
    };
    const double h = 1.0 / steps;
    for (int n = 0; n < steps; ++n) {
        const double t = n * h;
        const Eigen::VectorXcd k1 = rhs(t, psi);
        const Eigen::VectorXcd k2 = rhs(t + h / 2, psi + h / 2 * k1);
        const Eigen::VectorXcd k3 = rhs(t + h / 2, psi + h / 2 * k2);
        const Eigen::VectorXcd k4 = rhs(t + h, psi + h * k3);
        psi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return psi;
}

inline double wrap(double a) {
    a = std::remainder(a, 2 * pi);
    return a <= -pi ? a + 2 * pi : a;
}

// Random non-degenerate sample points for the presets.
inline ParamPoint random_point(const std::string& preset_name) {
    if (preset_name == "dp") {
        const Complex z = random_unit_annulus(0.5, 2.0);
        return Eigen::Vector2d(z.real(), z.imag());
    }
    if (preset_name == "ep2") {
        for (;;) {
            const Complex z(uniform(-2, 2), uniform(-2, 2));
            if (std::abs(z - Complex(0, 1)) > 0.3 && std::abs(z + Complex(0, 1)) > 0.3) return Eigen::Vector2d(z.real(), z.imag());
        }
    }
    // spin: shell 0.5 <= r <= 2
    Eigen::Vector3d v;
    do {
        v = Eigen::Vector3d(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    } while (v.norm() < 0.2 || v.norm() > 1.0);
    return v.normalized() * uniform(0.5, 2.0);
}

}  // namespace testing
