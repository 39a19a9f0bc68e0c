#include "eigenflow/transport.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace eigenflow {

namespace {

void check_frame(const FamilySpec& family, const SpectralFlow& flow, const EigenSystem& frame) {
    const EigenSystem& s0 = flow.systems().front();
    if (frame.dim() != s0.dim()) throw DimensionError("initial frame dimension differs from the flow");
    const Eigen::MatrixXcd h = family.eval(flow.points().front());
    const double hn = std::max(h.norm(), 1e-300);
    const double tol = 1e-8 * std::max(s0.scale(), hn);
    for (int k = 0; k < frame.dim(); ++k) {
        if (std::abs(frame.lambda(k) - s0.lambda(k)) > tol) {
            throw DimensionError("initial frame slot " + std::to_string(k + 1) +
                                 " does not match the flow's initial slot order");
        }
        const Eigen::VectorXcd v = frame.vec(k);
        if ((h * v - frame.lambda(k) * v).norm() > 1e-8 * hn * v.norm()) {
            throw DimensionError("initial frame vector " + std::to_string(k + 1) + " is not an eigenvector at the start");
        }
    }
}

Complex nearest_root(Complex square, Complex target) {
    const Complex r = std::sqrt(square);
    return std::abs(r - target) <= std::abs(-r - target) ? r : -r;
}

}  // namespace

TransportResult transport_frame(const FamilySpec& family, const SpectralFlow& flow, const EigenSystem& initial_frame,
                                Gauge gauge) {
    check_frame(family, flow, initial_frame);
    const EigenSystem start = gauge == Gauge::Unit ? unit_gauge(initial_frame) : initial_frame;
    const int n = start.dim();
    const int samples = flow.size();

    TransportResult res{flow, start, Eigen::MatrixXcd(n, n), {}, std::nullopt, Eigen::VectorXcd::Zero(n), gauge, 0.0};
    res.trajectory.assign(static_cast<std::size_t>(samples), Eigen::MatrixXcd(n, n));

    for (int b = 0; b < n; ++b) {
        // ansatz state and its dual, aligned so consecutive pairings are positive
        Eigen::VectorXcd psi = start.vec(b);
        Eigen::RowVectorXcd theta = start.covec(b);
        Complex log_factor(0.0);
        res.trajectory[0].col(b) = psi;
        for (int k = 1; k < samples; ++k) {
            const EigenSystem& sys = flow.systems()[static_cast<std::size_t>(k)];
            const int slot = flow.slot(b, k);
            const Eigen::VectorXcd v = sys.vec(slot);
            const Eigen::RowVectorXcd w = sys.covec(slot);
            const Complex a_raw = (theta * v)(0);
            if (std::abs(a_raw) < 1e-12) {
                std::ostringstream msg;
                msg << "transport overlap vanishes near t = " << flow.times()[static_cast<std::size_t>(k)];
                throw NumericalUnderflow(msg.str(), flow.times()[static_cast<std::size_t>(k)]);
            }
            const Complex align = std::abs(a_raw) / a_raw;
            const Eigen::VectorXcd psi_next = align * v;
            const Eigen::RowVectorXcd theta_next = w / align;
            const Complex a = std::abs(a_raw);
            const Complex c = (theta_next * psi)(0);
            if (std::abs(c) < 1e-12) {
                std::ostringstream msg;
                msg << "transport overlap vanishes near t = " << flow.times()[static_cast<std::size_t>(k)];
                throw NumericalUnderflow(msg.str(), flow.times()[static_cast<std::size_t>(k)]);
            }
            log_factor -= std::log(nearest_root(a / c, a));
            psi = psi_next;
            theta = theta_next;
            res.trajectory[static_cast<std::size_t>(k)].col(b) = std::exp(log_factor) * psi;
        }
        res.log_factors(b) = log_factor;
        res.transported.col(b) = res.trajectory.back().col(b);
    }

    if (flow.is_loop()) {
        const Permutation sigma = monodromy(flow);
        const Permutation inv = sigma.inverse();
        Eigen::VectorXcd z(n);
        for (int j = 0; j < n; ++j) z(j) = (start.covec(inv(j)) * res.transported.col(j))(0);
        res.holonomy = HolonomyElement(std::move(z), sigma);
    }

    const Eigen::MatrixXcd h_end = family.eval(flow.points().back());
    const double hn = std::max(h_end.norm(), 1e-300);
    for (int b = 0; b < n; ++b) {
        const Eigen::VectorXcd psi = res.transported.col(b);
        const Complex e = flow.energy(b, samples - 1);
        res.max_residual = std::max(res.max_residual, (h_end * psi - e * psi).norm() / (hn * psi.norm()));
    }

    return res;
}

TransportResult transport_frame(const FamilySpec& family, const SpectralFlow& flow, Gauge gauge) {
    return transport_frame(family, flow, flow.systems().front(), gauge);
}

HolonomyElement holonomy_of(const TransportResult& result) {
    if (!result.holonomy) throw NotALoop("holonomy requires a loop (endpoints differ)");
    return *result.holonomy;
}

Complex geometric_phase(const TransportResult& result, int band) {
    const HolonomyElement h = holonomy_of(result);
    if (band < 0 || band >= h.size()) throw DimensionError("band index out of range");
    if (h.sigma()(band) != band) {
        throw NonCyclicBand("band " + std::to_string(band + 1) + " is not cyclic (monodromy " + h.sigma().cycle_string() +
                            "); use the cycle invariants");
    }
    const Complex z = h.z()(band);
    double re = std::arg(z);
    if (re <= -std::numbers::pi) re += 2.0 * std::numbers::pi;
    return {re, -std::log(std::abs(z))};
}

Complex dynamical_phase(const SpectralFlow& flow, int band, double t_phys, double hbar) {
    const BandFunction f = band_function(flow, band);
    Complex integral(0.0);
    for (std::size_t k = 1; k < f.times.size(); ++k) {
        integral += 0.5 * (f.times[k] - f.times[k - 1]) * (f.values[k] + f.values[k - 1]);
    }
    return Complex(0.0, -1.0 / hbar) * t_phys * integral;
}

TransportResult total_transport(const FamilySpec& family, const SpectralFlow& flow, const EigenSystem& initial_frame,
                                double t_phys, double hbar, Gauge gauge) {
    TransportResult res = transport_frame(family, flow, initial_frame, gauge);
    const int n = flow.dim();
    const Complex coef = Complex(0.0, -1.0 / hbar) * t_phys;
    for (int b = 0; b < n; ++b) {
        Complex dyn(0.0);
        for (int k = 1; k < flow.size(); ++k) {
            const double dt = flow.times()[static_cast<std::size_t>(k)] - flow.times()[static_cast<std::size_t>(k - 1)];
            dyn += coef * 0.5 * dt * (flow.energy(b, k) + flow.energy(b, k - 1));
            res.trajectory[static_cast<std::size_t>(k)].col(b) *= std::exp(dyn);
        }
        res.transported.col(b) *= std::exp(dyn);
        res.log_factors(b) += dyn;
        if (res.holonomy) {
            Eigen::VectorXcd z = res.holonomy->z();
            z(b) *= std::exp(dyn);
            res.holonomy = HolonomyElement(std::move(z), res.holonomy->sigma());
        }
    }
    return res;
}

Eigen::MatrixXcd open_path_frame_matrix(const TransportResult& result, const EigenSystem& reference) {
    if (reference.dim() != result.transported.cols()) throw DimensionError("reference frame dimension differs");
    return (reference.coframe() * result.transported).transpose();
}

}  // namespace eigenflow
