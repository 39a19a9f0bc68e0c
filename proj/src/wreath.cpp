#include "eigenflow/wreath.hpp"

#include "eigenflow/errors.hpp"

#include <cmath>
#include <numbers>

namespace eigenflow {

HolonomyElement::HolonomyElement(Eigen::VectorXcd z, Permutation sigma) : z_(std::move(z)), sigma_(std::move(sigma)) {
    if (z_.size() != sigma_.size()) throw DimensionError("HolonomyElement: factor tuple and permutation sizes differ");
    for (Eigen::Index k = 0; k < z_.size(); ++k) {
        if (z_(k) == std::complex<double>(0.0)) throw DomainError("HolonomyElement: zero scale factor");
    }
}

HolonomyElement HolonomyElement::identity(int n) {
    return HolonomyElement(Eigen::VectorXcd::Ones(n), Permutation::identity(n));
}

HolonomyElement HolonomyElement::inverse() const {
    const Permutation inv = sigma_.inverse();
    Eigen::VectorXcd w(size());
    for (int j = 0; j < size(); ++j) w(j) = 1.0 / z_(sigma_(j));
    return HolonomyElement(std::move(w), inv);
}

Eigen::MatrixXcd HolonomyElement::matrix() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size(), size());
    const Permutation inv = sigma_.inverse();
    for (int j = 0; j < size(); ++j) m(j, inv(j)) = z_(j);
    return m;
}

Eigen::MatrixXcd HolonomyElement::act(const Eigen::MatrixXcd& frame) const {
    if (frame.cols() != size()) throw DimensionError("HolonomyElement::act: frame has the wrong number of vectors");
    Eigen::MatrixXcd out(frame.rows(), frame.cols());
    const Permutation inv = sigma_.inverse();
    for (int j = 0; j < size(); ++j) out.col(j) = z_(j) * frame.col(inv(j));
    return out;
}

HolonomyElement operator*(const HolonomyElement& a, const HolonomyElement& b) {
    if (a.size() != b.size()) throw DimensionError("HolonomyElement: size mismatch in product");
    const Permutation ainv = a.sigma_.inverse();
    Eigen::VectorXcd z(a.size());
    for (int j = 0; j < a.size(); ++j) z(j) = a.z_(j) * b.z_(ainv(j));
    return HolonomyElement(std::move(z), a.sigma_ * b.sigma_);
}

HolonomyElement gauge_conjugate(const HolonomyElement& h, const HolonomyElement& g) { return g * h * g.inverse(); }

std::vector<CycleInvariant> cycle_invariants(const HolonomyElement& h) {
    std::vector<CycleInvariant> out;
    for (auto& c : h.sigma().all_cycles()) {
        std::complex<double> f(1.0);
        for (int k : c) f *= h.z()(k);
        double phase = std::arg(f);
        if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
        out.push_back({std::move(c), f, phase});
    }
    return out;
}

}  // namespace eigenflow
