#include "eigenflow/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

namespace eigenflow {

namespace {

double min_gap(const Eigen::VectorXcd& l) {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < l.size(); ++i) {
        for (Eigen::Index j = i + 1; j < l.size(); ++j) g = std::min(g, std::abs(l(i) - l(j)));
    }
    return g;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

bool all_finite(const Eigen::MatrixXcd& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        if (!std::isfinite(m.data()[k].real()) || !std::isfinite(m.data()[k].imag())) return false;
    }
    return true;
}

}  // namespace

EigenSystem::EigenSystem(Eigen::VectorXcd lambdas, Eigen::MatrixXcd frame, Eigen::MatrixXcd coframe)
    : lambdas_(std::move(lambdas)), frame_(std::move(frame)), coframe_(std::move(coframe)) {
    const Eigen::Index n = lambdas_.size();
    if (frame_.rows() != n || frame_.cols() != n || coframe_.rows() != n || coframe_.cols() != n) {
        throw DimensionError("EigenSystem: frame, coframe and eigenvalue tuple sizes differ");
    }
    gap_ = min_gap(lambdas_);
    disc_ = discriminant(lambdas_);
}

EigenSystem EigenSystem::from_frame(Eigen::VectorXcd lambdas, Eigen::MatrixXcd frame) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(frame);
    if (!lu.isInvertible()) throw SingularFrame("eigenframe is not a basis");
    Eigen::MatrixXcd coframe = lu.inverse();
    if (!all_finite(coframe)) throw SingularFrame("eigenframe is numerically singular");
    return EigenSystem(std::move(lambdas), std::move(frame), std::move(coframe));
}

double EigenSystem::scale() const noexcept {
    double s = 0.0;
    for (Eigen::Index k = 0; k < lambdas_.size(); ++k) s = std::max(s, std::abs(lambdas_(k)));
    return s;
}

EigenSystem EigenSystem::reordered(const std::vector<int>& order) const {
    const int n = dim();
    if (static_cast<int>(order.size()) != n) throw DimensionError("reordered: order has wrong length");
    Eigen::VectorXcd l(n);
    Eigen::MatrixXcd f(n, n);
    Eigen::MatrixXcd c(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        l(j) = lambdas_(src);
        f.col(j) = frame_.col(src);
        c.row(j) = coframe_.row(src);
    }
    return EigenSystem(std::move(l), std::move(f), std::move(c));
}

EigenSystem EigenSystem::rescaled(const Eigen::VectorXcd& scales) const {
    if (scales.size() != dim()) throw DimensionError("rescaled: scale vector has wrong length");
    Eigen::MatrixXcd f = frame_;
    Eigen::MatrixXcd c = coframe_;
    for (int k = 0; k < dim(); ++k) {
        if (scales(k) == Complex(0.0)) throw SingularFrame("rescaled: zero scale factor");
        f.col(k) *= scales(k);
        c.row(k) /= scales(k);
    }
    return EigenSystem(lambdas_, std::move(f), std::move(c));
}

EigenSystem decompose(const Eigen::MatrixXcd& a, const SpectralOptions& opts) {
    const Eigen::Index n = a.rows();
    if (n < 1 || a.cols() != n) throw DimensionError("decompose: operator must be square and non-empty");
    if (n > opts.max_dim) {
        throw DimensionError("decompose: dimension " + std::to_string(n) + " exceeds cap " +
                             std::to_string(opts.max_dim));
    }
    if (!all_finite(a)) throw DomainError("decompose: operator has non-finite entries");

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, true);
    if (solver.info() != Eigen::Success) throw NoConvergence("decompose: QR iteration did not converge");

    Eigen::VectorXcd lambdas = solver.eigenvalues();
    Eigen::MatrixXcd frame = solver.eigenvectors();

    if (n > 1) {
        const double gap = min_gap(lambdas);
        double scale = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) scale = std::max(scale, std::abs(lambdas(k)));
        const double norm = a.norm();
        if (scale == 0.0) scale = norm;
        if (!(gap > opts.tol_gap * scale)) {
            throw DegenerateOperator("decompose: eigenvalue gap " + num(gap) +
                                     " below tolerance (spectral scale " + num(scale) + ")");
        }
        // Near an exceptional point the eigenvalues are only resolved to
        // ~κ·ε·‖A‖ (κ the eigenvalue condition number); a gap below that is
        // indistinguishable from a coalescence.
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(frame);
        if (!lu.isInvertible()) throw DegenerateOperator("decompose: eigenvectors are linearly dependent");
        const Eigen::MatrixXcd coframe = lu.inverse();
        double kappa = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) kappa = std::max(kappa, frame.col(k).norm() * coframe.row(k).norm());
        if (!std::isfinite(kappa) || gap <= 100.0 * kappa * std::numeric_limits<double>::epsilon() * norm) {
            throw DegenerateOperator("decompose: eigenvalues coalesce within rounding (condition number " +
                                     num(kappa) + ")");
        }
        return EigenSystem(std::move(lambdas), std::move(frame), coframe);
    }
    return EigenSystem::from_frame(std::move(lambdas), std::move(frame));
}

Complex discriminant(const Eigen::VectorXcd& lambdas) {
    Complex d(1.0);
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        for (Eigen::Index j = i + 1; j < lambdas.size(); ++j) {
            const Complex diff = lambdas(i) - lambdas(j);
            d *= diff * diff;
        }
    }
    return d;
}

std::vector<Eigen::MatrixXcd> projectors(const EigenSystem& sys) {
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(static_cast<std::size_t>(sys.dim()));
    for (int k = 0; k < sys.dim(); ++k) out.push_back(sys.frame().col(k) * sys.coframe().row(k));
    return out;
}

EigenSystem sort_real(const EigenSystem& sys, double tol_imag) {
    const double scale = std::max(sys.scale(), 1e-300);
    for (int k = 0; k < sys.dim(); ++k) {
        if (std::abs(sys.lambda(k).imag()) > tol_imag * scale) {
            throw NotRealSpectrum("sort_real: eigenvalue " + std::to_string(k + 1) + " has imaginary part " +
                                  num(sys.lambda(k).imag()));
        }
    }
    std::vector<int> order(static_cast<std::size_t>(sys.dim()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sys.lambda(a).real() < sys.lambda(b).real(); });
    return sys.reordered(order);
}

EigenSystem order_bands(const EigenSystem& sys, BandOrder order) {
    if (order == BandOrder::Solver) return sys;
    const double tie = 1e-9 * std::max(sys.scale(), 1e-300);
    std::vector<int> idx(static_cast<std::size_t>(sys.dim()));
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](int a, int b) {
        const Complex la = sys.lambda(a);
        const Complex lb = sys.lambda(b);
        if (std::abs(la.real() - lb.real()) > tie) return la.real() < lb.real();
        return la.imag() < lb.imag();
    };
    std::stable_sort(idx.begin(), idx.end(), less);
    if (order == BandOrder::Descending) std::reverse(idx.begin(), idx.end());
    return sys.reordered(idx);
}

EigenSystem canonical_gauge(const EigenSystem& sys) {
    Eigen::VectorXcd scales(sys.dim());
    for (int k = 0; k < sys.dim(); ++k) {
        const Eigen::VectorXcd v = sys.vec(k);
        const double top = v.cwiseAbs().maxCoeff();
        Eigen::Index pick = 0;
        for (Eigen::Index r = 0; r < v.size(); ++r) {
            if (std::abs(v(r)) >= top * (1.0 - 1e-12)) {
                pick = r;
                break;
            }
        }
        scales(k) = 1.0 / v(pick);
    }
    return sys.rescaled(scales);
}

EigenSystem unit_gauge(const EigenSystem& sys) {
    Eigen::VectorXcd scales(sys.dim());
    for (int k = 0; k < sys.dim(); ++k) scales(k) = 1.0 / sys.vec(k).norm();
    return sys.rescaled(scales);
}

}  // namespace eigenflow
