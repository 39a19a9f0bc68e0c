// Dense eigendecomposition of small non-Hermitian operators.
//
// An EigenSystem carries an ordered eigenvalue tuple, the eigenframe S
// (columns v_k) and the dual coframe Θ = S⁻¹ (rows θ^k, θ^i(v_j) = δ_ij).
// Construction refuses degenerate spectra, so every EigenSystem has gap > 0.

#pragma once

#include "eigenflow/errors.hpp"
#include "eigenflow/permutation.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace eigenflow {

using Complex = std::complex<double>;

struct SpectralOptions {
    double tol_gap = 1e-8;  // relative to the spectral scale
    int max_dim = 16;
};

class EigenSystem {
public:
    // Coframe given explicitly; it must be the inverse of the frame.
    EigenSystem(Eigen::VectorXcd lambdas, Eigen::MatrixXcd frame, Eigen::MatrixXcd coframe);
    // Coframe computed as the inverse of the frame.
    static EigenSystem from_frame(Eigen::VectorXcd lambdas, Eigen::MatrixXcd frame);

    int dim() const noexcept { return static_cast<int>(lambdas_.size()); }
    const Eigen::VectorXcd& lambdas() const noexcept { return lambdas_; }
    Complex lambda(int k) const { return lambdas_(k); }
    const Eigen::MatrixXcd& frame() const noexcept { return frame_; }
    const Eigen::MatrixXcd& coframe() const noexcept { return coframe_; }
    Eigen::VectorXcd vec(int k) const { return frame_.col(k); }
    Eigen::RowVectorXcd covec(int k) const { return coframe_.row(k); }

    // min_{i≠j} |λ_i − λ_j| (infinity for n = 1).
    double gap() const noexcept { return gap_; }
    // Π_{i<j} (λ_i − λ_j)².
    Complex disc() const noexcept { return disc_; }
    // max |λ_i|
    double scale() const noexcept;

    // Slot j of the result holds slot order(j) of this system.
    EigenSystem reordered(const std::vector<int>& order) const;
    // v_k ↦ c_k v_k, θ^k ↦ θ^k / c_k.
    EigenSystem rescaled(const Eigen::VectorXcd& scales) const;

private:
    Eigen::VectorXcd lambdas_;
    Eigen::MatrixXcd frame_;
    Eigen::MatrixXcd coframe_;
    double gap_;
    Complex disc_;
};

// Throws DegenerateOperator, NoConvergence, DimensionError, DomainError.
EigenSystem decompose(const Eigen::MatrixXcd& a, const SpectralOptions& opts = {});

Complex discriminant(const Eigen::VectorXcd& lambdas);
inline Complex discriminant(const EigenSystem& sys) { return discriminant(sys.lambdas()); }

// P_k = v_k θ^k
std::vector<Eigen::MatrixXcd> projectors(const EigenSystem& sys);

// Ascending by Re λ; throws NotRealSpectrum if some |Im λ| > tol_imag · scale.
EigenSystem sort_real(const EigenSystem& sys, double tol_imag = 1e-9);

// Slot orderings used by the front-end to fix a deterministic initial tuple.
enum class BandOrder { Solver, Ascending, Descending };

// Ascending/Descending sort by (Re λ, Im λ), treating real parts equal within
// 1e-9 · scale as ties.
EigenSystem order_bands(const EigenSystem& sys, BandOrder order);

// Rescales each eigenvector so its entry of largest modulus equals 1
// (first such entry on near-ties). Gives e_k for diagonal input.
EigenSystem canonical_gauge(const EigenSystem& sys);

// Rescales each eigenvector to unit Euclidean norm.
EigenSystem unit_gauge(const EigenSystem& sys);

}  // namespace eigenflow
