// Quantum geometric tensor of a band, its metric and curvature parts, and
// surface integrals of the curvature.
//
// G_ij = sum_{m != k} [theta^k dH_i v_m][theta^m dH_j v_k] / (lambda_k - lambda_m)^2
// M = (G + G^T) / 2,  K_ij = G_ij - G_ji,  so G = M + K / 2.

#pragma once

#include "eigenflow/expr.hpp"
#include "eigenflow/spectra.hpp"

#include <Eigen/Dense>

#include <vector>

namespace eigenflow {

struct TensorResult {
    ParamPoint x;
    int band = 0;
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd M;
    Eigen::MatrixXcd K;
};

// Core form: eigensystem at x and the parameter derivatives of H there.
TensorResult qgt(const EigenSystem& sys, const std::vector<Eigen::MatrixXcd>& dH, int band);
// Band index refers to the slot after ordering the spectrum at x.
TensorResult qgt(const FamilySpec& family, const ParamPoint& x, int band, BandOrder order = BandOrder::Ascending,
                 const SpectralOptions& opts = {});

Eigen::MatrixXcd curvature(const FamilySpec& family, const ParamPoint& x, int band,
                           BandOrder order = BandOrder::Ascending);

// Largest |K_ij| over the points. A degenerate point is reported by location.
double flatness_check(const FamilySpec& family, const std::vector<ParamPoint>& region, int band,
                      BandOrder order = BandOrder::Ascending);

// (u, v) in [u0, u1] x [v0, v1] mapped to parameter space by one expression
// per family parameter over the symbols u, v. Orientation +1 integrates
// du ^ dv (boundary traversed counter-clockwise in the (u, v) plane).
struct SurfaceGrid {
    std::vector<expr::NodePtr> map;
    int n = 64;
    int orientation = 1;
    double u0 = 0.0, u1 = 1.0;
    double v0 = 0.0, v1 = 1.0;

    int dim() const { return static_cast<int>(map.size()); }
    ParamPoint at(double u, double v) const;
    // d x 2 matrix of exact partial derivatives.
    Eigen::MatrixXd jacobian(double u, double v) const;
};

// Symbol table for surface maps: u, v and the constant pi.
expr::SymbolTable surface_symbols();

struct CurvaturePhase {
    Complex value;        // i * integral of K over the surface
    int band_slot = 0;    // slot at the (u0, v0) corner
    double min_gap = 0.0; // over grid nodes and quadrature points
};

// Band is selected at the (u0, v0) corner and tracked over the grid by
// lifting along grid edges; row-first and column-first tracking must agree,
// otherwise BandAmbiguity. 2 x 2 Gauss-Legendre rule per cell.
CurvaturePhase curvature_phase(const FamilySpec& family, const SurfaceGrid& surface, int band,
                               BandOrder order = BandOrder::Ascending);

// |M_ij - (L_ij + omega_i omega_j)| with L and omega from central differences
// (step h) in the gauge theta_ref(psi(y)) = 1, theta_ref the coframe row at x.
double metric_identity_check(const FamilySpec& family, const ParamPoint& x, int band, int i, int j,
                             BandOrder order = BandOrder::Ascending, double h = 1e-4);

}  // namespace eigenflow
