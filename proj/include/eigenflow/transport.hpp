// Parallel transport of eigenframes along a lifted path with the connection
// omega = theta dv, plus geometric, dynamical and total phases.
//
// Each band keeps a phase-aligned ansatz psi and its dual theta. A step to
// the next sample's eigenvector v and dual w sets alpha = |theta(v)| / theta(v),
// psi' = alpha v, theta' = w / alpha, and with a = |theta(v)|, c = theta'(psi)
// the log factor drops by log sqrt(a / c) (branch nearest a). Only dual
// pairings enter, so the result does not depend on how the solver scales
// eigenvectors at interior samples; the rule is second order in the step.

#pragma once

#include "eigenflow/expr.hpp"
#include "eigenflow/flow.hpp"
#include "eigenflow/spectra.hpp"
#include "eigenflow/wreath.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace eigenflow {

enum class Gauge { Raw, Unit };

struct TransportResult {
    SpectralFlow flow;
    EigenSystem initial_frame;
    // Column b: Psi_b(T) for the band that started in slot b.
    Eigen::MatrixXcd transported;
    // trajectory[k] column b: Psi_b at sample k.
    std::vector<Eigen::MatrixXcd> trajectory;
    std::optional<HolonomyElement> holonomy;
    // Accumulated log of the correction factor relative to the phase-aligned
    // ansatz, so that Psi_b(T) = exp(log_factors(b)) * ansatz_b(T).
    Eigen::VectorXcd log_factors;
    Gauge gauge = Gauge::Raw;
    // max ||H Psi - E Psi|| / (||H|| ||Psi||) over the final sample.
    double max_residual = 0.0;
};

// `initial_frame` must decompose H(path start) with its slots in the flow's
// initial slot order. Unit gauge transports the unit-normalized frame; the
// vectors themselves are left unnormalized so that U and the holonomy agree.
TransportResult transport_frame(const FamilySpec& family, const SpectralFlow& flow, const EigenSystem& initial_frame,
                                Gauge gauge = Gauge::Raw);
// Starts from the flow's own decomposition at t = 0.
TransportResult transport_frame(const FamilySpec& family, const SpectralFlow& flow, Gauge gauge = Gauge::Raw);

// Throws NotALoop for open paths.
HolonomyElement holonomy_of(const TransportResult& result);

// -i ln z_k on the principal branch; real part in (-pi, pi], imaginary part
// -ln|z_k|. Throws NonCyclicBand unless the loop returns band k to slot k.
Complex geometric_phase(const TransportResult& result, int band);

// -(i / hbar) T_phys * integral of E_k(t) over t in [0, 1], trapezoid rule
// over the flow samples.
Complex dynamical_phase(const SpectralFlow& flow, int band, double t_phys = 1.0, double hbar = 1.0);

// transport_frame with every band additionally multiplied by exp(gamma_dyn)
// accumulated along its own band function.
TransportResult total_transport(const FamilySpec& family, const SpectralFlow& flow, const EigenSystem& initial_frame,
                                double t_phys = 1.0, double hbar = 1.0, Gauge gauge = Gauge::Raw);

// U with Psi_j(T) = sum_k U(j, k) ref_k.
Eigen::MatrixXcd open_path_frame_matrix(const TransportResult& result, const EigenSystem& reference);

}  // namespace eigenflow
