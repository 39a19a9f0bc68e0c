// Lifting parameter paths to the energy bands.
//
// A path t ∈ [0,1] ↦ x(t) is sampled, decomposed at every sample, and
// consecutive spectra are matched by the minimal-displacement bijection.
// A step is accepted only when every eigenvalue moves less than half the gap
// at the earlier sample; otherwise the step is bisected. Under that criterion
// the matching is the unique bijection within gap/2, so the discrete lift
// follows the covering Spec(H) → N(H) faithfully.

#pragma once

#include "eigenflow/expr.hpp"
#include "eigenflow/permutation.hpp"
#include "eigenflow/spectra.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace eigenflow {

class PathSpec {
public:
    struct Segment {
        enum class Kind { Parametric, Polyline };
        Kind kind = Kind::Polyline;
        // Parametric: one tree per family parameter over `num_symbols` symbols,
        // evaluated at symbols = base + s · dir for local s ∈ [0, 1].
        std::vector<expr::NodePtr> coords;
        Eigen::VectorXd base;
        Eigen::VectorXd dir;
        // Polyline: ≥ 2 vertices, traversed at equal local time per edge.
        std::vector<ParamPoint> vertices;

        int pieces() const;
        ParamPoint at(double s) const;
    };

    // Parametric path over the single symbol t ∈ [0, 1].
    static PathSpec parametric(std::vector<expr::NodePtr> coords);
    static PathSpec polyline(std::vector<ParamPoint> vertices);
    static PathSpec from_segments(std::vector<Segment> segments);

    // This path followed by `next`; both keep an equal share of [0, 1] per segment.
    PathSpec then(const PathSpec& next) const;
    PathSpec reversed() const;

    int dim() const;
    ParamPoint at(double t) const;
    ParamPoint start() const { return at(0.0); }
    ParamPoint end() const { return at(1.0); }
    // Endpoints coincide within 1e-12 (max norm).
    bool is_loop() const;

    // Uniform samples per segment piece with piece boundaries included.
    std::vector<double> initial_times(int init_samples) const;

    const std::vector<Segment>& segments() const noexcept { return segments_; }

private:
    std::vector<Segment> segments_;
};

struct LiftOptions {
    double tol_gap = 1e-8;
    int max_depth = 40;
    int init_samples = 64;
};

class SpectralFlow {
public:
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<ParamPoint>& points() const noexcept { return points_; }
    const std::vector<EigenSystem>& systems() const noexcept { return systems_; }
    // matchings()[k] maps slots of sample k to slots of sample k + 1.
    const std::vector<Permutation>& matchings() const noexcept { return matchings_; }
    // Composite of all matchings: initial slot ↦ slot at the final sample.
    const Permutation& composite() const noexcept { return composite_; }

    bool is_loop() const noexcept { return is_loop_; }
    int dim() const { return systems_.front().dim(); }
    int size() const { return static_cast<int>(times_.size()); }

    // Slot at `sample` of the band that starts in slot `band`.
    int slot(int band, int sample) const { return slots_[static_cast<std::size_t>(sample)][static_cast<std::size_t>(band)]; }
    Complex energy(int band, int sample) const { return systems_[static_cast<std::size_t>(sample)].lambda(slot(band, sample)); }

    double min_gap() const noexcept { return min_gap_; }
    int depth_reached() const noexcept { return depth_reached_; }

    // Same flow with every sample's eigenvectors rescaled (v_k ↦ c_k v_k);
    // scales[sample](slot).
    SpectralFlow rescaled(const std::vector<Eigen::VectorXcd>& scales) const;

    friend SpectralFlow lift_path(const FamilySpec&, const PathSpec&, const LiftOptions&,
                                  const std::optional<EigenSystem>&);

private:
    SpectralFlow() = default;
    void finish();

    std::vector<double> times_;
    std::vector<ParamPoint> points_;
    std::vector<EigenSystem> systems_;
    std::vector<Permutation> matchings_;
    Permutation composite_;
    std::vector<std::vector<int>> slots_;
    bool is_loop_ = false;
    double min_gap_ = 0.0;
    int depth_reached_ = 0;
};

// `initial`, when given, fixes the slot order and gauge at t = 0; it must
// decompose H(path.start()). Otherwise the solver's decomposition is used.
SpectralFlow lift_path(const FamilySpec& family, const PathSpec& path, const LiftOptions& opts = {},
                       const std::optional<EigenSystem>& initial = std::nullopt);

// Minimal total |Δλ| bijection from `from` to `to`, μ(i) = slot in `to`.
// Ties go to the lexicographically smallest one-line form (exhaustive for
// n ≤ 6, Hungarian assignment above).
Permutation optimal_matching(const Eigen::VectorXcd& from, const Eigen::VectorXcd& to);

// max_i |to(μ(i)) − from(i)|
double max_displacement(const Eigen::VectorXcd& from, const Eigen::VectorXcd& to, const Permutation& mu);

// σ with (final tuple) = σ·(initial tuple), (σ·λ)_j = λ_{σ⁻¹(j)}: the value
// in initial slot k is found in slot σ(k) of the transported tuple.
Permutation monodromy(const SpectralFlow& flow);

struct BandFunction {
    std::vector<double> times;
    std::vector<Complex> values;
};

BandFunction band_function(const SpectralFlow& flow, int band);

}  // namespace eigenflow
