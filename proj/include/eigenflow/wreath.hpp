// Elements of the wreath product C^x wr I_n: a tuple of nonzero scale
// factors paired with a permutation. Holonomies of eigenframes live here.
//
// Group law (z1, s1)(z2, s2) = (z1 * (s1 z2), s1 s2), with (s z)_j = z_{s^-1(j)}.
// The element acts on a frame by (z, s) f = (z_j f_{s^-1(j)}).

#pragma once

#include "eigenflow/permutation.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace eigenflow {

class HolonomyElement {
public:
    HolonomyElement(Eigen::VectorXcd z, Permutation sigma);

    static HolonomyElement identity(int n);

    int size() const noexcept { return static_cast<int>(z_.size()); }
    const Eigen::VectorXcd& z() const noexcept { return z_; }
    const Permutation& sigma() const noexcept { return sigma_; }

    HolonomyElement inverse() const;

    // Generalized permutation matrix: row j holds z_j in column sigma^-1(j),
    // so (M f)_j = z_j f_{sigma^-1(j)} and M(g h) = M(g) M(h).
    Eigen::MatrixXcd matrix() const;

    // Frame given by columns.
    Eigen::MatrixXcd act(const Eigen::MatrixXcd& frame) const;

    friend HolonomyElement operator*(const HolonomyElement& a, const HolonomyElement& b);

private:
    Eigen::VectorXcd z_;
    Permutation sigma_;
};

// g h g^-1: the holonomy seen from the frame g f.
HolonomyElement gauge_conjugate(const HolonomyElement& h, const HolonomyElement& g);

struct CycleInvariant {
    std::vector<int> cycle;  // 0-based slots, fixed points included
    std::complex<double> factor;
    double phase;            // arg(factor) in (-pi, pi]
};

// One entry per cycle of sigma, fixed points included, in order of the
// smallest slot.
std::vector<CycleInvariant> cycle_invariants(const HolonomyElement& h);

}  // namespace eigenflow
