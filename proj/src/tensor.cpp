#include "eigenflow/tensor.hpp"

#include "eigenflow/flow.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace eigenflow {

namespace {

std::string point_string(const ParamPoint& x) {
    std::ostringstream s;
    s << "(";
    for (Eigen::Index k = 0; k < x.size(); ++k) s << (k ? ", " : "") << x(k);
    s << ")";
    return s.str();
}

std::string num(double x) {
    std::ostringstream s;
    s << x;
    return s.str();
}

EigenSystem ordered_at(const FamilySpec& family, const ParamPoint& x, BandOrder order, const SpectralOptions& opts = {}) {
    try {
        return order_bands(decompose(family.eval(x), opts), order);
    } catch (const DegenerateOperator& e) {
        throw DegenerateOperator("degenerate spectrum at " + point_string(x) + ": " + e.what());
    }
}

void check_band(int band, int n) {
    if (band < 0 || band >= n) throw DimensionError("band index " + std::to_string(band + 1) + " out of range");
}

}  // namespace

TensorResult qgt(const EigenSystem& sys, const std::vector<Eigen::MatrixXcd>& dH, int band) {
    const int n = sys.dim();
    check_band(band, n);
    const int d = static_cast<int>(dH.size());
    // A(i, m) = theta^k dH_i v_m,  B(i, m) = theta^m dH_i v_k
    Eigen::MatrixXcd a(d, n), b(d, n);
    for (int i = 0; i < d; ++i) {
        if (dH[static_cast<std::size_t>(i)].rows() != n || dH[static_cast<std::size_t>(i)].cols() != n) {
            throw DimensionError("qgt: derivative matrix has the wrong size");
        }
        const Eigen::MatrixXcd t = sys.coframe() * dH[static_cast<std::size_t>(i)] * sys.frame();
        a.row(i) = t.row(band);
        b.row(i) = t.col(band).transpose();
    }
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 0; m < n; ++m) {
        if (m == band) continue;
        const Complex diff = sys.lambda(band) - sys.lambda(m);
        g += a.col(m) * b.col(m).transpose() / (diff * diff);
    }
    TensorResult r;
    r.band = band;
    r.G = g;
    r.M = 0.5 * (g + g.transpose());
    r.K = g - g.transpose();
    return r;
}

TensorResult qgt(const FamilySpec& family, const ParamPoint& x, int band, BandOrder order, const SpectralOptions& opts) {
    TensorResult r = qgt(ordered_at(family, x, order, opts), family.eval_gradient(x), band);
    r.x = x;
    return r;
}

Eigen::MatrixXcd curvature(const FamilySpec& family, const ParamPoint& x, int band, BandOrder order) {
    return qgt(family, x, band, order).K;
}

double flatness_check(const FamilySpec& family, const std::vector<ParamPoint>& region, int band, BandOrder order) {
    double worst = 0.0;
    for (const auto& x : region) worst = std::max(worst, curvature(family, x, band, order).cwiseAbs().maxCoeff());
    return worst;
}

// ----------------------------------------------------------------- surfaces

expr::SymbolTable surface_symbols() { return {{"u", "v"}, {{"pi", std::numbers::pi}}}; }

ParamPoint SurfaceGrid::at(double u, double v) const {
    const double s[2] = {u, v};
    ParamPoint x(dim());
    for (int k = 0; k < dim(); ++k) {
        const Complex c = expr::evaluate(*map[static_cast<std::size_t>(k)], s);
        if (!std::isfinite(c.real()) || std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c.real()))) {
            throw DomainError("surface coordinate " + std::to_string(k + 1) + " is not a finite real number");
        }
        x(k) = c.real();
    }
    return x;
}

Eigen::MatrixXd SurfaceGrid::jacobian(double u, double v) const {
    const double s[2] = {u, v};
    Eigen::MatrixXd j(dim(), 2);
    for (int k = 0; k < dim(); ++k) {
        for (std::size_t w = 0; w < 2; ++w) j(k, static_cast<Eigen::Index>(w)) = expr::evaluate_dual(*map[static_cast<std::size_t>(k)], s, w).slope.real();
    }
    return j;
}

namespace {

struct Node {
    ParamPoint x;
    EigenSystem sys;
    int slot_a = -1;
    int slot_b = -1;
};

int nearest_slot(const EigenSystem& sys, Complex value) {
    int best = 0;
    for (int k = 1; k < sys.dim(); ++k) {
        if (std::abs(sys.lambda(k) - value) < std::abs(sys.lambda(best) - value)) best = k;
    }
    return best;
}

// Slot in `to` reached by following slot `from_slot` of `from` along the chord.
int track(const FamilySpec& family, const ParamPoint& xa, const EigenSystem& from, int from_slot, const ParamPoint& xb,
          const EigenSystem& to) {
    const Permutation mu = optimal_matching(from.lambdas(), to.lambdas());
    if (max_displacement(from.lambdas(), to.lambdas(), mu) < 0.5 * from.gap()) return mu(from_slot);
    LiftOptions opts;
    opts.init_samples = 2;
    const SpectralFlow flow = lift_path(family, PathSpec::polyline({xa, xb}), opts, from);
    return nearest_slot(to, flow.energy(from_slot, flow.size() - 1));
}

}  // namespace

CurvaturePhase curvature_phase(const FamilySpec& family, const SurfaceGrid& surface, int band, BandOrder order) {
    if (surface.dim() != family.num_params()) throw DimensionError("surface map dimension differs from the family");
    if (surface.n < 1) throw DimensionError("surface grid needs at least one cell");
    if (surface.orientation != 1 && surface.orientation != -1) throw DimensionError("orientation must be +1 or -1");
    const int n = surface.n;
    const double du = (surface.u1 - surface.u0) / n;
    const double dv = (surface.v1 - surface.v0) / n;

    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    double min_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            const ParamPoint x = surface.at(surface.u0 + a * du, surface.v0 + b * dv);
            EigenSystem sys = ordered_at(family, x, order);
            min_gap = std::min(min_gap, sys.gap());
            nodes.push_back({x, std::move(sys), -1, -1});
        }
    }
    auto node = [&](int a, int b) -> Node& { return nodes[static_cast<std::size_t>(a * (n + 1) + b)]; };
    check_band(band, node(0, 0).sys.dim());
    auto step = [&](int a0, int b0, int a1, int b1, int slot) {
        return track(family, node(a0, b0).x, node(a0, b0).sys, slot, node(a1, b1).x, node(a1, b1).sys);
    };

    // route a: up the first column, then along each row; route b: the transpose
    node(0, 0).slot_a = node(0, 0).slot_b = band;
    for (int b = 1; b <= n; ++b) node(0, b).slot_a = step(0, b - 1, 0, b, node(0, b - 1).slot_a);
    for (int b = 0; b <= n; ++b) {
        for (int a = 1; a <= n; ++a) node(a, b).slot_a = step(a - 1, b, a, b, node(a - 1, b).slot_a);
    }
    for (int a = 1; a <= n; ++a) node(a, 0).slot_b = step(a - 1, 0, a, 0, node(a - 1, 0).slot_b);
    for (int a = 0; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) node(a, b).slot_b = step(a, b - 1, a, b, node(a, b - 1).slot_b);
    }
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            if (node(a, b).slot_a != node(a, b).slot_b) {
                throw BandAmbiguity("band tracking depends on the route at " + point_string(node(a, b).x) +
                                    "; the surface encloses an exceptional point");
            }
        }
    }
    // grid nodes that map to the same parameter point must carry the same energy
    std::map<std::vector<long long>, Complex> seen;
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            const Node& nd = node(a, b);
            std::vector<long long> key(static_cast<std::size_t>(nd.x.size()));
            for (Eigen::Index k = 0; k < nd.x.size(); ++k) key[static_cast<std::size_t>(k)] = std::llround(nd.x(k) * 1e10);
            const Complex e = nd.sys.lambda(nd.slot_a);
            const auto [it, fresh] = seen.emplace(std::move(key), e);
            if (!fresh && std::abs(it->second - e) > 1e-6 * std::max(1.0, nd.sys.scale())) {
                throw BandAmbiguity("band is not single-valued on the surface at " + point_string(nd.x) +
                                    "; the surface encloses an exceptional point");
            }
        }
    }

    const double g = 0.5 / std::sqrt(3.0);
    const double offsets[2] = {0.5 - g, 0.5 + g};
    const double weight = 0.25 * du * dv;
    Complex total(0.0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Node& corner = node(a, b);
            for (double ou : offsets) {
                for (double ov : offsets) {
                    const double u = surface.u0 + (a + ou) * du;
                    const double v = surface.v0 + (b + ov) * dv;
                    const ParamPoint x = surface.at(u, v);
                    const EigenSystem sys = ordered_at(family, x, order);
                    min_gap = std::min(min_gap, sys.gap());
                    const int slot = track(family, corner.x, corner.sys, corner.slot_a, x, sys);
                    const Eigen::MatrixXcd k = qgt(sys, family.eval_gradient(x), slot).K;
                    const Eigen::MatrixXd j = surface.jacobian(u, v);
                    const Eigen::VectorXcd ju = j.col(0).cast<Complex>();
                    const Eigen::VectorXcd jv = j.col(1).cast<Complex>();
                    total += weight * (ju.transpose() * k * jv)(0);
                }
            }
        }
    }
    return {Complex(0.0, 1.0) * static_cast<double>(surface.orientation) * total, band, min_gap};
}

// ----------------------------------------------------------- metric identity

double metric_identity_check(const FamilySpec& family, const ParamPoint& x, int band, int i, int j, BandOrder order,
                             double h) {
    const EigenSystem base = ordered_at(family, x, order);
    check_band(band, base.dim());
    const int d = family.num_params();
    if (i < 0 || i >= d || j < 0 || j >= d) throw DimensionError("tangent index out of range");
    const Complex energy = base.lambda(band);
    const Eigen::RowVectorXcd theta_ref = base.covec(band);

    struct Gauged {
        Eigen::VectorXcd psi;
        Eigen::RowVectorXcd theta;
    };
    auto gauged = [&](const ParamPoint& y) {
        const EigenSystem s = decompose(family.eval(y));
        const int k = nearest_slot(s, energy);
        const Eigen::VectorXcd v = s.vec(k);
        const Complex c = (theta_ref * v)(0);
        if (std::abs(c) < 1e-8 * theta_ref.norm() * v.norm()) {
            throw GaugeBreakdown("reference gauge fails at " + point_string(y) + " (overlap " + num(std::abs(c)) + ")");
        }
        return Gauged{v / c, s.covec(k) * c};
    };
    auto derivative = [&](int p) {
        ParamPoint xp = x, xm = x;
        xp(p) += h;
        xm(p) -= h;
        const Gauged gp = gauged(xp);
        const Gauged gm = gauged(xm);
        return Gauged{(gp.psi - gm.psi) / (2.0 * h), (gp.theta - gm.theta) / (2.0 * h)};
    };
    const Gauged at = gauged(x);
    const Gauged di = derivative(i);
    const Gauged dj = derivative(j);
    const Complex l = 0.5 * ((di.theta * dj.psi)(0) + (dj.theta * di.psi)(0));
    const Complex wi = (at.theta * di.psi)(0);
    const Complex wj = (at.theta * dj.psi)(0);
    const TensorResult t = qgt(base, family.eval_gradient(x), band);
    return std::abs(t.M(i, j) - (l + wi * wj));
}

}  // namespace eigenflow
