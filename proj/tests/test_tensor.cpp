#include "support.hpp"

#include "eigenflow/tensor.hpp"

#include <doctest.h>

using namespace eigenflow;
using testing::pi;

namespace {

SurfaceGrid surface(const std::string& map, int n, double u0 = 0, double u1 = 1, double v0 = 0, double v1 = 1) {
    SurfaceGrid s;
    s.map = expr::parse_list(map, surface_symbols());
    s.n = n;
    s.u0 = u0;
    s.u1 = u1;
    s.v0 = v0;
    s.v1 = v1;
    return s;
}

// Polar cap of the unit sphere, polar angle up to `alpha`.
SurfaceGrid cap(double alpha, int n) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "sin(%.17g*u)*cos(2*pi*v), sin(%.17g*u)*sin(2*pi*v), cos(%.17g*u)", alpha, alpha, alpha);
    return surface(buf, n);
}

// K for the spin family: band 0 (lower) has K_ij = -i eps_ijk x_k / (2 r^3).
Eigen::Matrix3cd spin_k(const Eigen::Vector3d& x, int band) {
    const double r3 = std::pow(x.norm(), 3);
    Eigen::Matrix3cd k = Eigen::Matrix3cd::Zero();
    const Complex c(0, band == 0 ? -0.5 / r3 : 0.5 / r3);
    k(0, 1) = c * x(2);
    k(1, 2) = c * x(0);
    k(2, 0) = c * x(1);
    return k - Eigen::Matrix3cd(k.transpose());
}

double rel_err(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

}  // namespace

TEST_CASE("constant family has a vanishing tensor") {
    const TensorResult t = qgt(testing::preset("constant"), Eigen::Vector2d(0.3, -0.2), 0);
    CHECK(t.G.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spin at the north pole") {
    const TensorResult t = qgt(testing::preset("spin"), Eigen::Vector3d(0, 0, 1), 0);
    Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
    g(0, 0) = 0.25;
    g(1, 1) = 0.25;
    g(0, 1) = Complex(0, -0.25);
    g(1, 0) = Complex(0, 0.25);
    CHECK((t.G - g).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((t.G - (t.M + 0.5 * t.K)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("tensor against the finite-difference oracle") {
    for (const char* name : {"spin", "ep2", "dp"}) {
        const FamilySpec f = testing::preset(name);
        for (int trial = 0; trial < 20; ++trial) {
            const ParamPoint x = testing::random_point(name);
            for (int band = 0; band < 2; ++band) {
                const TensorResult t = qgt(f, x, band);
                CHECK(rel_err(t.G, testing::fd_qgt(f, x, band)) < 1e-6);
            }
        }
    }
    const FamilySpec three = testing::three_level();
    for (int trial = 0; trial < 20; ++trial) {
        const ParamPoint x = Eigen::Vector2d(testing::uniform(-0.8, 0.8), testing::uniform(-0.5, 0.5));
        for (int band = 0; band < 3; ++band) CHECK(rel_err(qgt(three, x, band).G, testing::fd_qgt(three, x, band)) < 1e-6);
    }
}

TEST_CASE("spin curvature and metric in closed form") {
    const FamilySpec f = testing::preset("spin");
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Vector3d x = testing::random_point("spin");
        const TensorResult t0 = qgt(f, x, 0);
        const TensorResult t1 = qgt(f, x, 1);
        CHECK(rel_err(t0.K, spin_k(x, 0)) < 1e-10);
        CHECK(rel_err(t1.K, -t0.K) < 1e-10);
        // Hermitian: M is the real Fubini-Study metric (1 - xx^T/r^2) / (4 r^2)
        const double r2 = x.squaredNorm();
        const Eigen::Matrix3d fs = (Eigen::Matrix3d::Identity() - x * x.transpose() / r2) / (4 * r2);
        CHECK(rel_err(t0.M, fs.cast<Complex>()) < 1e-10);
        CHECK(t0.M.imag().cwiseAbs().maxCoeff() < 1e-12 * fs.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("symmetric families are flat") {
    for (const char* name : {"dp", "ep2"}) {
        std::vector<ParamPoint> region;
        for (int k = 0; k < 50; ++k) region.push_back(testing::random_point(name));
        CHECK(flatness_check(testing::preset(name), region, 0) < 1e-12);
        CHECK(flatness_check(testing::preset(name), region, 1) < 1e-12);
    }
    CHECK(flatness_check(testing::preset("spin"), {Eigen::Vector3d(0, 0, 1)}, 0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(flatness_check(testing::preset("ep2"), {Eigen::Vector2d(0, 1)}, 0), DegenerateOperator);
}

TEST_CASE("energy scale and eigenvector gauge leave the tensor unchanged") {
    const FamilySpec f = testing::preset("spin");
    const FamilySpec g = parse_family("params x, y, z; H = [[3*z + 1, 3*(x - i*y)], [3*(x + i*y), 1 - 3*z]]");
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Vector3d x = testing::random_point("spin");
        const TensorResult a = qgt(f, x, 0);
        CHECK(rel_err(qgt(g, x, 0).G, a.G) < 1e-10);
        const EigenSystem sys = order_bands(decompose(f.eval(x)), BandOrder::Ascending);
        const EigenSystem r = sys.rescaled(Eigen::Vector2cd(testing::random_unit_annulus(), testing::random_unit_annulus()));
        CHECK(rel_err(qgt(r, f.eval_gradient(x), 0).G, a.G) < 1e-10);
    }
}

TEST_CASE("curvature phase on spheres") {
    const FamilySpec f = testing::preset("spin");
    const CurvaturePhase hemi = curvature_phase(f, cap(pi / 2, 32), 1);
    CHECK(std::abs(hemi.value.imag()) < 1e-12);
    CHECK(std::abs(std::abs(hemi.value.real()) - pi) < 1e-6);

    const CurvaturePhase c60 = curvature_phase(f, cap(pi / 3, 32), 1);
    CHECK(std::abs(std::abs(c60.value.real()) - pi / 2) < 1e-6);
    CHECK(c60.value.real() * hemi.value.real() > 0);

    // additivity over a split of the parameter square
    const std::string m = "sin(pi*u/2)*cos(2*pi*v), sin(pi*u/2)*sin(2*pi*v), cos(pi*u/2)";
    const Complex lo = curvature_phase(f, surface(m, 32, 0, 0.4), 1).value;
    const Complex hi = curvature_phase(f, surface(m, 32, 0.4, 1), 1).value;
    CHECK(std::abs(lo + hi - hemi.value) < 1e-6);

    // opposite orientation flips the sign, the other band too
    SurfaceGrid rev = cap(pi / 2, 32);
    rev.orientation = -1;
    CHECK(std::abs(curvature_phase(f, rev, 1).value + hemi.value) < 1e-10);
    CHECK(std::abs(curvature_phase(f, cap(pi / 2, 32), 0).value + hemi.value) < 1e-10);

    // shrinking caps: phase / area tends to the curvature at the pole
    for (double a : {0.1, 0.01}) {
        const double area = 2 * pi * (1 - std::cos(a));
        const CurvaturePhase p = curvature_phase(f, cap(a, 8), 1);
        CHECK(std::abs(std::abs(p.value.real()) / area - 0.5) < a * a);
    }
}

TEST_CASE("surfaces enclosing an exceptional point are ambiguous") {
    const FamilySpec f = testing::preset("ep2");
    CHECK_THROWS_AS(curvature_phase(f, surface("-0.5 + u, 0.5 + v", 15), 0), BandAmbiguity);
    const CurvaturePhase ok = curvature_phase(f, surface("0.2 + 0.5*u, -0.3 + 0.5*v", 15), 0);
    CHECK(std::abs(ok.value) < 1e-12);
}

TEST_CASE("metric identity") {
    const FamilySpec spin = testing::preset("spin");
    CHECK(metric_identity_check(spin, Eigen::Vector3d(0, 0, 1), 0, 0, 0) < 1e-6);
    for (int trial = 0; trial < 10; ++trial) {
        const ParamPoint x = testing::random_point("spin");
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) CHECK(metric_identity_check(spin, x, 0, i, j) < 1e-6);
        }
        const ParamPoint y = testing::random_point("ep2");
        CHECK(metric_identity_check(testing::preset("ep2"), y, 0, 0, 1) < 1e-6 * std::max(1.0, qgt(testing::preset("ep2"), y, 0).M.cwiseAbs().maxCoeff()));
    }
}
