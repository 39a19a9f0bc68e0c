#include "support.hpp"

#include "eigenflow/transport.hpp"

#include <doctest.h>

using namespace eigenflow;
using testing::pi;

namespace {

TransportResult run(const FamilySpec& f, const PathSpec& p, const EigenSystem& s0, int samples = 64) {
    LiftOptions o;
    o.init_samples = samples;
    return transport_frame(f, lift_path(f, p, o, s0), s0);
}

bool same(const HolonomyElement& a, const HolonomyElement& b, double tol) {
    return a.sigma() == b.sigma() && (a.z() - b.z()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("real symmetric loop around the diabolic point") {
    const FamilySpec dp = testing::preset("dp");
    const TransportResult r = testing::transport(dp, testing::unit_circle(), 64);
    const HolonomyElement h = holonomy_of(r);
    CHECK(h.sigma().is_identity());
    CHECK(std::abs(h.z()(0) + 1.0) < 1e-10);
    CHECK(std::abs(h.z()(1) + 1.0) < 1e-10);
    CHECK((r.transported.col(0) + Eigen::Vector2cd(1, 0)).norm() < 1e-10);
    const Complex g = geometric_phase(r, 0);
    CHECK(std::abs(g.real() - pi) < 1e-10);
    CHECK(std::abs(g.imag()) < 1e-10);
    CHECK(r.max_residual < 1e-12);
}

TEST_CASE("EP2 loop holonomy against direct integration") {
    const FamilySpec ep2 = testing::preset("ep2");
    const PathSpec loop = testing::ep2_loop();
    const EigenSystem s0 = testing::start_frame(ep2, loop.start());
    const TransportResult r = run(ep2, loop, s0, 512);
    const HolonomyElement h = holonomy_of(r);
    CHECK(h.sigma().cycle_string() == "(1 2)");

    for (int b = 0; b < 2; ++b) {
        const Eigen::VectorXcd oracle = testing::rk4_transport(ep2, loop, s0.vec(b), 30000);
        CHECK((r.transported.col(b) - oracle).norm() < 1e-6);
        // H is complex symmetric, so psi^T psi is conserved
        const Complex q0 = s0.vec(b).transpose() * s0.vec(b);
        const Complex q1 = r.transported.col(b).transpose() * r.transported.col(b);
        CHECK(std::abs(q1 - q0) < 1e-10);
    }
    // e1 -> e2, e2 -> -e1
    CHECK(std::abs(h.z()(0) - 1.0) < 1e-10);
    CHECK(std::abs(h.z()(1) + 1.0) < 1e-10);
    CHECK_THROWS_AS(geometric_phase(r, 0), NonCyclicBand);

    // rescaling the initial frame conjugates the holonomy
    const EigenSystem s1 = s0.rescaled(Eigen::Vector2cd(Complex(0, 1), 1));
    const HolonomyElement h1 = holonomy_of(run(ep2, loop, s1, 512));
    CHECK(std::abs(h1.z()(0) - Complex(0, 1)) < 1e-10);
    CHECK(std::abs(h1.z()(1) - Complex(0, 1)) < 1e-10);

    // twice around: both bands return with factor -1
    const HolonomyElement h2 = holonomy_of(run(ep2, testing::ep2_loop(2), s0, 512));
    CHECK(h2.sigma().is_identity());
    CHECK(std::abs(h2.z()(0) + 1.0) < 1e-10);
    CHECK(std::abs(h2.z()(1) + 1.0) < 1e-10);
    CHECK(same(h2, h * h, 1e-10));
}

TEST_CASE("constant family transports trivially") {
    const FamilySpec c = testing::preset("constant");
    const TransportResult r = testing::transport(c, testing::unit_circle(), 16);
    CHECK(same(holonomy_of(r), HolonomyElement::identity(2), 1e-15));
    CHECK(r.log_factors.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("open paths") {
    const FamilySpec dp = testing::preset("dp");
    const PathSpec quarter = testing::parametric("cos(pi*t/2), sin(pi*t/2)");
    const TransportResult r = testing::transport(dp, quarter, 64);
    CHECK_FALSE(r.holonomy.has_value());
    CHECK_THROWS_AS(holonomy_of(r), NotALoop);
    CHECK_THROWS_AS(geometric_phase(r, 0), NotALoop);

    const EigenSystem ref = testing::start_frame(dp, quarter.end());
    const Eigen::MatrixXcd u = open_path_frame_matrix(r, ref);
    const double c = std::sqrt(0.5);
    CHECK(std::abs(u(0, 0) - c) < 1e-10);
    CHECK(std::abs(u(0, 1)) < 1e-10);
    CHECK(std::abs(u(1, 0)) < 1e-10);
    CHECK(std::abs(u(1, 1) + c) < 1e-10);
    CHECK((r.transported - ref.frame() * u.transpose()).norm() < 1e-12);
}

TEST_CASE("initial frame must match the flow") {
    const FamilySpec dp = testing::preset("dp");
    const PathSpec circle = testing::unit_circle();
    const SpectralFlow flow = lift_path(dp, circle, {}, testing::start_frame(dp, circle.start()));
    const EigenSystem wrong = testing::start_frame(dp, circle.start(), BandOrder::Ascending);
    CHECK_THROWS_AS(transport_frame(dp, flow, wrong), DimensionError);
    CHECK_NOTHROW(transport_frame(dp, flow));
}

TEST_CASE("dynamical and total phases") {
    const FamilySpec c = testing::preset("constant");
    const PathSpec circle = testing::unit_circle();
    const EigenSystem s0 = testing::start_frame(c, circle.start());
    const SpectralFlow flow = lift_path(c, circle, {}, s0);
    CHECK(std::abs(dynamical_phase(flow, 0, 2.0, 0.5) - Complex(0, -4)) < 1e-14);
    CHECK(std::abs(dynamical_phase(flow, 1, 2.0, 0.5) - Complex(0, 4)) < 1e-14);

    const TransportResult t = total_transport(c, flow, s0, 2.0, 0.5);
    CHECK(std::abs(t.holonomy->z()(0) - std::exp(Complex(0, -4))) < 1e-13);
    CHECK(std::abs(t.holonomy->z()(1) - std::exp(Complex(0, 4))) < 1e-13);

    // DP: the total factor splits into geometric and dynamical parts
    const FamilySpec dp = testing::preset("dp");
    const EigenSystem d0 = testing::start_frame(dp, circle.start());
    const SpectralFlow dflow = lift_path(dp, circle, {}, d0);
    const TransportResult g = transport_frame(dp, dflow, d0);
    const TransportResult tot = total_transport(dp, dflow, d0, 3.0, 1.0);
    for (int b = 0; b < 2; ++b) {
        const Complex expect = g.holonomy->z()(b) * std::exp(dynamical_phase(dflow, b, 3.0, 1.0));
        CHECK(std::abs(tot.holonomy->z()(b) - expect) < 1e-12);
    }
}

TEST_CASE("interior gauge does not matter") {
    const FamilySpec f = testing::three_level();
    const PathSpec loop = testing::loop_around(testing::kEpA, 0.15);
    const EigenSystem s0 = testing::start_frame(f, loop.start());
    const SpectralFlow flow = lift_path(f, loop, {}, s0);
    const TransportResult base = transport_frame(f, flow, s0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Eigen::VectorXcd> scales;
        for (int k = 0; k < flow.size(); ++k) {
            Eigen::VectorXcd s(3);
            for (int j = 0; j < 3; ++j) s(j) = testing::random_unit_annulus(0.1, 10.0);
            scales.push_back(s);
        }
        const TransportResult r = transport_frame(f, flow.rescaled(scales), s0);
        CHECK((r.transported - base.transported).norm() <= 1e-10 * base.transported.norm());
    }
}

TEST_CASE("reversal and concatenation") {
    const FamilySpec f = testing::three_level();
    const PathSpec a = testing::loop_around(testing::kEpA, 0.15);
    const PathSpec b = testing::loop_around(testing::kEpB, 0.15);
    const EigenSystem s0 = testing::start_frame(f, a.start());
    const HolonomyElement ha = holonomy_of(run(f, a, s0, 256));
    const HolonomyElement hb = holonomy_of(run(f, b, s0, 256));
    CHECK(same(holonomy_of(run(f, a.reversed(), s0, 256)), ha.inverse(), 1e-8));

    const HolonomyElement hab = holonomy_of(run(f, a.then(b), s0, 256));
    CHECK(same(hab, ha * hb, 1e-8));
    CHECK_FALSE(same(hab, hb * ha, 1e-3));
    CHECK(same(holonomy_of(run(f, b.then(a), s0, 256)), hb * ha, 1e-8));
}

TEST_CASE("unit gauge keeps the cycle invariants") {
    const FamilySpec f = testing::three_level();
    const PathSpec loop = testing::loop_around(testing::kEpA, 0.15).then(testing::loop_around(testing::kEpB, 0.15));
    const EigenSystem s0 = testing::start_frame(f, loop.start());
    const SpectralFlow flow = lift_path(f, loop, {}, s0);
    const auto raw = cycle_invariants(*transport_frame(f, flow, s0, Gauge::Raw).holonomy);
    const TransportResult unit = transport_frame(f, flow, s0, Gauge::Unit);
    CHECK(unit.gauge == Gauge::Unit);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(unit.initial_frame.vec(k).norm() - 1.0) < 1e-14);
    const auto u = cycle_invariants(*unit.holonomy);
    REQUIRE(raw.size() == u.size());
    for (std::size_t k = 0; k < u.size(); ++k) CHECK(std::abs(raw[k].factor - u[k].factor) < 1e-10);
}

TEST_CASE("flat region: holonomy depends only on the homotopy class") {
    const FamilySpec dp = testing::preset("dp");
    const EigenSystem s0 = testing::start_frame(dp, Eigen::Vector2d(1, 0));
    const HolonomyElement circle = holonomy_of(run(dp, testing::unit_circle(), s0));
    const HolonomyElement ellipse = holonomy_of(run(dp, testing::parametric("cos(2*pi*t), 0.4*sin(2*pi*t)"), s0));
    const HolonomyElement wobble =
        holonomy_of(run(dp, testing::parametric("(1 + 0.3*sin(6*pi*t))*cos(2*pi*t), (1 + 0.3*sin(6*pi*t))*sin(2*pi*t)"), s0));
    CHECK(same(circle, ellipse, 1e-9));
    CHECK(same(circle, wobble, 1e-9));
    const HolonomyElement trivial = holonomy_of(run(dp, testing::parametric("1.5 - 0.5*cos(2*pi*t), 0.5*sin(2*pi*t)"), s0));
    CHECK(same(trivial, HolonomyElement::identity(2), 1e-9));
}
