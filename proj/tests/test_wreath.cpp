#include "support.hpp"

#include "eigenflow/wreath.hpp"

#include <doctest.h>

using namespace eigenflow;
using testing::uniform;

namespace {

HolonomyElement random_element(int n) {
    Eigen::VectorXcd z(n);
    for (int k = 0; k < n; ++k) z(k) = testing::random_unit_annulus();
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 0);
    std::shuffle(img.begin(), img.end(), testing::rng());
    return HolonomyElement(z, Permutation(img));
}

bool same(const HolonomyElement& a, const HolonomyElement& b, double tol = 1e-12) {
    return a.sigma() == b.sigma() && (a.z() - b.z()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("construction rejects zero factors and size mismatch") {
    CHECK_THROWS(HolonomyElement(Eigen::Vector2cd(1, 0), Permutation::identity(2)));
    CHECK_THROWS(HolonomyElement(Eigen::Vector3cd(1, 1, 1), Permutation::identity(2)));
}

TEST_CASE("group law examples") {
    const Permutation swap = Permutation::from_cycles(2, {{1, 2}});
    const HolonomyElement a(Eigen::Vector2cd(2, 3), swap);
    const HolonomyElement b(Eigen::Vector2cd(5, 7), Permutation::identity(2));
    // (2,3)(s(5,7)) = (2*7, 3*5)
    const HolonomyElement ab = a * b;
    CHECK(ab.z()(0) == Complex(14));
    CHECK(ab.z()(1) == Complex(15));
    CHECK(ab.sigma() == swap);
    const HolonomyElement ba = b * a;
    CHECK(ba.z()(0) == Complex(10));
    CHECK(ba.z()(1) == Complex(21));

    // the doubled EP2 holonomy
    const HolonomyElement h(Eigen::Vector2cd(1, -1), swap);
    const HolonomyElement h2 = h * h;
    CHECK(h2.sigma().is_identity());
    CHECK(h2.z()(0) == Complex(-1));
    CHECK(h2.z()(1) == Complex(-1));
}

TEST_CASE("matrix form") {
    const HolonomyElement h(Eigen::Vector2cd(1, -1), Permutation::from_cycles(2, {{1, 2}}));
    Eigen::Matrix2cd expect;
    expect << 0, 1, -1, 0;
    CHECK((h.matrix() - expect).norm() == 0.0);

    // a 3-cycle: row j carries z_j in column sigma^-1(j)
    const HolonomyElement c(Eigen::Vector3cd(2, 3, 5), Permutation::from_cycles(3, {{1, 2, 3}}));
    Eigen::Matrix3cd m3 = Eigen::Matrix3cd::Zero();
    m3(0, 2) = 2;
    m3(1, 0) = 3;
    m3(2, 1) = 5;
    CHECK((c.matrix() - m3).norm() == 0.0);

    // acting on a frame
    Eigen::Matrix3cd f = Eigen::Matrix3cd::Random();
    const Eigen::MatrixXcd g = c.act(f);
    CHECK((g.col(0) - 2.0 * f.col(2)).norm() < 1e-15);
    CHECK((g.col(1) - 3.0 * f.col(0)).norm() < 1e-15);
    CHECK((g.col(2) - 5.0 * f.col(1)).norm() < 1e-15);
}

TEST_CASE("group axioms and the matrix homomorphism") {
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 5;
        const auto a = random_element(n);
        const auto b = random_element(n);
        const auto c = random_element(n);
        CHECK(same((a * b) * c, a * (b * c)));
        CHECK(same(a * a.inverse(), HolonomyElement::identity(n)));
        CHECK(same(a.inverse() * a, HolonomyElement::identity(n)));
        CHECK(same(a * HolonomyElement::identity(n), a));
        CHECK(((a * b).matrix() - a.matrix() * b.matrix()).norm() < 1e-12);
        CHECK((a.inverse().matrix() - a.matrix().inverse()).norm() < 1e-10);
        const Eigen::MatrixXcd f = Eigen::MatrixXcd::Random(n, n);
        CHECK(((a * b).act(f) - a.act(b.act(f))).norm() < 1e-12);
    }
}

TEST_CASE("gauge conjugation") {
    // a swap conjugated by a diagonal rescaling
    const HolonomyElement h(Eigen::Vector2cd(1, -1), Permutation::from_cycles(2, {{1, 2}}));
    const HolonomyElement g(Eigen::Vector2cd(Complex(0, 1), 1), Permutation::identity(2));
    const HolonomyElement hg = gauge_conjugate(h, g);
    CHECK(hg.sigma() == h.sigma());
    CHECK(std::abs(hg.z()(0) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(hg.z()(1) - Complex(0, 1)) < 1e-15);

    // ((-i, -i), (1 2)) seen from the frame (i e1, e2)
    const HolonomyElement m(Eigen::Vector2cd(Complex(0, -1), Complex(0, -1)), h.sigma());
    const HolonomyElement mg = gauge_conjugate(m, g);
    CHECK(std::abs(mg.z()(0) - 1.0) < 1e-15);
    CHECK(std::abs(mg.z()(1) + 1.0) < 1e-15);

    // cycle products survive any diagonal gauge
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 4;
        const auto x = random_element(n);
        Eigen::VectorXcd s(n);
        for (int k = 0; k < n; ++k) s(k) = testing::random_unit_annulus();
        const auto y = gauge_conjugate(x, HolonomyElement(s, Permutation::identity(n)));
        const auto ix = cycle_invariants(x);
        const auto iy = cycle_invariants(y);
        REQUIRE(ix.size() == iy.size());
        for (std::size_t k = 0; k < ix.size(); ++k) {
            CHECK(ix[k].cycle == iy[k].cycle);
            CHECK(std::abs(ix[k].factor - iy[k].factor) < 1e-11 * std::abs(ix[k].factor));
        }
    }
}

TEST_CASE("cycle invariants") {
    const HolonomyElement c(Eigen::Vector4cd(2, Complex(0, 1), 5, -1), Permutation::from_cycles(4, {{1, 3}}));
    const auto inv = cycle_invariants(c);
    REQUIRE(inv.size() == 3);
    CHECK(inv[0].cycle == std::vector<int>{0, 2});
    CHECK(inv[0].factor == Complex(10));
    CHECK(inv[0].phase == 0.0);
    CHECK(inv[1].cycle == std::vector<int>{1});
    CHECK(inv[1].phase == doctest::Approx(testing::pi / 2));
    CHECK(inv[2].cycle == std::vector<int>{3});
    CHECK(inv[2].phase == doctest::Approx(testing::pi));  // -1 maps to +pi
}
