#include "nambu/brackets.hpp"
#include "nambu/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>
#include <vector>

using namespace nambu;

namespace {

Poly v(VarId id, int e = 1) { return Poly::var(id, e); }
Poly x(int i, int dof = 0) { return v(VarId::x(i, dof)); }

const VarId q = VarId::q();
const VarId p = VarId::p();

// Harmonic triplet (m = w = 1).
const Poly kTripletF = 0.5 * x(2) + 0.5 * x(1);
const Poly kTripletG = 2.0 * x(3).pow(2) - 2.0 * x(1) * x(2);

// Cubic quartet (m = w = 1, g = 0.3), hand-written.
const Poly kCubicF = 0.5 * x(4) + 0.5 * x(3) + 0.1 * (3.0 * x(3) * x(1) - 2.0 * x(1).pow(3));
const Poly kG1 = x(3) - x(1).pow(2);
const Poly kG2 = x(4) - x(2).pow(2);

std::vector<Poly> henon_heiles_F_G1_G2(double lambda) {
    const Poly f = 0.5 * x(4, 0) + 0.5 * x(4, 1) + 0.5 * x(3, 0) + 0.5 * 1.21 * x(3, 1) + lambda * x(1, 0) * x(3, 1);
    const Poly g1 = x(3, 0) - x(1, 0).pow(2) + x(3, 1) - x(1, 1).pow(2);
    const Poly g2 = x(4, 0) - x(2, 0).pow(2) + x(4, 1) - x(2, 1).pow(2);
    return {f, g1, g2};
}

std::vector<Poly> random_polys(const Layout& layout, int count, int terms, int max_exp) {
    const auto vars = layout.variables();
    std::vector<Poly> out;
    for (int k = 0; k < count; ++k) out.push_back(oracle::random_poly(vars, terms, max_exp, false));
    return out;
}

} // namespace

TEST_CASE("Poisson bracket examples") {
    CHECK(poisson_bracket(v(q, 2), v(p, 2), {{q, 2.0}, {p, 3.0}}, 1) == doctest::Approx(24.0));
    for (int k = 0; k < 5; ++k) {
        const Assignment at{{q, oracle::uniform(-2, 2)}, {p, oracle::uniform(-2, 2)}};
        CHECK(poisson_bracket(v(q), v(p), at, 1) == 1.0);
        CHECK(poisson_bracket(v(q) * v(p), v(q) * v(p), at, 1) == 0.0);
    }
    CHECK(poisson_bracket_poly(v(q, 2), v(p, 2), 1) == 4.0 * v(q) * v(p));
    // Two DOF: {q0 q1, p0 p1} = q1 p1 + q0 p0.
    const Poly ab = poisson_bracket_poly(v(q) * v(VarId::q(1)), v(p) * v(VarId::p(1)), 2);
    CHECK(ab == v(VarId::q(1)) * v(VarId::p(1)) + v(q) * v(p));
}

TEST_CASE("Poisson bracket propagates missing variables") {
    CHECK_THROWS_AS(poisson_bracket(v(q) * v(p), v(p), {{q, 1.0}}, 1), MissingVariable);
}

TEST_CASE("LU determinant agrees with the Leibniz oracle") {
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> m(static_cast<std::size_t>(n * n));
            for (double& e : m) e = oracle::uniform(-3, 3);
            const double ref = oracle::leibniz_det(m, n);
            CHECK(determinant(m, n) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
    CHECK(determinant({1, 2, 2, 4}, 2) == 0.0);
    CHECK(determinant({0, 1, 1, 0}, 2) == -1.0);
}

TEST_CASE("Nambu bracket examples") {
    const Layout l3{3, 1};
    const std::vector<Poly> fns{x(1), kTripletF, kTripletG};
    const std::vector<double> s3{1.0, 2.0, 0.5};
    CHECK(nambu_bracket(fns, s3, l3) == doctest::Approx(1.0).epsilon(1e-14));

    const std::vector<Poly> repeated{kTripletF, kTripletF, kTripletG};
    for (const auto& s : sample_states(l3, 10)) CHECK(nambu_bracket(repeated, s, l3) == 0.0);

    const Layout l4{4, 1};
    const std::vector<Poly> cubic{x(2), kCubicF, kG1, kG2};
    const std::vector<double> s4{0.0, 1.8, 0.5, 3.74};
    CHECK(nambu_bracket(cubic, s4, l4) == doctest::Approx(-0.15).epsilon(1e-14));
}

TEST_CASE("Nambu bracket rejects variables outside the layout") {
    const Layout l3{3, 1};
    const std::vector<double> s{1.0, 2.0, 3.0};
    const std::vector<Poly> bad{x(1), x(4), kTripletG};
    CHECK_THROWS_AS(nambu_bracket(bad, s, l3), DimensionMismatch);
    const std::vector<Poly> other_dof{x(1), x(2, 1), x(3)};
    CHECK_THROWS_AS(nambu_bracket(other_dof, s, l3), DimensionMismatch);
    const std::vector<Poly> short_list{x(1), x(2)};
    CHECK_THROWS_AS(nambu_bracket(short_list, s, l3), DimensionMismatch);
    const std::vector<double> wrong_size{1.0, 2.0};
    const std::vector<Poly> ok{x(1), x(2), x(3)};
    CHECK_THROWS_AS(nambu_bracket(ok, wrong_size, l3), DimensionMismatch);
}

TEST_CASE("property: Nambu bracket is antisymmetric under argument swaps") {
    for (const Layout layout : {Layout{3, 1}, Layout{4, 1}, Layout{3, 2}, Layout{4, 2}}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto fns = random_polys(layout, layout.multiplet_size, 4, 2);
            const auto state = sample_states(layout, 1, 100 + static_cast<std::uint64_t>(trial)).front();
            const double base = nambu_bracket(fns, state, layout);
            const int i = oracle::uniform_int(0, layout.multiplet_size - 1);
            int j = oracle::uniform_int(0, layout.multiplet_size - 2);
            if (j >= i) ++j;
            std::swap(fns[static_cast<std::size_t>(i)], fns[static_cast<std::size_t>(j)]);
            const double swapped = nambu_bracket(fns, state, layout);
            CHECK(std::abs(base + swapped) <= 1e-12 * std::max(1.0, std::abs(base)));
        }
    }
}

TEST_CASE("property: Nambu bracket is linear in each argument") {
    for (const Layout layout : {Layout{3, 1}, Layout{4, 2}}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto fns = random_polys(layout, layout.multiplet_size, 4, 2);
            const Poly extra = random_polys(layout, 1, 4, 2).front();
            const auto state = sample_states(layout, 1, 200 + static_cast<std::uint64_t>(trial)).front();
            const double a = oracle::uniform(-2, 2);
            const double b = oracle::uniform(-2, 2);
            const auto k = static_cast<std::size_t>(oracle::uniform_int(0, layout.multiplet_size - 1));
            const double f0 = nambu_bracket(fns, state, layout);
            auto alt = fns;
            alt[k] = extra;
            const double f1 = nambu_bracket(alt, state, layout);
            alt[k] = a * fns[k] + b * extra;
            const double mixed = nambu_bracket(alt, state, layout);
            const double expected = a * f0 + b * f1;
            CHECK(std::abs(mixed - expected) <= 1e-12 * std::max(1.0, std::abs(a * f0) + std::abs(b * f1)));
        }
    }
}

TEST_CASE("property: symbolic and numeric bracket paths agree") {
    for (const Layout layout : {Layout{3, 1}, Layout{4, 1}, Layout{5, 1}, Layout{4, 2}}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto fns = random_polys(layout, layout.multiplet_size, 3, 2);
            const Poly sym = nambu_bracket_poly(fns, layout);
            for (const auto& s : sample_states(layout, 3, 300 + static_cast<std::uint64_t>(trial))) {
                const double num = nambu_bracket(fns, s, layout);
                const double viasym = sym.eval(to_assignment(s, layout));
                CHECK(std::abs(num - viasym) <= 1e-10 * std::max(1.0, std::abs(num)));
            }
        }
    }
}

TEST_CASE("jacobian_poly matches the explicit 2x2 form") {
    const std::vector<VarId> vars{VarId::x(1), VarId::x(2)};
    const Poly a = x(1).pow(2) * x(2);
    const Poly b = x(2).pow(3) + x(1);
    const std::vector<Poly> fns{a, b};
    const Poly expected = a.partial(vars[0]) * b.partial(vars[1]) - a.partial(vars[1]) * b.partial(vars[0]);
    CHECK(jacobian_poly(fns, vars) == expected);
    const std::vector<Poly> six(6, x(1));
    const std::vector<VarId> six_vars(6, VarId::x(1));
    CHECK_THROWS(jacobian_poly(six, six_vars));
}

TEST_CASE("Jacobi identity examples") {
    const auto pts = sample_points(canonical_variables(1), 10);
    for (const auto& r : check_jacobi(v(q, 2), v(p, 2), v(q) * v(p), pts, 1)) {
        CHECK(r.residual < 1e-9);
        CHECK(r.residual == std::abs(r.lhs - r.rhs));
    }
    for (const auto& r : check_jacobi(v(q), v(q), v(p, 3), pts, 1)) {
        CHECK(r.lhs == 0.0);
        CHECK(r.rhs == 0.0);
    }
    const auto vars2 = canonical_variables(2);
    const auto pts2 = sample_points(vars2, 10, 4242);
    for (int trial = 0; trial < 10; ++trial) {
        const Poly a1 = oracle::random_poly(vars2, 4, 3, false);
        const Poly a2 = oracle::random_poly(vars2, 4, 3, false);
        const Poly b = oracle::random_poly(vars2, 4, 3, false);
        for (const auto& r : check_jacobi(a1, a2, b, pts2, 2))
            CHECK(r.residual < 1e-9 * std::max(1.0, std::abs(r.lhs)));
    }
}

TEST_CASE("fundamental identity: Henon-Heiles violation equals -lambda") {
    const Layout layout{4, 2};
    const std::vector<Poly> as{x(1, 1), x(2, 1), x(2, 0), x(4, 1)};
    const auto bs = henon_heiles_F_G1_G2(-0.11);
    const auto states = sample_states(layout, 20);
    for (const auto& r : check_fundamental_identity(as, bs, states, layout)) {
        CHECK(std::abs(r.lhs) < 1e-12);
        CHECK(r.rhs == doctest::Approx(0.11).epsilon(1e-12));
        CHECK(r.residual == doctest::Approx(0.11).epsilon(1e-12));
    }
}

TEST_CASE("fundamental identity holds for single multiplets") {
    const Layout layout{3, 1};
    const auto states = sample_states(layout, 5, 99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto as = random_polys(layout, 3, 3, 2);
        const auto bs = random_polys(layout, 2, 3, 2);
        for (const auto& r : check_fundamental_identity(as, bs, states, layout))
            CHECK(r.residual < 1e-8 * std::max(1.0, std::abs(r.lhs)));
    }
    const auto bs = random_polys(layout, 2, 3, 2);
    const std::vector<Poly> dup{x(1) * x(2), x(1) * x(2), x(3)};
    for (const auto& r : check_fundamental_identity(dup, bs, states, layout)) {
        CHECK(std::abs(r.lhs) < 1e-12);
        CHECK(std::abs(r.rhs) < 1e-9);
    }
}

TEST_CASE("fundamental identity checks argument counts") {
    const Layout layout{3, 1};
    const auto states = sample_states(layout, 1);
    const std::vector<Poly> as{x(1), x(2)};
    const std::vector<Poly> bs{x(1), x(2)};
    CHECK_THROWS_AS(check_fundamental_identity(as, bs, states, layout), DimensionMismatch);
}

TEST_CASE("flow divergence vanishes for the built-in Hamiltonian sets") {
    const std::vector<Poly> trip{kTripletF, kTripletG};
    for (const auto& s : sample_states(Layout{3, 1}, 20))
        CHECK(std::abs(flow_divergence(trip, s, Layout{3, 1})) < 1e-12);
    const std::vector<Poly> cubic{kCubicF, kG1, kG2};
    for (const auto& s : sample_states(Layout{4, 1}, 20))
        CHECK(std::abs(flow_divergence(cubic, s, Layout{4, 1})) < 1e-12);
    const auto hh = henon_heiles_F_G1_G2(-0.11);
    for (const auto& s : sample_states(Layout{4, 2}, 20))
        CHECK(std::abs(flow_divergence(hh, s, Layout{4, 2})) < 1e-12);
    CHECK(divergence_poly(cubic, Layout{4, 1}).is_zero());
}

TEST_CASE("samplers are deterministic and bounded") {
    const Layout layout{4, 2};
    const auto a = sample_states(layout, 5);
    const auto b = sample_states(layout, 5);
    CHECK(a == b);
    for (const auto& s : a) {
        CHECK(s.size() == 8);
        for (double e : s) {
            CHECK(e >= -2.0);
            CHECK(e <= 2.0);
        }
    }
    CHECK(sample_states(layout, 5, 1) != a);
}

TEST_CASE("bracket reports serialise as CSV") {
    std::vector<BracketReport> reports{{0.0, 0.11, 0.11, {}}, {1.0, 1.0, 0.0, {}}};
    std::ostringstream out;
    write_bracket_reports(out, reports);
    const std::string text = out.str();
    CHECK(text.rfind("sample_index,lhs,rhs,residual\n", 0) == 0);
    CHECK(text.find("0,0,0.11,0.11\n") != std::string::npos);
    CHECK(text.find("1,1,1,0\n") != std::string::npos);
}
