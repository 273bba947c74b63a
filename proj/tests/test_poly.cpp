#include "nambu/errors.hpp"
#include "nambu/poly.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <vector>

using namespace nambu;

namespace {

const VarId q = VarId::q();
const VarId p = VarId::p();
const VarId x1 = VarId::x(1);
const VarId x2 = VarId::x(2);
const VarId x3 = VarId::x(3);
const VarId x4 = VarId::x(4);

Poly v(VarId id, int e = 1) { return Poly::var(id, e); }

} // namespace

TEST_CASE("eval: direct values") {
    CHECK(v(x1, 2).eval({{x1, 3.0}}) == 9.0);
    const Poly g = 2.0 * v(x3, 2) - 2.0 * v(x1) * v(x2);
    CHECK(g.eval({{x1, 1.5}, {x2, 0.5}, {x3, 0.0}}) == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(Poly().eval({}) == 0.0);
    CHECK(Poly().eval({{x1, 2.0}}) == 0.0);
}

TEST_CASE("eval: missing variable names the unbound VarId") {
    const Poly f = v(x1) * v(x3);
    try {
        (void)f.eval({{x1, 1.0}});
        FAIL("expected MissingVariable");
    } catch (const MissingVariable& e) {
        CHECK(e.variable() == "x3_0");
    }
}

TEST_CASE("partial: examples") {
    CHECK(v(q, 2).partial(q) == 2.0 * v(q));
    const Poly f = 3.0 * v(x3) * v(x1) - 2.0 * v(x1, 3);
    CHECK(f.partial(x1) == 3.0 * v(x3) - 6.0 * v(x1, 2));
    CHECK(v(p, 2).partial(q).is_zero());
    CHECK(Poly(4.0).partial(q).is_zero());
}

TEST_CASE("arith: cancellation, products, scaling") {
    const Poly sum = (v(x3) - v(x1, 2)) + v(x1, 2);
    CHECK(sum == v(x3));
    CHECK(sum.size() == 1);
    CHECK((v(q) * v(p)).terms().size() == 1);
    CHECK((v(q) * v(p)).coeff({{q, 1}, {p, 1}}) == 1.0);
    const Poly half = scale(v(x4), 0.5);
    CHECK(half.coeff({{x4, 1}}) == 0.5);
    CHECK((v(x1) - v(x1)).is_zero());
    CHECK((0.0 * v(x1)).is_zero());
}

TEST_CASE("no stored term carries a zero coefficient") {
    const std::vector<VarId> vars{q, p, x1};
    for (int trial = 0; trial < 50; ++trial) {
        const Poly f = oracle::random_poly(vars, 6, 3);
        const Poly g = oracle::random_poly(vars, 6, 3);
        for (const Poly& h : {f + g, f - g, f * g, f - f, f.partial(q)}) {
            for (const auto& [m, c] : h.terms()) CHECK(c != 0.0);
        }
    }
}

TEST_CASE("degree and variables") {
    const Poly f = 3.0 * v(x3) * v(x1) - 2.0 * v(x1, 3) + 1.0;
    CHECK(f.degree() == 3);
    CHECK(f.degree_in(x1) == 3);
    CHECK(f.degree_in(x3) == 1);
    CHECK(f.degree_in(x2) == 0);
    CHECK(Poly().degree() == -1);
    CHECK(f.variables() == std::set<VarId>{x1, x3});
}

TEST_CASE("property: partial derivatives match centred finite differences") {
    const std::vector<VarId> vars{q, p, VarId::q(1), VarId::p(1)};
    for (int trial = 0; trial < 100; ++trial) {
        const Poly f = oracle::random_poly(vars, 5, 3, false);
        const VarId d = vars[static_cast<std::size_t>(oracle::uniform_int(0, 3))];
        const Assignment at = oracle::random_point(vars, -1.5, 1.5);
        const double exact = f.partial(d).eval(at);
        const double fd = oracle::central_difference(f, at, d);
        CHECK(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("property: ring axioms hold exactly as term maps") {
    const std::vector<VarId> vars{x1, x2, x3};
    for (int trial = 0; trial < 100; ++trial) {
        const Poly f = oracle::random_poly(vars, 4, 2);
        const Poly g = oracle::random_poly(vars, 4, 2);
        const Poly h = oracle::random_poly(vars, 4, 2);
        CHECK((f + g) + h == f + (g + h));
        CHECK(f * (g + h) == f * g + f * h);
        CHECK(f * g == g * f);
        CHECK((f * g) * h == f * (g * h));
        CHECK(f - f == Poly());
    }
}

TEST_CASE("property: mixed partials commute exactly") {
    const std::vector<VarId> vars{q, p, x1};
    for (int trial = 0; trial < 100; ++trial) {
        const Poly f = oracle::random_poly(vars, 6, 4);
        const VarId a = vars[static_cast<std::size_t>(oracle::uniform_int(0, 2))];
        const VarId b = vars[static_cast<std::size_t>(oracle::uniform_int(0, 2))];
        CHECK(f.partial(a).partial(b) == f.partial(b).partial(a));
    }
}

TEST_CASE("pow and substitute") {
    const Poly f = v(q) + v(p);
    CHECK(f.pow(2) == v(q, 2) + 2.0 * v(q) * v(p) + v(p, 2));
    CHECK(f.pow(0) == Poly(1.0));
    const Poly g = v(x3) - v(x1, 2);
    const Poly classical = g.substitute({{x3, v(q, 2)}, {x1, v(q)}});
    CHECK(classical.is_zero());
    // Unmapped variables are kept.
    CHECK(v(x2).substitute({{x1, v(q)}}) == v(x2));
}

TEST_CASE("text: serialisation and parsing") {
    const Poly f = Poly::parse("0.5*x4 + 0.5*x3 + 0.3*x3*x1 - 0.2*x1^3");
    CHECK(f.coeff({{x4, 1}}) == 0.5);
    CHECK(f.coeff({{x3, 1}}) == 0.5);
    CHECK(f.coeff({{x1, 1}, {x3, 1}}) == doctest::Approx(0.3));
    CHECK(f.coeff({{x1, 3}}) == doctest::Approx(-0.2));
    CHECK(Poly::parse(" 0.5 * x4_0+0.5*x3_0 ") == Poly::parse("0.5*x4+0.5*x3"));
    CHECK(Poly::parse("(q + p)^2") == (v(q) + v(p)).pow(2));
    CHECK(Poly::parse("-q1*p1") == -(v(VarId::q(1)) * v(VarId::p(1))));
    CHECK(Poly::parse("x2_1").variables() == std::set<VarId>{VarId::x(2, 1)});
    CHECK_THROWS_AS(Poly::parse("0.5*"), ParseError);
    CHECK_THROWS_AS(Poly::parse("x1 +* x2"), ParseError);
    CHECK_THROWS_AS(Poly::parse("sin(q)"), ParseError);
    CHECK_THROWS_AS(parse_var("y3"), ParseError);
}

TEST_CASE("text: round trip of random polynomials") {
    const std::vector<VarId> vars{q, p, x1, VarId::x(2, 1)};
    for (int trial = 0; trial < 50; ++trial) {
        const Poly f = oracle::random_poly(vars, 5, 3);
        CHECK(Poly::parse(f.to_string()) == f);
    }
    CHECK(Poly().to_string() == "0");
    CHECK(Poly::parse("0") == Poly());
}

TEST_CASE("shift_dof moves every DOF-0 variable") {
    const Poly f = v(q) * v(x3) + v(p, 2);
    const Poly g = shift_dof(f, 2);
    CHECK(g == v(VarId::q(2)) * v(VarId::x(3, 2)) + v(VarId::p(2), 2));
}

TEST_CASE("CompiledPoly agrees with eval") {
    const std::vector<VarId> vars{q, p, x1, x2};
    for (int trial = 0; trial < 50; ++trial) {
        const Poly f = oracle::random_poly(vars, 6, 3, false);
        const Assignment at = oracle::random_point(vars);
        std::vector<double> flat;
        for (VarId id : vars) flat.push_back(at.at(id));
        const CompiledPoly c(f, vars);
        CHECK(c(flat) == doctest::Approx(f.eval(at)).epsilon(1e-12));
    }
    const std::vector<VarId> short_order{q};
    CHECK_THROWS_AS(CompiledPoly(v(p), short_order), MissingVariable);
}
