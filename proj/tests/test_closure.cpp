#include "nambu/closure.hpp"
#include "nambu/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <vector>

using namespace nambu;

namespace {

Poly v(VarId id, int e = 1) { return Poly::var(id, e); }
Poly x(int i, int dof = 0) { return v(VarId::x(i, dof)); }

double eval_at_gaussian(const Poly& f, double qc, double s2) {
    return f.eval({{VarId::x(1), qc}, {VarId::x(3), qc * qc + s2}});
}

} // namespace

TEST_CASE("reduce_moment: closure polynomials") {
    CHECK(reduce_moment(4, ClosureMode::zero_cumulant) == 3.0 * x(3).pow(2) - 2.0 * x(1).pow(4));
    CHECK(reduce_moment(4, ClosureMode::ignore_fluctuation) == 6.0 * x(3) * x(1).pow(2) - 5.0 * x(1).pow(4));
    for (auto mode : {ClosureMode::zero_cumulant, ClosureMode::ignore_fluctuation}) {
        CHECK(reduce_moment(0, mode) == Poly(1.0));
        CHECK(reduce_moment(1, mode) == x(1));
        CHECK(reduce_moment(2, mode) == x(3));
    }
    CHECK(reduce_moment(3, ClosureMode::zero_cumulant) == 3.0 * x(3) * x(1) - 2.0 * x(1).pow(3));
    CHECK(reduce_moment(2, ClosureMode::zero_cumulant, 1) == x(3, 1));
    CHECK_THROWS_AS(reduce_moment(-1, ClosureMode::zero_cumulant), UnsupportedMoment);
}

TEST_CASE("property: zero-cumulant closure is exact for Gaussians") {
    for (int trial = 0; trial < 40; ++trial) {
        const double qc = oracle::uniform(-2, 2);
        const double s2 = oracle::uniform(0.05, 1.5);
        for (int n = 0; n <= 8; ++n) {
            const double ref = oracle::gaussian_moment(n, qc, s2);
            const double got = eval_at_gaussian(reduce_moment(n, ClosureMode::zero_cumulant), qc, s2);
            CHECK(std::abs(got - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("closed-form Gaussian oracle agrees with quadrature") {
    for (int n = 0; n <= 8; ++n) {
        const double closed = oracle::gaussian_moment(n, 0.7, 0.5);
        const double quad = oracle::gaussian_moment_quadrature(n, 0.7, 0.5);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
    }
}

TEST_CASE("property: both closure modes coincide up to third order") {
    for (int n = 0; n <= 3; ++n)
        CHECK(reduce_moment(n, ClosureMode::zero_cumulant) == reduce_moment(n, ClosureMode::ignore_fluctuation));
    CHECK(reduce_moment(5, ClosureMode::zero_cumulant) != reduce_moment(5, ClosureMode::ignore_fluctuation));
}

TEST_CASE("ignore-fluctuation closure drops higher central moments") {
    // <(dq + mu)^n> keeping only <dq^2>: mu^n + C(n,2) mu^(n-2) var.
    for (int n = 2; n <= 7; ++n) {
        const double mu = 0.8;
        const double var = 0.3;
        const double ref = std::pow(mu, n) + oracle::binomial(n, 2) * std::pow(mu, n - 2) * var;
        CHECK(eval_at_gaussian(reduce_moment(n, ClosureMode::ignore_fluctuation), mu, var) ==
              doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("build_F: reference Hamiltonians") {
    const MultipletDef quartet = quartet_multiplet();
    const Poly cubic = build_F(PotentialSpec::cubic(1.0, 1.0, 0.3), quartet, ClosureMode::zero_cumulant);
    const Poly expected = 0.5 * x(4) + 0.5 * x(3) + 0.1 * (3.0 * x(3) * x(1) - 2.0 * x(1).pow(3));
    const Poly residual = cubic - expected;
    for (const auto& [m, c] : residual.terms()) CHECK(std::abs(c) < 1e-15);

    const Poly harmonic = build_F(PotentialSpec::cubic(1.0, 1.0, 0.0), triplet_multiplet(), ClosureMode::zero_cumulant);
    CHECK(harmonic == 0.5 * x(2) + 0.5 * x(1));

    const MultipletDef q2 = quartet_multiplet(2);
    const std::vector<double> masses{1.0, 1.0};
    const Poly pot = 0.5 * v(VarId::q(0), 2) + 0.605 * v(VarId::q(1), 2) - 0.11 * v(VarId::q(0)) * v(VarId::q(1), 2);
    const Poly hh = build_F(masses, pot, q2, ClosureMode::zero_cumulant);
    const Poly hh_expected =
        0.5 * x(4, 0) + 0.5 * x(4, 1) + 0.5 * x(3, 0) + 0.605 * x(3, 1) - 0.11 * x(1, 0) * x(3, 1);
    CHECK(hh == hh_expected);
}

TEST_CASE("property: zero fluctuation reduces F to the classical Hamiltonian") {
    const MultipletDef quartet = quartet_multiplet();
    for (int trial = 0; trial < 20; ++trial) {
        PotentialSpec spec;
        spec.mass = oracle::uniform(0.5, 2.0);
        for (int k = 1; k <= 6; ++k) spec.coefficients[k] = static_cast<double>(oracle::uniform_int(-3, 3));
        const Poly f = build_F(spec, quartet, ClosureMode::zero_cumulant);
        const Poly h = spec.as_poly() + (0.5 / spec.mass) * v(VarId::p(), 2);
        const Poly classical = f.substitute({{VarId::x(3), x(1).pow(2)}, {VarId::x(4), x(2).pow(2)}})
                                   .substitute({{VarId::x(1), v(VarId::q())}, {VarId::x(2), v(VarId::p())}});
        const Poly diff = classical - h;
        for (const auto& [m, c] : diff.terms()) CHECK(std::abs(c) < 1e-12);
    }
}

TEST_CASE("build_F: unsupported inputs") {
    const PotentialSpec cubic = PotentialSpec::cubic(1.0, 1.0, 0.3);
    CHECK_THROWS_AS(build_F(cubic, triplet_multiplet(), ClosureMode::zero_cumulant), UnsupportedMultiplet);
    const double m[] = {1.0};
    CHECK_THROWS_AS(build_F(m, v(VarId::q()) * v(VarId::p()), quartet_multiplet(), ClosureMode::zero_cumulant),
                    UnsupportedMoment);
    const double bad_mass[] = {-1.0};
    CHECK_THROWS_AS(build_F(bad_mass, v(VarId::q(), 2), quartet_multiplet(), ClosureMode::zero_cumulant), ConfigError);
    CHECK_THROWS_AS(build_F(m, v(VarId::q(1), 2), quartet_multiplet(), ClosureMode::zero_cumulant), DimensionMismatch);
}

TEST_CASE("effective potential of the cubic model") {
    const PotentialSpec cubic = PotentialSpec::cubic(1.0, 1.0, 0.3);
    const double sigma = std::sqrt(0.5);
    const Poly vc = effective_potential(cubic, sigma, 1.0);
    const VarId qc = VarId::q();
    CHECK(vc.coeff({{qc, 2}}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(vc.coeff({{qc, 3}}) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(vc.coeff({{qc, 1}}) == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(vc.coeff({}) == doctest::Approx(0.5).epsilon(1e-14));

    const Poly harmonic = effective_potential(PotentialSpec::cubic(1.0, 1.0, 0.0), sigma, 1.0);
    CHECK(harmonic.coeff({{qc, 2}}) == doctest::Approx(0.5));
    CHECK(harmonic.coeff({}) == doctest::Approx(0.5));
    CHECK(harmonic.size() == 2);

    // Stationary points by bisection on the derivative.
    const Poly dv = vc.partial(qc);
    auto g = [&](double s) { return dv.eval({{qc, s}}); };
    const double top = oracle::bisect(g, -5.0, -2.0);
    const double bottom = oracle::bisect(g, -1.0, 0.5);
    CHECK(top == doctest::Approx(-3.176).epsilon(5e-4));
    CHECK(bottom == doctest::Approx(-0.157).epsilon(2e-3));
    // Closed form of the roots of 0.3 q^2 + q + 0.15.
    const double disc = std::sqrt(1.0 - 4.0 * 0.3 * 0.15);
    CHECK(top == doctest::Approx((-1.0 - disc) / 0.6).epsilon(1e-10));
    CHECK(vc.eval({{qc, top}}) == doctest::Approx(1.864).epsilon(1e-3));
}

TEST_CASE("effective potential rejects unsupported inputs") {
    PotentialSpec quartic;
    quartic.coefficients = {{2, 0.5}, {4, 0.1}};
    CHECK_THROWS_AS(effective_potential(quartic, 0.7, 1.0), DegreeUnsupported);
    CHECK_THROWS_AS(effective_potential(PotentialSpec::cubic(1, 1, 0.3), 0.0, 1.0), ConfigError);
}

TEST_CASE("potential specs parse from text") {
    const PotentialSpec s = PotentialSpec::parse("V = 0.5*q^2 + 0.1*q^3");
    CHECK(s.coefficients.at(2) == 0.5);
    CHECK(s.coefficients.at(3) == doctest::Approx(0.1));
    CHECK(s.degree() == 3);
    CHECK(PotentialSpec::parse("q^2 - 2").coefficients.at(0) == -2.0);
    CHECK_THROWS_AS(PotentialSpec::parse("V = q*p"), ParseError);
    CHECK_THROWS_AS(PotentialSpec::parse("W = q"), ParseError);
}

TEST_CASE("closure mode names") {
    CHECK(parse_closure_mode("zero-cumulant") == ClosureMode::zero_cumulant);
    CHECK(parse_closure_mode("ignore_fluctuation") == ClosureMode::ignore_fluctuation);
    CHECK(to_string(ClosureMode::ignore_fluctuation) == "ignore-fluctuation");
    CHECK_THROWS_AS(parse_closure_mode("gaussian"), ConfigError);
}
