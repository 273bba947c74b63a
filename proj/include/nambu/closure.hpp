#pragma once

#include "nambu/constraints.hpp"
#include "nambu/poly.hpp"

#include <map>
#include <span>
#include <string_view>

namespace nambu {

enum class ClosureMode {
    zero_cumulant,      ///< cumulants of order >= 3 vanish
    ignore_fluctuation, ///< central moments of order >= 3 vanish
};

std::string_view to_string(ClosureMode mode);
/// Accepts `zero-cumulant` / `zero_cumulant` and `ignore-fluctuation` /
/// `ignore_fluctuation`.
ClosureMode parse_closure_mode(std::string_view text);

/// One-dimensional polynomial potential V(q) = sum_k c_k q^k with mass m.
struct PotentialSpec {
    std::map<int, double> coefficients;
    double mass = 1.0;

    int degree() const;
    /// V as a polynomial in q^(dof).
    Poly as_poly(int dof = 0) const;

    /// Parses `V = 0.5*q^2 + 0.1*q^3` (the `V =` prefix is optional).
    static PotentialSpec parse(std::string_view text, double mass = 1.0);
    /// (m w^2 / 2) q^2 + (g / 3) q^3.
    static PotentialSpec cubic(double mass, double omega, double g);
};

/// <q^n> in terms of mean and second moment under the given closure, for
/// arbitrary slot variables.
Poly closed_moment(int n, ClosureMode mode, VarId mean, VarId second_moment);

/// <q^n> as a polynomial in x1^(dof) = <q> and x3^(dof) = <q^2> (the quartet
/// convention).
Poly reduce_moment(int n, ClosureMode mode, int dof = 0);

/// Nambu Hamiltonian F: kinetic sum_a x_{p^2}^(a) / 2 m_a plus the potential
/// with each <q_a^k> replaced by a multiplet generator equal to q^k when one
/// exists, by the closure otherwise. Cross-DOF monomials factorise.
/// `potential` must be a polynomial in q-variables only.
Poly build_F(std::span<const double> masses, const Poly& potential, const MultipletDef& m, ClosureMode mode);
Poly build_F(const PotentialSpec& v, const MultipletDef& m, ClosureMode mode);

/// Effective frozen-Gaussian potential V_c(qc) as a polynomial in q0:
/// the closed potential at x1 = qc, x3 = qc^2 + sigma^2 plus the kinetic
/// zero-point term hbar^2 / (8 m sigma^2). Degree <= 3 only.
Poly effective_potential(const PotentialSpec& v, double sigma, double hbar);

} // namespace nambu
