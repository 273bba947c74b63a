#pragma once

#include "nambu/brackets.hpp"
#include "nambu/poly.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nambu {

/// A Nambu multiplet: N generators x_i(q,p) per DOF and the N-2 induced
/// constraints G_c(x_1..x_N) that certify the Nambu rewriting of the flow.
///
/// Per-DOF copies are obtained by shifting the DOF-0 definitions, so every
/// DOF carries the same functional forms.
class MultipletDef {
public:
    /// `defs` are polynomials in q0, p0; `constraints` in x1_0..xN_0.
    /// Throws MalformedMultiplet when the sizes disagree with N or fewer than
    /// N-1 generator pairs have a non-vanishing Poisson bracket.
    MultipletDef(std::string name, std::vector<Poly> defs, std::vector<Poly> constraints, int n_dof = 1);

    const std::string& name() const { return name_; }
    int size() const { return static_cast<int>(base_defs_.size()); }
    int n_dof() const { return n_dof_; }
    Layout layout() const { return {size(), n_dof_}; }

    /// x_i^(dof)(q^(dof), p^(dof)), i is 1-based.
    const Poly& def(int dof, int i) const { return defs_[static_cast<std::size_t>(dof)][static_cast<std::size_t>(i - 1)]; }
    const std::vector<Poly>& defs(int dof) const { return defs_[static_cast<std::size_t>(dof)]; }
    /// G_c^(dof)(x^(dof)), c is 1-based.
    const Poly& constraint(int dof, int c) const {
        return constraints_[static_cast<std::size_t>(dof)][static_cast<std::size_t>(c - 1)];
    }
    const std::vector<Poly>& constraints(int dof) const { return constraints_[static_cast<std::size_t>(dof)]; }

    /// G_c summed over all DOFs.
    Poly summed_constraint(int c) const;
    std::vector<Poly> summed_constraints() const;

    /// Copy of this multiplet replicated over `n_dof` DOFs.
    MultipletDef with_dofs(int n_dof) const;

    /// x_i^(a) -> x_i(q^(a), p^(a)) for every DOF.
    Substitution classical_substitution() const;
    /// Classical image of a canonical point (q0, p0, q1, p1, ...).
    std::vector<double> classical_image(std::span<const double> canonical) const;

    /// Index of the generator equal to the monomial q^a p^b (coefficient 1),
    /// or 0 if none.
    int generator_index(int q_power, int p_power) const;

private:
    std::string name_;
    int n_dof_;
    std::vector<Poly> base_defs_;
    std::vector<Poly> base_constraints_;
    std::vector<std::vector<Poly>> defs_;
    std::vector<std::vector<Poly>> constraints_;
};

/// x = (q^2, p^2, qp), G = 2 x3^2 - 2 x1 x2.
MultipletDef triplet_multiplet(int n_dof = 1);
/// x = (q, p, q^2, p^2), G1 = x3 - x1^2, G2 = x4 - x2^2.
MultipletDef quartet_multiplet(int n_dof = 1);
/// Both built-ins.
std::vector<MultipletDef> builtin_multiplets(int n_dof = 1);
/// Looks up "triplet" or "quartet"; throws ConfigError otherwise.
MultipletDef builtin_multiplet(std::string_view name, int n_dof = 1);

/// Loads a single-DOF multiplet from key = value lines:
///   name = cubic-quartet
///   x1 = q
///   ...
///   G1 = x3 - x1^2
/// `#` starts a comment. N is the number of x-lines.
MultipletDef load_multiplet(std::istream& in, int n_dof = 1);

struct ConsistencyReport {
    int i = 0; // 1-based generator indices, i < j
    int j = 0;
    int dof = 0;
    double max_residual = 0.0;
    bool pass = false;
};

struct ConsistencyOptions {
    int samples = 50;
    double tolerance = 1e-9;
    std::uint64_t seed = 20140601;
};

/// Compares the epsilon-contracted Jacobian of the constraints against the
/// Poisson bracket {x_i, x_j} for every DOF and pair, at random (q,p) points
/// drawn from [-2, 2].
std::vector<ConsistencyReport> verify_consistency(const MultipletDef& m, const ConsistencyOptions& opts = {});

/// Left-hand side of the consistency condition for pair (i, j) of `dof`, as
/// a polynomial in that DOF's x-variables.
Poly consistency_lhs(const MultipletDef& m, int dof, int i, int j);

void write_consistency_reports(std::ostream& out, std::span<const ConsistencyReport> reports);

struct LiftResult {
    Poly poly;
    /// Set when some monomial admitted more than one top-degree rewriting.
    bool ambiguous = false;
};

/// Rewrites a polynomial in q^(dof), p^(dof) in terms of the multiplet
/// generators, preferring the highest-degree generator at each step and the
/// lower index among equals. Only pure-monomial generators are used.
/// Throws Unliftable when some monomial cannot be expressed.
LiftResult lift_to_multiplet(const Poly& f, const MultipletDef& m, int dof = 0);

} // namespace nambu
