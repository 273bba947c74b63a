#pragma once

#include "nambu/poly.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace nambu {

/// Shape of an extended phase space: `n_dof` multiplets of `multiplet_size`
/// variables, flattened DOF-major (x_1^(0)..x_N^(0), x_1^(1)..).
struct Layout {
    int multiplet_size = 0;
    int n_dof = 1;

    int size() const { return multiplet_size * n_dof; }
    VarId var(int flat) const { return VarId::x(flat % multiplet_size + 1, flat / multiplet_size); }
    int index(VarId v) const { return v.dof * multiplet_size + (v.index - 1); }
    bool contains(VarId v) const {
        return v.kind == SlotKind::x && v.dof >= 0 && v.dof < n_dof && v.index >= 1 &&
               v.index <= multiplet_size;
    }
    std::vector<VarId> variables() const;

    bool operator==(const Layout&) const = default;
};

/// q0, p0, q1, p1, ... for `n_dof` canonical pairs.
std::vector<VarId> canonical_variables(int n_dof);

/// Both sides of a bracket identity at one sample point.
struct BracketReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    Assignment sample_point;
};

/// Determinant by LU factorisation with partial pivoting; `m` is row-major n x n.
double determinant(std::vector<double> m, int n);

/// Sum over DOFs of dA/dq dB/dp - dA/dp dB/dq, evaluated at `point`.
double poisson_bracket(const Poly& a, const Poly& b, const Assignment& point, int n_dof);
/// Same bracket kept symbolic.
Poly poisson_bracket_poly(const Poly& a, const Poly& b, int n_dof);

/// Sum over DOFs of the N x N Jacobian determinant of `fns` with respect to
/// that DOF's multiplet, evaluated numerically at `state`.
double nambu_bracket(std::span<const Poly> fns, std::span<const double> state, const Layout& layout);
/// Same bracket expanded symbolically by cofactors (N <= 5).
Poly nambu_bracket_poly(std::span<const Poly> fns, const Layout& layout);

/// Symbolic Jacobian determinant d(fns)/d(vars) by cofactor expansion.
/// `fns` and `vars` must have equal length <= 5.
Poly jacobian_poly(std::span<const Poly> fns, std::span<const VarId> vars);

/// Uniform samples on [lo, hi] for each variable, from a fixed-seed generator.
std::vector<Assignment> sample_points(std::span<const VarId> vars, int count,
                                      std::uint64_t seed = 20140601, double lo = -2.0,
                                      double hi = 2.0);
/// Flat state vectors drawn the same way as `sample_points`.
std::vector<std::vector<double>> sample_states(const Layout& layout, int count,
                                               std::uint64_t seed = 20140601, double lo = -2.0,
                                               double hi = 2.0);

/// {{A1,A2},B} against {{A1,B},A2} + {A1,{A2,B}} at each sample.
std::vector<BracketReport> check_jacobi(const Poly& a1, const Poly& a2, const Poly& b,
                                        std::span<const Assignment> samples, int n_dof);

/// {{A1..AN},B1..B_{N-1}} against sum_a {A1,..,{A_a,B1..B_{N-1}},..,AN}.
std::vector<BracketReport> check_fundamental_identity(std::span<const Poly> as,
                                                      std::span<const Poly> bs,
                                                      std::span<const std::vector<double>> samples,
                                                      const Layout& layout);

/// Divergence of the flow generated by N-1 Hamiltonians, as a polynomial.
Poly divergence_poly(std::span<const Poly> hamiltonians, const Layout& layout);
double flow_divergence(std::span<const Poly> hamiltonians, std::span<const double> state,
                       const Layout& layout);

Assignment to_assignment(std::span<const double> state, const Layout& layout);

/// CSV rows `sample_index,lhs,rhs,residual` preceded by the header.
void write_bracket_reports(std::ostream& out, std::span<const BracketReport> reports);

} // namespace nambu
