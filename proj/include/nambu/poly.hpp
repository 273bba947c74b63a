#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nambu {

enum class SlotKind : std::uint8_t { q, p, x };

/// A variable of the universe: q^(a), p^(a) or x_i^(a).
///
/// Ordering is lexicographic on (dof, slot) with q < p < x1 < x2 < ...
struct VarId {
    int dof = 0;
    SlotKind kind = SlotKind::q;
    int index = 0; // 1-based multiplet index, 0 for q and p

    static constexpr VarId q(int dof = 0) { return {dof, SlotKind::q, 0}; }
    static constexpr VarId p(int dof = 0) { return {dof, SlotKind::p, 0}; }
    static constexpr VarId x(int i, int dof = 0) { return {dof, SlotKind::x, i}; }

    bool is_canonical() const { return kind != SlotKind::x; }

    /// `q0`, `p1`, `x3_0`.
    std::string name() const;

    auto operator<=>(const VarId&) const = default;
};

/// Variable -> value binding.
using Assignment = std::map<VarId, double>;

/// Sorted (variable, exponent) list with strictly positive exponents.
using Monomial = std::vector<std::pair<VarId, int>>;

class Poly;
using Substitution = std::map<VarId, Poly>;

/// Sparse multivariate polynomial with double coefficients.
///
/// Terms are kept in a map keyed by canonical monomials, and no stored
/// coefficient is exactly zero, so two polynomials are equal iff their term
/// maps are equal. Values are immutable once built; every operation returns a
/// new polynomial.
class Poly {
public:
    using TermMap = std::map<Monomial, double>;

    Poly() = default;
    Poly(double constant); // NOLINT(google-explicit-constructor)

    static Poly var(VarId v, int exponent = 1);
    static Poly term(double coeff, Monomial m);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    int degree_in(VarId v) const;
    std::set<VarId> variables() const;

    /// Coefficient of the given monomial (0 when absent).
    double coeff(const Monomial& m) const;

    double eval(const Assignment& at) const;
    Poly partial(VarId v) const;
    Poly substitute(const Substitution& subs) const;
    Poly pow(int n) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& other);
    Poly& operator-=(const Poly& other);
    Poly& operator*=(const Poly& other);
    Poly& operator*=(double s);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, double s) { return a *= s; }
    friend Poly operator*(double s, Poly a) { return a *= s; }

    bool operator==(const Poly&) const = default;

    /// Textual form, e.g. `0.5*x4_0 + 0.3*x3_0*x1_0 - 0.2*x1_0^3`.
    std::string to_string() const;

    /// Parses sums of `coeff*var^k` products. Accepts parentheses, unary
    /// signs and bare names (`q`, `p`, `x3`) which refer to DOF 0.
    static Poly parse(std::string_view text);

private:
    void add_term(const Monomial& m, double c);

    TermMap terms_;
};

Poly scale(const Poly& f, double s);

/// Maps every DOF-0 variable of `f` to the same slot of `dof`.
Poly shift_dof(const Poly& f, int dof);

/// Parses a single variable name (`q1`, `x2_0`, `p`).
VarId parse_var(std::string_view name);

/// Polynomial bound to a fixed variable ordering for fast repeated evaluation
/// against a flat value vector.
class CompiledPoly {
public:
    CompiledPoly() = default;
    /// Throws MissingVariable if `f` uses a variable not in `order`.
    CompiledPoly(const Poly& f, std::span<const VarId> order);

    double operator()(std::span<const double> values) const;
    bool is_zero() const { return terms_.empty(); }

private:
    struct Factor {
        std::size_t index;
        int exponent;
    };
    struct Term {
        double coeff;
        std::vector<Factor> factors;
    };
    std::vector<Term> terms_;
};

} // namespace nambu
