#include "nambu/brackets.hpp"

#include "nambu/errors.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <utility>

namespace nambu {

std::vector<VarId> Layout::variables() const {
    std::vector<VarId> vars;
    vars.reserve(static_cast<std::size_t>(size()));
    for (int k = 0; k < size(); ++k) vars.push_back(var(k));
    return vars;
}

std::vector<VarId> canonical_variables(int n_dof) {
    std::vector<VarId> vars;
    for (int a = 0; a < n_dof; ++a) {
        vars.push_back(VarId::q(a));
        vars.push_back(VarId::p(a));
    }
    return vars;
}

double determinant(std::vector<double> m, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(m[static_cast<std::size_t>(col * n + col)]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(m[static_cast<std::size_t>(r * n + col)]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(m[static_cast<std::size_t>(col * n + c)], m[static_cast<std::size_t>(pivot * n + c)]);
            det = -det;
        }
        const double d = m[static_cast<std::size_t>(col * n + col)];
        det *= d;
        for (int r = col + 1; r < n; ++r) {
            const double f = m[static_cast<std::size_t>(r * n + col)] / d;
            if (f == 0.0) continue;
            for (int c = col + 1; c < n; ++c)
                m[static_cast<std::size_t>(r * n + c)] -= f * m[static_cast<std::size_t>(col * n + c)];
        }
    }
    return det;
}

double poisson_bracket(const Poly& a, const Poly& b, const Assignment& point, int n_dof) {
    double sum = 0.0;
    for (int k = 0; k < n_dof; ++k) {
        const VarId q = VarId::q(k);
        const VarId p = VarId::p(k);
        sum += a.partial(q).eval(point) * b.partial(p).eval(point) -
               a.partial(p).eval(point) * b.partial(q).eval(point);
    }
    return sum;
}

Poly poisson_bracket_poly(const Poly& a, const Poly& b, int n_dof) {
    Poly sum;
    for (int k = 0; k < n_dof; ++k) {
        const VarId q = VarId::q(k);
        const VarId p = VarId::p(k);
        sum += a.partial(q) * b.partial(p) - a.partial(p) * b.partial(q);
    }
    return sum;
}

namespace {

void require_in_layout(std::span<const Poly> fns, const Layout& layout) {
    for (const auto& f : fns) {
        for (VarId v : f.variables()) {
            if (!layout.contains(v))
                throw DimensionMismatch("variable " + v.name() + " lies outside the " +
                                        std::to_string(layout.multiplet_size) + "x" +
                                        std::to_string(layout.n_dof) + " layout");
        }
    }
}

void require_arity(std::span<const Poly> fns, std::size_t expected, const char* what) {
    if (fns.size() != expected)
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(expected) +
                                " functions, got " + std::to_string(fns.size()));
}

// Laplace expansion along the first remaining row. `cols` lists the columns
// still available, `row` the current row.
Poly cofactor_det(const std::vector<std::vector<Poly>>& m, std::size_t row, std::vector<int>& cols) {
    if (row == m.size()) return Poly(1.0);
    Poly sum;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const Poly& entry = m[row][static_cast<std::size_t>(cols[k])];
        if (entry.is_zero()) continue;
        int col = cols[k];
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
        Poly minor = cofactor_det(m, row + 1, cols);
        cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(k), col);
        if (minor.is_zero()) continue;
        Poly t = entry * minor;
        if (k % 2 == 0) {
            sum += t;
        } else {
            sum -= t;
        }
    }
    return sum;
}

} // namespace

double nambu_bracket(std::span<const Poly> fns, std::span<const double> state, const Layout& layout) {
    const int n = layout.multiplet_size;
    require_arity(fns, static_cast<std::size_t>(n), "nambu_bracket");
    require_in_layout(fns, layout);
    if (state.size() != static_cast<std::size_t>(layout.size()))
        throw DimensionMismatch("nambu_bracket: state length does not match layout");
    const Assignment at = to_assignment(state, layout);
    double sum = 0.0;
    std::vector<double> jac(static_cast<std::size_t>(n * n));
    for (int a = 0; a < layout.n_dof; ++a) {
        bool any = false;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                double v = fns[static_cast<std::size_t>(r)].partial(VarId::x(c + 1, a)).eval(at);
                jac[static_cast<std::size_t>(r * n + c)] = v;
                any = any || v != 0.0;
            }
        }
        if (any) sum += determinant(jac, n);
    }
    return sum;
}

Poly jacobian_poly(std::span<const Poly> fns, std::span<const VarId> vars) {
    const std::size_t n = vars.size();
    if (fns.size() != n) throw DimensionMismatch("jacobian_poly: need as many functions as variables");
    if (n > 5) throw DimensionMismatch("symbolic Jacobians are limited to 5 x 5");
    std::vector<std::vector<Poly>> jac(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) jac[r].push_back(fns[r].partial(vars[c]));
    }
    std::vector<int> cols(n);
    for (std::size_t c = 0; c < n; ++c) cols[c] = static_cast<int>(c);
    return cofactor_det(jac, 0, cols);
}

Poly nambu_bracket_poly(std::span<const Poly> fns, const Layout& layout) {
    const int n = layout.multiplet_size;
    if (n > 5) throw DimensionMismatch("symbolic Nambu bracket is limited to N <= 5");
    require_arity(fns, static_cast<std::size_t>(n), "nambu_bracket_poly");
    require_in_layout(fns, layout);
    Poly sum;
    std::vector<VarId> block(static_cast<std::size_t>(n));
    for (int a = 0; a < layout.n_dof; ++a) {
        for (int c = 0; c < n; ++c) block[static_cast<std::size_t>(c)] = VarId::x(c + 1, a);
        sum += jacobian_poly(fns, block);
    }
    return sum;
}

std::vector<Assignment> sample_points(std::span<const VarId> vars, int count, std::uint64_t seed,
                                      double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<Assignment> out(static_cast<std::size_t>(count));
    for (auto& a : out) {
        for (VarId v : vars) a[v] = dist(rng);
    }
    return out;
}

std::vector<std::vector<double>> sample_states(const Layout& layout, int count, std::uint64_t seed,
                                               double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(count),
                                         std::vector<double>(static_cast<std::size_t>(layout.size())));
    for (auto& s : out) {
        for (auto& v : s) v = dist(rng);
    }
    return out;
}

Assignment to_assignment(std::span<const double> state, const Layout& layout) {
    Assignment at;
    for (int k = 0; k < layout.size(); ++k) at.emplace(layout.var(k), state[static_cast<std::size_t>(k)]);
    return at;
}

std::vector<BracketReport> check_jacobi(const Poly& a1, const Poly& a2, const Poly& b,
                                        std::span<const Assignment> samples, int n_dof) {
    const Poly a1a2 = poisson_bracket_poly(a1, a2, n_dof);
    const Poly a1b = poisson_bracket_poly(a1, b, n_dof);
    const Poly a2b = poisson_bracket_poly(a2, b, n_dof);
    std::vector<BracketReport> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        BracketReport r;
        r.lhs = poisson_bracket(a1a2, b, s, n_dof);
        r.rhs = poisson_bracket(a1b, a2, s, n_dof) + poisson_bracket(a1, a2b, s, n_dof);
        r.residual = std::abs(r.lhs - r.rhs);
        r.sample_point = s;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<BracketReport> check_fundamental_identity(std::span<const Poly> as,
                                                      std::span<const Poly> bs,
                                                      std::span<const std::vector<double>> samples,
                                                      const Layout& layout) {
    const auto n = static_cast<std::size_t>(layout.multiplet_size);
    require_arity(as, n, "fundamental identity (A)");
    require_arity(bs, n - 1, "fundamental identity (B)");
    require_in_layout(as, layout);
    require_in_layout(bs, layout);

    auto with_b = [&](const Poly& first) {
        std::vector<Poly> args{first};
        args.insert(args.end(), bs.begin(), bs.end());
        return args;
    };

    const Poly inner = nambu_bracket_poly(as, layout);
    const std::vector<Poly> lhs_args = with_b(inner);

    std::vector<std::vector<Poly>> rhs_args;
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<Poly> args(as.begin(), as.end());
        args[a] = nambu_bracket_poly(with_b(as[a]), layout);
        rhs_args.push_back(std::move(args));
    }

    std::vector<BracketReport> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        BracketReport r;
        r.lhs = nambu_bracket(lhs_args, s, layout);
        for (const auto& args : rhs_args) r.rhs += nambu_bracket(args, s, layout);
        r.residual = std::abs(r.lhs - r.rhs);
        r.sample_point = to_assignment(s, layout);
        out.push_back(std::move(r));
    }
    return out;
}

Poly divergence_poly(std::span<const Poly> hamiltonians, const Layout& layout) {
    require_arity(hamiltonians, static_cast<std::size_t>(layout.multiplet_size - 1), "flow_divergence");
    Poly div;
    for (VarId v : layout.variables()) {
        std::vector<Poly> args{Poly::var(v)};
        args.insert(args.end(), hamiltonians.begin(), hamiltonians.end());
        div += nambu_bracket_poly(args, layout).partial(v);
    }
    return div;
}

double flow_divergence(std::span<const Poly> hamiltonians, std::span<const double> state,
                       const Layout& layout) {
    return divergence_poly(hamiltonians, layout).eval(to_assignment(state, layout));
}

void write_bracket_reports(std::ostream& out, std::span<const BracketReport> reports) {
    const auto old_precision = out.precision(17);
    out << "sample_index,lhs,rhs,residual\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        out << k << ',' << r.lhs << ',' << r.rhs << ',' << r.residual << '\n';
    }
    out.precision(old_precision);
}

} // namespace nambu
