#include "nambu/constraints.hpp"

#include "nambu/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>

namespace nambu {

namespace {

bool only_vars(const Poly& f, auto pred) {
    const auto vars = f.variables();
    return std::all_of(vars.begin(), vars.end(), pred);
}

int permutation_sign(const std::vector<int>& perm) {
    int inversions = 0;
    for (std::size_t a = 0; a < perm.size(); ++a) {
        for (std::size_t b = a + 1; b < perm.size(); ++b) {
            if (perm[a] > perm[b]) ++inversions;
        }
    }
    return inversions % 2 == 0 ? 1 : -1;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

MultipletDef::MultipletDef(std::string name, std::vector<Poly> defs, std::vector<Poly> constraints, int n_dof)
    : name_(std::move(name)), n_dof_(n_dof), base_defs_(std::move(defs)), base_constraints_(std::move(constraints)) {
    const int n = static_cast<int>(base_defs_.size());
    if (n < 3) throw MalformedMultiplet(name_ + ": a multiplet needs N >= 3 generators");
    if (n_dof_ < 1) throw MalformedMultiplet(name_ + ": n_dof must be >= 1");
    if (static_cast<int>(base_constraints_.size()) != n - 2)
        throw MalformedMultiplet(name_ + ": expected " + std::to_string(n - 2) + " constraints for N = " +
                                 std::to_string(n) + ", got " + std::to_string(base_constraints_.size()));
    for (const auto& d : base_defs_) {
        if (!only_vars(d, [](VarId v) { return v.is_canonical() && v.dof == 0; }))
            throw MalformedMultiplet(name_ + ": generator " + d.to_string() + " must use q0, p0 only");
    }
    for (const auto& g : base_constraints_) {
        if (!only_vars(g, [n](VarId v) { return v.kind == SlotKind::x && v.dof == 0 && v.index <= n; }))
            throw MalformedMultiplet(name_ + ": constraint " + g.to_string() + " must use x1_0..x" +
                                     std::to_string(n) + "_0 only");
    }
    int nonzero = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!poisson_bracket_poly(base_defs_[static_cast<std::size_t>(i)], base_defs_[static_cast<std::size_t>(j)], 1)
                     .is_zero())
                ++nonzero;
        }
    }
    if (nonzero < n - 1)
        throw MalformedMultiplet(name_ + ": only " + std::to_string(nonzero) +
                                 " generator pairs have a non-vanishing Poisson bracket, need " +
                                 std::to_string(n - 1));

    for (int a = 0; a < n_dof_; ++a) {
        std::vector<Poly> ds;
        std::vector<Poly> gs;
        for (const auto& d : base_defs_) ds.push_back(shift_dof(d, a));
        for (const auto& g : base_constraints_) gs.push_back(shift_dof(g, a));
        defs_.push_back(std::move(ds));
        constraints_.push_back(std::move(gs));
    }
}

Poly MultipletDef::summed_constraint(int c) const {
    Poly sum;
    for (int a = 0; a < n_dof_; ++a) sum += constraint(a, c);
    return sum;
}

std::vector<Poly> MultipletDef::summed_constraints() const {
    std::vector<Poly> out;
    for (int c = 1; c <= size() - 2; ++c) out.push_back(summed_constraint(c));
    return out;
}

MultipletDef MultipletDef::with_dofs(int n_dof) const {
    return MultipletDef(name_, base_defs_, base_constraints_, n_dof);
}

Substitution MultipletDef::classical_substitution() const {
    Substitution subs;
    for (int a = 0; a < n_dof_; ++a) {
        for (int i = 1; i <= size(); ++i) subs.emplace(VarId::x(i, a), def(a, i));
    }
    return subs;
}

std::vector<double> MultipletDef::classical_image(std::span<const double> canonical) const {
    if (canonical.size() != static_cast<std::size_t>(2 * n_dof_))
        throw DimensionMismatch("classical_image: expected " + std::to_string(2 * n_dof_) + " canonical values");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(size() * n_dof_));
    for (int a = 0; a < n_dof_; ++a) {
        Assignment at{{VarId::q(a), canonical[static_cast<std::size_t>(2 * a)]},
                      {VarId::p(a), canonical[static_cast<std::size_t>(2 * a + 1)]}};
        for (int i = 1; i <= size(); ++i) out.push_back(def(a, i).eval(at));
    }
    return out;
}

int MultipletDef::generator_index(int q_power, int p_power) const {
    Monomial m;
    if (q_power > 0) m.emplace_back(VarId::q(0), q_power);
    if (p_power > 0) m.emplace_back(VarId::p(0), p_power);
    const Poly target = Poly::term(1.0, m);
    for (int i = 0; i < size(); ++i) {
        if (base_defs_[static_cast<std::size_t>(i)] == target) return i + 1;
    }
    return 0;
}

MultipletDef triplet_multiplet(int n_dof) {
    const Poly q = Poly::var(VarId::q());
    const Poly p = Poly::var(VarId::p());
    const Poly x1 = Poly::var(VarId::x(1));
    const Poly x2 = Poly::var(VarId::x(2));
    const Poly x3 = Poly::var(VarId::x(3));
    return MultipletDef("triplet", {q * q, p * p, q * p}, {2.0 * x3 * x3 - 2.0 * x1 * x2}, n_dof);
}

MultipletDef quartet_multiplet(int n_dof) {
    const Poly q = Poly::var(VarId::q());
    const Poly p = Poly::var(VarId::p());
    const Poly x1 = Poly::var(VarId::x(1));
    const Poly x2 = Poly::var(VarId::x(2));
    const Poly x3 = Poly::var(VarId::x(3));
    const Poly x4 = Poly::var(VarId::x(4));
    return MultipletDef("quartet", {q, p, q * q, p * p}, {x3 - x1 * x1, x4 - x2 * x2}, n_dof);
}

std::vector<MultipletDef> builtin_multiplets(int n_dof) {
    return {triplet_multiplet(n_dof), quartet_multiplet(n_dof)};
}

MultipletDef builtin_multiplet(std::string_view name, int n_dof) {
    if (name == "triplet") return triplet_multiplet(n_dof);
    if (name == "quartet") return quartet_multiplet(n_dof);
    throw ConfigError("unknown multiplet '" + std::string(name) + "' (expected triplet or quartet)");
}

MultipletDef load_multiplet(std::istream& in, int n_dof) {
    std::string name = "custom";
    std::map<int, Poly> xs;
    std::map<int, Poly> gs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("multiplet line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        try {
            if (key == "name") {
                name = value;
            } else if (key.size() > 1 && key[0] == 'x') {
                xs[std::stoi(key.substr(1))] = Poly::parse(value);
            } else if (key.size() > 1 && key[0] == 'G') {
                gs[std::stoi(key.substr(1))] = Poly::parse(value);
            } else {
                throw ConfigError("unknown key '" + key + "'");
            }
        } catch (const ParseError& e) {
            throw ConfigError("multiplet line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::invalid_argument&) {
            throw ConfigError("multiplet line " + std::to_string(lineno) + ": bad key '" + key + "'");
        }
    }
    std::vector<Poly> defs;
    std::vector<Poly> constraints;
    for (int i = 1; i <= static_cast<int>(xs.size()); ++i) {
        auto it = xs.find(i);
        if (it == xs.end()) throw ConfigError("multiplet: generators must be numbered x1..xN without gaps");
        defs.push_back(it->second);
    }
    for (int c = 1; c <= static_cast<int>(gs.size()); ++c) {
        auto it = gs.find(c);
        if (it == gs.end()) throw ConfigError("multiplet: constraints must be numbered G1..G(N-2) without gaps");
        constraints.push_back(it->second);
    }
    return MultipletDef(name, std::move(defs), std::move(constraints), n_dof);
}

Poly consistency_lhs(const MultipletDef& m, int dof, int i, int j) {
    const int n = m.size();
    std::vector<int> rest;
    for (int k = 1; k <= n; ++k) {
        if (k != i && k != j) rest.push_back(k);
    }
    const auto& gs = m.constraints(dof);
    Poly sum;
    std::vector<VarId> cols(rest.size());
    do {
        std::vector<int> perm{i, j};
        perm.insert(perm.end(), rest.begin(), rest.end());
        const int sign = permutation_sign(perm);
        for (std::size_t c = 0; c < rest.size(); ++c) cols[c] = VarId::x(rest[c], dof);
        Poly jac = jacobian_poly(gs, cols);
        if (sign > 0) {
            sum += jac;
        } else {
            sum -= jac;
        }
    } while (std::next_permutation(rest.begin(), rest.end()));
    return sum * (1.0 / factorial(n - 2));
}

std::vector<ConsistencyReport> verify_consistency(const MultipletDef& m, const ConsistencyOptions& opts) {
    const int n = m.size();
    const Substitution classical = m.classical_substitution();
    std::vector<ConsistencyReport> out;
    for (int a = 0; a < m.n_dof(); ++a) {
        const std::vector<VarId> canon{VarId::q(a), VarId::p(a)};
        const auto points = sample_points(canon, opts.samples, opts.seed + static_cast<std::uint64_t>(a));
        for (int i = 1; i <= n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                const Poly lhs = consistency_lhs(m, a, i, j).substitute(classical);
                ConsistencyReport r{i, j, a, 0.0, false};
                for (const auto& pt : points) {
                    const double rhs = poisson_bracket(m.def(a, i), m.def(a, j), pt, m.n_dof());
                    r.max_residual = std::max(r.max_residual, std::abs(lhs.eval(pt) - rhs));
                }
                r.pass = r.max_residual < opts.tolerance;
                out.push_back(r);
            }
        }
    }
    return out;
}

void write_consistency_reports(std::ostream& out, std::span<const ConsistencyReport> reports) {
    const auto old_precision = out.precision(17);
    out << "dof,i,j,max_residual,pass\n";
    for (const auto& r : reports)
        out << r.dof << ',' << r.i << ',' << r.j << ',' << r.max_residual << ',' << (r.pass ? 1 : 0) << '\n';
    out.precision(old_precision);
}

// ---------------------------------------------------------------------------

namespace {

struct Generator {
    int index;
    int q_power;
    int p_power;
    int degree() const { return q_power + p_power; }
};

// Depth-first rewrite trying generators in priority order; the first success
// is the greedy highest-degree choice.
std::optional<std::vector<int>> rewrite(int a, int b, const std::vector<Generator>& gens, bool& ambiguous,
                                        bool top) {
    if (a == 0 && b == 0) return std::vector<int>{};
    std::vector<const Generator*> fits;
    for (const auto& g : gens) {
        if (g.q_power <= a && g.p_power <= b) fits.push_back(&g);
    }
    if (top && fits.size() > 1 && fits[0]->degree() == fits[1]->degree()) ambiguous = true;
    for (const Generator* g : fits) {
        auto rest = rewrite(a - g->q_power, b - g->p_power, gens, ambiguous, false);
        if (rest) {
            rest->push_back(g->index);
            return rest;
        }
    }
    return std::nullopt;
}

} // namespace

LiftResult lift_to_multiplet(const Poly& f, const MultipletDef& m, int dof) {
    if (dof < 0 || dof >= m.n_dof()) throw DimensionMismatch("lift_to_multiplet: DOF out of range");
    const VarId q = VarId::q(dof);
    const VarId p = VarId::p(dof);
    if (!only_vars(f, [&](VarId v) { return v == q || v == p; }))
        throw DimensionMismatch("lift_to_multiplet: " + f.to_string() + " must involve only " + q.name() + ", " +
                                p.name());

    std::vector<Generator> gens;
    for (int i = 1; i <= m.size(); ++i) {
        const Poly& d = m.def(dof, i);
        if (d.size() != 1 || d.terms().begin()->second != 1.0) continue;
        Generator g{i, d.degree_in(q), d.degree_in(p)};
        if (g.degree() > 0) gens.push_back(g);
    }
    std::stable_sort(gens.begin(), gens.end(),
                     [](const Generator& l, const Generator& r) { return l.degree() > r.degree(); });

    LiftResult result;
    for (const auto& [mono, c] : f.terms()) {
        int a = 0;
        int b = 0;
        for (const auto& [v, e] : mono) (v == q ? a : b) = e;
        auto factors = rewrite(a, b, gens, result.ambiguous, true);
        if (!factors)
            throw Unliftable("monomial " + Poly::term(1.0, mono).to_string() + " cannot be expressed with the " +
                             m.name() + " generators");
        Monomial xm;
        for (int idx : *factors) xm.emplace_back(VarId::x(idx, dof), 1);
        result.poly += Poly::term(c, xm);
    }
    return result;
}

} // namespace nambu
