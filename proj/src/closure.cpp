#include "nambu/closure.hpp"

#include "nambu/errors.hpp"

#include <string>

namespace nambu {

std::string_view to_string(ClosureMode mode) {
    switch (mode) {
    case ClosureMode::zero_cumulant:
        return "zero-cumulant";
    case ClosureMode::ignore_fluctuation:
        return "ignore-fluctuation";
    }
    return "?";
}

ClosureMode parse_closure_mode(std::string_view text) {
    if (text == "zero-cumulant" || text == "zero_cumulant") return ClosureMode::zero_cumulant;
    if (text == "ignore-fluctuation" || text == "ignore_fluctuation") return ClosureMode::ignore_fluctuation;
    throw ConfigError("unknown closure mode '" + std::string(text) + "'");
}

int PotentialSpec::degree() const {
    int d = -1;
    for (const auto& [k, c] : coefficients) {
        if (c != 0.0 && k > d) d = k;
    }
    return d;
}

Poly PotentialSpec::as_poly(int dof) const {
    Poly v;
    for (const auto& [k, c] : coefficients) v += c * Poly::var(VarId::q(dof), k);
    return v;
}

PotentialSpec PotentialSpec::parse(std::string_view text, double mass) {
    if (auto eq = text.find('='); eq != std::string_view::npos) {
        std::string_view lhs = text.substr(0, eq);
        if (lhs.find_first_not_of(" \tV") != std::string_view::npos)
            throw ParseError("potential: expected 'V = ...'");
        text = text.substr(eq + 1);
    }
    const Poly v = Poly::parse(text);
    PotentialSpec spec;
    spec.mass = mass;
    for (const auto& [m, c] : v.terms()) {
        if (m.empty()) {
            spec.coefficients[0] += c;
            continue;
        }
        if (m.size() != 1 || m.front().first != VarId::q(0))
            throw ParseError("potential: only powers of q are allowed, got " + v.to_string());
        spec.coefficients[m.front().second] += c;
    }
    return spec;
}

PotentialSpec PotentialSpec::cubic(double mass, double omega, double g) {
    PotentialSpec spec;
    spec.mass = mass;
    spec.coefficients[2] = 0.5 * mass * omega * omega;
    spec.coefficients[3] = g / 3.0;
    return spec;
}

Poly closed_moment(int n, ClosureMode mode, VarId mean, VarId second_moment) {
    if (n < 0) throw UnsupportedMoment("negative moment order");
    const Poly mu = Poly::var(mean);
    const Poly m2 = Poly::var(second_moment);
    if (n == 0) return Poly(1.0);
    if (n == 1) return mu;
    if (n == 2) return m2;
    const Poly variance = m2 - mu * mu;

    if (mode == ClosureMode::zero_cumulant) {
        // m_n = sum_k C(n-1, k) kappa_{k+1} m_{n-1-k} with kappa_1 = mu,
        // kappa_2 = variance and all higher cumulants zero.
        std::vector<Poly> m(static_cast<std::size_t>(n) + 1);
        m[0] = Poly(1.0);
        m[1] = mu;
        for (int k = 2; k <= n; ++k)
            m[static_cast<std::size_t>(k)] = mu * m[static_cast<std::size_t>(k - 1)] +
                                             static_cast<double>(k - 1) * variance * m[static_cast<std::size_t>(k - 2)];
        return m[static_cast<std::size_t>(n)];
    }

    // <(dq + mu)^n> with <dq> = 0, <dq^2> = variance and higher central moments dropped.
    const double binom2 = 0.5 * n * (n - 1);
    return mu.pow(n) + binom2 * mu.pow(n - 2) * variance;
}

Poly reduce_moment(int n, ClosureMode mode, int dof) {
    return closed_moment(n, mode, VarId::x(1, dof), VarId::x(3, dof));
}

namespace {

Poly dof_moment(int k, int dof, const MultipletDef& m, ClosureMode mode) {
    if (k == 0) return Poly(1.0);
    if (int direct = m.generator_index(k, 0)) return Poly::var(VarId::x(direct, dof));
    const int mean = m.generator_index(1, 0);
    const int second = m.generator_index(2, 0);
    if (mean == 0 || second == 0)
        throw UnsupportedMultiplet("multiplet '" + m.name() + "' has no slots for <q> and <q^2>; cannot close <q^" +
                                   std::to_string(k) + ">");
    return closed_moment(k, mode, VarId::x(mean, dof), VarId::x(second, dof));
}

} // namespace

Poly build_F(std::span<const double> masses, const Poly& potential, const MultipletDef& m, ClosureMode mode) {
    if (masses.size() != static_cast<std::size_t>(m.n_dof()))
        throw DimensionMismatch("build_F: one mass per DOF required");
    const int kinetic_slot = m.generator_index(0, 2);
    if (kinetic_slot == 0) throw UnsupportedMultiplet("multiplet '" + m.name() + "' has no <p^2> slot");

    Poly f;
    for (int a = 0; a < m.n_dof(); ++a) {
        if (masses[static_cast<std::size_t>(a)] <= 0.0) throw ConfigError("build_F: masses must be positive");
        f += (0.5 / masses[static_cast<std::size_t>(a)]) * Poly::var(VarId::x(kinetic_slot, a));
    }
    for (const auto& [mono, c] : potential.terms()) {
        Poly t(c);
        for (const auto& [v, e] : mono) {
            if (v.kind == SlotKind::p)
                throw UnsupportedMoment("potential term with momentum " + v.name() + " is outside the closure");
            if (v.kind != SlotKind::q) throw DimensionMismatch("potential must be a polynomial in q-variables");
            if (v.dof >= m.n_dof()) throw DimensionMismatch("potential references " + v.name() + " beyond n_dof");
            t *= dof_moment(e, v.dof, m, mode);
        }
        f += t;
    }
    return f;
}

Poly build_F(const PotentialSpec& v, const MultipletDef& m, ClosureMode mode) {
    const double masses[] = {v.mass};
    if (m.n_dof() != 1) throw DimensionMismatch("build_F: a PotentialSpec describes a single DOF");
    return build_F(masses, v.as_poly(0), m, mode);
}

Poly effective_potential(const PotentialSpec& v, double sigma, double hbar) {
    if (sigma <= 0.0) throw ConfigError("effective_potential: sigma must be positive");
    if (v.degree() > 3)
        throw DegreeUnsupported("effective_potential: supports potentials of degree <= 3, got " +
                                std::to_string(v.degree()));
    const MultipletDef quartet = quartet_multiplet(1);
    const Poly f = build_F(v, quartet, ClosureMode::zero_cumulant);
    const Poly qc = Poly::var(VarId::q(0));
    const double s2 = sigma * sigma;
    const Substitution subs{
        {VarId::x(1), qc},
        {VarId::x(3), qc * qc + Poly(s2)},
        {VarId::x(4), Poly(hbar * hbar / (4.0 * s2))},
    };
    return f.substitute(subs);
}

} // namespace nambu
