#include "nambu/scenarios.hpp"

#include "nambu/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nambu {

std::string_view to_string(ModelId id) {
    switch (id) {
    case ModelId::harmonic:
        return "harmonic";
    case ModelId::cubic:
        return "cubic";
    case ModelId::henon_heiles:
        return "henon-heiles";
    }
    return "?";
}

std::string_view to_string(Method m) {
    switch (m) {
    case Method::quantum:
        return "quantum";
    case Method::nambu:
        return "nambu";
    case Method::classical:
        return "classical";
    }
    return "?";
}

ModelId parse_model(std::string_view text) {
    if (text == "harmonic") return ModelId::harmonic;
    if (text == "cubic") return ModelId::cubic;
    if (text == "henon-heiles" || text == "henon_heiles") return ModelId::henon_heiles;
    throw ConfigError("unknown model '" + std::string(text) + "' (expected harmonic, cubic or henon-heiles)");
}

Method parse_method(std::string_view text) {
    if (text == "quantum") return Method::quantum;
    if (text == "nambu") return Method::nambu;
    if (text == "classical") return Method::classical;
    throw ConfigError("unknown method '" + std::string(text) + "' (expected quantum, nambu or classical)");
}

void ModelSpec::validate() const {
    if (masses.empty()) throw ConfigError("model: at least one DOF required");
    if (omegas.size() != masses.size()) throw ConfigError("model: one frequency per mass required");
    const int expected = id == ModelId::henon_heiles ? 2 : 1;
    if (n_dof() != expected)
        throw ConfigError("model " + std::string(to_string(id)) + " has " + std::to_string(expected) + " DOF(s)");
    for (double m : masses) {
        if (!(m > 0.0)) throw ConfigError("model: masses must be positive");
    }
    for (double w : omegas) {
        if (!(w > 0.0)) throw ConfigError("model: frequencies must be positive");
    }
    if (!(hbar > 0.0)) throw ConfigError("model: hbar must be positive");
    if (!std::isfinite(coupling)) throw ConfigError("model: coupling must be finite");
}

Poly ModelSpec::potential() const {
    Poly v;
    for (int a = 0; a < n_dof(); ++a) {
        const double m = masses[static_cast<std::size_t>(a)];
        const double w = omegas[static_cast<std::size_t>(a)];
        v += 0.5 * m * w * w * Poly::var(VarId::q(a), 2);
    }
    if (id == ModelId::cubic) v += (coupling / 3.0) * Poly::var(VarId::q(0), 3);
    if (id == ModelId::henon_heiles) v += coupling * Poly::var(VarId::q(0)) * Poly::var(VarId::q(1), 2);
    return v;
}

Poly ModelSpec::classical_hamiltonian() const {
    Poly h = potential();
    for (int a = 0; a < n_dof(); ++a)
        h += (0.5 / masses[static_cast<std::size_t>(a)]) * Poly::var(VarId::p(a), 2);
    return h;
}

MultipletDef ModelSpec::multiplet_def() const { return builtin_multiplet(multiplet, n_dof()); }

Poly ModelSpec::nambu_F() const { return build_F(masses, potential(), multiplet_def(), closure); }

HamiltonianSet ModelSpec::hamiltonians() const { return HamiltonianSet::from_multiplet(nambu_F(), multiplet_def()); }

std::vector<Observer> ModelSpec::observers() const {
    const MultipletDef m = multiplet_def();
    std::vector<Observer> out{{"F", nambu_F()}};
    for (int c = 1; c <= m.size() - 2; ++c) out.push_back({"G" + std::to_string(c), m.summed_constraint(c)});
    const int q2 = m.generator_index(2, 0);
    const int p2 = m.generator_index(0, 2);
    if (m.size() >= 4 && q2 != 0 && p2 != 0) {
        for (int a = 0; a < n_dof(); ++a) {
            const double mass = masses[static_cast<std::size_t>(a)];
            const double w = omegas[static_cast<std::size_t>(a)];
            Poly e = (0.5 / mass) * Poly::var(VarId::x(p2, a)) + (0.5 * mass * w * w) * Poly::var(VarId::x(q2, a));
            out.push_back({"E" + std::to_string(a + 1), std::move(e)});
        }
    }
    return out;
}

ModelSpec builtin_model(ModelId id) {
    ModelSpec s;
    s.id = id;
    switch (id) {
    case ModelId::harmonic:
        s.multiplet = "triplet";
        break;
    case ModelId::cubic:
        s.multiplet = "quartet";
        s.coupling = 0.3;
        break;
    case ModelId::henon_heiles:
        s.multiplet = "quartet";
        s.masses = {1.0, 1.0};
        s.omegas = {1.0, 1.1};
        s.coupling = -0.11;
        break;
    }
    return s;
}

PacketSpec default_packet(ModelId id) {
    switch (id) {
    case ModelId::harmonic:
        return {{1.0}, {0.0}, {}};
    case ModelId::cubic:
        return {{0.0}, {1.8}, {}};
    case ModelId::henon_heiles:
        return {{0.0, 1.0}, {0.0, 1.0}, {}};
    }
    return {};
}

std::vector<double> packet_widths(const ModelSpec& model, const PacketSpec& packet) {
    const auto n = static_cast<std::size_t>(model.n_dof());
    if (packet.qc.size() != n || packet.pc.size() != n)
        throw ConfigError("packet: expected " + std::to_string(n) + " value(s) for qc and pc");
    if (!packet.sigma.empty()) {
        if (packet.sigma.size() != n) throw ConfigError("packet: one sigma per DOF required");
        for (double s : packet.sigma) {
            if (!(s > 0.0)) throw ConfigError("packet: sigma must be positive");
        }
        return packet.sigma;
    }
    std::vector<double> out;
    for (std::size_t a = 0; a < n; ++a) out.push_back(std::sqrt(model.hbar / (2.0 * model.masses[a] * model.omegas[a])));
    return out;
}

namespace {

// <X^n> for X ~ Normal(mean, var).
double gaussian_moment(int n, double mean, double var) {
    double prev = 1.0;
    double cur = mean;
    if (n == 0) return prev;
    for (int k = 2; k <= n; ++k) {
        const double next = mean * cur + (k - 1) * var * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Weyl-ordered expectation of a polynomial in (q_dof, p_dof) for a frozen
// Gaussian: the Wigner function factorises into independent normals.
double weyl_expectation(const Poly& f, int dof, double qc, double pc, double sigma, double hbar) {
    const double vq = sigma * sigma;
    const double vp = hbar * hbar / (4.0 * vq);
    double total = 0.0;
    for (const auto& [mono, c] : f.terms()) {
        double t = c;
        for (const auto& [v, e] : mono) {
            if (v.dof != dof || v.kind == SlotKind::x) throw DimensionMismatch("packet moment: bad generator variable");
            t *= v.kind == SlotKind::q ? gaussian_moment(e, qc, vq) : gaussian_moment(e, pc, vp);
        }
        total += t;
    }
    return total;
}

std::vector<double> initial_canonical(const PacketSpec& packet) {
    std::vector<double> x;
    for (std::size_t a = 0; a < packet.qc.size(); ++a) {
        x.push_back(packet.qc[a]);
        x.push_back(packet.pc[a]);
    }
    return x;
}

Trajectory make_trajectory(const ModelSpec& model, Method method, const RunOptions& opts) {
    Trajectory t;
    t.meta.model = std::string(to_string(model.id));
    t.meta.method = std::string(to_string(method));
    t.meta.dt = opts.dt;
    t.meta.stride = opts.stride;
    return t;
}

void check_options(const RunOptions& opts, double t_end) {
    if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw ConfigError("run: dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("run: t_end must be positive");
    if (opts.stride < 1) throw ConfigError("run: stride must be >= 1");
}

int mean_slot(const MultipletDef& m, const RunOptions& opts) {
    if (!opts.q_stop) return 0;
    const int slot = m.generator_index(1, 0);
    if (slot == 0) throw ConfigError("run: q_stop needs a multiplet with a <q> slot");
    return slot;
}

Trajectory run_nambu(const ModelSpec& model, const PacketSpec& packet, const RunOptions& opts, double t_end) {
    const MultipletDef m = model.multiplet_def();
    const NambuState s0 = init_nambu_from_packet(model, packet);
    const NambuFlow flow(model.hamiltonians(), s0.layout);
    const auto vars = s0.layout.variables();
    const auto observers = model.observers();

    IntegrationOptions io{opts.dt, t_end, opts.stride, {}};
    if (const int slot = mean_slot(m, opts)) {
        const auto k = static_cast<std::size_t>(s0.layout.index(VarId::x(slot, 0)));
        const double limit = *opts.q_stop;
        io.stop = [k, limit](std::span<const double> x) { return x[k] < limit; };
    }
    Trajectory traj = rk4_integrate(std::cref(flow), s0.values, vars, io, observers);
    const Trajectory shell = make_trajectory(model, Method::nambu, opts);
    traj.meta = shell.meta;
    return traj;
}

Trajectory run_classical(const ModelSpec& model, const PacketSpec& packet, const RunOptions& opts, double t_end) {
    const MultipletDef m = model.multiplet_def();
    const ClassicalFlow flow(model.classical_hamiltonian(), model.n_dof());
    const auto canon_vars = canonical_variables(model.n_dof());
    const auto x0 = initial_canonical(packet);

    IntegrationOptions io{opts.dt, t_end, opts.stride, {}};
    if (opts.q_stop) {
        mean_slot(m, opts);
        const double limit = *opts.q_stop;
        io.stop = [limit](std::span<const double> x) { return x[0] < limit; };
    }
    const Trajectory canon = rk4_integrate(std::cref(flow), x0, canon_vars, io);

    Trajectory traj = make_trajectory(model, Method::classical, opts);
    traj.status = canon.status;
    traj.diagnostic = canon.diagnostic;
    const auto vars = m.layout().variables();
    for (VarId v : vars) traj.state_columns.push_back(v.name());
    std::vector<CompiledPoly> obs;
    for (const auto& o : model.observers()) {
        traj.observer_columns.push_back(o.name);
        obs.emplace_back(o.poly, vars);
    }
    for (const auto& row : canon.rows) {
        TrajectoryRow out{row.t, m.classical_image(row.state), {}, row.flagged};
        for (const auto& o : obs) out.observed.push_back(o(out.state));
        traj.rows.push_back(std::move(out));
    }
    return traj;
}

// Which grid expectation each generator of a DOF corresponds to.
std::vector<Observable> generator_observables(const MultipletDef& m) {
    const VarId q = VarId::q(0);
    const VarId p = VarId::p(0);
    const std::vector<std::pair<Poly, Observable>> known{
        {Poly::var(q), Observable::q},       {Poly::var(p), Observable::p},
        {Poly::var(q, 2), Observable::q2},   {Poly::var(p, 2), Observable::p2},
        {Poly::var(q) * Poly::var(p), Observable::qp_sym},
    };
    std::vector<Observable> out;
    for (int i = 1; i <= m.size(); ++i) {
        auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == m.def(0, i); });
        if (it == known.end())
            throw ConfigError("quantum method has no grid observable for generator " + m.def(0, i).to_string());
        out.push_back(it->second);
    }
    return out;
}

Trajectory run_quantum(const ModelSpec& model, const PacketSpec& packet, const RunOptions& opts, double t_end,
                       std::vector<std::string>* warnings) {
    const MultipletDef m = model.multiplet_def();
    const Grid grid = opts.grid ? *opts.grid : default_grid(model.id);
    if (grid.dims() != static_cast<std::size_t>(model.n_dof()))
        throw ConfigError("run: grid dimension does not match the model");
    std::optional<Absorber> absorber;
    if (opts.use_absorber) absorber = opts.absorber ? opts.absorber : default_absorber(model.id);

    WaveFunction wf = initial_wavefunction(model, packet, grid, warnings);
    const QuantumHamiltonian ham{model.masses, model.potential()};
    const SplitOperator prop(grid, ham, opts.dt, model.hbar, absorber);

    const auto kinds = generator_observables(m);
    const int mean = mean_slot(m, opts);
    const auto vars = m.layout().variables();
    Trajectory traj = make_trajectory(model, Method::quantum, opts);
    for (VarId v : vars) traj.state_columns.push_back(v.name());
    std::vector<CompiledPoly> obs;
    for (const auto& o : model.observers()) {
        traj.observer_columns.push_back(o.name);
        obs.emplace_back(o.poly, vars);
    }
    traj.observer_columns.push_back("norm");

    // Returns false when the run should end after this row.
    auto record = [&](double t) {
        TrajectoryRow row;
        row.t = t;
        for (int a = 0; a < model.n_dof(); ++a) {
            const AxisMoments mom = axis_moments(wf, a);
            for (Observable k : kinds) row.state.push_back(mom.get(k));
        }
        for (const auto& o : obs) row.observed.push_back(o(row.state));
        const double norm = wf.norm();
        row.observed.push_back(norm);
        bool go_on = true;
        if (norm < opts.min_norm) {
            row.flagged = true;
            traj.status = RunStatus::absorbed;
            std::ostringstream msg;
            msg << "norm fell to " << norm << " at t = " << t;
            traj.diagnostic = msg.str();
            go_on = false;
        } else if (mean != 0 && row.state[static_cast<std::size_t>(mean - 1)] < *opts.q_stop) {
            row.flagged = true;
            traj.status = RunStatus::escaped;
            std::ostringstream msg;
            msg << "stop condition reached at t = " << t;
            traj.diagnostic = msg.str();
            go_on = false;
        }
        traj.rows.push_back(std::move(row));
        return go_on;
    };

    const auto steps = static_cast<long long>(std::floor(t_end / opts.dt + 1e-9));
    if (!record(0.0)) return traj;
    long long done = 0;
    while (done < steps) {
        const long long chunk = std::min<long long>(opts.stride, steps - done);
        try {
            prop.step(wf, static_cast<int>(chunk));
        } catch (const NonFiniteState& e) {
            traj.status = RunStatus::non_finite;
            std::ostringstream msg;
            msg << e.what() << " between t = " << static_cast<double>(done) * opts.dt << " and "
                << static_cast<double>(done + chunk) * opts.dt;
            traj.diagnostic = msg.str();
            break;
        }
        done += chunk;
        if (!record(static_cast<double>(done) * opts.dt)) break;
    }
    return traj;
}

} // namespace

NambuState init_nambu_from_packet(const ModelSpec& model, const PacketSpec& packet) {
    model.validate();
    const auto widths = packet_widths(model, packet);
    const MultipletDef m = model.multiplet_def();
    std::vector<double> values;
    for (int a = 0; a < model.n_dof(); ++a) {
        const auto k = static_cast<std::size_t>(a);
        for (int i = 1; i <= m.size(); ++i)
            values.push_back(weyl_expectation(m.def(a, i), a, packet.qc[k], packet.pc[k], widths[k], model.hbar));
    }
    return NambuState(std::move(values), m.layout());
}

Grid default_grid(ModelId id) {
    switch (id) {
    case ModelId::harmonic:
        return Grid{{GridAxis{-16.0, 16.0, 2048}}};
    case ModelId::cubic:
        return Grid{{GridAxis{-30.0, 15.0, 4096}}};
    case ModelId::henon_heiles:
        return Grid{{GridAxis{-8.0, 8.0, 256}, GridAxis{-8.0, 8.0, 256}}};
    }
    return {};
}

std::optional<Absorber> default_absorber(ModelId id) {
    if (id == ModelId::cubic) return Absorber{};
    return std::nullopt;
}

double default_t_end(ModelId id) {
    switch (id) {
    case ModelId::harmonic:
        return 20.0;
    case ModelId::cubic:
        return 40.0;
    case ModelId::henon_heiles:
        return 100.0;
    }
    return 1.0;
}

std::optional<double> default_q_stop(ModelId id) {
    if (id == ModelId::cubic) return -15.0;
    return std::nullopt;
}

WaveFunction initial_wavefunction(const ModelSpec& model, const PacketSpec& packet, const Grid& grid,
                                  std::vector<std::string>* warnings) {
    model.validate();
    const auto widths = packet_widths(model, packet);
    return init_gaussian(grid, packet.qc, packet.pc, widths, model.hbar, warnings);
}

Trajectory run_scenario(const ModelSpec& model, const PacketSpec& packet, Method method, const RunOptions& opts,
                        std::vector<std::string>* warnings) {
    model.validate();
    packet_widths(model, packet);
    const double t_end = opts.t_end > 0.0 ? opts.t_end : default_t_end(model.id);
    check_options(opts, t_end);
    RunOptions resolved = opts;
    if (!resolved.q_stop) resolved.q_stop = default_q_stop(model.id);
    switch (method) {
    case Method::nambu:
        return run_nambu(model, packet, resolved, t_end);
    case Method::classical:
        return run_classical(model, packet, resolved, t_end);
    case Method::quantum:
        return run_quantum(model, packet, resolved, t_end, warnings);
    }
    throw ConfigError("run: unknown method");
}

namespace {

double interpolate(std::span<const double> ts, std::span<const double> ys, double t) {
    auto hi = std::lower_bound(ts.begin(), ts.end(), t);
    if (hi == ts.end()) return ys.back();
    const auto j = static_cast<std::size_t>(hi - ts.begin());
    if (*hi == t || j == 0) return ys[j];
    const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    return (1.0 - w) * ys[j - 1] + w * ys[j];
}

} // namespace

CompareSummary compare(const Trajectory& a, const Trajectory& b, std::span<const std::string> columns,
                       double tolerance) {
    if (a.rows.empty() || b.rows.empty()) throw DimensionMismatch("compare: empty trajectory");
    const auto ta = a.times();
    const auto tb = b.times();
    const double lo = std::max(ta.front(), tb.front());
    const double hi = std::min(ta.back(), tb.back());
    if (lo > hi) throw DimensionMismatch("compare: trajectories cover disjoint time ranges");

    std::vector<std::string> names(columns.begin(), columns.end());
    if (names.empty()) {
        for (const auto& c : a.columns()) {
            if (b.has_column(c)) names.push_back(c);
        }
    }

    CompareSummary summary;
    summary.pass = true;
    for (const auto& name : names) {
        const auto ya = a.column(name);
        const auto yb = b.column(name);
        ColumnDiff d{name, 0.0, 0.0, false};
        std::size_t count = 0;
        double sq = 0.0;
        for (std::size_t k = 0; k < ta.size(); ++k) {
            if (ta[k] < lo || ta[k] > hi) continue;
            const double diff = std::abs(ya[k] - interpolate(tb, yb, ta[k]));
            d.max_abs = std::max(d.max_abs, diff);
            sq += diff * diff;
            ++count;
        }
        d.rms = count > 0 ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
        d.pass = d.max_abs <= tolerance;
        summary.pass = summary.pass && d.pass;
        summary.columns.push_back(d);
    }
    return summary;
}

} // namespace nambu
