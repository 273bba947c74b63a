#include "nambu/dynamics.hpp"

#include "nambu/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace nambu {

NambuState::NambuState(std::vector<double> v, Layout l, double time) : values(std::move(v)), layout(l), t(time) {
    if (values.size() != static_cast<std::size_t>(layout.size()))
        throw DimensionMismatch("NambuState: " + std::to_string(values.size()) + " values for a layout of size " +
                                std::to_string(layout.size()));
}

std::vector<Poly> HamiltonianSet::all() const {
    std::vector<Poly> out{F};
    out.insert(out.end(), Gs.begin(), Gs.end());
    return out;
}

NambuFlow::NambuFlow(const HamiltonianSet& h, const Layout& layout) : layout_(layout) {
    if (static_cast<int>(h.Gs.size()) != layout.multiplet_size - 2)
        throw DimensionMismatch("NambuFlow: expected " + std::to_string(layout.multiplet_size - 2) + " constraints");
    const auto vars = layout.variables();
    for (const Poly& ham : h.all()) {
        for (VarId v : ham.variables()) {
            if (!layout.contains(v)) throw DimensionMismatch("NambuFlow: " + v.name() + " lies outside the layout");
        }
        std::vector<CompiledPoly> grad;
        grad.reserve(vars.size());
        for (VarId v : vars) grad.emplace_back(ham.partial(v), vars);
        gradients_.push_back(std::move(grad));
    }
}

void NambuFlow::operator()(std::span<const double> x, std::span<double> dxdt) const {
    const int n = layout_.multiplet_size;
    const auto nn = static_cast<std::size_t>(n);
    std::vector<double> rows((nn - 1) * nn);
    std::vector<double> jac(nn * nn);
    for (int a = 0; a < layout_.n_dof; ++a) {
        const std::size_t base = static_cast<std::size_t>(a * n);
        for (std::size_t h = 0; h < nn - 1; ++h) {
            for (std::size_t c = 0; c < nn; ++c) rows[h * nn + c] = gradients_[h][base + c](x);
        }
        for (std::size_t i = 0; i < nn; ++i) {
            std::fill(jac.begin(), jac.begin() + static_cast<std::ptrdiff_t>(nn), 0.0);
            jac[i] = 1.0;
            std::copy(rows.begin(), rows.end(), jac.begin() + static_cast<std::ptrdiff_t>(nn));
            dxdt[base + i] = determinant(jac, n);
        }
    }
}

ClassicalFlow::ClassicalFlow(const Poly& hamiltonian, int n_dof) : n_dof_(n_dof) {
    const auto vars = canonical_variables(n_dof);
    for (int a = 0; a < n_dof; ++a) {
        dh_dq_.emplace_back(hamiltonian.partial(VarId::q(a)), vars);
        dh_dp_.emplace_back(hamiltonian.partial(VarId::p(a)), vars);
    }
}

void ClassicalFlow::operator()(std::span<const double> x, std::span<double> dxdt) const {
    for (std::size_t a = 0; a < static_cast<std::size_t>(n_dof_); ++a) {
        dxdt[2 * a] = dh_dp_[a](x);
        dxdt[2 * a + 1] = -dh_dq_[a](x);
    }
}

std::vector<double> nambu_vector_field(const HamiltonianSet& h, const NambuState& s) {
    NambuFlow flow(h, s.layout);
    std::vector<double> out(s.values.size());
    flow(s.values, out);
    return out;
}

std::vector<double> classical_vector_field(const Poly& hamiltonian, std::span<const double> point) {
    if (point.size() % 2 != 0) throw DimensionMismatch("classical point must hold (q, p) pairs");
    ClassicalFlow flow(hamiltonian, static_cast<int>(point.size() / 2));
    std::vector<double> out(point.size());
    flow(point, out);
    return out;
}

std::string_view to_string(RunStatus s) {
    switch (s) {
    case RunStatus::completed:
        return "completed";
    case RunStatus::escaped:
        return "escaped";
    case RunStatus::absorbed:
        return "absorbed";
    case RunStatus::non_finite:
        return "non_finite";
    }
    return "?";
}

std::vector<std::string> Trajectory::columns() const {
    std::vector<std::string> out = state_columns;
    out.insert(out.end(), observer_columns.begin(), observer_columns.end());
    return out;
}

bool Trajectory::has_column(std::string_view name) const {
    return std::find(state_columns.begin(), state_columns.end(), name) != state_columns.end() ||
           std::find(observer_columns.begin(), observer_columns.end(), name) != observer_columns.end();
}

std::vector<double> Trajectory::column(std::string_view name) const {
    std::vector<double> out;
    out.reserve(rows.size());
    if (auto it = std::find(state_columns.begin(), state_columns.end(), name); it != state_columns.end()) {
        const auto k = static_cast<std::size_t>(it - state_columns.begin());
        for (const auto& r : rows) out.push_back(r.state[k]);
        return out;
    }
    if (auto it = std::find(observer_columns.begin(), observer_columns.end(), name); it != observer_columns.end()) {
        const auto k = static_cast<std::size_t>(it - observer_columns.begin());
        for (const auto& r : rows) out.push_back(r.observed[k]);
        return out;
    }
    throw DimensionMismatch("trajectory has no column '" + std::string(name) + "'");
}

std::vector<double> Trajectory::times() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.t);
    return out;
}

Trajectory rk4_integrate(const VectorField& field, std::span<const double> s0, std::span<const VarId> state_vars,
                         const IntegrationOptions& opts, std::span<const Observer> observers) {
    if (!(opts.dt > 0.0)) throw ConfigError("rk4_integrate: dt must be positive");
    if (!(opts.t_end > 0.0)) throw ConfigError("rk4_integrate: t_end must be positive");
    if (opts.stride < 1) throw ConfigError("rk4_integrate: stride must be >= 1");
    if (state_vars.size() != s0.size()) throw DimensionMismatch("rk4_integrate: one variable name per component");

    Trajectory traj;
    traj.meta.dt = opts.dt;
    traj.meta.stride = opts.stride;
    for (VarId v : state_vars) traj.state_columns.push_back(v.name());
    std::vector<CompiledPoly> obs;
    for (const auto& o : observers) {
        traj.observer_columns.push_back(o.name);
        obs.emplace_back(o.poly, state_vars);
    }

    const std::size_t n = s0.size();
    std::vector<double> x(s0.begin(), s0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

    auto record = [&](double t, bool flagged) {
        TrajectoryRow row{t, x, {}, flagged};
        row.observed.reserve(obs.size());
        for (const auto& o : obs) row.observed.push_back(o(x));
        traj.rows.push_back(std::move(row));
    };
    record(0.0, false);

    const auto steps = static_cast<long long>(std::floor(opts.t_end / opts.dt + 1e-9));
    const double h = opts.dt;
    for (long long step = 1; step <= steps; ++step) {
        field(x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        field(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        field(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        field(tmp, k4);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        const double t = static_cast<double>(step) * h;
        if (!std::all_of(tmp.begin(), tmp.end(), [](double v) { return std::isfinite(v); })) {
            traj.status = RunStatus::non_finite;
            std::ostringstream msg;
            msg << "non-finite state at t = " << t << " (step " << step << ")";
            traj.diagnostic = msg.str();
            break;
        }
        x.swap(tmp);
        if (opts.stop && opts.stop(x)) {
            record(t, true);
            traj.status = RunStatus::escaped;
            std::ostringstream msg;
            msg << "stop condition reached at t = " << t;
            traj.diagnostic = msg.str();
            break;
        }
        if (step % opts.stride == 0 || step == steps) record(t, false);
    }
    return traj;
}

std::vector<Drift> conserved_drift(const Trajectory& traj) {
    std::vector<Drift> out;
    for (std::size_t k = 0; k < traj.observer_columns.size(); ++k) {
        Drift d{traj.observer_columns[k], 0.0, 0.0};
        if (!traj.rows.empty()) {
            const double v0 = traj.rows.front().observed[k];
            for (const auto& r : traj.rows) d.max_abs = std::max(d.max_abs, std::abs(r.observed[k] - v0));
            d.relative = v0 != 0.0 ? d.max_abs / std::abs(v0) : d.max_abs;
        }
        out.push_back(d);
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const auto old_precision = out.precision(17);
    out << 't';
    for (const auto& c : traj.columns()) out << ',' << c;
    out << ",flags\n";
    for (const auto& r : traj.rows) {
        out << r.t;
        for (double v : r.state) out << ',' << v;
        for (double v : r.observed) out << ',' << v;
        out << ',';
        if (r.flagged) out << to_string(traj.status);
        out << '\n';
    }
    out.precision(old_precision);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool is_state_column(const std::string& name) {
    try {
        return parse_var(name).kind == SlotKind::x;
    } catch (const ParseError&) {
        return false;
    }
}

} // namespace

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trajectory CSV: empty input");
    const auto header = split_csv(line);
    if (header.empty() || header.front() != "t") throw ParseError("trajectory CSV: first column must be 't'");

    Trajectory traj;
    std::vector<int> kind; // 0 state, 1 observer, 2 flags
    for (std::size_t k = 1; k < header.size(); ++k) {
        if (header[k] == "flags") {
            kind.push_back(2);
        } else if (is_state_column(header[k])) {
            kind.push_back(0);
            traj.state_columns.push_back(header[k]);
        } else {
            kind.push_back(1);
            traj.observer_columns.push_back(header[k]);
        }
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ParseError("trajectory CSV line " + std::to_string(lineno) + ": wrong number of cells");
        TrajectoryRow row;
        try {
            row.t = std::stod(cells[0]);
            for (std::size_t k = 1; k < cells.size(); ++k) {
                switch (kind[k - 1]) {
                case 0:
                    row.state.push_back(std::stod(cells[k]));
                    break;
                case 1:
                    row.observed.push_back(std::stod(cells[k]));
                    break;
                default:
                    if (!cells[k].empty()) {
                        row.flagged = true;
                        if (cells[k] == "escaped") traj.status = RunStatus::escaped;
                        if (cells[k] == "absorbed") traj.status = RunStatus::absorbed;
                        if (cells[k] == "non_finite") traj.status = RunStatus::non_finite;
                    }
                }
            }
        } catch (const std::logic_error&) {
            throw ParseError("trajectory CSV line " + std::to_string(lineno) + ": bad number");
        }
        traj.rows.push_back(std::move(row));
    }
    if (traj.rows.size() >= 2) traj.meta.dt = traj.rows[1].t - traj.rows[0].t;
    return traj;
}

} // namespace nambu
