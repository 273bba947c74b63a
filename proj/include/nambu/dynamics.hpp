#pragma once

#include "nambu/brackets.hpp"
#include "nambu/constraints.hpp"
#include "nambu/poly.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nambu {

struct NambuState {
    std::vector<double> values;
    Layout layout;
    double t = 0.0;

    NambuState() = default;
    /// Throws DimensionMismatch if `values.size() != layout.size()`.
    NambuState(std::vector<double> values, Layout layout, double t = 0.0);
};

/// F and the DOF-summed constraints G_1..G_{N-2}.
struct HamiltonianSet {
    Poly F;
    std::vector<Poly> Gs;

    static HamiltonianSet from_multiplet(Poly F, const MultipletDef& m) { return {std::move(F), m.summed_constraints()}; }
    /// (F, G_1, ..., G_{N-2}).
    std::vector<Poly> all() const;
};

/// dx/dt = f(x), written into `dxdt`.
using VectorField = std::function<void(std::span<const double> x, std::span<double> dxdt)>;

/// Nambu flow dx_i^(a)/dt = {x_i^(a), F, G_1, ..., G_{N-2}} with all
/// Hamiltonian gradients compiled once. Each component is the LU
/// determinant of that DOF's Jacobian with its first row replaced by e_i.
class NambuFlow {
public:
    NambuFlow(const HamiltonianSet& h, const Layout& layout);

    void operator()(std::span<const double> x, std::span<double> dxdt) const;
    const Layout& layout() const { return layout_; }

private:
    Layout layout_;
    // gradients_[h][k]: d H_h / d x_k for flat index k.
    std::vector<std::vector<CompiledPoly>> gradients_;
};

/// Hamilton flow (dq/dt, dp/dt) = (dH/dp, -dH/dq) on (q0, p0, q1, p1, ...).
class ClassicalFlow {
public:
    ClassicalFlow(const Poly& hamiltonian, int n_dof);

    void operator()(std::span<const double> x, std::span<double> dxdt) const;
    int n_dof() const { return n_dof_; }

private:
    int n_dof_;
    std::vector<CompiledPoly> dh_dq_;
    std::vector<CompiledPoly> dh_dp_;
};

std::vector<double> nambu_vector_field(const HamiltonianSet& h, const NambuState& s);
std::vector<double> classical_vector_field(const Poly& hamiltonian, std::span<const double> point);

struct Observer {
    std::string name;
    Poly poly;
};

enum class RunStatus {
    completed,
    escaped,   ///< stop predicate fired (cubic barrier escape)
    absorbed,  ///< quantum norm fell below the reporting threshold
    non_finite ///< NaN/Inf in the state; trajectory is partial
};

std::string_view to_string(RunStatus s);

struct TrajectoryRow {
    double t = 0.0;
    std::vector<double> state;
    std::vector<double> observed;
    bool flagged = false;
};

struct TrajectoryMeta {
    std::string model;
    std::string method;
    double dt = 0.0;
    int stride = 1;
};

/// Recorded time series. Rows are spaced by `meta.dt * meta.stride`; the
/// last row may be a terminal record flagged with the status.
struct Trajectory {
    std::vector<std::string> state_columns;
    std::vector<std::string> observer_columns;
    std::vector<TrajectoryRow> rows;
    TrajectoryMeta meta;
    RunStatus status = RunStatus::completed;
    std::string diagnostic;

    /// All column names after `t`, state first.
    std::vector<std::string> columns() const;
    /// Values of a named column (state or observer). Throws if absent.
    std::vector<double> column(std::string_view name) const;
    std::vector<double> times() const;
    bool has_column(std::string_view name) const;
};

struct IntegrationOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int stride = 1;
    /// Returns true when integration should stop (row is flagged, status escaped).
    std::function<bool(std::span<const double>)> stop;
};

/// Fixed-step classical RK4. Rows are recorded at t = 0 and every `stride`
/// steps up to the largest multiple of dt <= t_end (the final step is always
/// recorded). Observers are polynomials over `state_vars`, which names each
/// state component. A non-finite state ends integration with status
/// non_finite and a diagnostic; no exception escapes.
Trajectory rk4_integrate(const VectorField& field, std::span<const double> s0,
                         std::span<const VarId> state_vars, const IntegrationOptions& opts,
                         std::span<const Observer> observers = {});

struct Drift {
    std::string name;
    double max_abs = 0.0;
    double relative = 0.0; ///< max_abs / |value(0)|, or max_abs when value(0) == 0
};

std::vector<Drift> conserved_drift(const Trajectory& traj);

/// Columns `t,<state>,<observers>,flags`; the flags cell holds the status
/// name on flagged rows.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// Reads the CSV schema back. Columns named x<i>_<dof> become state columns,
/// the rest observers.
Trajectory read_trajectory_csv(std::istream& in);

} // namespace nambu
