#pragma once

#include "nambu/closure.hpp"
#include "nambu/constraints.hpp"
#include "nambu/dynamics.hpp"
#include "nambu/quantum.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nambu {

enum class ModelId { harmonic, cubic, henon_heiles };
enum class Method { quantum, nambu, classical };

std::string_view to_string(ModelId id);
std::string_view to_string(Method m);
/// `harmonic`, `cubic`, `henon-heiles` (or `henon_heiles`); ConfigError otherwise.
ModelId parse_model(std::string_view text);
/// `quantum`, `nambu`, `classical`; ConfigError otherwise.
Method parse_method(std::string_view text);

struct ModelSpec {
    ModelId id = ModelId::harmonic;
    std::vector<double> masses{1.0};
    std::vector<double> omegas{1.0};
    /// g for the cubic model, lambda for Henon-Heiles, unused otherwise.
    double coupling = 0.0;
    double hbar = 1.0;
    std::string multiplet = "triplet";
    ClosureMode closure = ClosureMode::zero_cumulant;

    int n_dof() const { return static_cast<int>(masses.size()); }
    /// m, omega, hbar > 0 and consistent DOF counts; throws ConfigError.
    void validate() const;

    /// V(q0, q1, ...).
    Poly potential() const;
    /// sum p^2 / 2m + V.
    Poly classical_hamiltonian() const;
    MultipletDef multiplet_def() const;
    /// Nambu F from the closure.
    Poly nambu_F() const;
    /// F and the summed constraints.
    HamiltonianSet hamiltonians() const;
    /// F, G1[, G2] and, for quartets, the mode energies E1, E2, ...
    std::vector<Observer> observers() const;
};

/// harmonic: m = w = 1, triplet. cubic: m = w = 1, g = 0.3, quartet.
/// henon-heiles: m = 1, w = (1, 1.1), lambda = -0.11, quartet.
ModelSpec builtin_model(ModelId id);

struct PacketSpec {
    std::vector<double> qc;
    std::vector<double> pc;
    /// Empty means sqrt(hbar / 2 m w) per DOF.
    std::vector<double> sigma;
};

/// The reference initial conditions: harmonic (1, 0), cubic (0, 1.8),
/// henon-heiles (0, 0) and (1, 1).
PacketSpec default_packet(ModelId id);
/// Resolved widths; throws ConfigError on DOF mismatch or sigma <= 0.
std::vector<double> packet_widths(const ModelSpec& model, const PacketSpec& packet);

/// Frozen-Gaussian moments of the packet in the model's multiplet:
/// quartet (qc, pc, qc^2 + s^2, pc^2 + hbar^2 / 4 s^2),
/// triplet (qc^2 + s^2, pc^2 + hbar^2 / 4 s^2, qc pc).
NambuState init_nambu_from_packet(const ModelSpec& model, const PacketSpec& packet);

Grid default_grid(ModelId id);
std::optional<Absorber> default_absorber(ModelId id);
/// 40 for cubic, 100 for Henon-Heiles, 20 for harmonic.
double default_t_end(ModelId id);
/// -15 for cubic (the potential is unbounded below past the barrier), none otherwise.
std::optional<double> default_q_stop(ModelId id);

struct RunOptions {
    double dt = 1e-3;
    /// <= 0 selects default_t_end.
    double t_end = 0.0;
    int stride = 1;
    /// Stop when <q0> falls below this (escape past the cubic barrier).
    /// Unset selects default_q_stop.
    std::optional<double> q_stop;
    /// Quantum only; defaults from default_grid / default_absorber.
    std::optional<Grid> grid;
    std::optional<Absorber> absorber;
    bool use_absorber = true;
    /// Quantum runs stop (status absorbed) once the norm drops below this.
    double min_norm = 0.99;
};

/// Runs one method and returns the trajectory in the shared schema: state
/// columns are the multiplet variables (expectation values for quantum,
/// classical images for classical), observers as in ModelSpec::observers.
/// Quantum trajectories carry an extra `norm` column.
Trajectory run_scenario(const ModelSpec& model, const PacketSpec& packet, Method method,
                        const RunOptions& opts = {}, std::vector<std::string>* warnings = nullptr);

/// Wavefunction of the packet on the run's grid (for snapshots).
WaveFunction initial_wavefunction(const ModelSpec& model, const PacketSpec& packet, const Grid& grid,
                                  std::vector<std::string>* warnings = nullptr);

struct ColumnDiff {
    std::string column;
    double max_abs = 0.0;
    double rms = 0.0;
    bool pass = false;
};

struct CompareSummary {
    std::vector<ColumnDiff> columns;
    bool pass = false;
};

/// Per-column differences of `b` against `a`, with `b` linearly resampled
/// onto the times of `a` that fall inside both ranges. Empty `columns`
/// compares every column the two share. Throws DimensionMismatch for
/// disjoint time ranges or a missing column.
CompareSummary compare(const Trajectory& a, const Trajectory& b, std::span<const std::string> columns,
                       double tolerance);

} // namespace nambu
