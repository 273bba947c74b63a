#pragma once

#include "nambu/poly.hpp"

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nambu {

/// Uniform periodic axis: points min + j*dx for j < n, dx = (max - min) / n.
struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    int n = 0;

    double dx() const { return (max - min) / n; }
    double point(int j) const { return min + j * dx(); }
    /// Angular wavenumbers in FFT order.
    std::vector<double> wavenumbers() const;
    /// Throws ConfigError unless n is a power of two >= 64 and max > min.
    void validate() const;
};

/// 1D or 2D tensor grid, row-major with the last axis fastest.
struct Grid {
    std::vector<GridAxis> axes;

    std::size_t dims() const { return axes.size(); }
    std::size_t total() const;
    double cell_volume() const;
    void validate() const;
};

class WaveFunction {
public:
    WaveFunction(Grid grid, std::vector<std::complex<double>> amps, double hbar);

    const Grid& grid() const { return grid_; }
    double hbar() const { return hbar_; }
    std::span<std::complex<double>> amps() { return amps_; }
    std::span<const std::complex<double>> amps() const { return amps_; }

    /// sum |psi|^2 dV.
    double norm() const;
    /// Largest |psi| on the outermost grid points.
    double boundary_amplitude() const;

private:
    Grid grid_;
    std::vector<std::complex<double>> amps_;
    double hbar_;
};

/// Product of normalised Gaussians
///   (2 pi s^2)^(-1/4) exp(-(q - qc)^2 / 4 s^2 + i pc (q - qc) / hbar)
/// with one (qc, pc, s) per axis. A warning is appended when the packet is
/// not negligible (|psi| >= 1e-8) on the boundary.
WaveFunction init_gaussian(const Grid& grid, std::span<const double> centers, std::span<const double> momenta,
                           std::span<const double> widths, double hbar,
                           std::vector<std::string>* warnings = nullptr);

/// H = sum_a p_a^2 / 2 m_a + V(q0, q1, ...).
struct QuantumHamiltonian {
    std::vector<double> masses;
    Poly potential;
};

/// Edge absorber: over the outer `fraction` of each axis the amplitude is
/// multiplied every step by [cos^2(pi s / 2)]^(rate * dt), where s runs from
/// 0 at the inner edge of the ramp to 1 at the boundary.
struct Absorber {
    double fraction = 0.15;
    double rate = 1.0;
};

/// Strang splitting exp(-iV dt/2h) exp(-iT dt/h) exp(-iV dt/2h), kinetic
/// factor applied in momentum space. Phases and transform plans are built
/// once; `step` may be called repeatedly.
class SplitOperator {
public:
    SplitOperator(const Grid& grid, const QuantumHamiltonian& ham, double dt, double hbar,
                  std::optional<Absorber> absorber = std::nullopt);
    ~SplitOperator();
    SplitOperator(SplitOperator&&) noexcept;
    SplitOperator& operator=(SplitOperator&&) noexcept;

    /// Throws NonFiniteState if an amplitude becomes NaN/Inf.
    void step(WaveFunction& wf, int steps = 1) const;
    double dt() const { return dt_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double dt_;
};

WaveFunction propagate_split_operator(WaveFunction wf, const QuantumHamiltonian& ham, double dt, int steps,
                                      std::optional<Absorber> absorber = std::nullopt);

enum class Observable { q, p, q2, p2, qp_sym };

/// Normalised expectation values along one axis; qp_sym is
/// Re <psi| q (-i hbar d/dq) |psi>.
struct AxisMoments {
    double q = 0.0;
    double p = 0.0;
    double q2 = 0.0;
    double p2 = 0.0;
    double qp_sym = 0.0;

    double get(Observable o) const;
};

AxisMoments axis_moments(const WaveFunction& wf, int axis = 0);
double expect(const WaveFunction& wf, Observable kind, int axis = 0);
/// <H> for the given Hamiltonian.
double expect_energy(const WaveFunction& wf, const QuantumHamiltonian& ham);
/// <V> alone.
double expect_potential(const WaveFunction& wf, const Poly& potential);

struct ModeParams {
    double m1 = 1.0;
    double omega1 = 1.0;
    double m2 = 1.0;
    double omega2 = 1.0;
};

/// Harmonic mode energies <p_a^2>/2m_a + m_a w_a^2 <q_a^2>/2 of a 2D state.
std::pair<double, double> mode_energies(const WaveFunction& wf, const ModeParams& params);

/// Binary snapshot, little-endian: u64 n_axes, per axis (f64 min, f64 max,
/// u64 n_points), then interleaved re/im f64 amplitudes.
void write_snapshot(std::ostream& out, const WaveFunction& wf);
WaveFunction read_snapshot(std::istream& in, double hbar);

} // namespace nambu
