#include "nambu/quantum.hpp"

#include "nambu/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace nambu {

using cplx = std::complex<double>;

std::vector<double> GridAxis::wavenumbers() const {
    std::vector<double> k(static_cast<std::size_t>(n));
    const double dk = 2.0 * std::numbers::pi / (max - min);
    for (int j = 0; j < n; ++j) k[static_cast<std::size_t>(j)] = dk * (j < n / 2 ? j : j - n);
    return k;
}

void GridAxis::validate() const {
    if (!(max > min)) throw ConfigError("grid axis: max must exceed min");
    if (n < 64 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw ConfigError("grid axis: n_points must be a power of two >= 64, got " + std::to_string(n));
}

std::size_t Grid::total() const {
    std::size_t t = 1;
    for (const auto& a : axes) t *= static_cast<std::size_t>(a.n);
    return t;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.dx();
    return v;
}

void Grid::validate() const {
    if (axes.empty() || axes.size() > 2) throw ConfigError("grid: only 1D and 2D grids are supported");
    for (const auto& a : axes) a.validate();
}

namespace {

// Coordinates of every grid point along each axis, flattened row-major.
std::vector<std::vector<double>> coordinate_fields(const Grid& g) {
    std::vector<std::vector<double>> out(g.dims(), std::vector<double>(g.total()));
    if (g.dims() == 1) {
        for (int j = 0; j < g.axes[0].n; ++j) out[0][static_cast<std::size_t>(j)] = g.axes[0].point(j);
        return out;
    }
    const int n0 = g.axes[0].n;
    const int n1 = g.axes[1].n;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            const auto k = static_cast<std::size_t>(i * n1 + j);
            out[0][k] = g.axes[0].point(i);
            out[1][k] = g.axes[1].point(j);
        }
    }
    return out;
}

// Wavenumber of every FFT bin along each axis, flattened like the grid.
std::vector<std::vector<double>> wavenumber_fields(const Grid& g) {
    std::vector<std::vector<double>> out(g.dims(), std::vector<double>(g.total()));
    if (g.dims() == 1) {
        out[0] = g.axes[0].wavenumbers();
        return out;
    }
    const auto k0 = g.axes[0].wavenumbers();
    const auto k1 = g.axes[1].wavenumbers();
    const int n1 = g.axes[1].n;
    for (int i = 0; i < g.axes[0].n; ++i) {
        for (int j = 0; j < n1; ++j) {
            const auto k = static_cast<std::size_t>(i * n1 + j);
            out[0][k] = k0[static_cast<std::size_t>(i)];
            out[1][k] = k1[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

std::vector<double> potential_on_grid(const Grid& g, const Poly& potential) {
    std::vector<VarId> order;
    for (std::size_t a = 0; a < g.dims(); ++a) order.push_back(VarId::q(static_cast<int>(a)));
    const CompiledPoly v(potential, order);
    const auto coords = coordinate_fields(g);
    std::vector<double> out(g.total());
    std::vector<double> at(g.dims());
    for (std::size_t k = 0; k < g.total(); ++k) {
        for (std::size_t a = 0; a < g.dims(); ++a) at[a] = coords[a][k];
        out[k] = v(at);
    }
    return out;
}

// In-place forward/backward DFT over the whole grid; backward is unnormalised.
class Fft {
public:
    explicit Fft(const Grid& g) : total_(g.total()) {
        std::vector<cplx> scratch(total_);
        int shape[2] = {g.axes[0].n, g.dims() > 1 ? g.axes[1].n : 1};
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        const int rank = static_cast<int>(g.dims());
        forward_ = fftw_plan_dft(rank, shape, buf, buf, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft(rank, shape, buf, buf, FFTW_BACKWARD, flags);
    }
    ~Fft() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward(std::span<cplx> data) const { run(forward_, data); }
    void backward(std::span<cplx> data) const { run(backward_, data); }
    std::size_t size() const { return total_; }

private:
    static void run(fftw_plan plan, std::span<cplx> data) {
        auto* buf = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, buf, buf);
    }

    std::size_t total_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(sizeof(T) == 8);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &value, 8);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("snapshot: truncated input");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    T value;
    std::memcpy(&value, &bits, 8);
    return value;
}

} // namespace

WaveFunction::WaveFunction(Grid grid, std::vector<cplx> amps, double hbar)
    : grid_(std::move(grid)), amps_(std::move(amps)), hbar_(hbar) {
    grid_.validate();
    if (!(hbar_ > 0.0)) throw ConfigError("wavefunction: hbar must be positive");
    if (amps_.size() != grid_.total()) throw DimensionMismatch("wavefunction: amplitude count does not match grid");
}

double WaveFunction::norm() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return s * grid_.cell_volume();
}

double WaveFunction::boundary_amplitude() const {
    double best = 0.0;
    if (grid_.dims() == 1) {
        best = std::max(std::abs(amps_.front()), std::abs(amps_.back()));
        return best;
    }
    const int n0 = grid_.axes[0].n;
    const int n1 = grid_.axes[1].n;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            if (i == 0 || j == 0 || i == n0 - 1 || j == n1 - 1)
                best = std::max(best, std::abs(amps_[static_cast<std::size_t>(i * n1 + j)]));
        }
    }
    return best;
}

WaveFunction init_gaussian(const Grid& grid, std::span<const double> centers, std::span<const double> momenta,
                           std::span<const double> widths, double hbar, std::vector<std::string>* warnings) {
    grid.validate();
    const std::size_t d = grid.dims();
    if (centers.size() != d || momenta.size() != d || widths.size() != d)
        throw DimensionMismatch("init_gaussian: one center, momentum and width per axis");
    for (double s : widths) {
        if (!(s > 0.0)) throw ConfigError("init_gaussian: widths must be positive");
    }
    if (!(hbar > 0.0)) throw ConfigError("init_gaussian: hbar must be positive");

    const auto coords = coordinate_fields(grid);
    std::vector<cplx> amps(grid.total());
    for (std::size_t k = 0; k < amps.size(); ++k) {
        cplx psi = 1.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double s2 = widths[a] * widths[a];
            const double dq = coords[a][k] - centers[a];
            const double prefactor = std::pow(2.0 * std::numbers::pi * s2, -0.25);
            psi *= prefactor * std::exp(cplx(-dq * dq / (4.0 * s2), momenta[a] * dq / hbar));
        }
        amps[k] = psi;
    }
    WaveFunction wf(grid, std::move(amps), hbar);
    if (warnings != nullptr && wf.boundary_amplitude() >= 1e-8) {
        std::ostringstream msg;
        msg << "init_gaussian: packet reaches the grid boundary (|psi| = " << wf.boundary_amplitude() << ")";
        warnings->push_back(msg.str());
    }
    return wf;
}

// ---------------------------------------------------------------------------

struct SplitOperator::Impl {
    Grid grid;
    Fft fft;
    std::vector<cplx> half_potential;
    std::vector<cplx> kinetic;
    std::vector<double> mask;

    explicit Impl(const Grid& g) : grid(g), fft(g) {}
};

SplitOperator::SplitOperator(const Grid& grid, const QuantumHamiltonian& ham, double dt, double hbar,
                             std::optional<Absorber> absorber)
    : dt_(dt) {
    grid.validate();
    if (!(dt > 0.0)) throw ConfigError("split operator: dt must be positive");
    if (ham.masses.size() != grid.dims()) throw DimensionMismatch("split operator: one mass per grid axis");
    impl_ = std::make_unique<Impl>(grid);

    const auto v = potential_on_grid(grid, ham.potential);
    impl_->half_potential.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        impl_->half_potential[k] = std::exp(cplx(0.0, -v[k] * dt / (2.0 * hbar)));

    const auto kf = wavenumber_fields(grid);
    const double norm = 1.0 / static_cast<double>(grid.total());
    impl_->kinetic.resize(grid.total());
    for (std::size_t k = 0; k < grid.total(); ++k) {
        double t = 0.0; // T / hbar = hbar k^2 / 2m
        for (std::size_t a = 0; a < grid.dims(); ++a) t += hbar * kf[a][k] * kf[a][k] / (2.0 * ham.masses[a]);
        impl_->kinetic[k] = norm * std::exp(cplx(0.0, -t * dt));
    }

    if (absorber) {
        const auto coords = coordinate_fields(grid);
        impl_->mask.assign(grid.total(), 1.0);
        for (std::size_t a = 0; a < grid.dims(); ++a) {
            const GridAxis& ax = grid.axes[a];
            const double width = absorber->fraction * (ax.max - ax.min);
            const double inner_lo = ax.min + width;
            const double inner_hi = ax.max - width;
            for (std::size_t k = 0; k < grid.total(); ++k) {
                const double x = coords[a][k];
                double s = 0.0;
                if (x < inner_lo) s = (inner_lo - x) / width;
                if (x > inner_hi) s = (x - inner_hi) / width;
                if (s <= 0.0) continue;
                const double c = std::cos(0.5 * std::numbers::pi * std::min(s, 1.0));
                impl_->mask[k] *= std::pow(c * c, absorber->rate * dt);
            }
        }
    }
}

SplitOperator::~SplitOperator() = default;
SplitOperator::SplitOperator(SplitOperator&&) noexcept = default;
SplitOperator& SplitOperator::operator=(SplitOperator&&) noexcept = default;

void SplitOperator::step(WaveFunction& wf, int steps) const {
    if (wf.grid().total() != impl_->grid.total()) throw DimensionMismatch("split operator: grid mismatch");
    auto psi = wf.amps();
    const auto& hv = impl_->half_potential;
    const auto& kin = impl_->kinetic;
    const auto& mask = impl_->mask;
    const std::size_t n = psi.size();
    for (int s = 0; s < steps; ++s) {
        for (std::size_t k = 0; k < n; ++k) psi[k] *= hv[k];
        impl_->fft.forward(psi);
        for (std::size_t k = 0; k < n; ++k) psi[k] *= kin[k];
        impl_->fft.backward(psi);
        for (std::size_t k = 0; k < n; ++k) psi[k] *= hv[k];
        if (!mask.empty()) {
            for (std::size_t k = 0; k < n; ++k) psi[k] *= mask[k];
        }
    }
    for (const cplx& a : psi) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw NonFiniteState("split operator: non-finite amplitude");
    }
}

WaveFunction propagate_split_operator(WaveFunction wf, const QuantumHamiltonian& ham, double dt, int steps,
                                      std::optional<Absorber> absorber) {
    SplitOperator prop(wf.grid(), ham, dt, wf.hbar(), absorber);
    prop.step(wf, steps);
    return wf;
}

// ---------------------------------------------------------------------------

double AxisMoments::get(Observable o) const {
    switch (o) {
    case Observable::q:
        return q;
    case Observable::p:
        return p;
    case Observable::q2:
        return q2;
    case Observable::p2:
        return p2;
    case Observable::qp_sym:
        return qp_sym;
    }
    return 0.0;
}

AxisMoments axis_moments(const WaveFunction& wf, int axis) {
    const Grid& g = wf.grid();
    if (axis < 0 || static_cast<std::size_t>(axis) >= g.dims()) throw DimensionMismatch("axis out of range");
    const auto a = static_cast<std::size_t>(axis);
    const auto coords = coordinate_fields(g);
    const auto kf = wavenumber_fields(g);
    const auto psi = wf.amps();
    const double hbar = wf.hbar();
    const std::size_t n = psi.size();

    AxisMoments m;
    double weight = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = std::norm(psi[k]);
        const double x = coords[a][k];
        weight += w;
        m.q += x * w;
        m.q2 += x * x * w;
    }
    m.q /= weight;
    m.q2 /= weight;

    const Fft fft(g);
    std::vector<cplx> psi_k(psi.begin(), psi.end());
    fft.forward(psi_k);
    double sweight = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = std::norm(psi_k[k]);
        const double pk = hbar * kf[a][k];
        sweight += w;
        m.p += pk * w;
        m.p2 += pk * pk * w;
    }
    m.p /= sweight;
    m.p2 /= sweight;

    // d psi / dq along the axis, spectrally.
    for (std::size_t k = 0; k < n; ++k) psi_k[k] *= cplx(0.0, kf[a][k] / static_cast<double>(n));
    fft.backward(psi_k);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx p_psi = cplx(0.0, -hbar) * psi_k[k];
        acc += (std::conj(psi[k]) * coords[a][k] * p_psi).real();
    }
    m.qp_sym = acc / weight;
    return m;
}

double expect(const WaveFunction& wf, Observable kind, int axis) { return axis_moments(wf, axis).get(kind); }

double expect_potential(const WaveFunction& wf, const Poly& potential) {
    const auto v = potential_on_grid(wf.grid(), potential);
    const auto psi = wf.amps();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const double w = std::norm(psi[k]);
        num += v[k] * w;
        den += w;
    }
    return num / den;
}

double expect_energy(const WaveFunction& wf, const QuantumHamiltonian& ham) {
    if (ham.masses.size() != wf.grid().dims()) throw DimensionMismatch("expect_energy: one mass per axis");
    double e = expect_potential(wf, ham.potential);
    for (std::size_t a = 0; a < ham.masses.size(); ++a)
        e += axis_moments(wf, static_cast<int>(a)).p2 / (2.0 * ham.masses[a]);
    return e;
}

std::pair<double, double> mode_energies(const WaveFunction& wf, const ModeParams& params) {
    if (wf.grid().dims() != 2) throw DimensionMismatch("mode_energies: needs a 2D wavefunction");
    const AxisMoments a = axis_moments(wf, 0);
    const AxisMoments b = axis_moments(wf, 1);
    const double e1 = a.p2 / (2.0 * params.m1) + 0.5 * params.m1 * params.omega1 * params.omega1 * a.q2;
    const double e2 = b.p2 / (2.0 * params.m2) + 0.5 * params.m2 * params.omega2 * params.omega2 * b.q2;
    return {e1, e2};
}

void write_snapshot(std::ostream& out, const WaveFunction& wf) {
    const Grid& g = wf.grid();
    put_le<std::uint64_t>(out, g.dims());
    for (const auto& a : g.axes) {
        put_le<double>(out, a.min);
        put_le<double>(out, a.max);
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.n));
    }
    for (const cplx& c : wf.amps()) {
        put_le<double>(out, c.real());
        put_le<double>(out, c.imag());
    }
}

WaveFunction read_snapshot(std::istream& in, double hbar) {
    const auto dims = get_le<std::uint64_t>(in);
    if (dims < 1 || dims > 2) throw ParseError("snapshot: unsupported axis count");
    Grid g;
    for (std::uint64_t a = 0; a < dims; ++a) {
        GridAxis ax;
        ax.min = get_le<double>(in);
        ax.max = get_le<double>(in);
        ax.n = static_cast<int>(get_le<std::uint64_t>(in));
        g.axes.push_back(ax);
    }
    g.validate();
    std::vector<cplx> amps(g.total());
    for (auto& c : amps) {
        const double re = get_le<double>(in);
        const double im = get_le<double>(in);
        c = {re, im};
    }
    return WaveFunction(std::move(g), std::move(amps), hbar);
}

} // namespace nambu
