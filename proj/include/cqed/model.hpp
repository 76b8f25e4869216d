#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "cqed/thermal.hpp"

namespace cqed {

template <std::size_t N>
using StateVector = std::array<double, N>;

/// Which form of the thermal equations of motion to integrate.
///
/// Consistent is derived from H - H~ with the Bogoliubov substitution and
/// reduces exactly to the zero-temperature flow at theta = 0.  Literal
/// transcribes the thermal bracket equations term by term, for comparison.
enum class Variant { Literal, Consistent };

std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view s) noexcept;

/// Dimensionless parameters.  Time is tau = Omega_0 t.
struct SystemParams {
    double alpha = 1e-3;  ///< recoil, hbar k_f^2 / (m Omega_0)
    double delta = 0.0;   ///< detuning (omega_f - omega_a) / Omega_0
    TemperatureSpec temperature = ZeroTemperature{};
    Variant variant = Variant::Consistent;
};

void validate(const SystemParams& params);

struct ZeroTState {
    static constexpr std::size_t kDim = 7;

    double x = 0.0;   ///< position, units of 1/k_f
    double p = 0.0;   ///< momentum, units of hbar k_f
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.0;
    double ax = 0.0;  ///< field quadratures, a <-> ax + i ay
    double ay = 0.0;

    StateVector<kDim> to_array() const noexcept { return {x, p, sx, sy, sz, ax, ay}; }
    static ZeroTState from_array(const StateVector<kDim>& v) noexcept {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
    }
};

struct ThermalState {
    static constexpr std::size_t kDim = 10;

    double x = 0.0;
    double p = 0.0;
    double p_tilde = 0.0;  ///< tilde-sector momentum
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.0;
    double ax = 0.0;   ///< a(beta) <-> ax + i ay
    double ay = 0.0;
    double atx = 0.0;  ///< a~(beta) <-> atx + i aty
    double aty = 0.0;

    StateVector<kDim> to_array() const noexcept {
        return {x, p, p_tilde, sx, sy, sz, ax, ay, atx, aty};
    }
    static ThermalState from_array(const StateVector<kDim>& v) noexcept {
        return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
    }
};

/// Derivatives share the component layout of their state.
using ZeroTDerivative = ZeroTState;
using ThermalDerivative = ThermalState;

/// Component indices the analysis layer needs to know about.
struct StateLayout {
    std::size_t x = 0;
    std::size_t p = 1;
    std::optional<std::array<std::size_t, 3>> spin;
    std::size_t ay = 0;
};

inline constexpr StateLayout kZeroTLayout{0, 1, std::array<std::size_t, 3>{2, 3, 4}, 6};
inline constexpr StateLayout kThermalLayout{0, 1, std::array<std::size_t, 3>{3, 4, 5}, 7};

ZeroTDerivative deriv_zero_t(const ZeroTState& s, const SystemParams& params) noexcept;

ThermalDerivative deriv_thermal(const ThermalState& s, const SystemParams& params,
                                const ThermalFactors& f) noexcept;

/// Rotating-frame energy alpha p^2/2 - delta sz - 2 (ax sx + ay sy) cos x.
double energy_zero_t(const ZeroTState& s, const SystemParams& params) noexcept;

/// ax^2 + ay^2 + sz.
double excitation_zero_t(const ZeroTState& s) noexcept;

double spin_norm(const ZeroTState& s) noexcept;
double spin_norm(const ThermalState& s) noexcept;

/// Expectation of the bare cavity operator a = cosh(theta) a(beta) + sinh(theta) a~+(beta).
/// Under the Consistent flow it obeys the zero-temperature field equation.
std::complex<double> effective_field(const ThermalState& s, const ThermalFactors& f) noexcept;

/// Energy and excitation of the Consistent thermal flow, evaluated on the
/// effective field.  Both are first integrals of that flow.
double energy_thermal(const ThermalState& s, const SystemParams& params,
                      const ThermalFactors& f) noexcept;
double excitation_thermal(const ThermalState& s, const ThermalFactors& f) noexcept;

/// Coefficients of the spin drive dsz/dtau = i (B1 S- - B2 S+) cos x.
struct SpinDrive {
    std::complex<double> b1;
    std::complex<double> b2;
};

SpinDrive spin_drive(const ThermalState& s, const ThermalFactors& f, Variant variant) noexcept;

/// Outcome of a numerical check of the three consistency axioms:
///   A1  B2 == conj(B1)
///   A2  at theta = 0 with zero tilde data the tilde derivatives vanish
///   A3  at theta = 0 with zero tilde data the physical components follow
///       deriv_zero_t exactly
struct AxiomReport {
    bool hermiticity = false;
    bool decoupling = false;
    bool reduction = false;
    std::string detail;

    bool all() const noexcept { return hermiticity && decoupling && reduction; }
};

/// Evaluates the axioms on `samples` random states.  Never throws for a
/// failing variant; failures are reported in the returned struct.
AxiomReport check_axioms(Variant variant, std::uint64_t seed = 1, int samples = 256);

/// Initial data.  Anything the experiment does not state uses these
/// defaults; sx, when absent, is chosen positive so that |s| = 1.
struct InitialConditions {
    double x = 0.0;
    double p = 0.0;
    std::optional<double> sx;
    double sy = 0.0;
    double sz = -0.8660254;
    double ax = 1.0;
    double ay = 0.0;
    double p_tilde = 0.0;
    double atx = 0.0;
    double aty = 0.0;
};

/// Both throw InvalidArgument if the Bloch norm is not 1 within 1e-12.
ZeroTState make_zero_t_state(const InitialConditions& ic);
ThermalState make_thermal_state(const InitialConditions& ic);

/// Vector field objects consumed by the integrator.
struct ZeroTSystem {
    static constexpr std::size_t kDim = ZeroTState::kDim;
    static constexpr StateLayout kLayout = kZeroTLayout;
    using State = ZeroTState;

    SystemParams params;

    void operator()(const StateVector<kDim>& s, StateVector<kDim>& ds) const noexcept {
        ds = deriv_zero_t(ZeroTState::from_array(s), params).to_array();
    }
};

struct ThermalSystem {
    static constexpr std::size_t kDim = ThermalState::kDim;
    static constexpr StateLayout kLayout = kThermalLayout;
    using State = ThermalState;

    SystemParams params;
    ThermalFactors factors;

    explicit ThermalSystem(const SystemParams& p)
        : params(p), factors(thermal_factors(p.temperature)) {}
    ThermalSystem(const SystemParams& p, const ThermalFactors& f) : params(p), factors(f) {}

    void operator()(const StateVector<kDim>& s, StateVector<kDim>& ds) const noexcept {
        ds = deriv_thermal(ThermalState::from_array(s), params, factors).to_array();
    }
};

template <class System>
StateVector<System::kDim> initial_array(const InitialConditions& ic) {
    if constexpr (std::is_same_v<typename System::State, ZeroTState>) {
        return make_zero_t_state(ic).to_array();
    } else {
        return make_thermal_state(ic).to_array();
    }
}

/// Calls fn with the system matching the temperature: ZeroTSystem at T = 0,
/// ThermalSystem otherwise.  Both branches must return the same type.
template <class Fn>
auto with_system(const SystemParams& params, Fn&& fn) {
    validate(params);
    if (is_zero_temperature(params.temperature)) return fn(ZeroTSystem{params});
    return fn(ThermalSystem{params});
}

} // namespace cqed
