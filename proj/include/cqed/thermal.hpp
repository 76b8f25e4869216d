#pragma once

#include <variant>

namespace cqed {

struct ZeroTemperature {
    bool operator==(const ZeroTemperature&) const = default;
};

/// beta = omega_f / (k_B T), with omega_f the cavity mode frequency.
struct InverseTemperature {
    double beta;
    bool operator==(const InverseTemperature&) const = default;
};

using TemperatureSpec = std::variant<ZeroTemperature, InverseTemperature>;

/// Below this beta the Bogoliubov factors exceed ~10 and the flow becomes
/// stiff at the default step size.
inline constexpr double kStiffBetaThreshold = 0.01;

/// Bogoliubov pair of the thermal vacuum.
struct ThermalFactors {
    double sinh_theta = 0.0;
    double cosh_theta = 1.0;
};

/// Throws InvalidTemperature if beta is non-positive or non-finite.
void validate(const TemperatureSpec& t);

bool is_zero_temperature(const TemperatureSpec& t) noexcept;

/// sinh^2(theta) = 1 / (e^beta - 1), evaluated with expm1.  Zero
/// temperature returns (0, 1) exactly.  For large beta sinh underflows to
/// zero cleanly; for beta < kStiffBetaThreshold it grows like beta^(-1/2)
/// and the resulting dynamics become stiff.
ThermalFactors thermal_factors(const TemperatureSpec& t);

} // namespace cqed
