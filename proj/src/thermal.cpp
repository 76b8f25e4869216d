#include "cqed/thermal.hpp"

#include <cmath>
#include <string>

#include "cqed/errors.hpp"

namespace cqed {

void validate(const TemperatureSpec& t) {
    if (const auto* inv = std::get_if<InverseTemperature>(&t)) {
        if (!std::isfinite(inv->beta) || inv->beta <= 0.0) {
            throw InvalidTemperature("inverse temperature must be positive and finite, got " +
                                     std::to_string(inv->beta));
        }
    }
}

bool is_zero_temperature(const TemperatureSpec& t) noexcept {
    return std::holds_alternative<ZeroTemperature>(t);
}

ThermalFactors thermal_factors(const TemperatureSpec& t) {
    validate(t);
    if (is_zero_temperature(t)) return {0.0, 1.0};
    const double beta = std::get<InverseTemperature>(t).beta;
    // expm1 overflows to +inf for beta > ~709, giving sinh^2 = 0 exactly.
    const double sinh2 = 1.0 / std::expm1(beta);
    return {std::sqrt(sinh2), std::sqrt(1.0 + sinh2)};
}

} // namespace cqed
