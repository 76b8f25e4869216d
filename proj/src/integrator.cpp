#include "cqed/integrator.hpp"

#include <cmath>

namespace cqed {

std::string_view to_string(Method m) noexcept {
    return m == Method::FixedRK4 ? "rk4" : "dp45";
}

std::optional<Method> parse_method(std::string_view s) noexcept {
    if (s == "rk4") return Method::FixedRK4;
    if (s == "dp45") return Method::AdaptiveEmbedded45;
    return std::nullopt;
}

void validate(const IntegrationSpec& spec) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(spec.step)) throw InvalidArgument("integration step must be positive");
    if (!positive(spec.t_end)) throw InvalidArgument("t_end must be positive");
    if (!positive(spec.sample_every)) throw InvalidArgument("sample_every must be positive");
    if (spec.method == Method::AdaptiveEmbedded45) {
        auto in_range = [](double v) { return v >= 1e-14 && v <= 1e-2; };
        if (!in_range(spec.rel_tol) || !in_range(spec.abs_tol)) {
            throw InvalidArgument("tolerances must lie in [1e-14, 1e-2]");
        }
    }
}

} // namespace cqed
