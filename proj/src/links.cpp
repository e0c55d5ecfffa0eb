#include "panelid/links.hpp"

#include "panelid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace panelid {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// largest double below 1; success probabilities stay strictly inside (0,1)
constexpr double kBelowOne = 0x1.fffffffffffffp-1;

void require_nonnegative(double u) {
    if (u < 0.0)
        throw DomainError("exponential link index must be nonnegative, got " + std::to_string(u));
}

} // namespace

double evaluate(const LinkSpec& link, double u) {
    switch (link.family) {
    case LinkFamily::Logit:
        // one-sided exp keeps both tails away from overflow
        if (u <= 0.0) {
            const double e = std::exp(u);
            return e / (1.0 + e);
        }
        return std::min(1.0 / (1.0 + std::exp(-u)), kBelowOne);
    case LinkFamily::Probit:
        return std::min(0.5 * std::erfc(-u * kInvSqrt2), kBelowOne);
    case LinkFamily::Exponential:
        require_nonnegative(u);
        return -std::expm1(-u);
    }
    throw DomainError("unknown link family");
}

double derivative(const LinkSpec& link, double u) {
    switch (link.family) {
    case LinkFamily::Logit: {
        const double e = std::exp(-std::fabs(u));
        const double d = 1.0 + e;
        return e / (d * d);
    }
    case LinkFamily::Probit:
        return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case LinkFamily::Exponential:
        require_nonnegative(u);
        return std::exp(-u);
    }
    throw DomainError("unknown link family");
}

bool in_domain(const LinkSpec& link, double u) {
    if (link.family == LinkFamily::Exponential) return u >= 0.0;
    return true; // logit/probit accept the whole line
}

const char* family_name(LinkFamily f) {
    switch (f) {
    case LinkFamily::Logit: return "logit";
    case LinkFamily::Probit: return "probit";
    case LinkFamily::Exponential: return "exponential";
    }
    return "unknown";
}

LinkFamily family_from_name(std::string_view name) {
    if (name == "logit") return LinkFamily::Logit;
    if (name == "probit") return LinkFamily::Probit;
    if (name == "exponential") return LinkFamily::Exponential;
    throw ConfigError("unknown link family: " + std::string(name));
}

} // namespace panelid
