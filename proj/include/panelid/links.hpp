#pragma once

#include <string_view>

namespace panelid {

enum class LinkFamily { Logit, Probit, Exponential };

struct LinkSpec {
    LinkFamily family = LinkFamily::Logit;
};

// F(u): success probability at index u.
// Logit: e^u/(1+e^u); Probit: standard normal CDF; Exponential: 1-e^{-u}, u >= 0.
double evaluate(const LinkSpec& link, double u);

// dF/du. Exponential requires u >= 0.
double derivative(const LinkSpec& link, double u);

// True when u lies in the family's domain.
bool in_domain(const LinkSpec& link, double u);

const char* family_name(LinkFamily f);
LinkFamily family_from_name(std::string_view name); // throws ConfigError

} // namespace panelid
