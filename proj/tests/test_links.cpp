#include "panelid/errors.hpp"
#include "panelid/links.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace panelid;

TEST_SUITE("links") {

TEST_CASE("logit midpoint and slope") {
    LinkSpec logit{LinkFamily::Logit};
    CHECK(evaluate(logit, 0.0) == 0.5); // exactly representable
    CHECK(std::fabs(evaluate(logit, 0.0) - 0.5) < 1e-15);
    CHECK(std::fabs(derivative(logit, 0.0) - 0.25) < 1e-15);
}

TEST_CASE("probit matches quadrature reference") {
    LinkSpec probit{LinkFamily::Probit};
    CHECK(std::fabs(evaluate(probit, 1.0) - 0.841345) < 1e-6);
    double us[] = {-8.0, -3.5, -1.0, -0.25, 0.0, 0.4, 1.0, 2.7, 6.0, 12.0};
    for (double u : us)
        CHECK(std::fabs(evaluate(probit, u) - oracles::normal_cdf(u)) <= 1e-12);
    CHECK(std::fabs(derivative(probit, 0.0) - 0.398942) < 1e-6);
}

TEST_CASE("exponential family") {
    LinkSpec expo{LinkFamily::Exponential};
    CHECK(evaluate(expo, 0.0) == 0.0);
    CHECK(std::fabs(derivative(expo, 0.0) - 1.0) < 1e-15);
    CHECK(std::fabs(evaluate(expo, 1.0) - (1.0 - std::exp(-1.0))) < 1e-15);
    CHECK(in_domain(expo, 0.0));
    CHECK(!in_domain(expo, -0.1));
    CHECK_THROWS_AS(evaluate(expo, -0.1), DomainError);
    CHECK_THROWS_AS(derivative(expo, -1e-9), DomainError);
    // tiny positive u keeps full relative precision
    CHECK(std::fabs(evaluate(expo, 1e-12) / 1e-12 - 1.0) < 1e-9);
}

TEST_CASE("derivative agrees with central differences") {
    const double h = 1e-5;
    for (LinkFamily fam : {LinkFamily::Logit, LinkFamily::Probit, LinkFamily::Exponential}) {
        LinkSpec link{fam};
        for (double u : {0.1, 0.5, 1.0, 2.0, 4.5}) {
            double fd = (evaluate(link, u + h) - evaluate(link, u - h)) / (2.0 * h);
            double an = derivative(link, u);
            CHECK(std::fabs(fd - an) <= 1e-6 * (1.0 + std::fabs(an)));
        }
    }
}

TEST_CASE("logit and probit symmetry and tail positivity") {
    for (LinkFamily fam : {LinkFamily::Logit, LinkFamily::Probit}) {
        LinkSpec link{fam};
        for (double u : {0.0, 0.3, 1.0, 5.0, 15.0, 30.0})
            CHECK(std::fabs(evaluate(link, u) + evaluate(link, -u) - 1.0) <= 1e-12);
        CHECK(evaluate(link, -30.0) > 0.0);
        CHECK(evaluate(link, 30.0) < 1.0);
        CHECK(in_domain(link, -1e9));
    }
}

TEST_CASE("monotone increasing on a fine grid") {
    for (LinkFamily fam : {LinkFamily::Logit, LinkFamily::Probit, LinkFamily::Exponential}) {
        LinkSpec link{fam};
        double lo = fam == LinkFamily::Exponential ? 0.0 : -10.0;
        double prev = evaluate(link, lo);
        for (double u = lo + 0.05; u <= 10.0; u += 0.05) {
            double cur = evaluate(link, u);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("family names round trip") {
    CHECK(family_from_name("logit") == LinkFamily::Logit);
    CHECK(family_from_name("probit") == LinkFamily::Probit);
    CHECK(family_from_name("exponential") == LinkFamily::Exponential);
    for (LinkFamily fam : {LinkFamily::Logit, LinkFamily::Probit, LinkFamily::Exponential})
        CHECK(family_from_name(family_name(fam)) == fam);
    CHECK_THROWS_AS(family_from_name("cauchy"), ConfigError);
}

} // TEST_SUITE
