#include "aqv/numeric_rational.hpp"

namespace aqv {

NumericPolynomial::NumericPolynomial(const Polynomial& p) {
    terms_.reserve(p.terms().size());
    for (const auto& [m, c] : p.terms()) {
        Term t{c.get_d(), {}};
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0) t.factors.emplace_back(i, m[i]);
        }
        terms_.push_back(std::move(t));
    }
}

NumericRational::NumericRational(const RationalFunction& f)
    : num_(f.numerator()), den_(f.denominator()), params_(f.parameters()) {}

}  // namespace aqv
