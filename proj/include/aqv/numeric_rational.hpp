#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "aqv/interval.hpp"
#include "aqv/rational_function.hpp"

namespace aqv {

/// Polynomial with double coefficients laid out for repeated evaluation.
class NumericPolynomial {
   public:
    NumericPolynomial() = default;
    explicit NumericPolynomial(const Polynomial& p);

    template <typename Scalar>
    Scalar evaluate(std::span<const Scalar> point) const {
        Scalar sum(0.0);
        for (const auto& term : terms_) {
            Scalar t(term.coefficient);
            for (const auto& [index, exponent] : term.factors) t = t * pow_int(point[index], exponent);
            sum = sum + t;
        }
        return sum;
    }

   private:
    struct Term {
        double coefficient;
        std::vector<std::pair<std::size_t, std::uint32_t>> factors;
    };
    std::vector<Term> terms_;
};

/// Double-precision image of a RationalFunction, evaluable over points or
/// interval boxes.
class NumericRational {
   public:
    NumericRational() = default;
    explicit NumericRational(const RationalFunction& f);

    const std::vector<std::size_t>& parameters() const { return params_; }

    template <typename Scalar>
    Scalar numerator(std::span<const Scalar> x) const {
        return num_.evaluate(x);
    }
    template <typename Scalar>
    Scalar denominator(std::span<const Scalar> x) const {
        return den_.evaluate(x);
    }

    /// Plain quotient, no singularity check.
    double operator()(std::span<const double> x) const { return num_.evaluate(x) / den_.evaluate(x); }

    /// Natural interval extension.
    Interval operator()(std::span<const Interval> box) const { return num_.evaluate(box) / den_.evaluate(box); }

   private:
    NumericPolynomial num_;
    NumericPolynomial den_;
    std::vector<std::size_t> params_;
};

}  // namespace aqv
