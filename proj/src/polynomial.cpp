#include "aqv/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace aqv {

namespace {

void trim(Monomial& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}

Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

}  // namespace

std::uint32_t total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), std::uint32_t{0}); }

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
    const auto da = total_degree(a);
    const auto db = total_degree(b);
    if (da != db) return da < db;
    const auto n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto ea = i < a.size() ? a[i] : 0U;
        const auto eb = i < b.size() ? b[i] : 0U;
        if (ea != eb) return ea < eb;
    }
    return false;
}

Polynomial::Polynomial(const Rational& constant) {
    add_term(Monomial{}, constant);
}

Polynomial Polynomial::variable(std::size_t index) {
    Polynomial p;
    Monomial m(index + 1, 0);
    m[index] = 1;
    p.terms_.emplace(std::move(m), Rational(1));
    return p;
}

bool Polynomial::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Polynomial::constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::leading_coefficient() const { return terms_.empty() ? Rational(0) : terms_.rbegin()->second; }

std::uint32_t Polynomial::degree() const { return terms_.empty() ? 0 : total_degree(terms_.rbegin()->first); }

std::size_t Polynomial::variable_span() const {
    std::size_t span = 0;
    for (const auto& [m, c] : terms_) span = std::max(span, m.size());
    return span;
}

bool Polynomial::depends_on(std::size_t index) const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [index](const auto& t) { return index < t.first.size() && t.first[index] != 0; });
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    Rational k = c;
    k.canonicalize();
    Monomial key = m;
    trim(key);
    auto [it, inserted] = terms_.try_emplace(std::move(key), k);
    if (!inserted) {
        it->second += k;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    Rational k = c;
    k.canonicalize();
    for (auto& [m, coeff] : terms_) coeff *= k;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) r.add_term(multiply(ma, mb), ca * cb);
    }
    return r;
}

Rational Polynomial::evaluate_exact(std::span<const Rational> point) const {
    std::vector<std::vector<Rational>> powers(point.size(), std::vector<Rational>{Rational(1)});
    auto power = [&](std::size_t i, std::uint32_t e) -> const Rational& {
        auto& cache = powers[i];
        while (cache.size() <= e) cache.push_back(cache.back() * point[i]);
        return cache[e];
    };
    Rational out(0);
    Rational t;
    for (const auto& [m, c] : terms_) {
        t = c;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] != 0) t *= power(i, m[i]);
        }
        out += t;
    }
    return out;
}

Polynomial Polynomial::derivative(std::size_t index) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
        if (index >= m.size() || m[index] == 0) continue;
        Monomial d = m;
        const auto e = d[index]--;
        r.add_term(d, c * Rational(e));
    }
    return r;
}

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool wrote = false;
        if (mag != 1 || m.empty()) {
            os << mag.get_str();
            wrote = true;
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (wrote) os << "*";
            os << names[i];
            if (m[i] > 1) os << "^" << m[i];
            wrote = true;
        }
    }
    return os.str();
}

std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) return std::nullopt;
    const auto& [lm_b, lc_b] = *b.terms().rbegin();
    Polynomial quotient;
    Polynomial rest = a;
    while (!rest.is_zero()) {
        const auto& [lm_r, lc_r] = *rest.terms().rbegin();
        Monomial q(std::max(lm_r.size(), lm_b.size()), 0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto er = i < lm_r.size() ? lm_r[i] : 0U;
            const auto eb = i < lm_b.size() ? lm_b[i] : 0U;
            if (er < eb) return std::nullopt;
            q[i] = er - eb;
        }
        Polynomial term;
        term.add_term(q, lc_r / lc_b);
        quotient += term;
        rest -= term * b;
    }
    return quotient;
}

}  // namespace aqv
