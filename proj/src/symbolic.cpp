#include "myl/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace myl {
namespace sym {

// ---------------------------------------------------------------------------
// Rational arithmetic
// ---------------------------------------------------------------------------

namespace {

using i128 = __int128;

long long narrow(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
        throw error("symbolic: rational coefficient overflow");
    return static_cast<long long>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a == 0 ? 1 : a;
}

Rat make_rat(i128 n, i128 d) {
    if (d == 0) throw error("symbolic: division by zero");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const i128 g = gcd128(n, d);
    Rat r;
    r.num = narrow(n / g);
    r.den = narrow(d / g);
    return r;
}

}  // namespace

Rat::Rat(long long n, long long d) { *this = make_rat(n, d); }

Rat operator+(Rat a, Rat b) { return make_rat(i128(a.num) * b.den + i128(b.num) * a.den, i128(a.den) * b.den); }
Rat operator-(Rat a, Rat b) { return make_rat(i128(a.num) * b.den - i128(b.num) * a.den, i128(a.den) * b.den); }
Rat operator*(Rat a, Rat b) { return make_rat(i128(a.num) * b.num, i128(a.den) * b.den); }
Rat operator/(Rat a, Rat b) { return make_rat(i128(a.num) * b.den, i128(a.den) * b.num); }

Rat rat_from_decimal(const std::string& text) {
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
        long long v = 0;
        for (char ch : text) {
            require(std::isdigit(static_cast<unsigned char>(ch)), "bad integer literal");
            v = narrow(i128(v) * 10 + (ch - '0'));
        }
        return Rat(v);
    }
    i128 num = 0, den = 1;
    for (size_t i = 0; i < text.size(); ++i) {
        if (i == dot) continue;
        require(std::isdigit(static_cast<unsigned char>(text[i])), "bad decimal literal");
        num = num * 10 + (text[i] - '0');
        if (i > dot) den *= 10;
    }
    return make_rat(num, den);
}

CRat operator+(const CRat& a, const CRat& b) { return CRat(a.re + b.re, a.im + b.im); }
CRat operator-(const CRat& a, const CRat& b) { return CRat(a.re - b.re, a.im - b.im); }
CRat operator*(const CRat& a, const CRat& b) {
    return CRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}

// ---------------------------------------------------------------------------
// HPoly
// ---------------------------------------------------------------------------

HPoly HPoly::hbar(CRat scale) {
    HPoly h;
    h.c = {CRat(0), scale};
    h.trim();
    return h;
}

void HPoly::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

HPoly HPoly::conj() const {
    HPoly r = *this;
    for (CRat& v : r.c) v = v.conj();
    return r;
}

cplx HPoly::eval(double hbar_value) const {
    cplx acc(0);
    double pow_h = 1.0;
    for (const CRat& v : c) {
        acc += v.to_cplx() * pow_h;
        pow_h *= hbar_value;
    }
    return acc;
}

HPoly HPoly::div_hbar() const {
    if (is_zero()) return HPoly();
    require(c[0].is_zero(), "symbolic: inexact division by hbar");
    HPoly r;
    r.c.assign(c.begin() + 1, c.end());
    r.trim();
    return r;
}

HPoly operator+(const HPoly& a, const HPoly& b) {
    HPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < r.c.size(); ++i) {
        if (i < a.c.size()) r.c[i] = r.c[i] + a.c[i];
        if (i < b.c.size()) r.c[i] = r.c[i] + b.c[i];
    }
    r.trim();
    return r;
}

HPoly operator-(const HPoly& a, const HPoly& b) {
    HPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < r.c.size(); ++i) {
        if (i < a.c.size()) r.c[i] = r.c[i] + a.c[i];
        if (i < b.c.size()) r.c[i] = r.c[i] - b.c[i];
    }
    r.trim();
    return r;
}

HPoly operator*(const HPoly& a, const HPoly& b) {
    HPoly r;
    if (a.is_zero() || b.is_zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, CRat());
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    r.trim();
    return r;
}

bool operator==(const HPoly& a, const HPoly& b) { return a.c == b.c; }

HPoly mul_crat(const HPoly& a, const CRat& s) {
    HPoly r = a;
    for (CRat& v : r.c) v = v * s;
    r.trim();
    return r;
}

HPoly mu_poly() { return HPoly::hbar(CRat(Rat(0), Rat(1, 2))); }

// ---------------------------------------------------------------------------
// CPolynomial
// ---------------------------------------------------------------------------

void CPolynomial::add_term(int n, int m, const HPoly& coeff) {
    if (coeff.is_zero()) return;
    auto key = std::make_pair(n, m);
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, coeff);
    } else {
        it->second = it->second + coeff;
        if (it->second.is_zero()) terms.erase(it);
    }
}

int CPolynomial::degree() const {
    int d = 0;
    for (const auto& [k, v] : terms) d = std::max(d, k.first + k.second);
    return d;
}

cplx CPolynomial::eval(double q, double p, double hbar_value) const {
    cplx acc(0);
    for (const auto& [k, v] : terms)
        acc += v.eval(hbar_value) * std::pow(q, k.first) * std::pow(p, k.second);
    return acc;
}

CPolynomial operator+(const CPolynomial& a, const CPolynomial& b) {
    CPolynomial r = a;
    for (const auto& [k, v] : b.terms) r.add_term(k.first, k.second, v);
    return r;
}

CPolynomial operator-(const CPolynomial& a, const CPolynomial& b) {
    CPolynomial r = a;
    for (const auto& [k, v] : b.terms) r.add_term(k.first, k.second, mul_crat(v, CRat(-1)));
    return r;
}

CPolynomial operator*(const CPolynomial& a, const CPolynomial& b) {
    CPolynomial r;
    for (const auto& [ka, va] : a.terms)
        for (const auto& [kb, vb] : b.terms)
            r.add_term(ka.first + kb.first, ka.second + kb.second, va * vb);
    return r;
}

bool operator==(const CPolynomial& a, const CPolynomial& b) { return a.terms == b.terms; }

CPolynomial c_monomial(int n, int m, HPoly coeff) {
    CPolynomial r;
    r.add_term(n, m, coeff);
    return r;
}

CPolynomial derive_q(const CPolynomial& f) {
    CPolynomial r;
    for (const auto& [k, v] : f.terms)
        if (k.first > 0) r.add_term(k.first - 1, k.second, mul_crat(v, CRat(k.first)));
    return r;
}

CPolynomial derive_p(const CPolynomial& f) {
    CPolynomial r;
    for (const auto& [k, v] : f.terms)
        if (k.second > 0) r.add_term(k.first, k.second - 1, mul_crat(v, CRat(k.second)));
    return r;
}

CPolynomial poisson(const CPolynomial& f, const CPolynomial& g) {
    return derive_q(f) * derive_p(g) - derive_p(f) * derive_q(g);
}

namespace {

std::string hpoly_str(const HPoly& h) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (size_t d = 0; d < h.c.size(); ++d) {
        if (h.c[d].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << h.c[d].re.num;
        if (h.c[d].re.den != 1) os << "/" << h.c[d].re.den;
        if (!(h.c[d].im == Rat(0))) {
            os << (h.c[d].im.num >= 0 ? "+" : "-") << std::abs(h.c[d].im.num);
            if (h.c[d].im.den != 1) os << "/" << h.c[d].im.den;
            os << "i";
        }
        if (d == 1) os << "*hbar";
        if (d > 1) os << "*hbar^" << d;
    }
    if (first) os << "0";
    os << ")";
    return os.str();
}

}  // namespace

std::string to_string(const CPolynomial& f) {
    if (f.terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : f.terms) {
        if (!first) os << " + ";
        first = false;
        os << hpoly_str(v);
        if (k.first > 0) os << "*q" << (k.first > 1 ? "^" + std::to_string(k.first) : "");
        if (k.second > 0) os << "*p" << (k.second > 1 ? "^" + std::to_string(k.second) : "");
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw error("syntax error at offset " + std::to_string(pos) + ": " + what);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char ch) {
        skip_ws();
        if (pos < s.size() && s[pos] == ch) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    int parse_exponent() {
        skip_ws();
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            fail("expected exponent digits");
        int v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = v * 10 + (s[pos] - '0');
            if (v > 64) fail("exponent too large");
            ++pos;
        }
        return v;
    }

    // factor := number['i'] | 'i' | 'hbar' | 'q'['^'n] | 'p'['^'n]
    CPolynomial parse_factor() {
        skip_ws();
        if (pos >= s.size()) fail("expected factor");
        const char ch = s[pos];
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            const size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
                ++pos;
            Rat v;
            try {
                v = rat_from_decimal(s.substr(start, pos - start));
            } catch (const error&) {
                pos = start;
                fail("bad numeric literal");
            }
            if (pos < s.size() && s[pos] == 'i') {
                ++pos;
                return c_monomial(0, 0, HPoly(CRat(Rat(0), v)));
            }
            return c_monomial(0, 0, HPoly(CRat(v)));
        }
        if (s.compare(pos, 4, "hbar") == 0) {
            pos += 4;
            return c_monomial(0, 0, HPoly::hbar());
        }
        if (ch == 'i' && (pos + 1 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 1])))) {
            ++pos;
            return c_monomial(0, 0, HPoly(crat_i()));
        }
        if (ch == 'q' || ch == 'p') {
            ++pos;
            int e = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                e = parse_exponent();
            }
            return ch == 'q' ? c_monomial(e, 0) : c_monomial(0, e);
        }
        fail(std::string("unexpected character '") + ch + "'");
    }

    CPolynomial parse_term() {
        CPolynomial acc = parse_factor();
        while (true) {
            skip_ws();
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                acc = acc * parse_factor();
            } else {
                return acc;
            }
        }
    }

    CPolynomial parse_expr() {
        CPolynomial acc;
        bool negative = false;
        if (eat('-'))
            negative = true;
        else
            eat('+');
        while (true) {
            CPolynomial t = parse_term();
            acc = negative ? acc - t : acc + t;
            skip_ws();
            if (pos >= s.size()) return acc;
            if (s[pos] == '+') {
                negative = false;
                ++pos;
            } else if (s[pos] == '-') {
                negative = true;
                ++pos;
            } else {
                fail("expected '+' or '-'");
            }
        }
    }
};

}  // namespace

CPolynomial parse_poly(const std::string& text) {
    Parser p(text);
    p.skip_ws();
    if (p.pos >= text.size()) p.fail("empty input");
    return p.parse_expr();
}

// ---------------------------------------------------------------------------
// NCPolynomial
// ---------------------------------------------------------------------------

void NCPolynomial::add_term(const std::string& word, const HPoly& coeff) {
    if (coeff.is_zero()) return;
    auto it = terms.find(word);
    if (it == terms.end()) {
        terms.emplace(word, coeff);
    } else {
        it->second = it->second + coeff;
        if (it->second.is_zero()) terms.erase(it);
    }
}

int NCPolynomial::degree() const {
    int d = 0;
    for (const auto& [w, v] : terms) d = std::max<int>(d, int(w.size()));
    return d;
}

NCPolynomial operator+(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial r = a;
    for (const auto& [w, v] : b.terms) r.add_term(w, v);
    return r;
}

NCPolynomial operator-(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial r = a;
    for (const auto& [w, v] : b.terms) r.add_term(w, mul_crat(v, CRat(-1)));
    return r;
}

NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial r;
    for (const auto& [wa, va] : a.terms)
        for (const auto& [wb, vb] : b.terms) r.add_term(wa + wb, va * vb);
    return r;
}

bool operator==(const NCPolynomial& a, const NCPolynomial& b) { return a.terms == b.terms; }

NCPolynomial nc_word(const std::string& word, HPoly coeff) {
    for (char ch : word) require(ch == 'Q' || ch == 'P', "nc_word: alphabet is {Q, P}");
    NCPolynomial r;
    r.add_term(word, coeff);
    return r;
}

std::string to_string(const NCPolynomial& x) {
    if (x.terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, v] : x.terms) {
        if (!first) os << " + ";
        first = false;
        os << hpoly_str(v);
        if (!w.empty()) os << "*" << w;
    }
    return os.str();
}

NCPolynomial normal_order(const NCPolynomial& x) {
    // worklist rewriting PQ -> QP - i hbar; terminates since each rewrite
    // either lowers the inversion count or the word length
    NCPolynomial out;
    std::vector<std::pair<std::string, HPoly>> work(x.terms.begin(), x.terms.end());
    const HPoly ih = HPoly::hbar(crat_i());
    while (!work.empty()) {
        auto [w, coeff] = work.back();
        work.pop_back();
        if (coeff.is_zero()) continue;
        const size_t k = w.find("PQ");
        if (k == std::string::npos) {
            out.add_term(w, coeff);
            continue;
        }
        std::string swapped = w;
        swapped[k] = 'Q';
        swapped[k + 1] = 'P';
        work.emplace_back(swapped, coeff);
        std::string dropped = w.substr(0, k) + w.substr(k + 2);
        work.emplace_back(dropped, mul_crat(coeff * ih, CRat(-1)));
    }
    return out;
}

NCPolynomial nc_adjoint(const NCPolynomial& x) {
    NCPolynomial r;
    for (const auto& [w, v] : x.terms) {
        std::string rev(w.rbegin(), w.rend());
        r.add_term(rev, v.conj());
    }
    return r;
}

namespace {

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

long long factorial(int n) {
    long long r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

NCPolynomial weyl_order(int n, int m) {
    require(n >= 0 && m >= 0, "weyl_order: negative exponent");
    NCPolynomial acc;
    const std::string pm(m, 'P');
    for (int k = 0; k <= n; ++k) {
        const std::string w = std::string(k, 'Q') + pm + std::string(n - k, 'Q');
        acc.add_term(w, HPoly(CRat(Rat(binom(n, k)))));
    }
    // 2^{-n} normalization (McCoy symmetrization)
    NCPolynomial scaled;
    for (auto& [w, v] : acc.terms) scaled.add_term(w, mul_crat(v, CRat(Rat(1, 1LL << n))));
    return normal_order(scaled);
}

NCPolynomial lambda_order(int n, int m, const HPoly& lambda) {
    require(n >= 0 && m >= 0, "lambda_order: negative exponent");
    NCPolynomial acc;
    HPoly minus_i_lambda_pow(1);  // (-i lambda)^l
    const HPoly minus_i_lambda = mul_crat(lambda, CRat(Rat(0), Rat(-1)));
    for (int l = 0; l <= std::min(n, m); ++l) {
        const HPoly coeff =
            mul_crat(minus_i_lambda_pow, CRat(Rat(binom(m, l) * binom(n, l) * factorial(l))));
        NCPolynomial w = weyl_order(n - l, m - l);
        for (const auto& [word, v] : w.terms) acc.add_term(word, v * coeff);
        minus_i_lambda_pow = minus_i_lambda_pow * minus_i_lambda;
    }
    return acc;
}

NCPolynomial weyl_order(const CPolynomial& f) {
    NCPolynomial acc;
    for (const auto& [k, v] : f.terms) {
        NCPolynomial w = weyl_order(k.first, k.second);
        for (const auto& [word, c] : w.terms) acc.add_term(word, c * v);
    }
    return acc;
}

NCPolynomial lambda_order(const CPolynomial& f, const HPoly& lambda) {
    NCPolynomial acc;
    for (const auto& [k, v] : f.terms) {
        NCPolynomial w = lambda_order(k.first, k.second, lambda);
        for (const auto& [word, c] : w.terms) acc.add_term(word, c * v);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Star products
// ---------------------------------------------------------------------------

CPolynomial star_poly_ext(const CPolynomial& f, const CPolynomial& g, const HPoly& lambda,
                          const HPoly& nu) {
    // exp[(lambda+nu) dq (x) dp' + (lambda-nu) dp (x) dq'] f(z) g(z') | z=z'
    // expanded as Sum_{j,k} a^j b^k / (j! k!) (dq^j dp^k f)(dq^k dp^j g)
    const HPoly a = lambda + nu, b = lambda - nu;
    CPolynomial total;

    std::vector<CPolynomial> dqf = {f};
    while (!dqf.back().is_zero()) dqf.push_back(derive_q(dqf.back()));

    HPoly a_pow(1);
    for (size_t j = 0; j < dqf.size(); ++j) {
        if (j > 0) {
            a_pow = a_pow * a;
            if (a_pow.is_zero()) break;
        }
        CPolynomial fk = dqf[j];  // d_q^j d_p^k f, descending in k
        HPoly b_pow(1);
        for (size_t k = 0; !fk.is_zero(); ++k) {
            if (k > 0) {
                b_pow = b_pow * b;
                if (b_pow.is_zero()) break;
            }
            CPolynomial gs = g;  // d_p^j d_q^k g
            for (size_t t = 0; t < j && !gs.is_zero(); ++t) gs = derive_p(gs);
            for (size_t t = 0; t < k && !gs.is_zero(); ++t) gs = derive_q(gs);
            if (!gs.is_zero()) {
                const HPoly scale = mul_crat(
                    a_pow * b_pow, CRat(Rat(1, factorial(int(j)) * factorial(int(k)))));
                if (!scale.is_zero()) {
                    CPolynomial contrib = fk * gs;
                    for (auto& [key, val] : contrib.terms)
                        total.add_term(key.first, key.second, val * scale);
                }
            }
            fk = derive_p(fk);
        }
    }
    return total;
}

CPolynomial star_poly(const CPolynomial& f, const CPolynomial& g, const StarFamily& family) {
    const HPoly lambda = family.is_weyl ? HPoly() : family.lambda;
    return star_poly_ext(f, g, lambda, mu_poly());
}

CPolynomial moyal_bracket_poly(const CPolynomial& f, const CPolynomial& g,
                               const StarFamily& family) {
    CPolynomial num = star_poly(f, g, family) - star_poly(g, f, family);
    // divide by 2 mu = i hbar
    CPolynomial r;
    for (const auto& [k, v] : num.terms) {
        HPoly h = v.div_hbar();
        r.add_term(k.first, k.second, mul_crat(h, CRat(Rat(0), Rat(-1))));  // 1/i = -i
    }
    return r;
}

// ---------------------------------------------------------------------------
// Matrix realization
// ---------------------------------------------------------------------------

OperatorMatrix realize_matrix(const NCPolynomial& x, const PositionBasis& basis, double hbar) {
    require(x.degree() <= 8, "realize_matrix: degree cap is 8");
    const OperatorMatrix Q = position_op(basis);
    const OperatorMatrix P = momentum_op(basis, hbar);
    const OperatorMatrix I = identity_kernel(basis);

    OperatorMatrix acc(basis);
    for (const auto& [word, coeff] : x.terms) {
        OperatorMatrix term = I;
        for (char ch : word) term = compose(term, ch == 'Q' ? Q : P);
        acc = acc + coeff.eval(hbar) * term;
    }
    return acc;
}

}  // namespace sym
}  // namespace myl
