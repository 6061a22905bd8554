#pragma once

#include "myl/common.hpp"
#include "myl/operator.hpp"

#include <map>
#include <string>

namespace myl {
namespace sym {

// ---------------------------------------------------------------------------
// Exact coefficient arithmetic: complex rationals, polynomials in hbar.
// The oracle must be strictly more trustworthy than the numeric path, so
// nothing here ever rounds.
// ---------------------------------------------------------------------------

struct Rat {
    long long num = 0, den = 1;

    Rat() = default;
    Rat(long long n) : num(n), den(1) {}
    Rat(long long n, long long d);

    friend Rat operator+(Rat a, Rat b);
    friend Rat operator-(Rat a, Rat b);
    friend Rat operator*(Rat a, Rat b);
    friend Rat operator/(Rat a, Rat b);
    friend Rat operator-(Rat a) { return Rat(-a.num, a.den); }
    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num == b.num && a.den == b.den;
    }
    double to_double() const { return double(num) / double(den); }
};

/// Exact rational from a decimal literal such as "0.25" or "3".
Rat rat_from_decimal(const std::string& text);

struct CRat {
    Rat re, im;

    CRat() = default;
    CRat(Rat r) : re(r) {}
    CRat(Rat r, Rat i) : re(r), im(i) {}
    CRat(long long r) : re(r) {}

    bool is_zero() const { return re == Rat(0) && im == Rat(0); }
    CRat conj() const { return CRat(re, -im); }
    cplx to_cplx() const { return cplx(re.to_double(), im.to_double()); }

    friend CRat operator+(const CRat& a, const CRat& b);
    friend CRat operator-(const CRat& a, const CRat& b);
    friend CRat operator*(const CRat& a, const CRat& b);
    friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
};

inline CRat crat_i() { return CRat(Rat(0), Rat(1)); }

/// Polynomial in hbar with complex-rational coefficients (coeff[d] ~ hbar^d).
struct HPoly {
    std::vector<CRat> c;

    HPoly() = default;
    HPoly(CRat v) : c{v} { trim(); }
    HPoly(long long v) : c{CRat(v)} { trim(); }
    static HPoly hbar(CRat scale = CRat(1));  // scale * hbar

    void trim();
    bool is_zero() const { return c.empty(); }
    HPoly conj() const;
    cplx eval(double hbar_value) const;
    /// Constant (hbar^0) term.
    CRat constant() const { return c.empty() ? CRat() : c[0]; }
    /// Exact division by hbar; requires zero constant term.
    HPoly div_hbar() const;

    friend HPoly operator+(const HPoly& a, const HPoly& b);
    friend HPoly operator-(const HPoly& a, const HPoly& b);
    friend HPoly operator*(const HPoly& a, const HPoly& b);
    friend bool operator==(const HPoly& a, const HPoly& b);
};

HPoly mul_crat(const HPoly& a, const CRat& s);
/// mu = i hbar / 2 as an exact coefficient.
HPoly mu_poly();

// ---------------------------------------------------------------------------
// Commutative polynomials in (q, p)
// ---------------------------------------------------------------------------

struct CPolynomial {
    // (n, m) -> coefficient of q^n p^m; zero coefficients never stored
    std::map<std::pair<int, int>, HPoly> terms;

    void add_term(int n, int m, const HPoly& coeff);
    bool is_zero() const { return terms.empty(); }
    int degree() const;
    cplx eval(double q, double p, double hbar_value) const;

    friend CPolynomial operator+(const CPolynomial& a, const CPolynomial& b);
    friend CPolynomial operator-(const CPolynomial& a, const CPolynomial& b);
    friend CPolynomial operator*(const CPolynomial& a, const CPolynomial& b);
    friend bool operator==(const CPolynomial& a, const CPolynomial& b);
};

CPolynomial c_monomial(int n, int m, HPoly coeff = HPoly(1));
CPolynomial derive_q(const CPolynomial& f);
CPolynomial derive_p(const CPolynomial& f);
/// Exact Poisson bracket dq f dp g - dp f dq g.
CPolynomial poisson(const CPolynomial& f, const CPolynomial& g);
std::string to_string(const CPolynomial& f);

/// Parser for the grammar: terms of c*q^n*p^m joined by +/-, complex literals
/// a+b*i (also "bi"), hbar literal `hbar`. Throws error("syntax error at
/// offset N: ...") on malformed input.
CPolynomial parse_poly(const std::string& text);

// ---------------------------------------------------------------------------
// Noncommutative polynomials in (Q, P) with [Q, P] = i hbar
// ---------------------------------------------------------------------------

struct NCPolynomial {
    // word over {'Q','P'} -> coefficient
    std::map<std::string, HPoly> terms;

    void add_term(const std::string& word, const HPoly& coeff);
    bool is_zero() const { return terms.empty(); }
    int degree() const;

    friend NCPolynomial operator+(const NCPolynomial& a, const NCPolynomial& b);
    friend NCPolynomial operator-(const NCPolynomial& a, const NCPolynomial& b);
    friend NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b);
    friend bool operator==(const NCPolynomial& a, const NCPolynomial& b);
};

NCPolynomial nc_word(const std::string& word, HPoly coeff = HPoly(1));
std::string to_string(const NCPolynomial& x);

/// Canonical form: every word rewritten with all Q left of P via
/// PQ -> QP - i hbar. Exact, idempotent.
NCPolynomial normal_order(const NCPolynomial& x);

/// Formal adjoint: words reversed, coefficients conjugated.
NCPolynomial nc_adjoint(const NCPolynomial& x);

/// Symmetric (McCoy) ordering of q^n p^m:
///   2^{-n} Sum_k C(n,k) Q^k P^m Q^{n-k},   normal-ordered.
NCPolynomial weyl_order(int n, int m);

/// Lambda-family ordering of q^n p^m:
///   Sum_l (-i lambda)^l C(m,l) C(n,l) l! weyl_order(n-l, m-l).
NCPolynomial lambda_order(int n, int m, const HPoly& lambda);

/// Orderings applied to whole polynomials (termwise).
NCPolynomial weyl_order(const CPolynomial& f);
NCPolynomial lambda_order(const CPolynomial& f, const HPoly& lambda);

// ---------------------------------------------------------------------------
// Exact star products (finite bidifferential expansion)
// ---------------------------------------------------------------------------

struct StarFamily {
    bool is_weyl = true;
    HPoly lambda;  // used when !is_weyl

    static StarFamily weyl() { return StarFamily{true, HPoly()}; }
    static StarFamily lambda_family(HPoly l) { return StarFamily{false, std::move(l)}; }
};

/// f (*) g for the family; exterior parameter nu = mu = i hbar/2.
CPolynomial star_poly(const CPolynomial& f, const CPolynomial& g, const StarFamily& family);

/// General two-parameter product
///   exp[(lambda+nu) dq (x) dp' + (lambda-nu) dp (x) dq'] f(z) g(z') | z=z'.
CPolynomial star_poly_ext(const CPolynomial& f, const CPolynomial& g, const HPoly& lambda,
                          const HPoly& nu);

/// (f*g - g*f) / (2 mu), exact (the division by hbar is checked).
CPolynomial moyal_bracket_poly(const CPolynomial& f, const CPolynomial& g,
                               const StarFamily& family);

// ---------------------------------------------------------------------------
// Matrix realization (bridge to the numeric world)
// ---------------------------------------------------------------------------

/// Substitute the discretized position/momentum operators for Q and P and
/// multiply out the words. Degree capped at 8.
OperatorMatrix realize_matrix(const NCPolynomial& x, const PositionBasis& basis, double hbar);

}  // namespace sym
}  // namespace myl
