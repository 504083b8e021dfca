#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace quadgain {

using ComplexRoot = std::complex<double>;

/// Real univariate polynomial, coefficients in ascending degree order.
struct Poly {
    std::vector<double> coeffs;

    Poly() = default;
    Poly(std::initializer_list<double> c) : coeffs(c) { normalize(); }
    explicit Poly(std::vector<double> c) : coeffs(std::move(c)) { normalize(); }

    // Strips trailing zero coefficients so the leading one is nonzero.
    void normalize() {
        while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
        if (coeffs.empty()) coeffs.push_back(0.0);
    }

    std::size_t degree() const { return coeffs.size() - 1; }
    double leading() const { return coeffs.back(); }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    double eval(double x) const {
        double y = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) y = y * x + coeffs[i];
        return y;
    }

    ComplexRoot eval(ComplexRoot x) const {
        ComplexRoot y = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) y = y * x + coeffs[i];
        return y;
    }
};

namespace detail {

// Roots of the monic quadratic s^2 + b s + c, exact conjugates when complex.
inline void quadratic_roots(double b, double c, std::vector<ComplexRoot>& out) {
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Avoids cancellation between -b and the square root.
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        if (q != 0.0) {
            out.emplace_back(q, 0.0);
            out.emplace_back(c / q, 0.0);
        } else {
            out.emplace_back(-0.5 * b, 0.0);
            out.emplace_back(-0.5 * b, 0.0);
        }
    } else {
        const double re = -0.5 * b;
        const double im = 0.5 * std::sqrt(-disc);
        out.emplace_back(re, im);
        out.emplace_back(re, -im);
    }
}

// One real root of the monic cubic s^3 + a s^2 + b s + c. A real root always
// exists; hybrid Newton/bisection on a Cauchy-bound bracket.
inline double cubic_real_root(double a, double b, double c) {
    const double bound = 1.0 + std::max({std::abs(a), std::abs(b), std::abs(c)});
    double lo = -bound, hi = bound;
    auto f = [&](double x) { return ((x + a) * x + b) * x + c; };
    auto fp = [&](double x) { return (3.0 * x + 2.0 * a) * x + b; };

    double x = -a / 3.0;  // inflection point
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fx > 0.0) hi = x; else lo = x;
        const double d = fp(x);
        double step = (d != 0.0) ? -fx / d : 0.0;
        double next = x + step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * std::abs(next)) return next;
        x = next;
    }
    return x;
}

// All roots of a monic cubic: real root, then deflation to a quadratic.
inline void cubic_roots(double a, double b, double c, std::vector<ComplexRoot>& out) {
    const double r = cubic_real_root(a, b, c);
    out.emplace_back(r, 0.0);
    // Synthetic division by (s - r): s^2 + (a + r) s + (b + r(a + r)).
    quadratic_roots(a + r, b + r * (a + r), out);
}

// Monic quartic via factorization into two real quadratics. The resolvent
// cubic z^3 + 2p z^2 + (p^2 - 4r) z - q^2 always has a nonnegative real root.
inline void quartic_roots(double a, double b, double c, double d,
                          std::vector<ComplexRoot>& out) {
    // Depress: s = y - a/4 gives y^4 + p y^2 + q y + r.
    const double a2 = a * a;
    const double p = b - 3.0 * a2 / 8.0;
    const double q = c - a * b / 2.0 + a2 * a / 8.0;
    const double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    const double shift = -a / 4.0;

    const double scale = std::max({1.0, std::abs(p), std::abs(q), std::abs(r)});
    std::vector<ComplexRoot> y;
    y.reserve(4);

    if (std::abs(q) <= 1e-14 * scale) {
        // Biquadratic: y^2 solves z^2 + p z + r = 0.
        const double disc = p * p - 4.0 * r;
        if (disc >= 0.0) {
            std::vector<ComplexRoot> zs;
            quadratic_roots(p, r, zs);
            for (const auto& z : zs) {
                const double zr = z.real();
                if (zr >= 0.0) {
                    const double s = std::sqrt(zr);
                    y.emplace_back(s, 0.0);
                    y.emplace_back(-s, 0.0);
                } else {
                    const double s = std::sqrt(-zr);
                    y.emplace_back(0.0, s);
                    y.emplace_back(0.0, -s);
                }
            }
        } else {
            // Conjugate z pair; square roots form two exact conjugate pairs.
            const double zre = -0.5 * p;
            const double zim = 0.5 * std::sqrt(-disc);
            const double mag = std::hypot(zre, zim);
            const double u = std::sqrt(0.5 * (mag + zre));
            const double v = std::sqrt(0.5 * (mag - zre)) * (zim >= 0.0 ? 1.0 : -1.0);
            y.emplace_back(u, v);
            y.emplace_back(u, -v);
            y.emplace_back(-u, v);
            y.emplace_back(-u, -v);
        }
    } else {
        // Largest real resolvent root keeps s = sqrt(z) well conditioned.
        std::vector<ComplexRoot> zs;
        cubic_roots(2.0 * p, p * p - 4.0 * r, -q * q, zs);
        double zbest = 0.0;
        for (const auto& z : zs)
            if (std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z.real())))
                zbest = std::max(zbest, z.real());
        const double s = std::sqrt(std::max(zbest, 0.0));
        double u, v;
        if (s > 0.0) {
            u = 0.5 * (p + zbest - q / s);
            v = 0.5 * (p + zbest + q / s);
            // Re-derive the smaller factor from u*v = r for conditioning.
            if (std::abs(u) > std::abs(v) && u != 0.0) v = r / u;
            else if (v != 0.0) u = r / v;
        } else {
            u = v = 0.5 * p;
        }
        quadratic_roots(s, u, y);
        quadratic_roots(-s, v, y);
    }

    for (auto& yr : y) out.push_back(yr + shift);
}

// Newton refinement on the monic polynomial. Complex roots are polished on
// the upper-half-plane member only and mirrored, keeping pairs exact.
inline void polish_roots(const std::vector<double>& monic, std::vector<ComplexRoot>& roots) {
    auto eval_pair = [&](ComplexRoot x, ComplexRoot& f, ComplexRoot& fp) {
        f = monic.back();
        fp = 0.0;
        for (std::size_t i = monic.size() - 1; i-- > 0;) {
            fp = fp * x + f;
            f = f * x + monic[i];
        }
    };
    for (auto& root : roots) {
        if (root.imag() < 0.0) continue;  // handled via its conjugate partner
        ComplexRoot x = root;
        for (int it = 0; it < 12; ++it) {
            ComplexRoot f, fp;
            eval_pair(x, f, fp);
            if (std::abs(f) == 0.0 || std::abs(fp) == 0.0) break;
            const ComplexRoot step = f / fp;
            x -= step;
            if (root.imag() == 0.0) x = ComplexRoot(x.real(), 0.0);
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
        }
        // Keep the refinement only if it did not increase the residual.
        ComplexRoot f_new, f_old, fp;
        eval_pair(x, f_new, fp);
        eval_pair(root, f_old, fp);
        if (std::abs(f_new) <= std::abs(f_old)) root = x;
    }
    // Mirror polished upper-half roots onto their conjugate partners.
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (roots[i].imag() <= 0.0) continue;
        std::size_t best = roots.size();
        double best_d = 0.0;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j] || roots[j].imag() >= 0.0) continue;
            const double d = std::abs(roots[j] - std::conj(roots[i]));
            if (best == roots.size() || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        if (best != roots.size()) {
            roots[best] = std::conj(roots[i]);
            used[best] = true;
        }
    }
}

}  // namespace detail

/// All complex roots of a degree 1..4 polynomial. Conjugate pairs are exactly
/// conjugate; roots are Newton-refined against the monic input.
inline std::vector<ComplexRoot> poly_roots(const Poly& p) {
    Poly q = p;
    q.normalize();
    const std::size_t deg = q.degree();
    if (deg == 0 || deg > 4)
        throw std::invalid_argument("poly_roots: supported degrees are 1..4");

    const double lead = q.leading();
    std::vector<double> monic(q.coeffs.size());
    for (std::size_t i = 0; i < q.coeffs.size(); ++i) monic[i] = q.coeffs[i] / lead;

    std::vector<ComplexRoot> roots;
    roots.reserve(deg);
    switch (deg) {
        case 1:
            roots.emplace_back(-monic[0], 0.0);
            break;
        case 2:
            detail::quadratic_roots(monic[1], monic[0], roots);
            break;
        case 3:
            detail::cubic_roots(monic[2], monic[1], monic[0], roots);
            break;
        default:
            detail::quartic_roots(monic[3], monic[2], monic[1], monic[0], roots);
            break;
    }
    detail::polish_roots(monic, roots);
    return roots;
}

}  // namespace quadgain
