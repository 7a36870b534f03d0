#pragma once

#include <stdexcept>

namespace nlch {

struct PotentialValue {
    double f = 0.0;
    double f_prime = 0.0;
    double f_second = 0.0;
};

/// Logarithmic potential f(s) = s ln s + (1-s) ln(1-s) with its first two
/// derivatives. Throws std::domain_error outside (0, 1).
PotentialValue log_potential(double s);

/// Degenerate mobility s(1-s), defined on all reals.
double mobility(double s) noexcept;

/// The regularized pair (mu_eps, f_eps) for a fixed eps >= 0. The family
/// satisfies mu_eps * f_eps'' = 1 + 2a identically, where
/// a = (sqrt(1+4 eps) - 1)/2, and degenerates to (mu, f) at eps = 0.
///
/// All evaluators are total on their stated domains and never clamp; bound
/// violations are the caller's to detect.
class EpsilonFamily {
public:
    explicit EpsilonFamily(double epsilon);

    double epsilon() const { return epsilon_; }
    double a() const { return a_; }
    double one_plus_2a() const { return one_plus_2a_; }
    /// f_eps(1/2) = f(1/2) = -ln 2 by construction.
    double f_at_half() const;

    /// mu_eps(s): eps for s < 0, (s+a)(1+a-s) on [0,1], eps for s > 1.
    /// (The source display labels the third branch "s > 0"; the branch point
    /// is s = 1, as the adjacent displays and continuity force.)
    double mobility(double s) const noexcept;

    /// f_eps'(s): ln((a+s)/(1+a-s)) on [0,1], continued outside with the
    /// constant slope (1+2a)/eps. Requires s in (0,1) when eps = 0.
    double f_prime(double s) const;

    /// f_eps''(s) = (1+2a)/mu_eps(s). Same domain rule as f_prime.
    double f_second(double s) const;

    /// Antiderivative of f_prime normalized by f_eps(1/2) = -ln 2. Closed
    /// form on [0,1]: (a+s)ln(a+s) + (1+a-s)ln(1+a-s) + const; quadratic
    /// continuation outside. Same domain rule as f_prime.
    double f(double s) const;

private:
    void require_interior(double s) const;

    double epsilon_;
    double a_;
    double one_plus_2a_;
    double f_prime_at_one_;  // ln((a+1)/a); +inf at eps = 0
    double f_at_one_;        // f_eps(1);    0 at eps = 0 (limit)
    double antiderivative_at_half_;
};

/// Factory matching the family's construction contract: throws
/// std::domain_error for epsilon < 0.
EpsilonFamily make_epsilon_family(double epsilon);

}  // namespace nlch
