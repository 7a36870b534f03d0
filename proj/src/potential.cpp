#include "nlch/potential.hpp"

#include <cmath>
#include <limits>

namespace nlch {

PotentialValue log_potential(double s) {
    if (!(s > 0.0) || !(s < 1.0)) {
        throw std::domain_error("log_potential: s must lie in (0,1)");
    }
    PotentialValue v;
    v.f = s * std::log(s) + (1.0 - s) * std::log(1.0 - s);
    v.f_prime = std::log(s / (1.0 - s));
    v.f_second = 1.0 / (s * (1.0 - s));
    return v;
}

double mobility(double s) noexcept { return s * (1.0 - s); }

EpsilonFamily::EpsilonFamily(double epsilon) : epsilon_(epsilon) {
    if (epsilon < 0.0) {
        throw std::domain_error("EpsilonFamily: epsilon must be nonnegative");
    }
    // a = (sqrt(1+4e)-1)/2 in the cancellation-free form; a(1+a) = e holds to
    // machine precision even for tiny e.
    a_ = 2.0 * epsilon / (std::sqrt(1.0 + 4.0 * epsilon) + 1.0);
    one_plus_2a_ = 1.0 + 2.0 * a_;
    if (epsilon > 0.0) {
        f_prime_at_one_ = std::log((a_ + 1.0) / a_);
        antiderivative_at_half_ = one_plus_2a_ * std::log(a_ + 0.5);
        const double f1 = (a_ + 1.0) * std::log(a_ + 1.0) + a_ * std::log(a_);
        f_at_one_ = f1 - antiderivative_at_half_ - std::log(2.0);
    } else {
        f_prime_at_one_ = std::numeric_limits<double>::infinity();
        antiderivative_at_half_ = -std::log(2.0);  // 1*ln(1/2)
        f_at_one_ = 0.0;
    }
}

double EpsilonFamily::f_at_half() const { return -std::log(2.0); }

double EpsilonFamily::mobility(double s) const noexcept {
    if (s < 0.0 || s > 1.0) return epsilon_;
    return (s + a_) * (1.0 + a_ - s);
}

void EpsilonFamily::require_interior(double s) const {
    if (epsilon_ == 0.0 && (!(s > 0.0) || !(s < 1.0))) {
        throw std::domain_error("EpsilonFamily: eps = 0 requires s in (0,1)");
    }
}

double EpsilonFamily::f_prime(double s) const {
    require_interior(s);
    if (s < 0.0) {
        return -f_prime_at_one_ + (one_plus_2a_ / epsilon_) * s;
    }
    if (s > 1.0) {
        return f_prime_at_one_ + (one_plus_2a_ / epsilon_) * (s - 1.0);
    }
    return std::log((a_ + s) / (1.0 + a_ - s));
}

double EpsilonFamily::f_second(double s) const {
    require_interior(s);
    if (s < 0.0 || s > 1.0) return one_plus_2a_ / epsilon_;
    return one_plus_2a_ / ((s + a_) * (1.0 + a_ - s));
}

double EpsilonFamily::f(double s) const {
    require_interior(s);
    if (s < 0.0) {
        // f_eps(0) = f_eps(1) by the symmetry about 1/2.
        return f_at_one_ - f_prime_at_one_ * s + 0.5 * (one_plus_2a_ / epsilon_) * s * s;
    }
    if (s > 1.0) {
        const double d = s - 1.0;
        return f_at_one_ + f_prime_at_one_ * d + 0.5 * (one_plus_2a_ / epsilon_) * d * d;
    }
    const double xlog = (a_ + s) * std::log(a_ + s);
    const double ylog = (1.0 + a_ - s) * std::log(1.0 + a_ - s);
    return xlog + ylog - antiderivative_at_half_ - std::log(2.0);
}

EpsilonFamily make_epsilon_family(double epsilon) { return EpsilonFamily(epsilon); }

}  // namespace nlch
