#include "eisp/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "eisp/error.hpp"

namespace eisp::special {
namespace {

constexpr double series_limit = 20.0;
constexpr long double euler_gamma = 0.577215664901532860606512090082402431L;
constexpr long double pi_l = 3.141592653589793238462643383279502884L;

struct SeriesPair {
    long double j;
    long double y;
};

// J0 and Y0 from their ascending series.
SeriesPair series_order0(long double x) {
    const long double q = -0.25L * x * x;
    long double term = 1.0L;
    long double harmonic = 0.0L;
    long double j = 1.0L;
    long double s = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * k);
        harmonic += 1.0L / k;
        j += term;
        s += harmonic * term;
        if (std::fabs(term) * (1.0L + harmonic) < 1e-24L * (1.0L + std::fabs(j))) break;
    }
    const long double y = (2.0L / pi_l) * ((std::log(0.5L * x) + euler_gamma) * j - s);
    return {j, y};
}

// J1 and Y1 from their ascending series.
SeriesPair series_order1(long double x) {
    const long double q = -0.25L * x * x;
    const long double half = 0.5L * x;
    long double term = half;  // (x/2)^(2k+1) (-1)^k / (k! (k+1)!)
    long double psi_sum = -2.0L * euler_gamma + 1.0L;  // psi(1) + psi(2)
    long double j = term;
    long double s = psi_sum * term;
    long double h_k = 0.0L;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<long double>(k) * (k + 1));
        h_k += 1.0L / k;
        psi_sum = -2.0L * euler_gamma + 2.0L * h_k + 1.0L / (k + 1);  // psi(k+1) + psi(k+2)
        j += term;
        s += psi_sum * term;
        if (std::fabs(term) * (1.0L + std::fabs(psi_sum)) < 1e-24L * (1.0L + std::fabs(j))) break;
    }
    const long double y = (2.0L / pi_l) * std::log(half) * j - 2.0L / (pi_l * x) - s / pi_l;
    return {j, y};
}

// Hankel large-argument expansion: returns (J_nu, Y_nu) for nu in {0, 1}.
SeriesPair asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double a = 1.0;  // a_k / x^k with alternating signs folded in below
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 120; ++k) {
        const double odd = 2.0 * k - 1.0;
        a *= (mu - odd * odd) / (k * 8.0 * x);
        const double mag = std::fabs(a);
        if (mag > last) break;  // asymptotic series started diverging
        last = mag;
        switch (k % 4) {
            case 1: q += a; break;
            case 2: p -= a; break;
            case 3: q -= a; break;
            case 0: p += a; break;
        }
        if (mag < 1e-18) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    const double c = std::cos(chi);
    const double s = std::sin(chi);
    return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

}  // namespace

double bessel_j0(double x) {
    x = std::fabs(x);
    if (x <= series_limit) return static_cast<double>(series_order0(x).j);
    return static_cast<double>(asymptotic(0, x).j);
}

double bessel_j1(double x) {
    const double sign = x < 0.0 ? -1.0 : 1.0;
    x = std::fabs(x);
    if (x <= series_limit) return sign * static_cast<double>(series_order1(x).j);
    return sign * static_cast<double>(asymptotic(1, x).j);
}

double bessel_y0(double x) {
    require(x > 0.0, Errc::invalid_argument, "Y0 requires a positive argument");
    if (x <= series_limit) return static_cast<double>(series_order0(x).y);
    return static_cast<double>(asymptotic(0, x).y);
}

double bessel_y1(double x) {
    require(x > 0.0, Errc::invalid_argument, "Y1 requires a positive argument");
    if (x <= series_limit) return static_cast<double>(series_order1(x).y);
    return static_cast<double>(asymptotic(1, x).y);
}

cplx hankel1_0(double x) {
    require(x > 0.0, Errc::invalid_argument, "H0 requires a positive argument");
    const auto v = x <= series_limit ? series_order0(x) : asymptotic(0, x);
    return {static_cast<double>(v.j), static_cast<double>(v.y)};
}

cplx hankel1_1(double x) {
    require(x > 0.0, Errc::invalid_argument, "H1 requires a positive argument");
    const auto v = x <= series_limit ? series_order1(x) : asymptotic(1, x);
    return {static_cast<double>(v.j), static_cast<double>(v.y)};
}

std::vector<double> bessel_jn_sequence(int nmax, double x) {
    require(nmax >= 0, Errc::invalid_argument, "negative Bessel order");
    require(x >= 0.0, Errc::invalid_argument, "Bessel sequence requires x >= 0");
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int top = std::max(nmax, static_cast<int>(x));
    int start = top + 20 + static_cast<int>(std::sqrt(40.0 * top));
    start += start % 2;  // even start keeps the normalization sum aligned
    std::vector<double> seq(static_cast<std::size_t>(start) + 2, 0.0);
    seq[static_cast<std::size_t>(start) + 1] = 0.0;
    seq[static_cast<std::size_t>(start)] = 1e-300;
    for (int k = start; k >= 1; --k) {
        const auto ku = static_cast<std::size_t>(k);
        seq[ku - 1] = (2.0 * k / x) * seq[ku] - seq[ku + 1];
        if (std::fabs(seq[ku - 1]) > 1e250) {
            for (std::size_t i = ku - 1; i < seq.size(); ++i) seq[i] *= 1e-250;
        }
    }
    long double norm = seq[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0L * seq[static_cast<std::size_t>(k)];
    const double scale = static_cast<double>(1.0L / norm);
    for (int n = 0; n <= nmax; ++n) out[static_cast<std::size_t>(n)] = seq[static_cast<std::size_t>(n)] * scale;
    return out;
}

std::vector<double> bessel_yn_sequence(int nmax, double x) {
    require(nmax >= 0, Errc::invalid_argument, "negative Bessel order");
    require(x > 0.0, Errc::invalid_argument, "Y sequence requires x > 0");
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    out[0] = bessel_y0(x);
    if (nmax >= 1) out[1] = bessel_y1(x);
    for (int n = 1; n < nmax; ++n) {
        const auto nu = static_cast<std::size_t>(n);
        out[nu + 1] = (2.0 * n / x) * out[nu] - out[nu - 1];
    }
    return out;
}

}  // namespace eisp::special
