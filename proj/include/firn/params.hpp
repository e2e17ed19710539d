#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace firn {

/// Physical and scaling constants of the rescaled gas-trapping model.
///
/// G = tau + lambda (1/yr), F = v + w_air (m/yr), Malpha = M_alpha*g/(R*T)
/// (1/m). zF is the firn depth in meters, Te the end time in years.
/// rho_atm is the atmospheric concentration as a function of rescaled
/// time t in [0,1]; it must vanish at t = 0.
struct FirnParams {
    double f = 0.2;
    double G = 10.03;
    double F = 685.0;
    double Malpha = 1.8134e-4;
    double zF = 1.0;
    double Te = 1.0;
    std::vector<double> r_alphas{0.5, 1.0, 1.5};
    std::function<double(double)> rho_atm;

    void validate() const {
        if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("FirnParams: f must be in (0,1)");
        if (!(G > 0.0)) throw std::invalid_argument("FirnParams: G must be positive");
        if (!(F > 0.0)) throw std::invalid_argument("FirnParams: F must be positive");
        if (Malpha < 0.0) throw std::invalid_argument("FirnParams: Malpha must be nonnegative");
        if (!(zF > 0.0)) throw std::invalid_argument("FirnParams: zF must be positive");
        if (!(Te > 0.0)) throw std::invalid_argument("FirnParams: Te must be positive");
        if (!rho_atm) throw std::invalid_argument("FirnParams: rho_atm not set");
        if (rho_atm(0.0) != 0.0) throw std::invalid_argument("FirnParams: rho_atm(0) must be 0");
    }
};

/// Benchmark constants: f = 0.2, Malpha = 1.8134e-4, G = 10.03, F = 685,
/// rho_atm(t) = 2*(Te*t)^(1/4). The atmospheric function is bound to the
/// Te passed here; rebuild the params if Te changes.
inline FirnParams default_params(double zF, double Te) {
    FirnParams p;
    p.zF = zF;
    p.Te = Te;
    p.rho_atm = [Te](double t) { return 2.0 * std::pow(Te * t, 0.25); };
    return p;
}

} // namespace firn
