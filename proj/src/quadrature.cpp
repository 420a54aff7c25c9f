#include "revsim/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace revsim {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
    nodes_.resize(order);
    weights_.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th positive root
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n(x) and P'_n(x) by the three-term recurrence
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes_[i] = -x;
        nodes_[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights_[i] = w;
        weights_[order - 1 - i] = w;
    }
}

}  // namespace revsim
