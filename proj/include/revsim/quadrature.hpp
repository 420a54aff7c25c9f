#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace revsim {

// Composite Gauss-Legendre quadrature.  Nodes/weights for the reference
// interval [-1, 1] are generated once per order by Newton iteration on the
// Legendre polynomial.
class GaussLegendre {
public:
    explicit GaussLegendre(int order);

    // integral of f over [a, b] using `panels` equal panels
    template <typename F>
    double integrate(F&& f, double a, double b, int panels = 1) const {
        if (a == b) return 0.0;
        double total = 0.0;
        const double w = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + k * w;
            const double mid = lo + 0.5 * w, half = 0.5 * w;
            double s = 0.0;
            for (std::size_t i = 0; i < nodes_.size(); ++i)
                s += weights_[i] * f(mid + half * nodes_[i]);
            total += half * s;
        }
        return total;
    }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> nodes_, weights_;
};

}  // namespace revsim
