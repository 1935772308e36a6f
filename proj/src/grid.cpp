#include "volterra/grid.hpp"

#include <cmath>
#include <string>

namespace volterra {

int Grid::index_of(double t, double rtol) const {
    const double h = step();
    const int k = static_cast<int>(std::lround(t / h));
    if (k < 0 || k > cells || std::fabs(time(std::min(std::max(k, 0), cells)) - t) > rtol * horizon)
        throw ParameterError("time " + std::to_string(t) + " is not a grid point");
    return k;
}

Grid make_uniform_grid(double horizon, int cells) {
    if (!(horizon > 0.0))
        throw ParameterError("grid horizon must be positive");
    if (cells < 2)
        throw ParameterError("grid needs at least two cells");
    Grid g;
    g.horizon = horizon;
    g.cells = cells;
    g.points.resize(static_cast<std::size_t>(cells) + 1);
    for (int k = 0; k <= cells; ++k)
        g.points[static_cast<std::size_t>(k)] = (k * horizon) / cells;
    g.points.back() = horizon;
    return g;
}

Grid coarsen_dyadic(const Grid& g, int factor) {
    if (factor < 1 || g.cells % factor != 0)
        throw ParameterError("coarsening factor must divide the cell count");
    Grid c;
    c.horizon = g.horizon;
    c.cells = g.cells / factor;
    c.points.resize(static_cast<std::size_t>(c.cells) + 1);
    for (int k = 0; k <= c.cells; ++k)
        c.points[static_cast<std::size_t>(k)] = g.points[static_cast<std::size_t>(k) * factor];
    return c;
}

TwoParamField::TwoParamField(int n, int channels) : layout_{n}, channels_(channels) {
    data_.assign(layout_.count() * static_cast<std::size_t>(channels), 0.0);
}

double TwoParamField::max_abs() const {
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace volterra
