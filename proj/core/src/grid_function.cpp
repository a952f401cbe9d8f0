#include "bslab/grid_function.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bslab {

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size())
        throw std::invalid_argument("GridFunction: value count does not match grid size");
}

GridFunction GridFunction::from_function(
    GridPtr grid, const std::function<double(double, double, double)>& f) {
    GridFunction out(grid);
    const auto& g = *grid;
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j)
            for (std::size_t k = 0; k < g.ntheta(); ++k)
                out.values_[g.flat_index(i, j, k)] =
                    f(g.nodes_y1()[i], g.nodes_y2()[j], g.nodes_theta()[k]);
    return out;
}

bool GridFunction::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void GridFunction::check_same_grid(const GridFunction& other) const {
    if (!grid_->same_grid(other.grid()))
        throw std::invalid_argument("GridFunction: operands live on different grids");
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
    check_same_grid(other);
    GridFunction out(grid_);
    for (std::size_t n = 0; n < values_.size(); ++n) out.values_[n] = values_[n] + other.values_[n];
    return out;
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
    check_same_grid(other);
    GridFunction out(grid_);
    for (std::size_t n = 0; n < values_.size(); ++n) out.values_[n] = values_[n] - other.values_[n];
    return out;
}

GridFunction GridFunction::operator*(double s) const {
    GridFunction out(grid_);
    for (std::size_t n = 0; n < values_.size(); ++n) out.values_[n] = s * values_[n];
    return out;
}

GridFunction GridFunction::operator*(const GridFunction& other) const {
    check_same_grid(other);
    GridFunction out(grid_);
    for (std::size_t n = 0; n < values_.size(); ++n) out.values_[n] = values_[n] * other.values_[n];
    return out;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

double GridFunction::sup_norm_within(double radius) const {
    const auto& g = *grid_;
    const double r2 = radius * radius;
    double m = 0.0;
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double y1 = g.nodes_y1()[i], y2 = g.nodes_y2()[j];
            if (y1 * y1 + y2 * y2 > r2) continue;
            for (std::size_t k = 0; k < g.ntheta(); ++k)
                m = std::max(m, std::fabs(values_[g.flat_index(i, j, k)]));
        }
    return m;
}

void GridFunction::write_csv(std::ostream& os) const {
    const auto& g = *grid_;
    os << "y1,y2,theta,value\n";
    char buf[512];
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j)
            for (std::size_t k = 0; k < g.ntheta(); ++k) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", g.nodes_y1()[i],
                              g.nodes_y2()[j], g.nodes_theta()[k],
                              values_[g.flat_index(i, j, k)]);
                os << buf;
            }
}

GridFunction GridFunction::read_csv(GridPtr grid, std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("y1,y2,theta,value", 0) != 0)
        throw std::invalid_argument("GridFunction::read_csv: bad header");
    GridFunction out(grid);
    std::size_t n = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (n >= out.values_.size())
            throw std::invalid_argument("GridFunction::read_csv: too many rows");
        std::istringstream ss(line);
        double y1, y2, th, v;
        char c;
        if (!(ss >> y1 >> c >> y2 >> c >> th >> c >> v))
            throw std::invalid_argument("GridFunction::read_csv: bad row");
        out.values_[n++] = v;
    }
    if (n != out.values_.size())
        throw std::invalid_argument("GridFunction::read_csv: row count does not match grid");
    return out;
}

}  // namespace bslab
