#pragma once

#include "bslab/quadrature.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bslab {

/// Scalar field sampled at the quadrature nodes of a shared grid.
/// Value-semantic; every operation returns a fresh function, so instances can
/// be shared freely across threads once constructed.
class GridFunction {
public:
    explicit GridFunction(GridPtr grid);
    GridFunction(GridPtr grid, std::vector<double> values);

    static GridFunction from_function(GridPtr grid,
                                      const std::function<double(double, double, double)>& f);

    const QuadratureGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }

    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return values_[grid_->flat_index(i, j, k)];
    }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    bool all_finite() const;

    GridFunction operator+(const GridFunction& other) const;
    GridFunction operator-(const GridFunction& other) const;
    GridFunction operator*(double s) const;
    /// Pointwise product.
    GridFunction operator*(const GridFunction& other) const;

    double sup_norm() const;
    /// Sup of |f| over nodes with |y| <= radius.
    double sup_norm_within(double radius) const;

    /// CSV with header y1,y2,theta,value; one node per row, 17 significant digits.
    void write_csv(std::ostream& os) const;
    static GridFunction read_csv(GridPtr grid, std::istream& is);

private:
    void check_same_grid(const GridFunction& other) const;

    GridPtr grid_;
    std::vector<double> values_;
};

}  // namespace bslab
