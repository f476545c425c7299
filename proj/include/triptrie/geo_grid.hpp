#pragma once

#include <cmath>
#include <cstdint>

#include "triptrie/errors.hpp"
#include "triptrie/symbols.hpp"

namespace triptrie {

/// One rectangle of the grid, in degrees.
struct cell_box {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
};

/// Location of a cell: 1-based row (from the south edge) and column
/// (from the west edge), plus its bounding box.
struct grid_cell {
    std::int32_t row = 0; // i_y, 1..n_r counted upward from y_min
    std::int32_t col = 0; // i_x, 1..n_c counted rightward from x_min
    cell_box box;
};

/// Rectangular discretization of a geographic bounding box into
/// n_r x n_c equal cells (equal in degree space; no projection).
/// Cell ids are 1-based, row-major from the bottom-left corner:
/// id = (row - 1) * n_c + col.
class grid {
public:
    grid(double x_min, double y_min, double x_max, double y_max,
         std::int32_t n_r, std::int32_t n_c)
        : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max),
          n_r_(n_r), n_c_(n_c) {
        if (!(x_max > x_min) || !(y_max > y_min))
            throw error("invalid_grid", "degenerate bounding box");
        if (n_r < 1 || n_c < 1)
            throw error("invalid_grid", "row/column counts must be >= 1");
        cell_w_ = (x_max_ - x_min_) / static_cast<double>(n_c_);
        cell_h_ = (y_max_ - y_min_) / static_cast<double>(n_r_);
    }

    double x_min() const noexcept { return x_min_; }
    double y_min() const noexcept { return y_min_; }
    double x_max() const noexcept { return x_max_; }
    double y_max() const noexcept { return y_max_; }
    std::int32_t rows() const noexcept { return n_r_; }
    std::int32_t cols() const noexcept { return n_c_; }
    double cell_width() const noexcept { return cell_w_; }
    double cell_height() const noexcept { return cell_h_; }
    std::int32_t cell_count() const noexcept { return n_r_ * n_c_; }

    bool contains(double x, double y) const noexcept {
        return x >= x_min_ && x <= x_max_ && y >= y_min_ && y <= y_max_;
    }

    /// Map a coordinate to its region symbol. Indices come from the
    /// ceiling rule; points exactly on the south/west edge (where the
    /// ceiling yields 0) clamp to index 1, so the map is total on the
    /// closed bounding box.
    symbol coord_to_symbol(double x, double y) const {
        if (!contains(x, y))
            throw error("out_of_bounds", "coordinate outside grid bounding box");
        std::int32_t ix = clamp_index(std::ceil((x - x_min_) / cell_w_), n_c_);
        std::int32_t iy = clamp_index(std::ceil((y - y_min_) / cell_h_), n_r_);
        return (iy - 1) * n_c_ + ix;
    }

    /// Inverse of coord_to_symbol: the row/column and bounding box of an
    /// ordinary symbol. Sentinels are not regions.
    grid_cell symbol_to_cell(symbol z) const {
        if (!is_ordinary(z) || z > cell_count())
            throw error("not_a_region", "symbol is not an ordinary region id");
        grid_cell c;
        c.row = (z + n_c_ - 1) / n_c_; // ceil(z / n_c) in integers
        c.col = z - (c.row - 1) * n_c_;
        c.box.x_min = x_min_ + (c.col - 1) * cell_w_;
        c.box.x_max = x_min_ + c.col * cell_w_;
        c.box.y_min = y_min_ + (c.row - 1) * cell_h_;
        c.box.y_max = y_min_ + c.row * cell_h_;
        return c;
    }

    /// Center coordinate of an ordinary symbol's cell.
    void cell_center(symbol z, double& x, double& y) const {
        grid_cell c = symbol_to_cell(z);
        x = 0.5 * (c.box.x_min + c.box.x_max);
        y = 0.5 * (c.box.y_min + c.box.y_max);
    }

    friend bool operator==(const grid& a, const grid& b) noexcept {
        return a.x_min_ == b.x_min_ && a.y_min_ == b.y_min_ &&
               a.x_max_ == b.x_max_ && a.y_max_ == b.y_max_ &&
               a.n_r_ == b.n_r_ && a.n_c_ == b.n_c_;
    }

private:
    static std::int32_t clamp_index(double raw, std::int32_t hi) noexcept {
        if (raw < 1.0) return 1;
        if (raw > static_cast<double>(hi)) return hi;
        return static_cast<std::int32_t>(raw);
    }

    double x_min_, y_min_, x_max_, y_max_;
    std::int32_t n_r_, n_c_;
    double cell_w_, cell_h_;
};

inline grid make_grid(double x_min, double y_min, double x_max, double y_max,
                      std::int32_t n_r, std::int32_t n_c) {
    return grid(x_min, y_min, x_max, y_max, n_r, n_c);
}

} // namespace triptrie
