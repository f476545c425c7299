#include <catch2/catch_amalgamated.hpp>

#include "triptrie/geo_grid.hpp"
#include "triptrie/synthetic.hpp"

using namespace triptrie;

TEST_CASE("make_grid derives cell sizes") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    CHECK(g.cell_width() == 1.0);
    CHECK(g.cell_height() == 1.0);
    CHECK(g.cell_count() == 24);

    grid unit = make_grid(0, 0, 1, 1, 1, 1);
    CHECK(unit.cell_width() == 1.0);
    CHECK(unit.cell_height() == 1.0);
    CHECK(unit.cell_count() == 1);
}

TEST_CASE("make_grid rejects bad parameters") {
    CHECK_THROWS_AS(make_grid(0, 0, 6, 4, 0, 6), error);
    CHECK_THROWS_AS(make_grid(0, 0, 6, 4, 4, 0), error);
    CHECK_THROWS_AS(make_grid(0, 0, 0, 4, 4, 6), error); // x_max == x_min
    CHECK_THROWS_AS(make_grid(0, 5, 6, 4, 4, 6), error); // y_max < y_min
}

TEST_CASE("coord_to_symbol follows the ceiling formula") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    // i_x = ceil(2.5/1) = 3, i_y = ceil(3.5/1) = 4, id = (4-1)*6 + 3 = 21
    CHECK(g.coord_to_symbol(2.5, 3.5) == 21);
    CHECK(g.coord_to_symbol(0.5, 0.5) == 1);
    CHECK(g.coord_to_symbol(6.0, 4.0) == 24); // far corner
}

TEST_CASE("coord_to_symbol clamps the south-west edge into cell 1") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    CHECK(g.coord_to_symbol(0.0, 0.0) == 1);
    CHECK(g.coord_to_symbol(0.0, 3.5) == 19); // x clamps, y does not
}

TEST_CASE("coord_to_symbol rejects out-of-bounds points") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    CHECK_THROWS_AS(g.coord_to_symbol(7, 2), error);
    CHECK_THROWS_AS(g.coord_to_symbol(2, -0.1), error);
    try {
        g.coord_to_symbol(7, 2);
    } catch (const error& e) {
        CHECK(e.code() == "out_of_bounds");
    }
}

TEST_CASE("symbol_to_cell inverts the index formula") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    grid_cell c = g.symbol_to_cell(21);
    CHECK(c.row == 4);
    CHECK(c.col == 3);
    CHECK(c.box.x_min == 2.0);
    CHECK(c.box.y_min == 3.0);

    grid_cell first = g.symbol_to_cell(1);
    CHECK(first.row == 1);
    CHECK(first.col == 1);
}

TEST_CASE("symbol_to_cell rejects sentinels and unknown ids") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    CHECK_THROWS_AS(g.symbol_to_cell(root_symbol), error);
    CHECK_THROWS_AS(g.symbol_to_cell(null_pad), error);
    CHECK_THROWS_AS(g.symbol_to_cell(25), error);
}

TEST_CASE("cell centers round-trip through coord_to_symbol") {
    grid g = make_grid(-122.6, 37.2, -121.6, 38.2, 7, 13);
    for (symbol z = 1; z <= g.cell_count(); ++z) {
        double x, y;
        g.cell_center(z, x, y);
        CHECK(g.coord_to_symbol(x, y) == z);
    }
}

TEST_CASE("every in-bounds point maps to exactly one cell containing it") {
    grid g = make_grid(2.0, -1.0, 11.0, 4.0, 5, 9);
    det_rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        double x = 2.0 + 9.0 * (rng.below(1000000) / 1e6);
        double y = -1.0 + 5.0 * (rng.below(1000000) / 1e6);
        symbol z = g.coord_to_symbol(x, y);
        REQUIRE(is_ordinary(z));
        REQUIRE(z <= g.cell_count());
        grid_cell c = g.symbol_to_cell(z);
        CHECK(x >= c.box.x_min - 1e-9);
        CHECK(x <= c.box.x_max + 1e-9);
        CHECK(y >= c.box.y_min - 1e-9);
        CHECK(y <= c.box.y_max + 1e-9);
    }
}

TEST_CASE("indices are monotone in the coordinates") {
    grid g = make_grid(0, 0, 10, 10, 8, 8);
    det_rng rng(7);
    for (int i = 0; i < 500; ++i) {
        double x1 = 10.0 * (rng.below(1000000) / 1e6);
        double x2 = 10.0 * (rng.below(1000000) / 1e6);
        if (x1 > x2) std::swap(x1, x2);
        double y = 10.0 * (rng.below(1000000) / 1e6);
        CHECK(g.symbol_to_cell(g.coord_to_symbol(x1, y)).col <=
              g.symbol_to_cell(g.coord_to_symbol(x2, y)).col);
        CHECK(g.symbol_to_cell(g.coord_to_symbol(y, x1)).row <=
              g.symbol_to_cell(g.coord_to_symbol(y, x2)).row);
    }
}
