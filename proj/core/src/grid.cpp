#include "sica/grid.hpp"

#include <cmath>
#include <string>

#include "sica/errors.hpp"

namespace sica {

void GridSpec::validate() const {
    if (nx < 3) throw ValidationError("nx", "node count must be >= 3");
    if (ny < 3) throw ValidationError("ny", "node count must be >= 3");
    if (!(lx > 0.0) || !std::isfinite(lx))
        throw ValidationError("Lx", "domain length must be > 0");
    if (!(ly > 0.0) || !std::isfinite(ly))
        throw ValidationError("Ly", "domain length must be > 0");
}

namespace {

void require_conforming(const Field& f, const GridSpec& g, const char* what) {
    if (!f.conforms(g))
        throw ValidationError(what, "field is " + std::to_string(f.nx()) + "x" +
                                        std::to_string(f.ny()) + ", grid is " +
                                        std::to_string(g.nx) + "x" +
                                        std::to_string(g.ny));
}

}  // namespace

void laplacian_neumann(const Field& f, const GridSpec& g, Field& out) {
    require_conforming(f, g, "laplacian input");
    if (!out.conforms(g)) out = Field::on(g);

    const int nx = g.nx, ny = g.ny;
    const double inv_dx2 = 1.0 / (g.dx() * g.dx());
    const double inv_dy2 = 1.0 / (g.dy() * g.dy());

    for (int i = 0; i < nx; ++i) {
        // Ghost-node reflection: the mirror interior node stands in for the
        // out-of-domain neighbor, enforcing zero normal flux.
        const int im = (i == 0) ? 1 : i - 1;
        const int ip = (i == nx - 1) ? nx - 2 : i + 1;
        for (int j = 0; j < ny; ++j) {
            const int jm = (j == 0) ? 1 : j - 1;
            const int jp = (j == ny - 1) ? ny - 2 : j + 1;
            const double c = f(i, j);
            out(i, j) = (f(im, j) + f(ip, j) - 2.0 * c) * inv_dx2 +
                        (f(i, jm) + f(i, jp) - 2.0 * c) * inv_dy2;
        }
    }
}

Field laplacian_neumann(const Field& f, const GridSpec& g) {
    Field out = Field::on(g);
    laplacian_neumann(f, g, out);
    return out;
}

double integrate_field(const Field& f, const GridSpec& g) {
    require_conforming(f, g, "integrand");
    const int nx = g.nx, ny = g.ny;
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        double row = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            row += wy * f(i, j);
        }
        acc += wx * row;
    }
    return acc * g.dx() * g.dy();
}

double field_mean(const Field& f, const GridSpec& g) {
    return integrate_field(f, g) / g.area();
}

double weighted_inner(const Field& a, const Field& b, const GridSpec& g) {
    require_conforming(a, g, "inner product lhs");
    require_conforming(b, g, "inner product rhs");
    const int nx = g.nx, ny = g.ny;
    double acc = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double wx = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        double row = 0.0;
        for (int j = 0; j < ny; ++j) {
            const double wy = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            row += wy * a(i, j) * b(i, j);
        }
        acc += wx * row;
    }
    return acc * g.dx() * g.dy();
}

}  // namespace sica
