#ifndef SICA_GRID_HPP
#define SICA_GRID_HPP

#include <span>
#include <vector>

namespace sica {

/// Node-centered rectangular lattice on [0, Lx] x [0, Ly], boundary nodes
/// included. Node (i, j) sits at (i*dx, j*dy).
struct GridSpec {
    int nx = 64;
    int ny = 64;
    double lx = 10.0;  // km
    double ly = 10.0;  // km

    double dx() const { return lx / (nx - 1); }
    double dy() const { return ly / (ny - 1); }
    double area() const { return lx * ly; }
    int node_count() const { return nx * ny; }

    double x(int i) const { return i * dx(); }
    double y(int j) const { return j * dy(); }

    /// nx, ny >= 3 and positive side lengths; throws ValidationError.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

/// Scalar lattice function, stored row-major: value (i, j) at index i*ny + j.
class Field {
public:
    Field() = default;
    Field(int nx, int ny, double fill = 0.0)
        : nx_(nx), ny_(ny), v_(static_cast<std::size_t>(nx) * ny, fill) {}

    static Field on(const GridSpec& g, double fill = 0.0) {
        return Field(g.nx, g.ny, fill);
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * ny_ + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * ny_ + j]; }

    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }

    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }

    bool conforms(const GridSpec& g) const { return nx_ == g.nx && ny_ == g.ny; }

    void fill(double value) { v_.assign(v_.size(), value); }

    bool operator==(const Field&) const = default;

private:
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> v_;
};

/// Five-point Laplacian with zero-flux (homogeneous Neumann) boundaries.
/// Boundary nodes use ghost-node reflection: the ghost value equals the
/// interior mirror value, so the discrete operator conserves mass exactly
/// under trapezoidal quadrature and is self-adjoint in the same inner
/// product. Units: f-units per km^2.
///
/// Throws ValidationError if `f` does not conform to `g`.
void laplacian_neumann(const Field& f, const GridSpec& g, Field& out);
Field laplacian_neumann(const Field& f, const GridSpec& g);

/// Composite trapezoidal quadrature of `f` over the rectangle (f-units*km^2).
double integrate_field(const Field& f, const GridSpec& g);

/// integrate_field(f)/area: the quadrature mean of the field.
double field_mean(const Field& f, const GridSpec& g);

/// Trapezoid-weighted inner product sum_ij w_ij * a_ij * b_ij.
double weighted_inner(const Field& a, const Field& b, const GridSpec& g);

/// Trapezoid weight of node (i, j): dx*dy, halved once per boundary side.
inline double quad_weight(int i, int j, const GridSpec& g) {
    double w = g.dx() * g.dy();
    if (i == 0 || i == g.nx - 1) w *= 0.5;
    if (j == 0 || j == g.ny - 1) w *= 0.5;
    return w;
}

}  // namespace sica

#endif  // SICA_GRID_HPP
