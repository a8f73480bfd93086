#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace chemflux {

/// Axis-aligned box grid. Scalars live at cell centers, velocity components
/// on the faces normal to their axis (MAC staggering).
struct GridSpec {
    int dim = 2;                          // 2 or 3
    std::array<double, 3> extent{1, 1, 1}; // L_i, physical lengths
    std::array<int, 3> cells{0, 0, 1};     // m_i; cells[2] == 1 in 2D
    std::array<double, 3> spacing{0, 0, 0};

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[a];
        return v;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= extent[a];
        return v;
    }
    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(cells[a]);
        return n;
    }
    // Loop bounds usable for both 2D and 3D: axis 2 collapses to a single layer in 2D.
    int nx() const { return cells[0]; }
    int ny() const { return cells[1]; }
    int nz() const { return dim == 3 ? cells[2] : 1; }

    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * ny() + j) * nz() + k;
    }
    // Cell-center coordinate along an axis.
    double center(int axis, int idx) const { return (idx + 0.5) * spacing[axis]; }
    // Face coordinate along an axis (face idx in [0, m_axis]).
    double face(int axis, int idx) const { return idx * spacing[axis]; }

    bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int dim, const std::vector<double>& extents, const std::vector<int>& cells);

/// Cell-centered scalar samples, row-major with the last axis fastest.
struct ScalarField {
    GridSpec grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), v(g.cell_count(), fill) {}

    double& operator()(int i, int j, int k = 0) { return v[grid.cell_index(i, j, k)]; }
    double operator()(int i, int j, int k = 0) const { return v[grid.cell_index(i, j, k)]; }
    std::size_t size() const { return v.size(); }
};

/// MAC-staggered vector field: component a has cells[a]+1 samples along its
/// own axis and cells[b] along every other axis b.
struct VectorField {
    GridSpec grid;
    std::array<std::vector<double>, 3> comp;

    VectorField() = default;
    explicit VectorField(const GridSpec& g, double fill = 0.0) : grid(g) {
        for (int a = 0; a < g.dim; ++a) comp[a].assign(comp_count(g, a), fill);
    }

    static std::size_t comp_count(const GridSpec& g, int axis) {
        std::size_t n = 1;
        for (int a = 0; a < g.dim; ++a)
            n *= static_cast<std::size_t>(g.cells[a] + (a == axis ? 1 : 0));
        return n;
    }
    // Extent of component `axis` along direction d.
    int comp_dim(int axis, int d) const {
        int m = (d < grid.dim) ? grid.cells[d] : 1;
        return d == axis ? m + 1 : m;
    }
    std::size_t face_index(int axis, int i, int j, int k = 0) const {
        return (static_cast<std::size_t>(i) * comp_dim(axis, 1) + j) * comp_dim(axis, 2) + k;
    }
    double& at(int axis, int i, int j, int k = 0) { return comp[axis][face_index(axis, i, j, k)]; }
    double at(int axis, int i, int j, int k = 0) const { return comp[axis][face_index(axis, i, j, k)]; }

    /// Force every boundary face of each component to exactly zero (no-slip u).
    void zero_boundary_faces();
};

/// First-eigenvalue constants of the domain: Neumann Laplacian (continuum and
/// discrete) and, once estimated, the Stokes operator.
struct SpectralInfo {
    double lambda1_continuum = 0.0;
    double lambda1_discrete = 0.0;
    double lambda1_stokes = 0.0;
    bool stokes_estimated = false;
};

} // namespace chemflux
