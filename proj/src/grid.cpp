#include "chemflux/grid.hpp"

#include <stdexcept>
#include <string>

namespace chemflux {

GridSpec make_grid(int dim, const std::vector<double>& extents, const std::vector<int>& cells) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("grid dim must be 2 or 3, got " + std::to_string(dim));
    if (extents.size() != static_cast<std::size_t>(dim) ||
        cells.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("grid needs exactly dim extents and dim cell counts");

    GridSpec g;
    g.dim = dim;
    g.cells = {1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        if (!(extents[a] > 0.0))
            throw std::invalid_argument("grid extent along axis " + std::to_string(a) +
                                        " must be positive, got " + std::to_string(extents[a]));
        if (cells[a] < 4)
            throw std::invalid_argument("grid needs at least 4 cells per axis, got " +
                                        std::to_string(cells[a]));
        g.extent[a] = extents[a];
        g.cells[a] = cells[a];
        g.spacing[a] = extents[a] / cells[a];
    }
    if (dim == 2) {
        g.extent[2] = 1.0;
        g.spacing[2] = 0.0;
    }
    return g;
}

void VectorField::zero_boundary_faces() {
    const int d = grid.dim;
    for (int a = 0; a < d; ++a) {
        const int n0 = comp_dim(a, 0), n1 = comp_dim(a, 1), n2 = comp_dim(a, 2);
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j)
                for (int k = 0; k < n2; ++k) {
                    const bool bnd = (a == 0 && (i == 0 || i == n0 - 1)) ||
                                     (a == 1 && (j == 0 || j == n1 - 1)) ||
                                     (a == 2 && (k == 0 || k == n2 - 1));
                    if (bnd) at(a, i, j, k) = 0.0;
                }
    }
}

} // namespace chemflux
