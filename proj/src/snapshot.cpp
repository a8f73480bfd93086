#include "chemflux/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chemflux {

namespace {

std::size_t expected_count(const GridSpec& g, const std::string& kind) {
    if (kind == "cell") return g.cell_count();
    int axis = -1;
    if (kind == "facex") axis = 0;
    else if (kind == "facey") axis = 1;
    else if (kind == "facez") axis = 2;
    if (axis < 0 || axis >= g.dim)
        throw std::runtime_error("snapshot: unknown or out-of-range kind '" + kind + "'");
    return VectorField::comp_count(g, axis);
}

void write_le_doubles(std::ostream& os, const std::vector<double>& v) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * 8));
    } else {
        for (double d : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &d, 8);
            char buf[8];
            for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
            os.write(buf, 8);
        }
    }
}

void read_le_doubles(std::istream& is, std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
        if (static_cast<std::size_t>(is.gcount()) != v.size() * 8)
            throw std::runtime_error("snapshot: truncated payload");
    } else {
        for (double& d : v) {
            char buf[8];
            is.read(buf, 8);
            if (is.gcount() != 8) throw std::runtime_error("snapshot: truncated payload");
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[b])) << (8 * b);
            std::memcpy(&d, &bits, 8);
        }
    }
}

} // namespace

std::string kind_for_axis(int axis) {
    switch (axis) {
        case 0: return "facex";
        case 1: return "facey";
        case 2: return "facez";
    }
    throw std::invalid_argument("bad face axis");
}

void write_snapshot(std::ostream& os, const GridSpec& grid, const std::string& kind,
                    const std::vector<double>& payload) {
    if (payload.size() != expected_count(grid, kind))
        throw std::runtime_error("snapshot: payload size does not match grid/kind");
    std::ostringstream header;
    header << "CFSNAP1 " << grid.dim;
    for (int a = 0; a < grid.dim; ++a) header << ' ' << grid.cells[a];
    char buf[64];
    for (int a = 0; a < grid.dim; ++a) {
        std::snprintf(buf, sizeof buf, "%.17g", grid.extent[a]);
        header << ' ' << buf;
    }
    header << ' ' << kind << '\n';
    os << header.str();
    write_le_doubles(os, payload);
}

Snapshot read_snapshot(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("snapshot: missing header");
    std::istringstream hs(line);
    std::string magic;
    hs >> magic;
    if (magic != "CFSNAP1")
        throw std::runtime_error("snapshot: bad magic '" + magic + "' (expected CFSNAP1)");
    int dim = 0;
    hs >> dim;
    if (dim != 2 && dim != 3) throw std::runtime_error("snapshot: bad dim in header");
    std::vector<int> cells(dim);
    std::vector<double> extent(dim);
    for (int a = 0; a < dim; ++a)
        if (!(hs >> cells[a])) throw std::runtime_error("snapshot: bad cell counts");
    for (int a = 0; a < dim; ++a)
        if (!(hs >> extent[a])) throw std::runtime_error("snapshot: bad extents");
    Snapshot s;
    hs >> s.kind;
    if (s.kind.empty()) throw std::runtime_error("snapshot: missing kind");
    s.grid = make_grid(dim, extent, cells);
    s.payload.resize(expected_count(s.grid, s.kind));
    read_le_doubles(is, s.payload);
    return s;
}

void write_snapshot_file(const std::string& path, const GridSpec& grid, const std::string& kind,
                         const std::vector<double>& payload) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_snapshot(os, grid, kind, payload);
    if (!os) throw std::runtime_error("write failed for " + path);
}

Snapshot read_snapshot_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_snapshot(is);
}

} // namespace chemflux
