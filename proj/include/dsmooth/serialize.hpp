#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dsmooth/field.hpp"

namespace dsmooth {

using json = nlohmann::json;

inline json grid_to_json(const SpectralGrid& g)
{
    return json{{"dim", g.dim}, {"L", g.box_length}, {"n", g.n}, {"dealias_fraction", g.dealias_fraction}};
}

inline SpectralGrid grid_from_json(const json& j)
{
    return SpectralGrid(j.at("dim").get<int>(), j.at("L").get<double>(), j.at("n").get<int>(),
                        j.at("dealias_fraction").get<double>());
}

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV spectrum: a "# " line with the grid header (plus any extra metadata),
// a column line, then one row per lattice point in storage order.
inline void write_field_csv(std::ostream& os, const FourierField& f, const json& meta = json::object())
{
    json head = meta;
    head["grid"] = grid_to_json(f.grid);
    head["real_symmetric"] = f.real_symmetric;
    os << "# " << head.dump() << "\n";
    os << (f.grid.dim == 1 ? "xi,re,im\n" : "xi_x,xi_y,re,im\n");
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto xi = f.grid.xi(i);
        os << format_double(xi[0]) << ',';
        if (f.grid.dim == 2) os << format_double(xi[1]) << ',';
        os << format_double(f[i].real()) << ',' << format_double(f[i].imag()) << '\n';
    }
}

inline FourierField read_field_csv(std::istream& is, json* meta = nullptr)
{
    std::string line;
    require(bool(std::getline(is, line)) && line.rfind("# ", 0) == 0, "missing CSV field header");
    json head = json::parse(line.substr(2));
    FourierField f(grid_from_json(head.at("grid")), head.value("real_symmetric", false));
    std::getline(is, line);
    const int cols = f.grid.dim + 2;
    for (std::size_t i = 0; i < f.size(); ++i) {
        require(bool(std::getline(is, line)), "truncated CSV field");
        std::stringstream ss(line);
        double v[4] = {0, 0, 0, 0};
        std::string cell;
        for (int c = 0; c < cols; ++c) {
            require(bool(std::getline(ss, cell, ',')), "malformed CSV row");
            v[c] = std::stod(cell);
        }
        f[i] = cplx(v[cols - 2], v[cols - 1]);
    }
    if (meta) *meta = head;
    return f;
}

// Binary spectrum: magic, u32 header length, JSON header, then rows of
// little-endian doubles (xi components, re, im).
inline void write_field_binary(std::ostream& os, const FourierField& f, const json& meta = json::object())
{
    json head = meta;
    head["grid"] = grid_to_json(f.grid);
    head["real_symmetric"] = f.real_symmetric;
    const std::string h = head.dump();
    const std::uint32_t len = std::uint32_t(h.size());
    os.write("DSMF", 4);
    os.write(reinterpret_cast<const char*>(&len), sizeof len);
    os.write(h.data(), std::streamsize(h.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto xi = f.grid.xi(i);
        double row[4] = {xi[0], xi[1], f[i].real(), f[i].imag()};
        if (f.grid.dim == 1) {
            double r1[3] = {row[0], row[2], row[3]};
            os.write(reinterpret_cast<const char*>(r1), sizeof r1);
        } else {
            os.write(reinterpret_cast<const char*>(row), sizeof row);
        }
    }
}

inline FourierField read_field_binary(std::istream& is, json* meta = nullptr)
{
    char magic[4];
    is.read(magic, 4);
    require(is.good() && std::string(magic, 4) == "DSMF", "not a binary field file");
    std::uint32_t len = 0;
    is.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string h(len, '\0');
    is.read(h.data(), len);
    json head = json::parse(h);
    FourierField f(grid_from_json(head.at("grid")), head.value("real_symmetric", false));
    const int cols = f.grid.dim + 2;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double row[4];
        is.read(reinterpret_cast<char*>(row), std::streamsize(sizeof(double) * cols));
        require(is.good(), "truncated binary field");
        f[i] = cplx(row[cols - 2], row[cols - 1]);
    }
    if (meta) *meta = head;
    return f;
}

} // namespace dsmooth
