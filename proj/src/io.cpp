#include "phi4/io.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "json.hpp"

namespace phi4::io {

namespace {
constexpr char kMagic[8] = {'P', 'H', 'I', '4', 'F', 'L', 'D', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace

void write_field(const std::filesystem::path& file, const Field& f) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + file.string());
    out.write(kMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(f.grid().d));
    put_u32(out, static_cast<std::uint32_t>(f.grid().n));
    const bool spectral = f.has_coeffs() && !f.has_values();
    const unsigned char flag = spectral ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&flag), 1);
    if (spectral) {
        const auto& c = f.coeffs();
        for (const auto& z : c) {
            const double re = z.real(), im = z.imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
    } else {
        const auto& v = f.values();
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * 8));
    }
}

Field read_field(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + file.string());
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("read_field: bad magic in " + file.string());
    const auto d = static_cast<int>(get_u32(in));
    const auto n = static_cast<int>(get_u32(in));
    unsigned char flag = 0;
    in.read(reinterpret_cast<char*>(&flag), 1);
    GridSpec g(d, n);
    if (flag == 1) {
        std::vector<cplx> c(g.size());
        for (auto& z : c) {
            double re, im;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            z = cplx(re, im);
        }
        if (!in) throw std::runtime_error("read_field: truncated " + file.string());
        return Field::from_coeffs(g, std::move(c));
    }
    std::vector<double> v(g.size());
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
    if (!in) throw std::runtime_error("read_field: truncated " + file.string());
    return Field::from_values(g, std::move(v));
}

void write_path(const std::filesystem::path& dir, const Path& p, bool spectral) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["t0"] = p.t0;
    manifest["t1"] = p.t1;
    manifest["dt"] = p.dt;
    manifest["grid"] = {{"d", p.grid.d}, {"n", p.grid.n}};
    manifest["frames"] = p.frames.size();
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    char name[32];
    for (std::size_t j = 0; j < p.frames.size(); ++j) {
        std::snprintf(name, sizeof(name), "frame_%06zu.fld", j);
        Field f = p.frames[j];
        if (spectral)
            f.ensure_spectral();
        else
            f.ensure_physical();
        // write in the requested representation only
        if (spectral) {
            Field g = Field::from_coeffs(f.grid(), f.coeffs());
            write_field(dir / name, g);
        } else {
            Field g = Field::from_values(f.grid(), f.values());
            write_field(dir / name, g);
        }
    }
}

Path read_path(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw std::runtime_error("read_path: missing manifest in " + dir.string());
    nlohmann::json manifest = nlohmann::json::parse(mf);
    Path p;
    p.t0 = manifest.at("t0").get<double>();
    p.t1 = manifest.at("t1").get<double>();
    p.dt = manifest.at("dt").get<double>();
    p.grid = GridSpec(manifest.at("grid").at("d").get<int>(),
                      manifest.at("grid").at("n").get<int>());
    const auto n_frames = manifest.at("frames").get<std::size_t>();
    char name[32];
    for (std::size_t j = 0; j < n_frames; ++j) {
        std::snprintf(name, sizeof(name), "frame_%06zu.fld", j);
        p.frames.push_back(read_field(dir / name));
    }
    p.validate();
    return p;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header)
    : out_(file) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + file.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << format_g17(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

NdjsonWriter::NdjsonWriter(const std::filesystem::path& file) : out_(file) {
    if (!out_) throw std::runtime_error("NdjsonWriter: cannot open " + file.string());
}

void NdjsonWriter::record(const std::string& json_line) { out_ << json_line << "\n"; }

}  // namespace phi4::io
