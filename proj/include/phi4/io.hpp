#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phi4/path.hpp"

namespace phi4::io {

/// Binary field snapshot.  Layout: magic "PHI4FLD1", little-endian u32 d,
/// u32 n, u8 representation flag (0 = physical, 1 = spectral), then 64-bit
/// doubles: row-major values, or interleaved re/im over the full
/// (Hermitian-redundant) cube.
void write_field(const std::filesystem::path& file, const Field& f);
Field read_field(const std::filesystem::path& file);

/// Paths serialize as a directory of numbered snapshots plus manifest.json
/// carrying {t0, t1, dt, grid{d,n}, frames}.
void write_path(const std::filesystem::path& dir, const Path& p,
                bool spectral = false);
Path read_path(const std::filesystem::path& dir);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_g17(double x);

/// Minimal CSV writer; numeric cells printed with 17 significant digits.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
};

/// One-JSON-object-per-line writer for trajectory statistics.
class NdjsonWriter {
  public:
    explicit NdjsonWriter(const std::filesystem::path& file);
    void record(const std::string& json_line);

  private:
    std::ofstream out_;
};

}  // namespace phi4::io
