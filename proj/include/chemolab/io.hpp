#pragma once

#include "chemolab/diagnostics.hpp"
#include "chemolab/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemolab {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Raw little-endian float64 cell array, x index fastest.
Fieldd read_field(const std::filesystem::path& path, const Gridd& grid);
void write_field(const std::filesystem::path& path, const Fieldd& f);

/// Writes <prefix>_u.bin, <prefix>_v.bin, <prefix>_w.bin and a <prefix>.json
/// sidecar with grid metadata and time. Returns the file names written.
std::vector<std::string> write_snapshot(const std::filesystem::path& dir, const std::string& prefix,
                                        const Stated& state, const Gridd& grid);

struct Snapshot {
  Gridd grid;
  Stated state;
};

/// Loads a snapshot from its JSON sidecar.
Snapshot read_snapshot(const std::filesystem::path& sidecar);

const std::vector<std::string>& diagnostics_columns();
void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& series);
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& series);

std::string sha256_hex(std::string_view data);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace chemolab
