#include "chemolab/io.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace chemolab {

namespace {

std::uint64_t to_little_endian(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw IoError("float formatting failed");
  return std::string(buf.data(), end);
}

Fieldd read_field(const std::filesystem::path& path, const Gridd& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto expected = static_cast<std::size_t>(grid.size()) * 8;
  if (bytes.size() != expected)
    throw IoError(path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                  std::to_string(bytes.size()));
  Fieldd f(grid.size());
  for (std::ptrdiff_t c = 0; c < grid.size(); ++c) {
    std::uint64_t raw;
    std::memcpy(&raw, bytes.data() + 8 * c, 8);
    f[c] = std::bit_cast<double>(to_little_endian(raw));
  }
  return f;
}

void write_field(const std::filesystem::path& path, const Fieldd& f) {
  auto out = open_out(path, std::ios::binary);
  for (std::ptrdiff_t c = 0; c < f.size(); ++c) {
    const std::uint64_t raw = to_little_endian(std::bit_cast<std::uint64_t>(f[c]));
    out.write(reinterpret_cast<const char*>(&raw), 8);
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> write_snapshot(const std::filesystem::path& dir, const std::string& prefix,
                                        const Stated& state, const Gridd& grid) {
  const std::string fu = prefix + "_u.bin", fv = prefix + "_v.bin", fw = prefix + "_w.bin";
  write_field(dir / fu, state.u);
  write_field(dir / fv, state.v);
  write_field(dir / fw, state.w);

  nlohmann::json lengths = nlohmann::json::array(), cells = nlohmann::json::array();
  for (int a = 0; a < grid.dim(); ++a) {
    lengths.push_back(grid.length(a));
    cells.push_back(grid.cells(a));
  }
  const nlohmann::json meta = {
      {"format", "float64-le"},
      {"layout", "x-fastest"},
      {"t", state.t},
      {"grid", {{"dim", grid.dim()}, {"lengths", lengths}, {"cells", cells}}},
      {"fields", {{"u", fu}, {"v", fv}, {"w", fw}}},
  };
  const std::string side = prefix + ".json";
  open_out(dir / side) << meta.dump(2) << '\n';
  return {fu, fv, fw, side};
}

Snapshot read_snapshot(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw IoError("cannot read " + sidecar.string());
  nlohmann::json meta;
  try {
    in >> meta;
    const auto& g = meta.at("grid");
    const int dim = g.at("dim").get<int>();
    std::array<double, 3> lengths{1, 1, 1};
    std::array<int, 3> cells{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
      lengths[a] = g.at("lengths").at(a).get<double>();
      cells[a] = g.at("cells").at(a).get<int>();
    }
    Snapshot s{Gridd::make(dim, lengths, cells), {}};
    const auto dir = sidecar.parent_path();
    s.state.t = meta.at("t").get<double>();
    s.state.u = read_field(dir / meta.at("fields").at("u").get<std::string>(), s.grid);
    s.state.v = read_field(dir / meta.at("fields").at("v").get<std::string>(), s.grid);
    s.state.w = read_field(dir / meta.at("fields").at("w").get<std::string>(), s.grid);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(sidecar.string() + ": malformed snapshot sidecar: " + e.what());
  }
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "t",           "mass_u",      "mass_v",      "linf_u",          "linf_v",
      "linf_w",      "dev_u",       "dev_v",       "lyapunov",        "dirichlet_u",
      "dirichlet_v", "dirichlet_w", "cum_dirichlet_u", "cum_dirichlet_v", "cum_dirichlet_w"};
  return cols;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& series) {
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : series) {
    os << format_double(r.t) << ',' << format_double(r.mass_u) << ',' << format_double(r.mass_v) << ','
       << format_double(r.linf_u) << ',' << format_double(r.linf_v) << ',' << format_double(r.linf_w) << ','
       << format_double(r.dev_u) << ',' << format_double(r.dev_v) << ','
       << (r.lyapunov ? format_double(*r.lyapunov) : std::string()) << ',' << format_double(r.dirichlet_u)
       << ',' << format_double(r.dirichlet_v) << ',' << format_double(r.dirichlet_w) << ','
       << format_double(r.cum_dirichlet_u) << ',' << format_double(r.cum_dirichlet_v) << ','
       << format_double(r.cum_dirichlet_w) << '\n';
  }
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& series) {
  auto out = open_out(path, std::ios::binary);
  write_diagnostics_csv(out, series);
  if (!out) throw IoError("write failed for " + path.string());
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace chemolab
