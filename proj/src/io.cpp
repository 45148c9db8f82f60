#include "hfscat/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hfscat {

namespace {

class LittleEndianWriter {
 public:
  explicit LittleEndianWriter(std::ostream& out) : out_(out) {}
  void u32(std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(b.data(), 4);
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(b.data(), 8);
  }
  void bytes(const std::string& s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

 private:
  std::ostream& out_;
};

class LittleEndianReader {
 public:
  explicit LittleEndianReader(std::istream& in) : in_(in) {}
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  std::uint32_t u32() {
    std::array<unsigned char, 4> b;
    read(b.data(), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() {
    std::array<unsigned char, 8> b;
    read(b.data(), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    read(reinterpret_cast<unsigned char*>(s.data()), n);
    return s;
  }

 private:
  void read(unsigned char* dst, std::size_t n) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw std::runtime_error("checkpoint: truncated file");
  }
  std::istream& in_;
};

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const nlohmann::ordered_json& header,
                      const std::vector<OrbitalEnsemble>& snapshots) {
  std::ofstream out = open_out(path, true);
  LittleEndianWriter w(out);
  w.bytes("HFSC");
  w.u32(checkpoint_version);
  const std::string h = header.dump();
  w.u32(static_cast<std::uint32_t>(h.size()));
  w.bytes(h);
  for (const auto& s : snapshots) {
    w.f64(s.time());
    w.u32(static_cast<std::uint32_t>(s.rank()));
    for (double a : s.weights()) w.f64(a);
    for (const auto& u : s.orbitals()) {
      for (const auto& z : u.values()) {
        w.f64(z.real());
        w.f64(z.imag());
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  LittleEndianReader r(in);
  if (r.bytes(4) != "HFSC") throw std::runtime_error("checkpoint: bad magic in " + path.string());
  const std::uint32_t version = r.u32();
  if (version != checkpoint_version) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint cp;
  cp.header = nlohmann::ordered_json::parse(r.bytes(r.u32()));
  const std::size_t n = cp.header.at("grid").at("n").get<std::size_t>();
  const GridPtr grid = Grid::make(n, cp.header.at("grid").at("L").get<double>());
  while (!r.at_end()) {
    const double t = r.f64();
    const std::uint32_t k = r.u32();
    std::vector<double> weights(k);
    for (auto& a : weights) a = r.f64();
    std::vector<ComplexField> orbitals;
    for (std::uint32_t m = 0; m < k; ++m) {
      std::vector<cplx> v(n);
      for (auto& z : v) {
        const double re = r.f64();
        z = {re, r.f64()};
      }
      orbitals.emplace_back(grid, std::move(v));
    }
    cp.snapshots.emplace_back(std::move(weights), std::move(orbitals), t);
  }
  return cp;
}

nlohmann::ordered_json to_json(const DiagnosticsRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  j["sup_norm"] = r.sup_norm;
  j["l2_mass"] = r.l2_mass;
  j["h10_x"] = r.h10_x;
  j["h01_z"] = r.h01_z;
  j["gram_drift"] = r.gram_drift;
  j["boundary_mass_fraction"] = r.boundary_mass_fraction;
  return j;
}

void write_diagnostics_ndjson(const std::filesystem::path& path, const nlohmann::ordered_json& header,
                              const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out = open_out(path);
  out << nlohmann::ordered_json{{"header", header}}.dump() << '\n';
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_diagnostics_csv(const std::filesystem::path& path, const nlohmann::ordered_json& header,
                           const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out = open_out(path);
  for (const auto& [k, v] : header.items()) out << "# " << k << ": " << v.dump() << '\n';
  out << "t,sup_norm,l2_mass,h10_x,h01_z,gram_drift,boundary_mass_fraction\n";
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.sup_norm) << ',' << format_double(r.l2_mass) << ','
        << format_double(r.h10_x) << ',' << format_double(r.h01_z) << ',' << format_double(r.gram_drift) << ','
        << format_double(r.boundary_mass_fraction) << '\n';
  }
}

std::vector<nlohmann::ordered_json> read_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<nlohmann::ordered_json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::ordered_json::parse(line));
  }
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::ordered_json::parse(in);
}

}  // namespace hfscat
