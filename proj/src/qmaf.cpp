#include "qma/qmaf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "qma/errors.hpp"

namespace qma::qmaf {
namespace {

static_assert(std::endian::native == std::endian::little,
              "QMAF writer assumes a little-endian host");

using ordered_json = nlohmann::ordered_json;

std::string header_json(const Grid& g, const char* kind) {
  ordered_json h;
  h["n"] = g.n();
  h["sizes"] = std::vector<int>(g.sizes().begin(), g.sizes().end());
  h["periods"] = std::vector<double>(g.periods().begin(), g.periods().end());
  h["kind"] = kind;
  h["dtype"] = "f64le";
  h["order"] = "row-major-axis0-slowest";
  return h.dump();
}

std::vector<std::uint8_t> pack(const std::string& header, std::span<const double> payload) {
  std::vector<std::uint8_t> out;
  out.reserve(9 + header.size() + 8 * payload.size());
  for (char c : {'Q', 'M', 'A', 'F'}) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kVersion);
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>((len >> (8 * b)) & 0xff));
  out.insert(out.end(), header.begin(), header.end());
  const std::size_t at = out.size();
  out.resize(at + 8 * payload.size());
  std::memcpy(out.data() + at, payload.data(), 8 * payload.size());
  return out;
}

struct Parsed {
  std::string header;
  std::size_t payload_offset = 0;
};

Parsed parse_prefix(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 9 || std::memcmp(bytes.data(), "QMAF", 4) != 0) {
    throw FormatError("not a QMAF file (bad magic)");
  }
  if (bytes[4] != kVersion) throw FormatError("unsupported QMAF version");
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(bytes[5 + b]) << (8 * b);
  if (bytes.size() < 9 + static_cast<std::size_t>(len)) throw FormatError("truncated QMAF header");
  Parsed p;
  p.header.assign(reinterpret_cast<const char*>(bytes.data() + 9), len);
  p.payload_offset = 9 + len;
  return p;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode(const ScalarField& f) {
  return pack(header_json(f.grid(), "scalar"), f.values());
}

std::vector<std::uint8_t> encode(const HermitianField& f) {
  return pack(header_json(f.grid(), "hermitian"), f.raw());
}

Field decode(const std::vector<std::uint8_t>& bytes) {
  const Parsed p = parse_prefix(bytes);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(p.header);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad QMAF header: ") + e.what());
  }
  if (h.value("dtype", "") != "f64le" || h.value("order", "") != "row-major-axis0-slowest") {
    throw FormatError("unsupported QMAF dtype or order");
  }
  Grid g(h.at("n").get<std::size_t>(), h.at("sizes").get<std::vector<int>>(),
         h.at("periods").get<std::vector<double>>());
  const std::string kind = h.at("kind").get<std::string>();
  const std::size_t payload = bytes.size() - p.payload_offset;
  const std::uint8_t* src = bytes.data() + p.payload_offset;
  if (kind == "scalar") {
    if (payload != 8 * g.points()) throw FormatError("QMAF scalar payload has wrong size");
    std::vector<double> v(g.points());
    std::memcpy(v.data(), src, payload);
    return ScalarField(g, std::move(v));
  }
  if (kind == "hermitian") {
    HermitianField f(g);
    if (payload != 8 * f.raw().size()) throw FormatError("QMAF hermitian payload has wrong size");
    std::memcpy(f.raw().data(), src, payload);
    return f;
  }
  throw FormatError("unknown QMAF kind '" + kind + "'");
}

void write(const std::filesystem::path& path, const ScalarField& f) { dump(path, encode(f)); }
void write(const std::filesystem::path& path, const HermitianField& f) { dump(path, encode(f)); }

Field read(const std::filesystem::path& path) { return decode(slurp(path)); }

ScalarField read_scalar(const std::filesystem::path& path) {
  Field f = read(path);
  if (auto* s = std::get_if<ScalarField>(&f)) return std::move(*s);
  throw FormatError(path.string() + " holds a hermitian field, expected scalar");
}

HermitianField read_hermitian(const std::filesystem::path& path) {
  Field f = read(path);
  if (auto* h = std::get_if<HermitianField>(&f)) return std::move(*h);
  throw FormatError(path.string() + " holds a scalar field, expected hermitian");
}

std::string read_header(const std::filesystem::path& path) {
  return parse_prefix(slurp(path)).header;
}

}  // namespace qma::qmaf
