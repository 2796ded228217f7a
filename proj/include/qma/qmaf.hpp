#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "qma/grid.hpp"

namespace qma::qmaf {

// File layout: "QMAF", version byte 0x01, u32 little-endian header length,
// UTF-8 JSON header, then little-endian f64 payload. Scalar payload is one
// value per point; hermitian payload per point is n diagonal reals followed by
// (w, x, y, z) of each upper entry (i<j) in lexicographic order.

inline constexpr std::uint8_t kVersion = 0x01;

using Field = std::variant<ScalarField, HermitianField>;

std::vector<std::uint8_t> encode(const ScalarField& f);
std::vector<std::uint8_t> encode(const HermitianField& f);
Field decode(const std::vector<std::uint8_t>& bytes);

void write(const std::filesystem::path& path, const ScalarField& f);
void write(const std::filesystem::path& path, const HermitianField& f);
Field read(const std::filesystem::path& path);
ScalarField read_scalar(const std::filesystem::path& path);
HermitianField read_hermitian(const std::filesystem::path& path);

/// The JSON header text of a file, without decoding the payload.
std::string read_header(const std::filesystem::path& path);

}  // namespace qma::qmaf
