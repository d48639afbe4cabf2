#pragma once

// Days between consecutive failures of two sugarcane-harvester components
// (pricker and transmission) on two machines, January 2015 - August 2017.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfit/sample.hpp"

namespace wfit {

enum class DatasetId { PrickerA, PrickerB, TransmissionA, TransmissionB };

inline constexpr std::array<DatasetId, 4> kAllDatasets{
    DatasetId::PrickerA, DatasetId::PrickerB, DatasetId::TransmissionA, DatasetId::TransmissionB};

namespace detail {

inline constexpr std::array<double, 48> kPrickerA{
    1,  1,  1,  1,  1,  1,  1,  1,  2,  2,  2,  2,  2,  3,  3,  3,  3,  3,  4,  4,  4,  5,  5,  5,
    6,  6,  7,  8,  9,  11, 11, 12, 14, 16, 18, 18, 18, 22, 22, 23, 29, 32, 34, 38, 41, 46, 53, 53};

inline constexpr std::array<double, 59> kPrickerB{
    1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 3, 3, 3, 3, 3,
    3, 4, 4, 5, 5, 5, 5, 5, 5, 5, 6, 7, 7, 8, 8, 8, 8, 8, 9, 9,
    11, 11, 11, 11, 11, 11, 12, 13, 14, 16, 16, 21, 23, 24, 27, 28, 38, 43, 44};

inline constexpr std::array<double, 53> kTransmissionA{
    1, 1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  1,  2,  2,  2,  3,  3,  3,  3,  4,  5,  6,  6,  6, 6, 7, 7,
    8, 8,  8,  11, 11, 12, 13, 13, 13, 14, 15, 16, 17, 18, 18, 19, 19, 21, 22, 23, 29, 31, 32, 34, 44, 52};

inline constexpr std::array<double, 25> kTransmissionB{
    1, 2, 3, 3, 4, 5, 6, 6, 7, 9, 11, 12, 12, 18, 19, 21, 23, 28, 31, 31, 35, 37, 39, 46, 61};

}  // namespace detail

inline std::string_view dataset_name(DatasetId id) {
  switch (id) {
    case DatasetId::PrickerA: return "pricker_a";
    case DatasetId::PrickerB: return "pricker_b";
    case DatasetId::TransmissionA: return "transmission_a";
    case DatasetId::TransmissionB: return "transmission_b";
  }
  return "?";
}

inline std::optional<DatasetId> parse_dataset_id(std::string_view name) {
  for (auto id : kAllDatasets) {
    if (dataset_name(id) == name) return id;
  }
  return std::nullopt;
}

inline std::span<const double> embedded_values(DatasetId id) {
  switch (id) {
    case DatasetId::PrickerA: return detail::kPrickerA;
    case DatasetId::PrickerB: return detail::kPrickerB;
    case DatasetId::TransmissionA: return detail::kTransmissionA;
    case DatasetId::TransmissionB: return detail::kTransmissionB;
  }
  return {};
}

inline Sample load_embedded(DatasetId id) {
  const auto v = embedded_values(id);
  return Sample(std::vector<double>(v.begin(), v.end()));
}

/// 64-bit FNV-1a over the values printed as integers, one per line.
inline std::uint64_t dataset_checksum(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const std::string line = std::to_string(static_cast<long long>(v)) + "\n";
    for (unsigned char c : line) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace wfit
