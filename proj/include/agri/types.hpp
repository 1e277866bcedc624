#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "agri/codec.hpp"
#include "agri/digest.hpp"

namespace agri {

// Fixed-point conventions for consensus values (floating point never enters state):
//   quantities      grams
//   temperature     centi-degrees Celsius
//   humidity        centi-percent relative humidity
//   CO2             ppm
//   money           minor currency units
//   coordinates     micro-degrees
//   time            unix seconds

enum class Role : std::uint8_t { Farmer, Processor, Distributor, Retailer, Consumer, Negotiator };
inline constexpr std::uint8_t kRoleCount = 6;

enum class Metric : std::uint8_t { Humidity, CO2, Temperature };

enum class LotStatus : std::uint8_t { Registered, InAuction, Sold, InTransit, Delivered, Processed, Retired };

struct SensorReading {
  Digest subject;  // lot_id or shipment_id
  Metric metric = Metric::Temperature;
  std::int64_t value = 0;
  std::int64_t time = 0;
  std::string device_id;

  bool operator==(const SensorReading&) const = default;
};

struct Waypoint {
  std::int64_t lat_micro = 0;
  std::int64_t lon_micro = 0;
  std::int64_t time = 0;

  bool operator==(const Waypoint&) const = default;
};

std::string_view to_string(Role r);
std::string_view to_string(Metric m);
std::string_view to_string(LotStatus s);
std::string_view unit_of(Metric m);

std::optional<Role> parse_role(std::string_view s);
std::optional<Metric> parse_metric(std::string_view s);

void encode(Writer& w, const SensorReading& r);
SensorReading decode_reading(Reader& r);
void encode(Writer& w, const Waypoint& p);
Waypoint decode_waypoint(Reader& r);

}  // namespace agri
