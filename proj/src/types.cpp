#include "agri/types.hpp"

#include <array>

namespace agri {

namespace {

constexpr std::array<std::string_view, kRoleCount> kRoleNames = {"Farmer",   "Processor", "Distributor",
                                                                 "Retailer", "Consumer",  "Negotiator"};
constexpr std::array<std::string_view, 3> kMetricNames = {"Humidity", "CO2", "Temperature"};
constexpr std::array<std::string_view, 7> kLotStatusNames = {"Registered", "InAuction", "Sold",   "InTransit",
                                                             "Delivered",  "Processed", "Retired"};

}  // namespace

std::string_view to_string(Role r) { return kRoleNames.at(static_cast<std::size_t>(r)); }
std::string_view to_string(Metric m) { return kMetricNames.at(static_cast<std::size_t>(m)); }
std::string_view to_string(LotStatus s) { return kLotStatusNames.at(static_cast<std::size_t>(s)); }

std::string_view unit_of(Metric m) {
  switch (m) {
    case Metric::Humidity: return "centi_percent_rh";
    case Metric::CO2: return "ppm";
    case Metric::Temperature: return "centi_celsius";
  }
  return "";
}

std::optional<Role> parse_role(std::string_view s) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == s) return static_cast<Role>(i);
  }
  return std::nullopt;
}

std::optional<Metric> parse_metric(std::string_view s) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == s) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

void encode(Writer& w, const SensorReading& r) {
  w.digest(r.subject);
  w.u8(static_cast<std::uint8_t>(r.metric));
  w.i64(r.value);
  w.i64(r.time);
  w.str(r.device_id);
}

SensorReading decode_reading(Reader& r) {
  SensorReading out;
  out.subject = r.digest();
  out.metric = r.tag<Metric>(2);
  out.value = r.i64();
  out.time = r.i64();
  out.device_id = r.str();
  return out;
}

void encode(Writer& w, const Waypoint& p) {
  w.i64(p.lat_micro);
  w.i64(p.lon_micro);
  w.i64(p.time);
}

Waypoint decode_waypoint(Reader& r) {
  Waypoint p;
  p.lat_micro = r.i64();
  p.lon_micro = r.i64();
  p.time = r.i64();
  return p;
}

}  // namespace agri
