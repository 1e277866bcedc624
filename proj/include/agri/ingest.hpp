#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agri/codec.hpp"
#include "agri/crypto.hpp"
#include "agri/transaction.hpp"
#include "agri/types.hpp"

namespace agri {

// Deterministic stand-ins for field sensors and vehicle telemetry. Every value is
// integer fixed point so generated feeds are bit-identical across platforms.

struct MetricProfile {
  Metric metric = Metric::Temperature;
  std::int64_t base = 0;       // fixed-point in the metric's unit
  std::int64_t amplitude = 0;  // sine amplitude, same unit
  std::int64_t period = 86'400;
  std::int64_t jitter = 0;     // noise uniform in [-jitter, +jitter]
  bool operator==(const MetricProfile&) const = default;
};

struct FeedConfig {
  std::uint64_t seed = 0;
  Digest subject;
  std::vector<MetricProfile> profiles;
  std::int64_t sample_interval = 60;
  std::int64_t duration = 3600;
  std::int64_t start_time = 0;
  std::string device_id = "sensor-0";
  /// Forces the first temperature sample at or after this time to
  /// base + |amplitude| + jitter + breach_spike + 1.
  std::optional<std::int64_t> breach_at;
  std::int64_t breach_spike = 500;
  bool operator==(const FeedConfig&) const = default;
};

/// Quarter-wave table sine: returns sin(2*pi*t/period) in micro units.
std::int64_t sin_fixed(std::int64_t t, std::int64_t period);

/// Samples at start_time + k*sample_interval for k*sample_interval < duration; one
/// reading per profile per sample, in profile order. Throws Error(InvalidArgument)
/// for an invalid config.
std::vector<SensorReading> simulate_sensor_feed(const FeedConfig& config);

/// Splits readings (stably ordered by time) into ceil(n / max_batch)
/// RecordSensorBatch transactions signed by `signer`, nonces counting up from
/// `first_nonce`. All readings must share one subject.
std::vector<Transaction> batch_readings(std::span<const SensorReading> readings, std::size_t max_batch,
                                        const KeyPair& signer, std::uint64_t first_nonce = 0);

/// Cold-storage truck profile used by the demo and documentation: 3.00 C +/- 0.50 C
/// temperature, 85 %RH humidity, 420 ppm CO2.
FeedConfig demo_feed_config(const Digest& subject, std::uint64_t seed = 42);

void encode(Writer& w, const FeedConfig& c);
FeedConfig decode_feed_config(Reader& r);
Bytes encode_feed_config(const FeedConfig& c);
FeedConfig decode_feed_config(ByteSpan bytes);

}  // namespace agri
