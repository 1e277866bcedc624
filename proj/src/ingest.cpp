#include "agri/ingest.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "agri/error.hpp"

namespace agri {

namespace {

constexpr std::array<std::int32_t, 1024> kQuarterSine = {
#include "sine_table.inc"
};

constexpr std::int64_t kFullTurn = 4096;  // table steps per period
constexpr std::int64_t kQuarter = 1024;

// splitmix64 finalizer; a keyed hash so each sample's noise depends only on (seed, t, metric).
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t jitter_noise(std::uint64_t seed, std::int64_t t, Metric metric, std::int64_t jitter) {
  if (jitter <= 0) return 0;
  auto h = mix(seed ^ mix(static_cast<std::uint64_t>(t) * 4 + static_cast<std::uint64_t>(metric)));
  auto span = static_cast<std::uint64_t>(2 * jitter + 1);
  return static_cast<std::int64_t>(h % span) - jitter;
}

// round(a * b / 1e6) with halves away from zero.
std::int64_t scale_micro(std::int64_t a, std::int64_t micro) {
  auto p = static_cast<__int128>(a) * micro;
  auto q = (p >= 0 ? p + 500'000 : p - 500'000) / 1'000'000;
  return static_cast<std::int64_t>(q);
}

void check_config(const FeedConfig& c) {
  if (c.sample_interval <= 0) throw Error(ErrorCode::InvalidArgument, "sample_interval must be positive");
  if (c.duration < c.sample_interval) throw Error(ErrorCode::InvalidArgument, "duration shorter than one interval");
  for (const auto& p : c.profiles) {
    if (p.period <= 0) throw Error(ErrorCode::InvalidArgument, "period must be positive");
    if (p.jitter < 0) throw Error(ErrorCode::InvalidArgument, "jitter must be non-negative");
  }
}

}  // namespace

std::int64_t sin_fixed(std::int64_t t, std::int64_t period) {
  auto phase = ((t % period) + period) % period;
  auto step = static_cast<std::int64_t>(static_cast<__int128>(phase) * kFullTurn / period);
  auto quadrant = step / kQuarter;
  auto r = step % kQuarter;
  switch (quadrant) {
    case 0: return kQuarterSine[r];
    case 1: return r == 0 ? 1'000'000 : kQuarterSine[kQuarter - r];
    case 2: return -kQuarterSine[r];
    default: return r == 0 ? -1'000'000 : -kQuarterSine[kQuarter - r];
  }
}

std::vector<SensorReading> simulate_sensor_feed(const FeedConfig& config) {
  check_config(config);
  std::vector<SensorReading> out;
  bool breach_pending = config.breach_at.has_value();
  for (std::int64_t t = 0; t < config.duration; t += config.sample_interval) {
    auto when = config.start_time + t;
    for (const auto& p : config.profiles) {
      SensorReading r;
      r.subject = config.subject;
      r.metric = p.metric;
      r.time = when;
      r.device_id = config.device_id;
      r.value = p.base + scale_micro(p.amplitude, sin_fixed(t, p.period)) + jitter_noise(config.seed, t, p.metric, p.jitter);
      if (breach_pending && p.metric == Metric::Temperature && when >= *config.breach_at) {
        r.value = p.base + std::abs(p.amplitude) + p.jitter + config.breach_spike + 1;
        breach_pending = false;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Transaction> batch_readings(std::span<const SensorReading> readings, std::size_t max_batch,
                                        const KeyPair& signer, std::uint64_t first_nonce) {
  if (max_batch < 1) throw Error(ErrorCode::InvalidArgument, "max_batch must be at least 1");
  std::vector<SensorReading> sorted(readings.begin(), readings.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SensorReading& a, const SensorReading& b) { return a.time < b.time; });

  std::vector<Transaction> out;
  for (std::size_t i = 0; i < sorted.size(); i += max_batch) {
    tx::RecordSensorBatch batch;
    batch.subject = sorted[i].subject;
    auto end = std::min(sorted.size(), i + max_batch);
    batch.readings.assign(sorted.begin() + static_cast<std::ptrdiff_t>(i), sorted.begin() + static_cast<std::ptrdiff_t>(end));
    for (const auto& r : batch.readings) {
      if (r.subject != batch.subject) throw Error(ErrorCode::InvalidArgument, "readings span several subjects");
    }
    out.push_back(make_transaction(std::move(batch), signer, first_nonce + out.size()));
  }
  return out;
}

FeedConfig demo_feed_config(const Digest& subject, std::uint64_t seed) {
  FeedConfig c;
  c.seed = seed;
  c.subject = subject;
  c.profiles = {
      {Metric::Temperature, 300, 50, 3600, 10},
      {Metric::Humidity, 8500, 300, 7200, 50},
      {Metric::CO2, 420, 15, 5400, 3},
  };
  c.sample_interval = 300;
  c.duration = 6 * 3600;
  c.device_id = "truck-probe-1";
  return c;
}

void encode(Writer& w, const FeedConfig& c) {
  w.u64(c.seed);
  w.digest(c.subject);
  w.count(c.profiles.size());
  for (const auto& p : c.profiles) {
    w.u8(static_cast<std::uint8_t>(p.metric));
    w.i64(p.base);
    w.i64(p.amplitude);
    w.i64(p.period);
    w.i64(p.jitter);
  }
  w.i64(c.sample_interval);
  w.i64(c.duration);
  w.i64(c.start_time);
  w.str(c.device_id);
  w.boolean(c.breach_at.has_value());
  if (c.breach_at) w.i64(*c.breach_at);
  w.i64(c.breach_spike);
}

FeedConfig decode_feed_config(Reader& r) {
  FeedConfig c;
  c.seed = r.u64();
  c.subject = r.digest();
  auto n = r.count(33);
  for (std::size_t i = 0; i < n; ++i) {
    MetricProfile p;
    p.metric = r.tag<Metric>(2);
    p.base = r.i64();
    p.amplitude = r.i64();
    p.period = r.i64();
    p.jitter = r.i64();
    c.profiles.push_back(p);
  }
  c.sample_interval = r.i64();
  c.duration = r.i64();
  c.start_time = r.i64();
  c.device_id = r.str();
  if (r.boolean()) c.breach_at = r.i64();
  c.breach_spike = r.i64();
  return c;
}

Bytes encode_feed_config(const FeedConfig& c) {
  Writer w;
  encode(w, c);
  return w.take();
}

FeedConfig decode_feed_config(ByteSpan bytes) {
  Reader r(bytes);
  auto c = decode_feed_config(r);
  r.expect_done();
  return c;
}

}  // namespace agri
