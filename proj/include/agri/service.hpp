#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "agri/blocklog.hpp"
#include "agri/network.hpp"
#include "agri/render.hpp"

namespace agri {

struct ServiceConfig {
  std::filesystem::path data_dir = "agri-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  ChainParams params;
  std::size_t queue_capacity = 1024;
  std::int64_t block_interval_ms = 2'000;
  std::size_t max_block_txs = 256;
  /// Seconds since the epoch; replaceable for tests.
  std::function<std::int64_t()> clock;

  std::filesystem::path log_path() const { return data_dir / "blocks.log"; }
};

/// Reads a JSON config file. `AGRI_DATA_DIR`, when set, overrides data_dir.
ServiceConfig load_service_config(const std::filesystem::path& file);
ServiceConfig service_config_from_json(const Json& j);

/// Immutable view published by the writer after every change.
struct Snapshot {
  std::shared_ptr<const WorldState> state;
  std::shared_ptr<const std::vector<Block>> chain;
  std::shared_ptr<const std::map<Digest, std::uint64_t>> heights;  // block digest -> height
  std::size_t mempool_size = 0;
  std::size_t queued = 0;
};

/// Owns the block log and the node. One writer thread drains the submission
/// queue into the mempool and mines; readers work on published snapshots.
class NodeRuntime {
 public:
  /// Opens (or creates) the log and replays it through full validation.
  explicit NodeRuntime(ServiceConfig config);
  ~NodeRuntime();
  NodeRuntime(const NodeRuntime&) = delete;
  NodeRuntime& operator=(const NodeRuntime&) = delete;

  /// Validates against the tip plus everything already accepted and queues the
  /// transaction. Fails with the validation code, or QueueFull.
  Status enqueue(const Transaction& tx);

  std::shared_ptr<const Snapshot> snapshot() const;
  /// Current submission queue length (the snapshot's count lags until the next publish).
  std::size_t queued() const;

  /// Moves queued transactions into the mempool. Writer-side; public for tests.
  void drain_queue();
  /// Mines one block from the mempool if it holds anything; appends and publishes it.
  std::optional<Block> mine_pending();

  void start();
  void stop();

  const ServiceConfig& config() const { return config_; }
  std::int64_t now() const;

 private:
  void publish();
  void rebase_admission();
  void writer_loop();

  ServiceConfig config_;
  BlockLog log_;
  Node node_;  // writer-owned
  std::shared_ptr<const std::vector<Block>> chain_;
  std::shared_ptr<const std::map<Digest, std::uint64_t>> heights_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;

  mutable std::mutex admission_mutex_;
  WorldState admitted_;  // tip + mempool + queue
  std::deque<Transaction> queue_;
  std::condition_variable wake_;

  std::mutex writer_mutex_;  // serializes drain/mine between the thread and direct callers
  std::atomic<bool> running_{false};
  std::thread writer_;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

/// Routes /v1 requests against a runtime; no sockets involved.
class ApiHandler {
 public:
  explicit ApiHandler(NodeRuntime& runtime) : runtime_(runtime) {}
  ApiResponse handle(const ApiRequest& request) const;

 private:
  ApiResponse submit(const std::string& body) const;
  NodeRuntime& runtime_;
};

/// Binds the handler to host:port and blocks until `stop` becomes true.
/// `on_listening` receives the bound port (useful with port 0).
void serve_http(NodeRuntime& runtime, const std::string& host, int port, const std::atomic<bool>& stop,
                const std::function<void(int)>& on_listening = {});

}  // namespace agri
