#include "agri/service.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>

#include "agri/traceability.hpp"
#include "httplib.h"

namespace agri {

namespace {

BlockLog open_log(const ServiceConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.data_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + config.data_dir.string() + ": " + ec.message());
  return BlockLog::open(config.log_path());
}

ApiResponse error_response(int status, ErrorCode code, const std::string& message = {}) {
  Json body{{"error", to_string(code)}};
  if (!message.empty()) body["message"] = message;
  return {status, body};
}

ApiResponse not_found(const std::string& what) { return error_response(404, ErrorCode::InvalidArgument, what + " not found"); }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    if (next > pos) out.push_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

std::optional<Digest> parse_digest(const std::string& text) {
  try {
    return Digest::from_hex(text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

ServiceConfig service_config_from_json(const Json& j) {
  ServiceConfig c;
  try {
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("host")) c.host = j.at("host").get<std::string>();
    if (j.contains("port")) c.port = j.at("port").get<int>();
    if (j.contains("params")) c.params = params_from_json(j.at("params"));
    if (j.contains("queue_capacity")) c.queue_capacity = j.at("queue_capacity").get<std::size_t>();
    if (j.contains("block_interval_ms")) c.block_interval_ms = j.at("block_interval_ms").get<std::int64_t>();
    if (j.contains("max_block_txs")) c.max_block_txs = j.at("max_block_txs").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, std::string("config: ") + e.what());
  }
  if (c.queue_capacity == 0) throw Error(ErrorCode::InvalidArgument, "queue_capacity must be positive");
  if (c.block_interval_ms <= 0) throw Error(ErrorCode::InvalidArgument, "block_interval_ms must be positive");
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + file.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, file.string() + ": " + e.what());
  }
  auto config = service_config_from_json(j);
  if (const char* dir = std::getenv("AGRI_DATA_DIR"); dir && *dir) config.data_dir = dir;
  return config;
}

NodeRuntime::NodeRuntime(ServiceConfig config)
    : config_(std::move(config)), log_(open_log(config_)), node_(config_.params) {
  if (log_.empty()) {
    log_.append_block(*node_.block(node_.genesis_digest()));
  } else {
    if (log_.blocks().front().hash() != node_.genesis_digest())
      throw Error(ErrorCode::CorruptLog, "log genesis does not match the configured network");
    for (std::size_t i = 1; i < log_.blocks().size(); ++i) node_.add_block(log_.blocks()[i]);
  }
  chain_ = std::make_shared<const std::vector<Block>>(node_.main_chain());
  auto heights = std::make_shared<std::map<Digest, std::uint64_t>>();
  for (std::size_t i = 0; i < chain_->size(); ++i) heights->emplace((*chain_)[i].hash(), i);
  heights_ = std::move(heights);
  node_.set_time(now());
  admitted_ = node_.pending_state();
  publish();
}

NodeRuntime::~NodeRuntime() { stop(); }

std::int64_t NodeRuntime::now() const {
  return config_.clock ? config_.clock() : static_cast<std::int64_t>(std::time(nullptr));
}

std::shared_ptr<const Snapshot> NodeRuntime::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

std::size_t NodeRuntime::queued() const {
  std::lock_guard lock(admission_mutex_);
  return queue_.size();
}

void NodeRuntime::publish() {
  auto snap = std::make_shared<Snapshot>();
  snap->state = node_.tip_state();
  snap->chain = chain_;
  snap->heights = heights_;
  snap->mempool_size = node_.mempool().size();
  {
    std::lock_guard lock(admission_mutex_);
    snap->queued = queue_.size();
  }
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snap);
}

Status NodeRuntime::enqueue(const Transaction& tx) {
  std::lock_guard lock(admission_mutex_);
  if (queue_.size() >= config_.queue_capacity) return Status::fail(ErrorCode::QueueFull, "submission queue is full");
  auto time = std::max(now(), admitted_.last_block_time);
  auto status = validate_transaction(admitted_, tx, time, config_.params);
  if (!status.ok()) return status;
  apply_transaction_in_place(admitted_, tx, time, config_.params);
  queue_.push_back(tx);
  wake_.notify_one();
  return status;
}

void NodeRuntime::drain_queue() {
  std::lock_guard writer(writer_mutex_);
  std::deque<Transaction> batch;
  {
    std::lock_guard lock(admission_mutex_);
    batch.swap(queue_);
  }
  node_.set_time(now());
  for (const auto& tx : batch) {
    auto status = node_.submit(tx);
    if (!status.ok() && status.code != ErrorCode::DuplicateTransaction)
      std::cerr << "dropped queued transaction " << tx.id().hex() << ": " << to_string(status.code) << '\n';
  }
  publish();
}

void NodeRuntime::rebase_admission() {
  std::lock_guard lock(admission_mutex_);
  admitted_ = node_.pending_state();
  auto time = std::max(now(), admitted_.last_block_time);
  std::deque<Transaction> kept;
  for (auto& tx : queue_) {
    if (!validate_transaction(admitted_, tx, time, config_.params).ok()) continue;
    apply_transaction_in_place(admitted_, tx, time, config_.params);
    kept.push_back(std::move(tx));
  }
  queue_.swap(kept);
}

std::optional<Block> NodeRuntime::mine_pending() {
  drain_queue();
  std::lock_guard writer(writer_mutex_);
  if (node_.mempool().empty()) return std::nullopt;
  auto block = node_.mine(now(), config_.max_block_txs);
  log_.append_block(block);

  auto chain = std::make_shared<std::vector<Block>>(*chain_);
  chain->push_back(block);
  auto heights = std::make_shared<std::map<Digest, std::uint64_t>>(*heights_);
  heights->emplace(block.hash(), chain->size() - 1);
  chain_ = std::move(chain);
  heights_ = std::move(heights);

  rebase_admission();
  publish();
  return block;
}

void NodeRuntime::start() {
  if (running_.exchange(true)) return;
  writer_ = std::thread([this] { writer_loop(); });
}

void NodeRuntime::stop() {
  if (!running_.exchange(false)) return;
  wake_.notify_all();
  if (writer_.joinable()) writer_.join();
}

void NodeRuntime::writer_loop() {
  using Clock = std::chrono::steady_clock;
  const auto interval = std::chrono::milliseconds(config_.block_interval_ms);
  auto next_block = Clock::now() + interval;
  while (running_) {
    {
      std::unique_lock lock(admission_mutex_);
      wake_.wait_until(lock, next_block, [this] { return !running_ || !queue_.empty(); });
    }
    if (!running_) break;
    try {
      if (Clock::now() >= next_block) {
        mine_pending();
        next_block = Clock::now() + interval;
      } else {
        drain_queue();
      }
    } catch (const std::exception& e) {
      std::cerr << "writer: " << e.what() << '\n';
      running_ = false;
    }
  }
}

ApiResponse ApiHandler::submit(const std::string& body) const {
  Transaction tx;
  try {
    auto j = Json::parse(body);
    if (j.is_object() && j.contains("tx_hex")) {
      tx = decode_transaction(ByteSpan(from_hex(j.at("tx_hex").get<std::string>())));
    } else {
      tx = transaction_from_json(j);
    }
  } catch (const Json::exception& e) {
    return error_response(400, ErrorCode::Malformed, e.what());
  } catch (const Error& e) {
    return error_response(400, ErrorCode::Malformed, e.what());
  }
  auto status = runtime_.enqueue(tx);
  if (status.ok()) return {202, {{"tx_id", tx.id().hex()}, {"status", "queued"}}};
  switch (status.code) {
    case ErrorCode::QueueFull: return error_response(429, status.code, status.message);
    case ErrorCode::DuplicateTransaction:
    case ErrorCode::AlreadyRegistered: return error_response(409, status.code, status.message);
    default: return error_response(400, status.code, status.message);
  }
}

ApiResponse ApiHandler::handle(const ApiRequest& request) const {
  auto parts = split_path(request.path);
  if (parts.empty() || parts[0] != "v1") return not_found("path");

  if (parts.size() == 2 && parts[1] == "transactions") {
    if (request.method != "POST") return error_response(405, ErrorCode::InvalidArgument, "use POST");
    return submit(request.body);
  }
  if (request.method != "GET") return error_response(405, ErrorCode::InvalidArgument, "use GET");

  auto snap = runtime_.snapshot();
  const auto& state = *snap->state;
  const auto& chain = *snap->chain;

  if (parts.size() == 3 && parts[1] == "chain" && parts[2] == "head") {
    const auto& tip = chain.back();
    return {200,
            {{"height", chain.size() - 1},
             {"digest", tip.hash().hex()},
             {"header", to_json(tip.header)},
             {"state_digest", state_digest(state).hex()},
             {"mempool_size", snap->mempool_size},
             {"queued", runtime_.queued()}}};
  }

  auto id_at = [&](std::size_t i) { return i < parts.size() ? parse_digest(parts[i]) : std::nullopt; };
  auto status_filter = [&]() -> std::optional<std::string> {
    auto it = request.query.find("status");
    if (it == request.query.end()) return std::string();
    return it->second;
  };

  if (parts[1] == "blocks" && parts.size() == 3) {
    auto id = id_at(2);
    if (!id) return error_response(400, ErrorCode::Malformed, "bad digest");
    auto it = snap->heights->find(*id);
    if (it == snap->heights->end()) return not_found("block");
    auto body = to_json(chain[it->second]);
    body["height"] = it->second;
    return {200, body};
  }

  if (parts[1] == "lots" && (parts.size() == 3 || (parts.size() == 4 && parts[3] == "trace"))) {
    auto id = id_at(2);
    if (!id) return error_response(400, ErrorCode::Malformed, "bad lot id");
    const auto* lot = state.lot(*id);
    if (!lot) return not_found("lot");
    if (parts.size() == 3) return {200, to_json(*lot)};
    return {200, to_json(trace(state, chain, *id))};
  }

  if (parts[1] == "auctions" && parts.size() == 2) {
    auto filter = status_filter();
    if (*filter != "" && *filter != "open" && *filter != "closed" && *filter != "failed")
      return error_response(400, ErrorCode::InvalidArgument, "status must be open, closed or failed");
    Json list = Json::array();
    for (const auto& [id, a] : state.auctions) {
      bool keep = filter->empty() || (*filter == "open" && a.status == AuctionStatus::Open) ||
                  (*filter == "closed" && a.status == AuctionStatus::Closed) ||
                  (*filter == "failed" && a.status == AuctionStatus::Failed);
      if (keep) list.push_back(to_json(a));
    }
    return {200, {{"auctions", list}}};
  }
  if (parts[1] == "auctions" && parts.size() == 3) {
    auto id = id_at(2);
    if (!id) return error_response(400, ErrorCode::Malformed, "bad auction id");
    auto it = state.auctions.find(*id);
    if (it == state.auctions.end()) return not_found("auction");
    return {200, to_json(it->second)};
  }

  if (parts[1] == "shipments" && parts.size() == 3) {
    auto id = id_at(2);
    if (!id) return error_response(400, ErrorCode::Malformed, "bad shipment id");
    auto it = state.shipments.find(*id);
    if (it == state.shipments.end()) return not_found("shipment");
    auto settlement = state.settlements.find(*id);
    return {200, to_json(it->second, settlement == state.settlements.end() ? nullptr : &settlement->second)};
  }

  if (parts[1] == "actors" && parts.size() == 3) {
    auto id = id_at(2);
    if (!id) return error_response(400, ErrorCode::Malformed, "bad actor id");
    const auto* actor = state.actor(*id);
    if (!actor) return not_found("actor");
    return {200, actor_json(state, *actor)};
  }

  if (parts[1] == "disputes" && parts.size() == 2) {
    auto filter = status_filter();
    if (*filter != "" && *filter != "open" && *filter != "resolved")
      return error_response(400, ErrorCode::InvalidArgument, "status must be open or resolved");
    Json list = Json::array();
    for (const auto& [id, d] : state.disputes) {
      bool keep = filter->empty() || (*filter == "open" && d.status == DisputeStatus::Open) ||
                  (*filter == "resolved" && d.status == DisputeStatus::Resolved);
      if (keep) list.push_back(to_json(d));
    }
    return {200, {{"disputes", list}}};
  }

  return not_found("path");
}

void serve_http(NodeRuntime& runtime, const std::string& host, int port, const std::atomic<bool>& stop,
                const std::function<void(int)>& on_listening) {
  ApiHandler handler(runtime);
  httplib::Server server;
  auto bridge = [&handler](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query.emplace(key, value);
    auto response = handler.handle(request);
    res.status = response.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(response.body.dump(), "application/json");
  };
  server.Get(".*", bridge);
  server.Post(".*", bridge);
  server.Put(".*", bridge);
  server.Delete(".*", bridge);
  server.Patch(".*", bridge);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
  std::thread listener([&server] { server.listen_after_bind(); });
  if (on_listening) on_listening(bound);
  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  listener.join();
}

}  // namespace agri
