// agri: command-line front end for the node, keys, transactions, traces,
// the network simulator and block log maintenance.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "agri/blocklog.hpp"
#include "agri/ingest.hpp"
#include "agri/render.hpp"
#include "agri/scenario.hpp"
#include "agri/service.hpp"
#include "agri/simulation.hpp"
#include "agri/traceability.hpp"
#include "httplib.h"

using namespace agri;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Malformed, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << text;
}

Bytes read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

KeyPair load_key(const std::string& path) {
  auto j = read_json(path);
  auto raw = from_hex(j.at("seed").get<std::string>());
  if (raw.size() != 32) throw Error(ErrorCode::Malformed, "seed must be 32 bytes");
  KeySeed seed;
  std::copy(raw.begin(), raw.end(), seed.begin());
  return KeyPair::from_seed(seed);
}

// A transaction file holds either a signed transaction or {"kind", "body", "nonce"}
// to be signed with --key.
Transaction load_transaction(const std::string& path, const std::string& key_path) {
  auto j = read_json(path);
  if (j.contains("signature")) return transaction_from_json(j);
  if (key_path.empty()) throw Error(ErrorCode::InvalidArgument, "unsigned transaction needs --key");
  auto kind = parse_tx_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::Malformed, "unknown transaction kind");
  auto nonce = j.value("nonce", std::uint64_t{0});
  return make_transaction(body_from_json(*kind, j.at("body")), load_key(key_path), nonce);
}

struct Url {
  std::string host = "127.0.0.1";
  int port = 8080;
};

Url parse_url(std::string url) {
  Url out;
  if (auto p = url.find("://"); p != std::string::npos) url = url.substr(p + 3);
  if (auto slash = url.find('/'); slash != std::string::npos) url = url.substr(0, slash);
  if (auto colon = url.rfind(':'); colon != std::string::npos) {
    out.port = std::stoi(url.substr(colon + 1));
    url = url.substr(0, colon);
  }
  if (!url.empty()) out.host = url;
  return out;
}

int print_response(const httplib::Result& res) {
  if (!res) {
    std::cerr << "request failed: " << httplib::to_string(res.error()) << '\n';
    return 2;
  }
  std::cout << res->body << '\n';
  return res->status >= 200 && res->status < 300 ? 0 : 1;
}

int cmd_node_run(const std::string& config_path) {
  auto config = load_service_config(config_path);
  NodeRuntime runtime(config);
  auto snap = runtime.snapshot();
  std::cerr << "replayed " << snap->chain->size() << " blocks from " << config.log_path() << '\n';
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  runtime.start();
  serve_http(runtime, config.host, config.port, g_stop,
             [&](int port) { std::cerr << "listening on " << config.host << ':' << port << '\n'; });
  runtime.stop();
  return 0;
}

int cmd_keygen(const std::string& role_name, const std::string& name, const std::string& out) {
  auto role = parse_role(role_name);
  if (!role) throw Error(ErrorCode::InvalidArgument, "unknown role " + role_name);
  auto key = KeyPair::generate();
  Json j{{"role", to_string(*role)},
         {"display_name", name},
         {"seed", to_hex(key.seed())},
         {"public_key", to_hex(key.public_key())},
         {"actor_id", key.actor_id().hex()},
         {"register_tx", to_json(make_transaction(tx::RegisterActor{*role, name}, key, 0))}};
  write_text(out, j.dump(2) + "\n");
  return 0;
}

int cmd_tx_submit(const std::string& file, const std::string& key, const std::string& node) {
  auto tx = load_transaction(file, key);
  auto url = parse_url(node);
  httplib::Client client(url.host, url.port);
  Json body{{"tx_hex", to_hex(encode_transaction(tx))}};
  return print_response(client.Post("/v1/transactions", body.dump(), "application/json"));
}

ChainParams params_for(const std::string& params_file, const std::vector<Block>* blocks = nullptr) {
  ChainParams params;
  if (!params_file.empty()) params = params_from_json(read_json(params_file));
  else if (blocks && !blocks->empty()) params.difficulty = blocks->front().header.difficulty;
  return params;
}

int cmd_trace(const std::string& lot, const std::string& node, const std::string& log, const std::string& params_file) {
  auto lot_id = Digest::from_hex(lot);
  if (log.empty()) {
    auto url = parse_url(node);
    httplib::Client client(url.host, url.port);
    return print_response(client.Get("/v1/lots/" + lot_id.hex() + "/trace"));
  }
  auto scan = scan_block_log(read_bytes(log));
  auto params = params_for(params_file, &scan.blocks);
  auto state = replay(scan.blocks, params);
  auto report = trace(state, scan.blocks, lot_id);
  std::vector<BlockHeader> headers;
  for (const auto& b : scan.blocks) headers.push_back(b.header);
  auto j = to_json(report);
  j["verified"] = verify_trace(report, headers);
  std::cout << j.dump(2) << '\n';
  return j["verified"].get<bool>() ? 0 : 1;
}

int cmd_sim_run(const std::string& config_path, const std::string& csv) {
  auto config = sim_config_from_json(read_json(config_path));
  auto result = run_simulation(config);
  if (!csv.empty()) write_text(csv, metrics_csv(result));
  std::cout << to_json(result).dump(2) << '\n';
  return 0;
}

int cmd_log_verify(const std::string& path, const std::string& params_file) {
  auto bytes = read_bytes(path);
  LogScan scan;
  try {
    scan = scan_block_log(bytes);
  } catch (const Error& e) {
    std::cout << Json{{"valid", false}, {"error", to_string(e.code())}, {"message", e.what()}}.dump(2) << '\n';
    return 1;
  }
  Json out{{"records", scan.blocks.size()}, {"valid_bytes", scan.valid_bytes}, {"torn_bytes", scan.torn_bytes}};
  if (scan.blocks.empty()) {
    out["valid"] = false;
    out["error"] = to_string(ErrorCode::EmptyChain);
    std::cout << out.dump(2) << '\n';
    return 1;
  }
  try {
    auto state = replay(scan.blocks, params_for(params_file, &scan.blocks));
    out["valid"] = true;
    out["height"] = scan.blocks.size() - 1;
    out["tip"] = scan.blocks.back().hash().hex();
    out["state_digest"] = state_digest(state).hex();
  } catch (const ReplayError& e) {
    out["valid"] = false;
    out["error"] = to_string(e.code());
    out["block_index"] = e.block_index();
    out["message"] = e.what();
  }
  std::cout << out.dump(2) << '\n';
  return out["valid"].get<bool>() ? 0 : 1;
}

int cmd_feed(const std::string& config_path, std::size_t batch, const std::string& key) {
  auto readings = simulate_sensor_feed(feed_config_from_json(read_json(config_path)));
  if (batch == 0) {
    Json list = Json::array();
    for (const auto& r : readings) list.push_back(to_json(r));
    std::cout << list.dump(2) << '\n';
    return 0;
  }
  if (key.empty()) throw Error(ErrorCode::InvalidArgument, "--batch needs --key");
  Json txs = Json::array();
  for (const auto& tx : batch_readings(readings, batch, load_key(key))) txs.push_back(to_json(tx));
  std::cout << txs.dump(2) << '\n';
  return 0;
}

int cmd_demo(const std::string& out, const DemoOptions& options) {
  auto demo = build_demo(options);
  std::filesystem::remove(out);
  auto log = BlockLog::open(out);
  for (const auto& b : demo.blocks) log.append_block(b);
  auto state = replay(demo.blocks, demo.params);
  Json lots = Json::array();
  for (const auto& id : demo.processed_lots) lots.push_back(id.hex());
  std::cout << Json{{"log", out},
                    {"blocks", demo.blocks.size()},
                    {"params", to_json(demo.params)},
                    {"state_digest", state_digest(state).hex()},
                    {"processed_lots", lots}}
                   .dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply-chain ledger node and tools"};
  app.require_subcommand(1);
  int rc = 0;

  auto* node = app.add_subcommand("node", "Run a node");
  node->require_subcommand(1);
  std::string node_config;
  auto* node_run = node->add_subcommand("run", "Replay the block log and serve the HTTP API");
  node_run->add_option("--config", node_config, "Service config JSON")->required()->check(CLI::ExistingFile);
  node_run->callback([&] { rc = cmd_node_run(node_config); });

  std::string role, name = "anonymous", key_out;
  auto* keygen = app.add_subcommand("keygen", "Generate a signing key");
  keygen->add_option("--role", role, "Farmer, Processor, Distributor, Retailer, Consumer or Negotiator")->required();
  keygen->add_option("--name", name, "Display name for the registration transaction");
  keygen->add_option("--out", key_out, "Key file to write (default stdout)");
  keygen->callback([&] { rc = cmd_keygen(role, name, key_out); });

  std::string node_url = "http://127.0.0.1:8080";
  auto* tx = app.add_subcommand("tx", "Transactions");
  tx->require_subcommand(1);
  std::string tx_file, tx_key;
  auto* submit = tx->add_subcommand("submit", "Sign if needed and POST a transaction");
  submit->add_option("file", tx_file, "Transaction JSON")->required()->check(CLI::ExistingFile);
  submit->add_option("--key", tx_key, "Key file for unsigned transactions");
  submit->add_option("--node", node_url, "Node API base URL");
  submit->callback([&] { rc = cmd_tx_submit(tx_file, tx_key, node_url); });

  std::string lot_id, trace_log, params_file;
  auto* trace_cmd = app.add_subcommand("trace", "Print a lot's provenance report");
  trace_cmd->add_option("lot_id", lot_id, "Lot id (hex)")->required();
  trace_cmd->add_option("--node", node_url, "Node API base URL");
  trace_cmd->add_option("--log", trace_log, "Trace offline from a block log and verify its proofs");
  trace_cmd->add_option("--params", params_file, "Chain params JSON for offline replay");
  trace_cmd->callback([&] { rc = cmd_trace(lot_id, node_url, trace_log, params_file); });

  auto* sim = app.add_subcommand("sim", "Network simulator");
  sim->require_subcommand(1);
  std::string sim_config, csv_out;
  auto* sim_run = sim->add_subcommand("run", "Run a simulation config");
  sim_run->add_option("config", sim_config, "Simulation config JSON")->required()->check(CLI::ExistingFile);
  sim_run->add_option("--csv", csv_out, "Write per-round metrics CSV here ('-' for stdout)");
  sim_run->callback([&] { rc = cmd_sim_run(sim_config, csv_out); });

  auto* log = app.add_subcommand("log", "Block log maintenance");
  log->require_subcommand(1);
  std::string log_path;
  auto* verify = log->add_subcommand("verify", "Check and replay a block log without modifying it");
  verify->add_option("path", log_path, "Block log file")->required()->check(CLI::ExistingFile);
  verify->add_option("--params", params_file, "Chain params JSON");
  verify->callback([&] { rc = cmd_log_verify(log_path, params_file); });

  std::string feed_config, feed_key;
  std::size_t batch = 0;
  auto* feed = app.add_subcommand("feed", "Generate simulated sensor readings");
  feed->add_option("config", feed_config, "Feed config JSON")->required()->check(CLI::ExistingFile);
  feed->add_option("--batch", batch, "Emit RecordSensorBatch transactions of at most this many readings");
  feed->add_option("--key", feed_key, "Signer key file for --batch");
  feed->callback([&] { rc = cmd_feed(feed_config, batch, feed_key); });

  DemoOptions demo_options;
  std::string demo_out = "demo.log";
  int demo_difficulty = demo_options.difficulty;
  auto* demo = app.add_subcommand("demo", "Write a seeded demo supply chain as a block log");
  demo->add_option("--out", demo_out, "Block log to create (overwritten)");
  demo->add_option("--txs", demo_options.target_txs, "Number of transactions");
  demo->add_option("--seed", demo_options.seed, "Scenario seed");
  demo->add_option("--difficulty", demo_difficulty, "Leading zero bits per block")->check(CLI::Range(0, 255));
  demo->callback([&] {
    demo_options.difficulty = static_cast<std::uint8_t>(demo_difficulty);
    rc = cmd_demo(demo_out, demo_options);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
