#include "tarc/annotation_service.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "tarc/error.hpp"
#include "tarc/segmentation.hpp"

namespace tarc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kStateVersion = 1;

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::string& path, const std::string& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
    out << data;
    out.flush();
    if (!out) throw Error(ErrorCode::io, "short write on " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot replace " + path + ": " + ec.message());
}

json record_json(const TokenRecord& r) {
  return {{"cor", r.cor}, {"textco", r.textco}, {"par", r.par}, {"w", r.w.str()},   {"arabish", r.arabish},
          {"tra", r.tra}, {"ita", r.ita},       {"lem", r.lem}, {"pos", r.pos},     {"var", r.var},
          {"age", r.age}, {"gen", r.gen}};
}

TokenRecord record_from(const json& j) {
  TokenRecord r;
  r.cor = j.at("cor").get<std::string>();
  r.textco = j.at("textco").get<std::string>();
  r.par = j.at("par").get<int>();
  r.w = TokenIndex::parse(j.at("w").get<std::string>());
  r.arabish = j.at("arabish").get<std::string>();
  r.tra = j.at("tra").get<std::string>();
  r.ita = j.at("ita").get<std::string>();
  r.lem = j.at("lem").get<std::string>();
  r.pos = j.at("pos").get<std::string>();
  r.var = j.at("var").get<std::string>();
  r.age = j.at("age").get<std::string>();
  r.gen = j.at("gen").get<std::string>();
  return r;
}

json summary_json(const BlockSummary& s) {
  json j = {{"id", s.id}, {"status", std::string(to_string(s.status))}, {"size", s.size}, {"tokens", s.tokens}};
  j["accuracy"] = s.accuracy ? json(*s.accuracy) : json(nullptr);
  return j;
}

json block_json(const Block& b) {
  json j = summary_json(summarize(b));
  const auto surface = b.surface_rows();
  std::vector<bool> is_surface(b.records.size(), false);
  for (std::size_t i : surface) is_surface[i] = true;
  json rows = json::array();
  for (std::size_t i = 0; i < b.records.size(); ++i) {
    json row = record_json(b.records[i]);
    row["key"] = row_key(b.records[i]);
    row["surface"] = static_cast<bool>(is_surface[i]);
    row["auto"] = i < b.auto_predictions.size() ? json(b.auto_predictions[i]) : json(nullptr);
    row["final"] = i < b.finals.size() ? json(b.finals[i]) : json(nullptr);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Block block_from(const json& j) {
  Block b;
  b.id = j.at("id").get<int>();
  auto st = block_status_from(j.at("status").get<std::string>());
  if (!st) throw Error(ErrorCode::parse, "block: bad status");
  b.status = *st;
  if (!j.at("accuracy").is_null()) b.accuracy_after_correction = j.at("accuracy").get<double>();
  for (const auto& row : j.at("rows")) {
    b.records.push_back(record_from(row));
    if (!row.at("auto").is_null()) b.auto_predictions.push_back(row.at("auto").get<Morphemes>());
    if (!row.at("final").is_null()) b.finals.push_back(row.at("final").get<Morphemes>());
  }
  return b;
}

json model_json(const ModelSummary& m) {
  return {{"version", m.version}, {"training_size", m.training_size}, {"blocks", m.blocks}};
}

ModelSummary model_from(const json& j) {
  return {j.at("version").get<int>(), j.at("training_size").get<std::size_t>(), j.at("blocks").get<std::vector<int>>()};
}

json audit_json(const AuditEntry& e) {
  return {{"ts", e.ts},         {"block", e.block}, {"row", e.row}, {"key", e.key},
          {"before", e.before}, {"after", e.after}, {"kind", e.kind}};
}

AuditEntry audit_from(const json& j) {
  AuditEntry e;
  e.ts = j.at("ts").get<std::string>();
  e.block = j.at("block").get<int>();
  e.row = j.at("row").get<std::size_t>();
  e.key = j.at("key").get<std::string>();
  e.before = j.at("before").get<Morphemes>();
  e.after = j.at("after").get<Morphemes>();
  e.kind = j.at("kind").get<std::string>();
  return e;
}

template <typename F>
auto parse_json(const std::string& text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("json: ") + e.what());
  }
}

std::vector<AuditEntry> read_audit(const std::string& dir) {
  std::vector<AuditEntry> out;
  std::ifstream in(dir + "/audit.jsonl", std::ios::binary);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_json(line, [](const json& j) { return audit_from(j); }));
  }
  return out;
}

std::string model_path(const std::string& dir, int version) {
  return dir + "/model-v" + std::to_string(version) + ".txt";
}

}  // namespace

std::string to_json(const BlockSummary& s) { return summary_json(s).dump(); }
std::string to_json(const Block& b) { return block_json(b).dump(); }
std::string to_json(const ModelSummary& m) { return model_json(m).dump(); }

std::string to_json(const Metrics& m) {
  json blocks = json::array();
  for (const auto& [id, acc] : m.block_accuracy) blocks.push_back({{"id", id}, {"accuracy", acc}});
  json growth = json::array();
  for (const auto& g : m.growth) growth.push_back(model_json(g));
  json j = {{"blocks", blocks}, {"growth", growth}};
  j["cv"] = m.cv ? json::parse(*m.cv) : json(nullptr);
  return j.dump();
}

Block block_from_json(const std::string& text) {
  return parse_json(text, [](const json& j) { return block_from(j); });
}

BlockSummary block_summary_from_json(const std::string& text) {
  return parse_json(text, [](const json& j) {
    BlockSummary s;
    s.id = j.at("id").get<int>();
    auto st = block_status_from(j.at("status").get<std::string>());
    if (!st) throw Error(ErrorCode::parse, "block: bad status");
    s.status = *st;
    s.size = j.at("size").get<std::size_t>();
    s.tokens = j.at("tokens").get<std::size_t>();
    if (!j.at("accuracy").is_null()) s.accuracy = j.at("accuracy").get<double>();
    return s;
  });
}

std::map<std::string, Morphemes> corrections_from_json(const std::string& text) {
  return parse_json(text, [](const json& j) {
    std::map<std::string, Morphemes> out;
    const json& c = j.contains("corrections") ? j.at("corrections") : j;
    if (!c.is_object()) throw Error(ErrorCode::parse, "corrections: expected an object");
    for (const auto& [key, value] : c.items()) {
      if (value.is_string()) {
        out[key] = {value.get<std::string>()};
      } else {
        out[key] = value.get<Morphemes>();
      }
      if (out[key].empty()) throw Error(ErrorCode::parse, "corrections: empty value for " + key);
    }
    return out;
  });
}

BlockSummary summarize(const Block& b) {
  return {b.id, b.status, b.records.size(), b.surface_rows().size(), b.accuracy_after_correction};
}

// ---------------------------------------------------------------- store

std::unique_ptr<CorpusStore> CorpusStore::create(const std::string& dir, const std::vector<TokenRecord>& seed,
                                                 const std::vector<TokenRecord>& stream,
                                                 const TransducerConfig& config) {
  if (fs::exists(dir + "/state.json")) throw Error(ErrorCode::state, "store already exists in " + dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + dir + ": " + ec.message());

  auto pairs = pairs_from_records(seed);
  auto model = std::make_shared<const TransducerModel>(TransducerModel::train(pairs, config));

  std::unique_ptr<CorpusStore> s(new CorpusStore());
  s->dir_ = dir;
  s->config_ = config;
  s->seed_ = seed;
  s->stream_ = RecordStream(stream);
  s->models_.push_back({1, pairs.size(), {}});
  s->model_ = std::move(model);

  write_tsv_file(dir + "/seed.tsv", seed);
  write_tsv_file(dir + "/stream.tsv", stream);
  write_atomic(dir + "/audit.jsonl", "");
  s->model_->save(model_path(dir, 1));
  s->persist();
  return s;
}

std::unique_ptr<CorpusStore> CorpusStore::open(const std::string& dir) {
  const std::string state_text = read_file(dir + "/state.json");
  std::unique_ptr<CorpusStore> s(new CorpusStore());
  s->dir_ = dir;
  s->seed_ = read_tsv_file(dir + "/seed.tsv");
  auto stream = read_tsv_file(dir + "/stream.tsv");
  parse_json(state_text, [&](const json& j) {
    if (j.at("version").get<int>() != kStateVersion) throw Error(ErrorCode::parse, "state: unsupported version");
    const auto& c = j.at("config");
    s->config_.n = c.at("n").get<int>();
    s->config_.k = c.at("k").get<double>();
    s->config_.beam_width = c.at("beam_width").get<std::size_t>();
    s->config_.lambda = c.at("lambda").get<double>();
    s->stream_ = RecordStream(std::move(stream), j.at("cursor").get<std::size_t>());
    for (const auto& b : j.at("blocks")) {
      BlockState st;
      st.block = block_from(b.at("block"));
      st.start = b.at("start").get<std::size_t>();
      st.trained = b.at("trained").get<bool>();
      st.corrections = b.at("corrections").get<std::map<std::string, Morphemes>>();
      s->blocks_.push_back(std::move(st));
    }
    for (const auto& m : j.at("models")) s->models_.push_back(model_from(m));
    if (!j.at("cv").is_null()) s->cv_ = j.at("cv").dump();
    return 0;
  });
  if (s->models_.empty()) throw Error(ErrorCode::parse, "state: no model recorded");
  s->model_ = std::make_shared<const TransducerModel>(TransducerModel::load(model_path(dir, s->models_.back().version)));
  return s;
}

void CorpusStore::persist() const {
  json j;
  j["version"] = kStateVersion;
  j["config"] = {{"n", config_.n}, {"k", config_.k}, {"beam_width", config_.beam_width}, {"lambda", config_.lambda}};
  j["cursor"] = stream_.cursor();
  json blocks = json::array();
  for (const auto& b : blocks_) {
    blocks.push_back({{"block", block_json(b.block)},
                      {"start", b.start},
                      {"trained", b.trained},
                      {"corrections", b.corrections}});
  }
  j["blocks"] = std::move(blocks);
  json models = json::array();
  for (const auto& m : models_) models.push_back(model_json(m));
  j["models"] = std::move(models);
  j["cv"] = cv_ ? json::parse(*cv_) : json(nullptr);
  write_atomic(dir_ + "/state.json", j.dump());
}

void CorpusStore::append_audit(const std::vector<AuditEntry>& entries) const {
  if (entries.empty()) return;
  std::ofstream out(dir_ + "/audit.jsonl", std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::io, "cannot append to audit log in " + dir_);
  for (const auto& e : entries) out << audit_json(e).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::io, "audit log write failed in " + dir_);
}

CorpusStore::BlockState& CorpusStore::find(int id) {
  for (auto& b : blocks_) {
    if (b.block.id == id) return b;
  }
  throw Error(ErrorCode::not_found, "no block " + std::to_string(id));
}

const CorpusStore::BlockState& CorpusStore::find(int id) const {
  return const_cast<CorpusStore*>(this)->find(id);
}

std::vector<BlockSummary> CorpusStore::list_blocks() const {
  std::shared_lock lock(mu_);
  std::vector<BlockSummary> out;
  for (const auto& b : blocks_) out.push_back(summarize(b.block));
  return out;
}

Block CorpusStore::get_block(int id) const {
  std::shared_lock lock(mu_);
  return find(id).block;
}

std::size_t CorpusStore::remaining() const {
  std::shared_lock lock(mu_);
  return stream_.remaining();
}

BlockSummary CorpusStore::make_block(std::size_t size) {
  std::unique_lock lock(mu_);
  const int id = blocks_.empty() ? 1 : blocks_.back().block.id + 1;
  BlockState st;
  st.start = stream_.cursor();
  st.block = stream_.make_block(size, id);
  blocks_.push_back(std::move(st));
  persist();
  return summarize(blocks_.back().block);
}

BlockSummary CorpusStore::annotate_block(int id) {
  std::unique_lock lock(mu_);
  auto& st = find(id);
  Block annotated = auto_annotate(st.block, *model_);
  std::vector<AuditEntry> entries;
  const std::string ts = now_utc();
  for (std::size_t i = 0; i < annotated.records.size(); ++i) {
    const auto& before = st.block.records[i].tra;
    entries.push_back({ts, id, st.start + i, row_key(annotated.records[i]),
                       before.empty() ? Morphemes{} : Morphemes{before}, annotated.auto_predictions[i], "auto"});
  }
  append_audit(entries);
  st.block = std::move(annotated);
  persist();
  return summarize(st.block);
}

BlockSummary CorpusStore::post_corrections(int id, const std::map<std::string, Morphemes>& corrections) {
  std::unique_lock lock(mu_);
  auto& st = find(id);
  Block base = st.block;
  if (base.status == BlockStatus::corrected) {
    if (st.trained) {
      throw Error(ErrorCode::state, "block " + std::to_string(id) + " is already part of a trained model");
    }
    base.status = BlockStatus::automatic;
    base.finals.clear();
    base.accuracy_after_correction.reset();
    for (std::size_t i = 0; i < base.records.size(); ++i) base.records[i].tra = fuse_morphemes(base.auto_predictions[i]);
  }
  auto merged = st.corrections;
  for (const auto& [k, v] : corrections) merged[k] = v;
  Block corrected = ingest_corrections(std::move(base), merged);

  std::vector<AuditEntry> entries;
  const std::string ts = now_utc();
  for (std::size_t i = 0; i < corrected.records.size(); ++i) {
    const Morphemes& before = st.block.finals.empty() ? st.block.auto_predictions[i] : st.block.finals[i];
    const std::string key = row_key(corrected.records[i]);
    if (corrected.finals[i] != before || corrections.count(key)) {
      entries.push_back({ts, id, st.start + i, key, before, corrected.finals[i], "correction"});
    }
  }
  append_audit(entries);
  st.block = std::move(corrected);
  st.corrections = std::move(merged);
  persist();
  return summarize(st.block);
}

std::vector<TrainingPair> CorpusStore::training_pairs() const {
  auto pairs = pairs_from_records(seed_);
  for (const auto& b : blocks_) {
    if (b.block.status != BlockStatus::corrected) continue;
    auto more = b.block.pairs();
    pairs.insert(pairs.end(), more.begin(), more.end());
  }
  return pairs;
}

ModelSummary CorpusStore::retrain() {
  std::unique_lock lock(mu_);
  std::vector<int> fresh;
  for (const auto& b : blocks_) {
    if (b.block.status == BlockStatus::corrected && !b.trained) fresh.push_back(b.block.id);
  }
  if (fresh.empty()) throw Error(ErrorCode::state, "retrain: no corrected block since the last model");
  const auto pairs = training_pairs();
  auto model = std::make_shared<const TransducerModel>(TransducerModel::train(pairs, config_));
  ModelSummary m{models_.back().version + 1, pairs.size(), fresh};
  model->save(model_path(dir_, m.version));
  for (auto& b : blocks_) {
    if (b.block.status == BlockStatus::corrected) b.trained = true;
  }
  models_.push_back(m);
  model_ = std::move(model);
  persist();
  return m;
}

Metrics CorpusStore::metrics() const {
  std::shared_lock lock(mu_);
  Metrics m;
  for (const auto& b : blocks_) {
    if (b.block.accuracy_after_correction) m.block_accuracy.emplace_back(b.block.id, *b.block.accuracy_after_correction);
  }
  m.growth = models_;
  m.cv = cv_;
  return m;
}

void CorpusStore::record_cv(const CvReport& report) {
  std::unique_lock lock(mu_);
  cv_ = json::parse(report.to_json()).dump();
  persist();
}

int CorpusStore::model_version() const {
  std::shared_lock lock(mu_);
  return models_.back().version;
}

std::shared_ptr<const TransducerModel> CorpusStore::model() const {
  std::shared_lock lock(mu_);
  return model_;
}

std::size_t CorpusStore::training_size() const {
  std::shared_lock lock(mu_);
  return models_.back().training_size;
}

std::vector<TokenRecord> CorpusStore::stream_records() const {
  std::shared_lock lock(mu_);
  auto out = stream_.records();
  for (const auto& b : blocks_) {
    for (std::size_t i = 0; i < b.block.records.size(); ++i) out[b.start + i] = b.block.records[i];
  }
  return out;
}

std::vector<AuditEntry> CorpusStore::audit() const {
  std::shared_lock lock(mu_);
  return read_audit(dir_);
}

std::vector<TokenRecord> CorpusStore::replay(const std::string& dir) {
  auto records = read_tsv_file(dir + "/stream.tsv");
  for (const auto& e : read_audit(dir)) {
    if (e.row >= records.size() || row_key(records[e.row]) != e.key) {
      throw Error(ErrorCode::parse, "audit entry for " + e.key + " does not match stream row " + std::to_string(e.row));
    }
    records[e.row].tra = fuse_morphemes(e.after);
  }
  return records;
}

// ---------------------------------------------------------------- http

namespace {

int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::state: return 409;
    case ErrorCode::invalid_argument:
    case ErrorCode::parse: return 400;
    case ErrorCode::io: return 500;
  }
  return 500;
}

std::string code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::state: return "state";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "error";
}

}  // namespace

HttpResponse handle_request(CorpusStore& store, const std::string& method, const std::string& path,
                            const std::string& body) {
  static const std::regex block_re(R"(^/blocks/(\d+)$)");
  static const std::regex action_re(R"(^/blocks/(\d+)/(corrections|auto)$)");
  try {
    std::smatch m;
    if (path == "/blocks" && method == "GET") {
      json list = json::array();
      for (const auto& s : store.list_blocks()) list.push_back(summary_json(s));
      return {200, json{{"blocks", list}}.dump()};
    }
    if (path == "/blocks" && method == "POST") {
      const auto size = parse_json(body.empty() ? "{}" : body, [](const json& j) {
        if (!j.contains("size") || !j.at("size").is_number_unsigned()) {
          throw Error(ErrorCode::invalid_argument, "expected {\"size\": n}");
        }
        return j.at("size").get<std::size_t>();
      });
      return {201, to_json(store.make_block(size))};
    }
    if (std::regex_match(path, m, block_re) && method == "GET") {
      return {200, to_json(store.get_block(std::stoi(m[1])))};
    }
    if (std::regex_match(path, m, action_re) && method == "POST") {
      const int id = std::stoi(m[1]);
      if (m[2] == "auto") return {200, to_json(store.annotate_block(id))};
      return {200, to_json(store.post_corrections(id, corrections_from_json(body.empty() ? "{}" : body)))};
    }
    if (path == "/retrain" && method == "POST") return {200, to_json(store.retrain())};
    if (path == "/metrics" && method == "GET") return {200, to_json(store.metrics())};
    return {404, json{{"error", "no route " + method + " " + path}, {"code", "not_found"}}.dump()};
  } catch (const Error& e) {
    return {http_status(e.code()), json{{"error", e.what()}, {"code", code_name(e.code())}}.dump()};
  } catch (const std::out_of_range& e) {
    return {404, json{{"error", e.what()}, {"code", "not_found"}}.dump()};
  }
}

struct AnnotationServer::Impl {
  CorpusStore& store;
  httplib::Server server;

  explicit Impl(CorpusStore& s) : store(s) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      const auto r = handle_request(store, req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    server.Get(R"(/.*)", route);
    server.Post(R"(/.*)", route);
  }
};

AnnotationServer::AnnotationServer(CorpusStore& store) : impl_(std::make_unique<Impl>(store)) {}
AnnotationServer::~AnnotationServer() = default;

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool AnnotationServer::serve() { return impl_->server.listen_after_bind(); }

void AnnotationServer::stop() { impl_->server.stop(); }

}  // namespace tarc
