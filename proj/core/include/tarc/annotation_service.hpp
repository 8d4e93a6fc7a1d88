#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "tarc/corpus.hpp"
#include "tarc/evaluation.hpp"
#include "tarc/transliteration.hpp"

namespace tarc {

struct BlockSummary {
  int id = 0;
  BlockStatus status = BlockStatus::raw;
  std::size_t size = 0;    // rows
  std::size_t tokens = 0;  // surface tokens
  std::optional<double> accuracy;

  bool operator==(const BlockSummary&) const = default;
};

struct ModelSummary {
  int version = 0;
  std::size_t training_size = 0;
  std::vector<int> blocks;  // corrected blocks included

  bool operator==(const ModelSummary&) const = default;
};

struct AuditEntry {
  std::string ts;
  int block = 0;
  std::size_t row = 0;  // offset in stream.tsv
  std::string key;
  Morphemes before;
  Morphemes after;
  std::string kind;  // "auto" or "correction"

  bool operator==(const AuditEntry&) const = default;
};

struct Metrics {
  std::vector<std::pair<int, double>> block_accuracy;  // corrected blocks, by id
  std::vector<ModelSummary> growth;                    // one point per model version
  std::optional<std::string> cv;                       // last CV report, JSON

  bool operator==(const Metrics&) const = default;
};

// JSON payloads exchanged over HTTP. from_* throw Error(parse).
std::string to_json(const BlockSummary& s);
std::string to_json(const Block& b);
std::string to_json(const ModelSummary& m);
std::string to_json(const Metrics& m);
Block block_from_json(const std::string& text);
BlockSummary block_summary_from_json(const std::string& text);
std::map<std::string, Morphemes> corrections_from_json(const std::string& text);

BlockSummary summarize(const Block& b);

/// File-backed corpus store. Layout of the directory:
///   seed.tsv       gold rows the first model is trained on
///   stream.tsv     the unannotated rows as imported
///   audit.jsonl    one line per Tra change (auto or correction)
///   state.json     blocks, cursor, model history
///   model-v<N>.txt trained models
/// Every method is safe to call from several threads; reads run
/// concurrently, mutations are serialized.
class CorpusStore {
 public:
  // Throws Error(state) if the directory already holds a store.
  static std::unique_ptr<CorpusStore> create(const std::string& dir, const std::vector<TokenRecord>& seed,
                                             const std::vector<TokenRecord>& stream,
                                             const TransducerConfig& config = {});
  static std::unique_ptr<CorpusStore> open(const std::string& dir);

  std::vector<BlockSummary> list_blocks() const;
  Block get_block(int id) const;  // Error(not_found)
  std::size_t remaining() const;

  BlockSummary make_block(std::size_t size);
  BlockSummary annotate_block(int id);
  /// Applies corrections to an automatic block. A corrected block that no
  /// model was trained on yet accepts further corrections; later values win.
  BlockSummary post_corrections(int id, const std::map<std::string, Morphemes>& corrections);
  // Throws Error(state) when no corrected block was added since the last train.
  ModelSummary retrain();

  Metrics metrics() const;
  void record_cv(const CvReport& report);

  int model_version() const;
  std::shared_ptr<const TransducerModel> model() const;
  std::size_t training_size() const;

  /// Stream rows with the Tra values of every block applied.
  std::vector<TokenRecord> stream_records() const;
  std::vector<AuditEntry> audit() const;

  /// Rebuilds stream_records() from stream.tsv and audit.jsonl alone.
  static std::vector<TokenRecord> replay(const std::string& dir);

 private:
  struct BlockState {
    Block block;
    std::size_t start = 0;
    std::map<std::string, Morphemes> corrections;
    bool trained = false;
  };

  CorpusStore() = default;
  void persist() const;
  void append_audit(const std::vector<AuditEntry>& entries) const;
  BlockState& find(int id);
  const BlockState& find(int id) const;
  std::vector<TrainingPair> training_pairs() const;

  mutable std::shared_mutex mu_;
  std::string dir_;
  TransducerConfig config_;
  std::vector<TokenRecord> seed_;
  RecordStream stream_;
  std::vector<BlockState> blocks_;
  std::vector<ModelSummary> models_;
  std::shared_ptr<const TransducerModel> model_;
  std::optional<std::string> cv_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Routes one request against the store; the HTTP server is a thin shell
/// around this.
///   GET  /blocks                  list
///   POST /blocks                  {"size": n} -> new raw block
///   GET  /blocks/{id}             full block
///   POST /blocks/{id}/auto        annotate with the current model
///   POST /blocks/{id}/corrections {"corrections": {row_key: [morpheme...]}}
///   POST /retrain
///   GET  /metrics
HttpResponse handle_request(CorpusStore& store, const std::string& method, const std::string& path,
                            const std::string& body);

class AnnotationServer {
 public:
  explicit AnnotationServer(CorpusStore& store);
  ~AnnotationServer();

  // Returns the bound port (an ephemeral one if port is 0), or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tarc
