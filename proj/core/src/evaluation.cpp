#include "tarc/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tarc/error.hpp"
#include "tarc/segmentation.hpp"
#include "tarc/utf8.hpp"

namespace tarc {

void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    // Rejection sampling keeps the draw unbiased and portable.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(items[i - 1], items[r % bound]);
  }
}

FoldPlan FoldPlan::make(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "folds: k must be at least 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  seeded_shuffle(order, seed);
  plan.assignments.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) plan.assignments[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return plan;
}

FoldPlan FoldPlan::grouped(const std::vector<std::size_t>& group_of, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "folds: k must be at least 2");
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < group_of.size(); ++i) groups[group_of[i]].push_back(i);
  std::vector<std::size_t> ids;
  for (const auto& [g, _] : groups) ids.push_back(g);
  seeded_shuffle(ids, seed);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(group_of.size(), 0);
  std::vector<std::size_t> load(static_cast<std::size_t>(k), 0);
  for (std::size_t g : ids) {
    const auto fold = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    for (std::size_t i : groups[g]) plan.assignments[i] = static_cast<int>(fold);
    load[fold] += groups[g].size();
  }
  return plan;
}

std::vector<std::size_t> FoldPlan::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(k), 0);
  for (int f : assignments) ++s[static_cast<std::size_t>(f)];
  return s;
}

double CvReport::subset_mean(const std::vector<bool>& mask) const {
  std::vector<std::size_t> hits(static_cast<std::size_t>(k), 0), total(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < fold_of.size() && i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const auto f = static_cast<std::size_t>(fold_of[i]);
    ++total[f];
    hits[f] += correct[i] ? 1 : 0;
  }
  double sum = 0.0;
  int used = 0;
  for (std::size_t f = 0; f < total.size(); ++f) {
    if (total[f] == 0) continue;
    sum += static_cast<double>(hits[f]) / static_cast<double>(total[f]);
    ++used;
  }
  return used == 0 ? 0.0 : sum / used;
}

std::string CvReport::to_text() const {
  std::ostringstream out;
  char buf[64];
  out << "k\t" << k << "\nseed\t" << seed << "\ngrouped\t" << (grouped ? "yes" : "no") << "\n";
  out << "config\tn=" << config.n << " k=" << config.k << " beam=" << config.beam_width << " lambda=" << config.lambda
      << "\n";
  for (std::size_t f = 0; f < per_fold.size(); ++f) {
    std::snprintf(buf, sizeof buf, "%.6f", per_fold[f]);
    out << "fold " << f << "\t" << fold_sizes[f] << "\t" << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.6f", mean);
  out << "mean\t" << buf << "\n";
  return out.str();
}

std::string CvReport::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["seed"] = seed;
  j["grouped"] = grouped;
  j["config"] = {{"n", config.n}, {"k", config.k}, {"beam_width", config.beam_width}, {"lambda", config.lambda}};
  j["per_fold"] = per_fold;
  j["fold_sizes"] = fold_sizes;
  j["mean"] = mean;
  return j.dump(2);
}

CvReport kfold_cv(const std::vector<TrainingPair>& pairs, const CvOptions& options, const MappingTable& table,
                  const CliticInventory& inv) {
  if (options.k < 2) throw Error(ErrorCode::invalid_argument, "cv: k must be at least 2");
  if (pairs.size() < static_cast<std::size_t>(options.k)) {
    throw Error(ErrorCode::invalid_argument,
                "cv: " + std::to_string(pairs.size()) + " pairs for " + std::to_string(options.k) + " folds");
  }
  if (options.groups && options.groups->size() != pairs.size()) {
    throw Error(ErrorCode::invalid_argument, "cv: group list does not match the pairs");
  }
  const FoldPlan plan = options.groups ? FoldPlan::grouped(*options.groups, options.k, options.seed)
                                       : FoldPlan::make(pairs.size(), options.k, options.seed);

  struct FoldResult {
    std::vector<std::size_t> test;
    std::vector<Morphemes> predicted;
  };
  auto run_fold = [&](int fold) {
    FoldResult r;
    std::vector<TrainingPair> train;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (plan.assignments[i] == fold) {
        r.test.push_back(i);
      } else {
        train.push_back(pairs[i]);
      }
    }
    if (train.empty() || r.test.empty()) return r;
    const auto model = TransducerModel::train(train, options.config, table, inv);
    for (std::size_t i : r.test) r.predicted.push_back(model.predict(pairs[i].arabish, pairs[i].loanword).morphemes);
    return r;
  };

  std::vector<FoldResult> results;
  if (options.parallel) {
    std::vector<std::future<FoldResult>> jobs;
    for (int f = 0; f < options.k; ++f) jobs.push_back(std::async(std::launch::async, run_fold, f));
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (int f = 0; f < options.k; ++f) results.push_back(run_fold(f));
  }

  CvReport report;
  report.k = options.k;
  report.seed = options.seed;
  report.config = options.config;
  report.grouped = options.groups.has_value();
  report.fold_of = plan.assignments;
  report.correct.assign(pairs.size(), false);
  report.predictions.assign(pairs.size(), {});
  double sum = 0.0;
  int used = 0;
  for (int f = 0; f < options.k; ++f) {
    const auto& r = results[static_cast<std::size_t>(f)];
    report.fold_sizes.push_back(r.test.size());
    std::vector<Morphemes> golds;
    for (std::size_t t = 0; t < r.test.size(); ++t) {
      golds.push_back(pairs[r.test[t]].arabic_morphemes);
      if (t < r.predicted.size()) {
        report.predictions[r.test[t]] = r.predicted[t];
        report.correct[r.test[t]] = r.predicted[t] == golds.back();
      }
    }
    // An empty grouped fold has nothing to score.
    if (r.test.empty()) {
      report.per_fold.push_back(0.0);
      continue;
    }
    const double acc = r.predicted.size() == golds.size() ? token_accuracy(r.predicted, golds) : 0.0;
    report.per_fold.push_back(acc);
    sum += acc;
    ++used;
  }
  report.mean = used == 0 ? 0.0 : sum / used;
  return report;
}

// ---------------------------------------------------------------- blocks

std::string_view to_string(BlockStatus s) {
  switch (s) {
    case BlockStatus::raw: return "raw";
    case BlockStatus::automatic: return "auto";
    case BlockStatus::corrected: return "corrected";
  }
  return "raw";
}

std::optional<BlockStatus> block_status_from(std::string_view name) {
  if (name == "raw") return BlockStatus::raw;
  if (name == "auto") return BlockStatus::automatic;
  if (name == "corrected") return BlockStatus::corrected;
  return std::nullopt;
}

std::vector<std::size_t> Block::surface_rows() const {
  std::vector<std::size_t> out;
  for (const auto& g : surface_groups(records)) out.push_back(g.head);
  return out;
}

std::vector<TrainingPair> Block::pairs(const ExceptionLexicon& lex) const {
  std::vector<TrainingPair> out;
  if (status != BlockStatus::corrected) return out;
  std::set<SentenceKey> dropped;
  const auto groups = surface_groups(records);
  for (const auto& g : groups) {
    if (detect_code_switch(records[g.head].arabish, lex)) dropped.insert(key_of(records[g.head]));
  }
  for (const auto& g : groups) {
    const auto& head = records[g.head];
    if (dropped.count(key_of(head))) continue;
    const auto& m = finals[g.head];
    bool arabic = false;
    for (const auto& part : m) arabic = arabic || utf8::contains_arabic(part);
    if (!arabic || m.empty() || normalize_token(head.arabish).empty()) continue;
    out.push_back({head.arabish, m, lex.is_loanword(head.arabish)});
  }
  return out;
}

RecordStream::RecordStream(std::vector<TokenRecord> records, std::size_t cursor)
    : records_(std::move(records)), cursor_(std::min(cursor, records_.size())) {}

Block RecordStream::make_block(std::size_t size, int id) {
  if (size == 0) throw Error(ErrorCode::invalid_argument, "block: size must be at least 1");
  if (remaining() == 0) throw Error(ErrorCode::state, "block: no records remain");
  std::size_t end = std::min(records_.size(), cursor_ + size);
  // Do not cut through a range group: extend to its last component.
  for (std::size_t i = cursor_; i < end; ++i) {
    if (!records_[i].w.is_range()) continue;
    const std::size_t group_end = i + 1 + static_cast<std::size_t>(records_[i].w.width());
    end = std::max(end, std::min(group_end, records_.size()));
  }
  Block b;
  b.id = id;
  b.records.assign(records_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                   records_.begin() + static_cast<std::ptrdiff_t>(end));
  cursor_ = end;
  return b;
}

Block auto_annotate(Block block, const TransducerModel& model, const ExceptionLexicon& lex) {
  if (block.status != BlockStatus::raw) {
    throw Error(ErrorCode::state, "block " + std::to_string(block.id) + " is " + std::string(to_string(block.status)) +
                                      ", expected raw");
  }
  auto& recs = block.records;
  block.auto_predictions.assign(recs.size(), {});
  for (const auto& g : surface_groups(recs)) {
    auto& head = recs[g.head];
    const Morphemes pred = model.predict(head.arabish, lex.is_loanword(head.arabish)).morphemes;
    block.auto_predictions[g.head] = pred;
    head.tra = fuse_morphemes(pred);
    for (std::size_t c = 0; c < g.component_count; ++c) {
      const std::size_t idx = g.head + 1 + c;
      Morphemes part;
      if (pred.size() == g.component_count) {
        part = {pred[c]};
      } else {
        part = model.predict(recs[idx].arabish, lex.is_loanword(recs[idx].arabish)).morphemes;
      }
      block.auto_predictions[idx] = part;
      recs[idx].tra = fuse_morphemes(part);
    }
  }
  block.status = BlockStatus::automatic;
  return block;
}

Block ingest_corrections(Block block, const std::map<std::string, Morphemes>& corrections) {
  if (block.status != BlockStatus::automatic) {
    throw Error(ErrorCode::state, "block " + std::to_string(block.id) + " is " + std::string(to_string(block.status)) +
                                      ", expected auto");
  }
  auto& recs = block.records;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < recs.size(); ++i) index.emplace(row_key(recs[i]), i);
  for (const auto& [key, _] : corrections) {
    if (!index.count(key)) {
      throw Error(ErrorCode::not_found, "block " + std::to_string(block.id) + " has no row " + key);
    }
  }

  block.finals = block.auto_predictions;
  for (const auto& g : surface_groups(recs)) {
    auto head_fix = corrections.find(row_key(recs[g.head]));
    bool component_fixed = false;
    for (std::size_t c = 0; c < g.component_count; ++c) {
      const std::size_t idx = g.head + 1 + c;
      if (auto it = corrections.find(row_key(recs[idx])); it != corrections.end()) {
        block.finals[idx] = it->second;
        component_fixed = true;
      }
    }
    if (head_fix != corrections.end()) {
      block.finals[g.head] = head_fix->second;
      if (head_fix->second.size() == g.component_count) {
        for (std::size_t c = 0; c < g.component_count; ++c) block.finals[g.head + 1 + c] = {head_fix->second[c]};
      }
    } else if (component_fixed) {
      Morphemes joined;
      for (std::size_t c = 0; c < g.component_count; ++c) {
        const auto& part = block.finals[g.head + 1 + c];
        joined.insert(joined.end(), part.begin(), part.end());
      }
      block.finals[g.head] = joined;
    }
  }
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].tra = fuse_morphemes(block.finals[i]);
  block.status = BlockStatus::corrected;
  block.accuracy_after_correction = block_accuracy(block);
  return block;
}

double block_accuracy(const Block& block) {
  std::vector<Morphemes> predicted, finals;
  for (std::size_t i : block.surface_rows()) {
    predicted.push_back(block.auto_predictions.at(i));
    finals.push_back(block.finals.at(i));
  }
  return token_accuracy(predicted, finals);
}

}  // namespace tarc
