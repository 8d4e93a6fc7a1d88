// tarc: command-line front end for the annotation toolkit.
// Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
// the library error code on failure (2 bad argument, 3 parse, 4 not found,
// 5 state, 6 io), 1 for anything else.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tarc/annotation_service.hpp"
#include "tarc/code_system.hpp"
#include "tarc/collection.hpp"
#include "tarc/corpus.hpp"
#include "tarc/error.hpp"
#include "tarc/evaluation.hpp"
#include "tarc/normalization.hpp"
#include "tarc/segmentation.hpp"
#include "tarc/transliteration.hpp"

using namespace tarc;

namespace {

struct Paths {
  std::string mapping, lexicon, clitics, categories;
};

struct Resources {
  MappingTable table;
  ExceptionLexicon lex;
  CliticInventory inv;
  std::vector<Category> categories;
};

Resources load_resources(const Paths& p) {
  Resources r{p.mapping.empty() ? MappingTable::builtin() : MappingTable::load(p.mapping),
              p.lexicon.empty() ? ExceptionLexicon::builtin() : ExceptionLexicon::load(p.lexicon),
              p.clitics.empty() ? CliticInventory::builtin() : CliticInventory::load(p.clitics),
              p.categories.empty() ? builtin_categories() : load_categories(p.categories)};
  return r;
}

std::string join(const Morphemes& m, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += sep;
    out += m[i];
  }
  return out;
}

Morphemes split_morphemes(const std::string& s) {
  Morphemes out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find('|', start);
    out.push_back(s.substr(start, p == std::string::npos ? std::string::npos : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

std::string flag_name(NormFlag f) {
  switch (f) {
    case NormFlag::code_switch: return "code_switch";
    case NormFlag::loanword: return "loanword";
    case NormFlag::glottal_exception: return "glottal_exception";
    case NormFlag::negation_circumfix: return "negation_circumfix";
  }
  return "?";
}

std::vector<std::string> tokens_or_stdin(const std::vector<std::string>& given) {
  if (!given.empty()) return given;
  std::vector<std::string> out;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// corrections file: row_key<TAB>morpheme|morpheme..., or a JSON object.
std::map<std::string, Morphemes> read_corrections(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return corrections_from_json(text);
  std::map<std::string, Morphemes> out;
  std::istringstream lines(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 == line.size()) {
      throw Error(ErrorCode::parse, path + ":" + std::to_string(n) + ": expected key<TAB>morphemes");
    }
    out[line.substr(0, tab)] = split_morphemes(line.substr(tab + 1));
  }
  return out;
}

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arabish to Arabic transliteration and corpus annotation"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags; flags win");
  app.require_subcommand(1);

  Paths paths;
  std::uint64_t seed = kDefaultSeed;
  TransducerConfig tc;
  app.add_option("--mapping", paths.mapping, "code-system table (default: built in)")->check(CLI::ExistingFile);
  app.add_option("--lexicon", paths.lexicon, "exception lexicon (default: built in)")->check(CLI::ExistingFile);
  app.add_option("--clitics", paths.clitics, "clitic inventory (default: built in)")->check(CLI::ExistingFile);
  app.add_option("--categories", paths.categories, "category file (default: built in)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--order", tc.n, "morpheme LM order")->capture_default_str();
  app.add_option("--add-k", tc.k, "add-k smoothing constant")->capture_default_str();
  app.add_option("--lambda", tc.lambda, "channel weight in [0,1]")->capture_default_str();
  app.add_option("--beam", tc.beam_width, "beam width")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "turn raw text dumps into unannotated corpus rows (TSV)");
  std::string ingest_dir;
  bool only_matching = false;
  ingest->add_option("dir", ingest_dir, "directory of raw text dumps")->required()->check(CLI::ExistingDirectory);
  ingest->add_flag("--only-matching", only_matching, "keep texts matching at least one category");

  // normalize
  auto* normalize_cmd = app.add_subcommand("normalize", "normalize tokens (args or stdin lines)");
  std::vector<std::string> norm_tokens;
  normalize_cmd->add_option("tokens", norm_tokens, "tokens");

  // segment
  auto* segment_cmd = app.add_subcommand("segment", "list clitic segmentations of tokens");
  std::vector<std::string> seg_tokens;
  segment_cmd->add_option("tokens", seg_tokens, "tokens");

  // expand
  auto* expand_cmd = app.add_subcommand("expand", "show the candidate lattice of a token");
  std::string expand_token, expand_contains;
  bool expand_loanword = false;
  expand_cmd->add_option("--token", expand_token, "Arabish token")->required();
  expand_cmd->add_flag("--loanword", expand_loanword, "enable loanword-only mappings");
  expand_cmd->add_option("--contains", expand_contains, "only report whether this Arabic string is a path");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a transducer on an annotated corpus");
  std::string train_corpus, train_out;
  train_cmd->add_option("--corpus", train_corpus, "annotated TSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_out, "model file")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "transliterate tokens with a trained model");
  std::string predict_model;
  std::vector<std::string> predict_tokens;
  bool predict_alts = false, predict_loanword = false;
  predict_cmd->add_option("--model", predict_model, "model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--token", predict_tokens, "token (repeatable; default: stdin lines)");
  predict_cmd->add_flag("--alternatives", predict_alts, "also print ranked alternatives");
  predict_cmd->add_flag("--loanword", predict_loanword, "treat tokens as loanwords (default: lexicon lookup)");

  // cv
  auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation on an annotated corpus");
  std::string cv_corpus, cv_store;
  int cv_k = 10;
  bool cv_json = false, cv_grouped = false;
  cv_cmd->add_option("--corpus", cv_corpus, "annotated TSV")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--k", cv_k, "number of folds")->capture_default_str();
  cv_cmd->add_flag("--json", cv_json, "JSON report");
  cv_cmd->add_flag("--grouped", cv_grouped, "keep sentences within one fold");
  cv_cmd->add_option("--store", cv_store, "also record the report in this store's metrics");

  // block
  auto* block_cmd = app.add_subcommand("block", "incremental block annotation over a store");
  block_cmd->require_subcommand(1);
  std::string store_dir;
  auto* block_init = block_cmd->add_subcommand("init", "create a store from a gold seed and a raw stream");
  std::string init_seed, init_stream;
  block_init->add_option("--store", store_dir, "store directory")->required();
  block_init->add_option("--seed-corpus", init_seed, "annotated TSV for the first model")->required()->check(CLI::ExistingFile);
  block_init->add_option("--stream", init_stream, "unannotated TSV")->required()->check(CLI::ExistingFile);
  auto* block_make = block_cmd->add_subcommand("make", "cut the next block from the stream");
  std::size_t block_size = 5000;
  block_make->add_option("--store", store_dir, "store directory")->required();
  block_make->add_option("--size", block_size, "rows per block")->capture_default_str();
  auto* block_auto = block_cmd->add_subcommand("auto", "annotate a raw block with the current model");
  int block_id = 0;
  block_auto->add_option("--store", store_dir, "store directory")->required();
  block_auto->add_option("--id", block_id, "block id")->required();
  auto* block_export = block_cmd->add_subcommand("export", "print a block");
  std::string export_format = "tsv";
  block_export->add_option("--store", store_dir, "store directory")->required();
  block_export->add_option("--id", block_id, "block id")->required();
  block_export->add_option("--format", export_format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();
  auto* block_import = block_cmd->add_subcommand("import-corrections", "apply corrections to an auto block");
  std::string corrections_file;
  block_import->add_option("--store", store_dir, "store directory")->required();
  block_import->add_option("--id", block_id, "block id")->required();
  block_import->add_option("--file", corrections_file, "key<TAB>m1|m2 lines, or a JSON object")->required()->check(CLI::ExistingFile);
  auto* block_retrain = block_cmd->add_subcommand("retrain", "train the next model version on all corrected data");
  block_retrain->add_option("--store", store_dir, "store directory")->required();
  auto* block_list = block_cmd->add_subcommand("list", "list blocks");
  block_list->add_option("--store", store_dir, "store directory")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API over a store");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--store", store_dir, "store directory")->required();
  serve_cmd->add_option("--host", host, "bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "port (0 picks a free one)")->capture_default_str();

  // export
  auto* export_cmd = app.add_subcommand("export", "write the store's corpus (seed + annotated stream) as TSV");
  std::string export_out;
  export_cmd->add_option("--store", store_dir, "store directory")->required();
  export_cmd->add_option("--out", export_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    const Resources res = load_resources(paths);

    if (*ingest) {
      DirectorySource src(ingest_dir);
      std::vector<TokenRecord> rows;
      std::size_t texts = 0, kept = 0;
      while (auto text = src.next()) {
        ++texts;
        const auto matches = match_categories(*text, res.categories);
        const auto meta = extract_metadata(text->profile);
        for (const auto& w : meta.warnings) std::cerr << text->source_code << ": " << w << "\n";
        std::cerr << text->source_code << "\t";
        for (std::size_t i = 0; i < matches.size(); ++i) std::cerr << (i ? "," : "") << matches[i].category;
        std::cerr << "\n";
        if (only_matching && matches.empty()) continue;
        ++kept;
        auto r = tokenize_raw_text(*text);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      std::cout << write_tsv(rows);
      std::cerr << "ingested " << kept << " of " << texts << " texts, " << rows.size() << " rows\n";
    } else if (*normalize_cmd) {
      for (const auto& t : tokens_or_stdin(norm_tokens)) {
        const auto r = normalize(t, res.lex);
        std::cout << t << "\t" << r.normalized << "\t";
        bool first = true;
        for (auto f : r.flags) {
          std::cout << (first ? "" : ",") << flag_name(f);
          first = false;
        }
        if (first) std::cout << "-";
        std::cout << "\n";
      }
    } else if (*segment_cmd) {
      for (const auto& t : tokens_or_stdin(seg_tokens)) {
        for (const auto& s : segment(normalize_token(t), res.inv)) {
          std::cout << t << "\t";
          for (std::size_t i = 0; i < s.parts.size(); ++i) {
            std::cout << (i ? " " : "") << s.parts[i].latin << "/" << to_string(s.parts[i].kind);
          }
          std::cout << "\n";
        }
      }
    } else if (*expand_cmd) {
      const auto lat = expand(normalize_token(expand_token), expand_loanword || res.lex.is_loanword(expand_token), res.table);
      if (!expand_contains.empty()) {
        const bool yes = contains_path(lat, expand_contains);
        std::cout << (yes ? "yes" : "no") << "\n";
        return yes ? 0 : 1;
      }
      std::cout << "paths\t" << lat.path_count() << "\n";
      for (const auto& b : lat.branches) {
        std::cout << "branch";
        for (const auto& u : b.segmentation.units) std::cout << " " << u.text;
        std::cout << "\t" << b.path_count() << "\n";
        for (const auto& p : b.positions) {
          std::cout << "  " << p.unit.text << "\t" << (p.passthrough ? "passthrough" : "") ;
          for (const auto& c : p.candidates) std::cout << "[" << c << "]";
          std::cout << "\n";
        }
      }
    } else if (*train_cmd) {
      const auto pairs = pairs_from_records(read_tsv_file(train_corpus), res.lex);
      const auto model = TransducerModel::train(pairs, tc, res.table, res.inv);
      model.save(train_out);
      std::cerr << "trained on " << pairs.size() << " pairs, " << model.stats().aligned << " aligned, "
                << model.stats().oov_structure << " outside the candidate space\n";
    } else if (*predict_cmd) {
      const auto model = TransducerModel::load(predict_model);
      for (const auto& t : tokens_or_stdin(predict_tokens)) {
        const auto p = model.predict(t, predict_loanword || res.lex.is_loanword(t));
        std::cout << fuse_morphemes(p.morphemes);
        if (predict_alts) {
          std::cout << "\t" << join(p.morphemes, "|");
          for (const auto& a : p.alternatives) std::cout << "\t" << join(a.morphemes, "|");
        }
        std::cout << "\n";
      }
    } else if (*cv_cmd) {
      const auto records = read_tsv_file(cv_corpus);
      std::vector<SentenceKey> keys;
      const auto pairs = pairs_from_records(records, res.lex, &keys);
      CvOptions opt;
      opt.k = cv_k;
      opt.seed = seed;
      opt.config = tc;
      if (cv_grouped) {
        std::map<SentenceKey, std::size_t> ids;
        std::vector<std::size_t> groups;
        for (const auto& k : keys) groups.push_back(ids.emplace(k, ids.size()).first->second);
        opt.groups = groups;
      }
      const auto report = kfold_cv(pairs, opt, res.table, res.inv);
      std::cout << (cv_json ? report.to_json() + "\n" : report.to_text());
      if (!cv_store.empty()) CorpusStore::open(cv_store)->record_cv(report);
    } else if (*block_cmd) {
      if (*block_init) {
        auto store = CorpusStore::create(store_dir, read_tsv_file(init_seed), read_tsv_file(init_stream), tc);
        std::cout << to_json(store->metrics().growth.back()) << "\n";
      } else {
        auto store = CorpusStore::open(store_dir);
        if (*block_make) {
          std::cout << to_json(store->make_block(block_size)) << "\n";
        } else if (*block_auto) {
          std::cout << to_json(store->annotate_block(block_id)) << "\n";
        } else if (*block_export) {
          const auto b = store->get_block(block_id);
          std::cout << (export_format == "json" ? to_json(b) + "\n" : write_tsv(b.records));
        } else if (*block_import) {
          std::cout << to_json(store->post_corrections(block_id, read_corrections(corrections_file))) << "\n";
        } else if (*block_retrain) {
          std::cout << to_json(store->retrain()) << "\n";
        } else if (*block_list) {
          for (const auto& s : store->list_blocks()) std::cout << to_json(s) << "\n";
        }
      }
    } else if (*serve_cmd) {
      auto store = CorpusStore::open(store_dir);
      AnnotationServer server(*store);
      const int bound = server.bind(host, port);
      if (bound < 0) throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ":" << bound << "\n";
      server.serve();
    } else if (*export_cmd) {
      auto store = CorpusStore::open(store_dir);
      auto rows = read_tsv_file(store_dir + "/seed.tsv");
      const auto stream = store->stream_records();
      rows.insert(rows.end(), stream.begin(), stream.end());
      if (export_out.empty()) {
        std::cout << write_tsv(rows);
      } else {
        write_tsv_file(export_out, rows);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
