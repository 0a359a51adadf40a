// storsion command line: spec-file driven experiments over the C API.
//
// Exit codes: 0 decided/evidence verdicts, 2 undecided/inconclusive, 1 errors.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "storsion.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << data;
}

void emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty())
    std::cout << payload << "\n";
  else
    write_file(out_path, payload + "\n");
}

int64_t default_prefix(int64_t fallback) {
  if (const char* env = std::getenv("STORSION_DEFAULT_PREFIX")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v >= 2) return v;
  }
  return fallback;
}

struct SeqHandle {
  st_sequence* p = nullptr;
  ~SeqHandle() { st_sequence_free(p); }
};
struct ElemHandle {
  st_element* p = nullptr;
  ~ElemHandle() { st_element_free(p); }
};
struct SetHandle {
  st_index_set* p = nullptr;
  ~SetHandle() { st_index_set_free(p); }
};
struct ResultHandle {
  st_result* p = nullptr;
  ~ResultHandle() { st_result_free(p); }
};

[[noreturn]] void die(const std::string& context) {
  std::cerr << "error: " << context << ": " << st_last_error() << "\n";
  std::exit(1);
}

SeqHandle load_seq(const std::string& path) {
  SeqHandle h;
  if (st_sequence_parse(read_file(path).c_str(), &h.p) != ST_OK) die("sequence spec " + path);
  return h;
}

ElemHandle load_elem(const std::string& path) {
  ElemHandle h;
  if (st_element_parse(read_file(path).c_str(), &h.p) != ST_OK) die("element spec " + path);
  return h;
}

std::string params_json(int64_t prefix, const std::string& threshold,
                        const std::string& eps_grid, const std::string& delta, int parallelism) {
  std::ostringstream j;
  j << "{\"prefix\":" << prefix;
  if (!threshold.empty()) j << ",\"threshold\":\"" << threshold << "\"";
  if (!delta.empty()) j << ",\"delta\":\"" << delta << "\"";
  if (!eps_grid.empty()) {
    j << ",\"eps_grid\":[";
    std::stringstream ss(eps_grid);
    std::string item;
    bool first = true;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      j << (first ? "" : ",") << "\"" << item << "\"";
      first = false;
    }
    j << "]";
  }
  j << ",\"parallelism\":" << parallelism << "}";
  return j.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"storsion — statistical torsion experiments on the circle group"};
  app.require_subcommand(1);

  std::string seq_path, elem_path, set_path, out_path, out_dir, trace_path;
  std::string threshold = "1/100", eps_grid, delta = "1/100";
  int64_t prefix = default_prefix(100000);
  int parallelism = 1;
  std::uint64_t seed = 42;
  int size = 200;

  auto add_common = [&](CLI::App* cmd, bool needs_elem) {
    cmd->add_option("--seq", seq_path, "sequence spec file (JSON)")->required();
    if (needs_elem) cmd->add_option("--x", elem_path, "element spec file (JSON)")->required();
    cmd->add_option("--prefix", prefix, "prefix length N");
    cmd->add_option("--out", out_path, "write output here instead of stdout");
  };

  auto* c_expand = app.add_subcommand("expand", "digit expansion prefix");
  add_common(c_expand, true);

  auto* c_density = app.add_subcommand("density", "prefix density estimate of an index set");
  c_density->add_option("--set", set_path, "index-set spec file (JSON)")->required();
  c_density->add_option("--prefix", prefix, "prefix length N");
  c_density->add_option("--out", out_path, "write output here instead of stdout");

  auto* c_classify = app.add_subcommand("classify-seq", "splitting / d-splitting classification");
  c_classify->add_option("--seq", seq_path, "sequence spec file (JSON)")->required();
  c_classify->add_option("--prefix", prefix, "prefix length N");
  c_classify->add_option("--threshold", threshold, "density-zero threshold (rational)");
  c_classify->add_option("--out", out_path, "write output here instead of stdout");

  auto* c_oracle = app.add_subcommand("oracle", "statistical-convergence oracle");
  add_common(c_oracle, true);
  c_oracle->add_option("--eps-grid", eps_grid, "comma-separated epsilons (rationals)");
  c_oracle->add_option("--delta", delta, "exceptional-density tolerance (rational)");
  c_oracle->add_option("--parallelism", parallelism, "worker threads");
  c_oracle->add_option("--trace", trace_path, "write a per-n CSV trace here");

  auto* c_check = app.add_subcommand("check", "symbolic membership verdict");
  add_common(c_check, true);
  c_check->add_option("--threshold", threshold, "density-zero threshold (rational)");
  c_check->add_option("--eps-grid", eps_grid, "comma-separated epsilons (rationals)");
  c_check->add_option("--delta", delta, "oracle tolerance (rational)");
  c_check->add_option("--parallelism", parallelism, "worker threads");

  auto* c_compare = app.add_subcommand("compare", "symbolic verdict vs empirical oracle");
  add_common(c_compare, true);
  c_compare->add_option("--threshold", threshold, "density-zero threshold (rational)");
  c_compare->add_option("--eps-grid", eps_grid, "comma-separated epsilons (rationals)");
  c_compare->add_option("--delta", delta, "oracle tolerance (rational)");
  c_compare->add_option("--parallelism", parallelism, "worker threads");
  c_compare->add_option("--trace", trace_path, "write a per-n CSV trace here");

  auto* c_corpus = app.add_subcommand("corpus", "deterministic spec-pair corpus");
  c_corpus->add_option("--seed", seed, "generator seed")->required();
  c_corpus->add_option("--size", size, "number of (seq, element) pairs");
  c_corpus->add_option("--out-dir", out_dir, "write spec files and manifest here");
  c_corpus->add_option("--out", out_path, "write the manifest here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_expand->parsed()) {
      auto seq = load_seq(seq_path);
      auto elem = load_elem(elem_path);
      ResultHandle r;
      if (st_expand(seq.p, elem.p, prefix, &r.p) != ST_OK) die("expand");
      emit(st_result_payload(r.p), out_path);
      return st_result_exit_hint(r.p);
    }
    if (c_density->parsed()) {
      SetHandle set;
      if (st_index_set_parse(read_file(set_path).c_str(), &set.p) != ST_OK)
        die("index-set spec " + set_path);
      ResultHandle r;
      if (st_density(set.p, prefix, &r.p) != ST_OK) die("density");
      emit(st_result_payload(r.p), out_path);
      return st_result_exit_hint(r.p);
    }
    if (c_classify->parsed()) {
      auto seq = load_seq(seq_path);
      ResultHandle r;
      if (st_classify(seq.p, prefix, threshold.c_str(), &r.p) != ST_OK) die("classify-seq");
      emit(st_result_payload(r.p), out_path);
      return st_result_exit_hint(r.p);
    }
    if (c_oracle->parsed()) {
      auto seq = load_seq(seq_path);
      auto elem = load_elem(elem_path);
      if (!trace_path.empty()) {
        ResultHandle t;
        if (st_oracle_trace_csv(seq.p, elem.p, prefix, eps_grid.c_str(), &t.p) != ST_OK)
          die("oracle trace");
        write_file(trace_path, st_result_payload(t.p));
      }
      ResultHandle r;
      if (st_oracle(seq.p, elem.p, prefix, eps_grid.c_str(), delta.c_str(), parallelism, &r.p) !=
          ST_OK)
        die("oracle");
      emit(st_result_payload(r.p), out_path);
      return st_result_exit_hint(r.p);
    }
    if (c_check->parsed() || c_compare->parsed()) {
      auto seq = load_seq(seq_path);
      auto elem = load_elem(elem_path);
      std::string params = params_json(prefix, threshold, eps_grid, delta, parallelism);
      if (c_compare->parsed() && !trace_path.empty()) {
        ResultHandle t;
        if (st_oracle_trace_csv(seq.p, elem.p, prefix, eps_grid.c_str(), &t.p) != ST_OK)
          die("oracle trace");
        write_file(trace_path, st_result_payload(t.p));
      }
      ResultHandle r;
      st_status s = c_check->parsed() ? st_check(seq.p, elem.p, params.c_str(), &r.p)
                                      : st_compare(seq.p, elem.p, params.c_str(), &r.p);
      if (s != ST_OK) die(c_check->parsed() ? "check" : "compare");
      emit(st_result_payload(r.p), out_path);
      return st_result_exit_hint(r.p);
    }
    if (c_corpus->parsed()) {
      ResultHandle r;
      if (st_corpus(seed, size, &r.p) != ST_OK) die("corpus");
      std::string manifest = st_result_payload(r.p);
      if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        auto doc = nlohmann::ordered_json::parse(manifest);
        for (const auto& entry : doc.at("entries")) {
          const std::string id = entry.at("id").get<std::string>();
          write_file((fs::path(out_dir) / ("seq_" + id + ".json")).string(),
                     entry.at("seq").dump(2) + "\n");
          write_file((fs::path(out_dir) / ("elem_" + id + ".json")).string(),
                     entry.at("element").dump(2) + "\n");
        }
        write_file((fs::path(out_dir) / "manifest.json").string(), manifest + "\n");
      }
      emit(manifest, out_path);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
