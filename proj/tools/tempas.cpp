// Copyright 2026 The Tempas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// tempas: build, inspect, query and serve tag indexes.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "tempas/index.hpp"
#include "tempas/ingest.hpp"
#include "tempas/query.hpp"
#include "tempas/service.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

enum class OutputFormat { kTable, kJson, kTsv };

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string scalar(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string joined(const json& array, const char* sep) {
  std::string out;
  for (const auto& v : array) {
    if (!out.empty()) out += sep;
    out += scalar(v);
  }
  return out;
}

// Column order shared by the table and tsv formats.
Table tabulate(const std::string& kind, const json& body) {
  Table t;
  if (kind == "tags" || kind == "explore") {
    t.header = {"tag", "score"};
    for (const auto& r : body) t.rows.push_back({scalar(r["tag"]), scalar(r["score"])});
  } else if (kind == "sites") {
    t.header = {"url", "score", "title"};
    for (const auto& r : body) {
      t.rows.push_back({scalar(r["url"]), scalar(r["score"]), joined(r["title"], " ")});
    }
  } else if (kind == "versions") {
    t.header = {"timestamp", "iso_time", "overlap", "tags", "wayback_url"};
    for (const auto& r : body) {
      t.rows.push_back({scalar(r["timestamp"]), scalar(r["iso_time"]), scalar(r["overlap"]),
                        joined(r["tags"], ","), scalar(r["wayback_url"])});
    }
  } else if (kind == "pmi") {
    t.header = {"url", "score"};
    t.rows.push_back({scalar(body["url"]), scalar(body["score"])});
  } else {  // key/value objects
    t.header = {"key", "value"};
    for (const auto& [k, v] : body.items()) t.rows.push_back({k, scalar(v)});
  }
  return t;
}

void print(const Table& t, OutputFormat format) {
  if (format == OutputFormat::kTsv) {
    auto line = [](const std::vector<std::string>& cells) {
      std::string out;
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "\t" : "") + cells[i];
      std::cout << out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return;
  }
  std::vector<std::size_t> width(t.header.size());
  for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += cells[i];
      if (i + 1 < cells.size()) out += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    std::cout << out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

void emit(const std::string& kind, const json& body, OutputFormat format) {
  if (format == OutputFormat::kJson) {
    std::cout << body.dump(2) << '\n';
  } else {
    print(tabulate(kind, body), format);
  }
}

int report_api_error(const tempas::ApiResponse& r) {
  std::cerr << "error: " << r.body.value("code", "internal") << ": "
            << r.body.value("message", "") << '\n';
  return r.status == 400 ? kUsage : kFailure;
}

struct BuildArgs {
  std::string input;
  std::string out;
  bool gzip = false;
  std::size_t memory_cap = std::size_t{1} << 30;
  unsigned threads = 0;
};

int cmd_build(const BuildArgs& args) {
  if (!fs::is_regular_file(args.input)) {
    std::cerr << "error: input not found: " << args.input << '\n';
    return kUsage;
  }
  const bool gzip = args.gzip || tempas::looks_gzipped(args.input);
  const auto started = std::chrono::steady_clock::now();
  try {
    tempas::IndexBuilder builder(args.out, {args.memory_cap, args.threads});
    const tempas::IngestStats stats = tempas::parse_file(
        args.input, gzip, [&](tempas::Record&& r) { builder.add(r); });
    const tempas::BuildReport report = builder.finish();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::cout << "lines_read          " << stats.lines_read << '\n'
              << "records_emitted     " << stats.records_emitted << '\n'
              << "skipped_empty_tags  " << stats.skipped_empty_tags << '\n'
              << "skipped_malformed   " << stats.skipped_malformed << '\n'
              << "tags                " << report.meta.tag_count << '\n'
              << "urls                " << report.meta.url_count << '\n';
    for (const auto& m : report.mappings) {
      std::cout << "entries  " << m.file << "  " << m.entries << '\n';
    }
    std::cout << "seconds             " << secs << '\n';
    return kOk;
  } catch (const tempas::IngestError& e) {
    std::cerr << "error: ingest aborted after " << e.stats.lines_read
              << " lines: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kFailure;
}

struct QueryArgs {
  std::string kind;
  std::string index;
  std::string tags;
  std::string from;
  std::string to;
  std::string url;
  std::string limit;
  std::string offset;
  OutputFormat format = OutputFormat::kTable;
};

std::shared_ptr<const tempas::QueryEngine> open_engine(const std::string& dir,
                                                       tempas::EngineDefaults defaults = {}) {
  return std::make_shared<tempas::QueryEngine>(tempas::IndexSet::open(dir), defaults);
}

int cmd_query(const QueryArgs& args) {
  std::shared_ptr<const tempas::QueryEngine> engine;
  try {
    engine = open_engine(args.index);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  const tempas::Api api(engine);

  tempas::Params params;
  auto set = [&](const char* key, const std::string& value) {
    if (!value.empty()) params[key] = value;
  };
  set("from", args.from);
  set("to", args.to);
  set("limit", args.limit);
  set("offset", args.offset);
  set("url", args.url);
  if (args.kind != "explore") params["tags"] = args.tags;

  tempas::ApiResponse r;
  if (args.kind == "tags" || args.kind == "explore") {
    r = api.tags(params);
  } else if (args.kind == "sites") {
    r = api.sites(params);
  } else if (args.kind == "versions") {
    r = api.versions(params);
  } else {  // pmi
    if (args.url.empty() || args.tags.empty()) {
      std::cerr << "error: pmi needs --url and --tags\n";
      return kUsage;
    }
    try {
      const auto meta = engine->index().meta();
      const auto from = args.from.empty() ? meta.month_min : tempas::Month::parse(args.from);
      const auto to = args.to.empty() ? meta.month_max : tempas::Month::parse(args.to);
      if (!from || !to) {
        std::cerr << "error: empty index\n";
        return kFailure;
      }
      const tempas::SiteUrl url(args.url);
      const tempas::Query q(tempas::parse_tag_list(args.tags), tempas::TimePeriod(*from, *to));
      r = {200, {{"url", url.text()}, {"score", engine->score_site_pmi(url, q)}}};
    } catch (const tempas::ApiError& e) {
      std::cerr << "error: " << e.code << ": " << e.message << '\n';
      return kUsage;
    } catch (const tempas::InvalidArgument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  if (!r.ok()) return report_api_error(r);
  emit(args.kind, r.body, args.format);
  return kOk;
}

int cmd_stats(const std::string& index, OutputFormat format) {
  try {
    const auto set = tempas::IndexSet::open(index);
    json body = tempas::to_json(set->meta());
    json files = json::array();
    for (const auto& m : set->mappings()) {
      files.push_back({{"file", m.file}, {"entries", m.entries}, {"bytes", m.bytes},
                       {"crc32", m.crc32}});
    }
    if (format == OutputFormat::kJson) {
      body["mappings"] = files;
      std::cout << body.dump(2) << '\n';
      return kOk;
    }
    print(tabulate("meta", body), format);
    Table t{{"file", "entries", "bytes", "crc32"}, {}};
    for (const auto& f : files) {
      t.rows.push_back({scalar(f["file"]), scalar(f["entries"]), scalar(f["bytes"]),
                        scalar(f["crc32"])});
    }
    std::cout << '\n';
    print(t, format);
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

struct ServeArgs {
  std::string index;
  std::string bind = "0.0.0.0";
  int port = 8887;
  std::size_t tag_limit = 50;
  std::size_t site_limit = 20;
  std::size_t title_length = 5;
};

int cmd_serve(const ServeArgs& args) {
  // Block termination signals before any worker thread exists; a dedicated
  // thread waits for them and stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::shared_ptr<const tempas::QueryEngine> engine;
  try {
    engine = open_engine(args.index, {args.tag_limit, args.site_limit, args.title_length});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  const tempas::Api api(engine);
  tempas::HttpServer server(api);
  int port = 0;
  try {
    port = server.bind(args.bind, args.port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  std::cerr << "serving " << args.index << " on http://" << args.bind << ":" << port
            << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() only returns after stop(), i.e. after the waiter saw a signal.
  waiter.join();
  std::cerr << "shut down" << std::endl;
  return kOk;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "tsv") return OutputFormat::kTsv;
  return OutputFormat::kTable;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal tag search over social bookmarking data"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build an index directory from a bookmark dump");
  build_cmd->add_option("input", build.input, "Tab-separated dump (.gz read as gzip)")
      ->required();
  build_cmd->add_option("-o,--out", build.out, "Output index directory")
      ->required()
      ->envname("TEMPAS_INDEX");
  build_cmd->add_flag("--gzip", build.gzip, "Force gzip decoding");
  build_cmd->add_option("--memory-cap", build.memory_cap, "Sort buffer bytes")
      ->envname("TEMPAS_MEMORY_CAP");
  build_cmd->add_option("--threads", build.threads, "Merge workers (0 = auto)");

  QueryArgs query;
  std::string query_format = "table";
  auto* query_cmd = app.add_subcommand("query", "Run a query against an index");
  query_cmd->add_option("kind", query.kind, "tags | explore | sites | versions | pmi")
      ->required()
      ->check(CLI::IsMember({"tags", "explore", "sites", "versions", "pmi"}));
  query_cmd->add_option("-i,--index", query.index, "Index directory")
      ->required()
      ->envname("TEMPAS_INDEX");
  query_cmd->add_option("-t,--tags", query.tags, "Comma-separated query tags");
  query_cmd->add_option("--from", query.from, "First month, YYYY-MM");
  query_cmd->add_option("--to", query.to, "Last month, YYYY-MM");
  query_cmd->add_option("--url", query.url, "Website (versions, pmi)");
  query_cmd->add_option("--limit", query.limit, "Maximum rows");
  query_cmd->add_option("--offset", query.offset, "Rows to skip (sites)");
  query_cmd->add_option("-f,--format", query_format, "table | json | tsv")
      ->check(CLI::IsMember({"table", "json", "tsv"}))
      ->envname("TEMPAS_FORMAT");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("-i,--index", serve.index, "Index directory")
      ->required()
      ->envname("TEMPAS_INDEX");
  serve_cmd->add_option("--bind", serve.bind, "Bind address")->envname("TEMPAS_BIND");
  serve_cmd->add_option("-p,--port", serve.port, "Port (0 = any free port)")
      ->envname("TEMPAS_PORT");
  serve_cmd->add_option("--tag-limit", serve.tag_limit, "Default tags per response")
      ->envname("TEMPAS_TAG_LIMIT");
  serve_cmd->add_option("--site-limit", serve.site_limit, "Default sites per page")
      ->envname("TEMPAS_SITE_LIMIT");
  serve_cmd->add_option("--title-length", serve.title_length, "Tags per site title")
      ->envname("TEMPAS_TITLE_LENGTH");

  std::string stats_index;
  std::string stats_format = "table";
  auto* stats_cmd = app.add_subcommand("stats", "Print index metadata and file statistics");
  stats_cmd->add_option("-i,--index", stats_index, "Index directory")
      ->required()
      ->envname("TEMPAS_INDEX");
  stats_cmd->add_option("-f,--format", stats_format, "table | json | tsv")
      ->check(CLI::IsMember({"table", "json", "tsv"}))
      ->envname("TEMPAS_FORMAT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*build_cmd) return cmd_build(build);
  if (*query_cmd) {
    query.format = parse_format(query_format);
    return cmd_query(query);
  }
  if (*serve_cmd) return cmd_serve(serve);
  if (*stats_cmd) return cmd_stats(stats_index, parse_format(stats_format));
  return kUsage;
}
