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

// JSON web API over a QueryEngine.
//
//   GET /api/meta
//   GET /api/tags?tags=a,b&from=YYYY-MM&to=YYYY-MM&limit=N
//   GET /api/sites?tags=a,b&from&to&limit&offset
//   GET /api/versions?url=U&tags=a,b&from&to
//
// Sites and versions are separate requests: /api/sites never reads version
// timestamps, the client fetches versions per site afterwards. Errors are
// {"code", "message"} with code one of bad_query, bad_period, not_found,
// internal.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tempas/query.hpp"

namespace tempas {

struct ApiError {
  std::string code;
  std::string message;
  int http_status = 500;
};

using Params = std::map<std::string, std::string, std::less<>>;

struct ApiResponse {
  int status = 200;
  nlohmann::json body;

  bool ok() const noexcept { return status == 200; }
};

nlohmann::json to_json(const IndexMeta& meta);
nlohmann::json to_json(const std::vector<RankedTag>& tags);
nlohmann::json to_json(const std::vector<RankedSite>& sites);
nlohmann::json to_json(const SiteUrl& site, const std::vector<RankedVersion>& versions);
nlohmann::json to_json(const ApiError& error);

class Api {
 public:
  explicit Api(std::shared_ptr<const QueryEngine> engine);

  ApiResponse meta() const;
  ApiResponse tags(const Params& params) const;
  ApiResponse sites(const Params& params) const;
  ApiResponse versions(const Params& params) const;

  // Routes "/api/<name>"; unknown paths are not_found.
  ApiResponse handle(std::string_view path, const Params& params) const;

  const QueryEngine& engine() const noexcept { return *engine_; }

 private:
  std::shared_ptr<const QueryEngine> engine_;
};

// Comma-separated tag list. Throws ApiError(bad_query) on empty elements or
// invalid tags; an empty string is an empty list.
std::vector<Tag> parse_tag_list(std::string_view csv);

// HTTP/1.1 front end. Requests run concurrently on a worker pool; stop()
// lets in-flight requests finish.
class HttpServer {
 public:
  explicit HttpServer(const Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds without serving yet. port 0 picks a free port. Returns the bound
  // port; throws std::runtime_error if binding fails.
  int bind(const std::string& host, int port);
  // Serves until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tempas
