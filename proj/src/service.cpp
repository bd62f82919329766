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

#include "tempas/service.hpp"

#include <charconv>
#include <optional>
#include <stdexcept>

#include "httplib.h"

namespace tempas {
namespace {

using nlohmann::json;

ApiError bad_query(std::string message) { return {"bad_query", std::move(message), 400}; }
ApiError bad_period(std::string message) { return {"bad_period", std::move(message), 400}; }

std::optional<std::string_view> param(const Params& params, std::string_view name) {
  auto it = params.find(name);
  if (it == params.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::size_t count_param(const Params& params, std::string_view name, std::size_t fallback) {
  auto text = param(params, name);
  if (!text || text->empty()) return fallback;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (ec != std::errc{} || ptr != text->data() + text->size()) {
    throw bad_query(std::string(name) + " must be a non-negative integer");
  }
  return value;
}

// Resolves from/to, defaulting to the indexed range. nullopt means the index
// is empty and no explicit bound was given.
std::optional<TimePeriod> period_param(const Params& params, const IndexMeta& meta) {
  auto month = [&](std::string_view name,
                   const std::optional<Month>& fallback) -> std::optional<Month> {
    auto text = param(params, name);
    if (!text || text->empty()) return fallback;
    try {
      return Month::parse(*text);
    } catch (const InvalidArgument& e) {
      throw bad_period(std::string(name) + ": " + e.what());
    }
  };
  const auto from = month("from", meta.month_min);
  const auto to = month("to", meta.month_max);
  if (!from || !to) return std::nullopt;
  if (*to < *from) {
    throw bad_period("from " + from->to_string() + " is after to " + to->to_string());
  }
  return TimePeriod(*from, *to);
}

std::vector<Tag> tags_param(const Params& params) {
  auto text = param(params, "tags");
  return text ? parse_tag_list(*text) : std::vector<Tag>{};
}

json tag_array(const std::vector<Tag>& tags) {
  json out = json::array();
  for (const Tag& t : tags) out.push_back(t.text());
  return out;
}

template <typename Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ApiError& e) {
    return {e.http_status, to_json(e)};
  } catch (const std::exception& e) {
    return {500, to_json(ApiError{"internal", e.what(), 500})};
  }
}

}  // namespace

std::vector<Tag> parse_tag_list(std::string_view csv) {
  std::vector<Tag> tags;
  if (csv.empty()) return tags;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = csv.find(',', start);
    const std::string_view piece = csv.substr(start, comma == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : comma - start);
    auto tag = Tag::normalize(piece);
    if (!tag) throw bad_query("malformed tag list '" + std::string(csv) + "'");
    tags.push_back(std::move(*tag));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  canonicalize(tags);
  return tags;
}

json to_json(const IndexMeta& meta) {
  json out = {{"record_count", meta.record_count},
              {"tag_count", meta.tag_count},
              {"url_count", meta.url_count}};
  if (meta.month_min) out["month_min"] = meta.month_min->to_string();
  if (meta.month_max) out["month_max"] = meta.month_max->to_string();
  return out;
}

json to_json(const std::vector<RankedTag>& tags) {
  json out = json::array();
  for (const RankedTag& t : tags) out.push_back({{"tag", t.tag.text()}, {"score", t.score}});
  return out;
}

json to_json(const std::vector<RankedSite>& sites) {
  json out = json::array();
  for (const RankedSite& s : sites) {
    out.push_back({{"url", s.url.text()}, {"score", s.score}, {"title", tag_array(s.title)}});
  }
  return out;
}

json to_json(const SiteUrl& site, const std::vector<RankedVersion>& versions) {
  json out = json::array();
  for (const RankedVersion& v : versions) {
    out.push_back({{"timestamp", v.time.seconds},
                   {"iso_time", iso_utc(v.time)},
                   {"tags", tag_array(v.tags)},
                   {"overlap", v.overlap},
                   {"wayback_url", wayback_url(site, v.time)}});
  }
  return out;
}

json to_json(const ApiError& error) {
  return {{"code", error.code}, {"message", error.message}};
}

Api::Api(std::shared_ptr<const QueryEngine> engine) : engine_(std::move(engine)) {}

ApiResponse Api::meta() const {
  return guarded([&] { return ApiResponse{200, to_json(engine_->index().meta())}; });
}

ApiResponse Api::tags(const Params& params) const {
  return guarded([&] {
    const auto tags = tags_param(params);
    const auto period = period_param(params, engine_->index().meta());
    const auto limit = count_param(params, "limit", engine_->defaults().tag_limit);
    if (!period) return ApiResponse{200, json::array()};
    if (tags.empty()) return ApiResponse{200, to_json(engine_->explore_tags(*period, limit))};
    return ApiResponse{200, to_json(engine_->retrieve_tags(Query(tags, *period), limit))};
  });
}

ApiResponse Api::sites(const Params& params) const {
  return guarded([&] {
    const auto tags = tags_param(params);
    if (tags.empty()) throw bad_query("tags must not be empty");
    const auto period = period_param(params, engine_->index().meta());
    const auto limit = count_param(params, "limit", engine_->defaults().site_limit);
    const auto offset = count_param(params, "offset", 0);
    if (!period) return ApiResponse{200, json::array()};
    return ApiResponse{
        200, to_json(engine_->retrieve_sites(Query(tags, *period), limit, offset))};
  });
}

ApiResponse Api::versions(const Params& params) const {
  return guarded([&] {
    const auto url_text = param(params, "url");
    if (!url_text || url_text->empty()) throw bad_query("url is required");
    const auto tags = tags_param(params);
    if (tags.empty()) throw bad_query("tags must not be empty");
    const auto period = period_param(params, engine_->index().meta());
    std::optional<SiteUrl> url;
    try {
      url.emplace(*url_text);
    } catch (const InvalidArgument& e) {
      throw bad_query(e.what());
    }
    if (!engine_->index().url_id(*url)) {
      throw ApiError{"not_found", "url not indexed: " + url->text(), 404};
    }
    if (!period) return ApiResponse{200, json::array()};
    return ApiResponse{
        200, to_json(*url, engine_->retrieve_versions(*url, Query(tags, *period)))};
  });
}

ApiResponse Api::handle(std::string_view path, const Params& params) const {
  if (path == "/api/meta") return meta();
  if (path == "/api/tags") return tags(params);
  if (path == "/api/sites") return sites(params);
  if (path == "/api/versions") return versions(params);
  return {404, to_json(ApiError{"not_found", "no such endpoint: " + std::string(path), 404})};
}

struct HttpServer::Impl {
  const Api& api;
  httplib::Server server;

  explicit Impl(const Api& a) : api(a) {
    // httplib's default adds SO_REUSEPORT, which lets a second server share a
    // busy port silently instead of failing to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    auto route = [this](const char* path) {
      server.Get(path, [this, path](const httplib::Request& req, httplib::Response& res) {
        Params params;
        for (const auto& [k, v] : req.params) params.emplace(k, v);
        const ApiResponse r = api.handle(path, params);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json; charset=utf-8");
      });
    };
    for (const char* p : {"/api/meta", "/api/tags", "/api/sites", "/api/versions"}) route(p);

    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server.set_post_routing_handler([](const httplib::Request& req, httplib::Response& res) {
      if (req.path.rfind("/api/", 0) == 0) res.set_header("Access-Control-Allow-Origin", "*");
    });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.status == 404 && res.body.empty()) {
        res.set_content(
            to_json(ApiError{"not_found", "no such endpoint: " + req.path, 404}).dump(),
            "application/json; charset=utf-8");
      }
    });
  }
};

HttpServer::HttpServer(const Api& api) : impl_(std::make_unique<Impl>(api)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace tempas
