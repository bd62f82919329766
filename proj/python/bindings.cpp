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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tempas/index.hpp"
#include "tempas/ingest.hpp"
#include "tempas/query.hpp"
#include "tempas/service.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;

namespace {

std::vector<tempas::Tag> to_tags(const std::vector<std::string>& texts) {
  std::vector<tempas::Tag> tags;
  tags.reserve(texts.size());
  for (const auto& t : texts) tags.emplace_back(t);
  return tags;
}

tempas::TimePeriod to_period(const std::string& from, const std::string& to) {
  return tempas::TimePeriod(tempas::Month::parse(from), tempas::Month::parse(to));
}

std::vector<std::string> texts(const std::vector<tempas::Tag>& tags) {
  std::vector<std::string> out;
  out.reserve(tags.size());
  for (const auto& t : tags) out.push_back(t.text());
  return out;
}

py::object json_to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict stats_dict(const tempas::IngestStats& s) {
  py::dict d;
  d["lines_read"] = s.lines_read;
  d["records_emitted"] = s.records_emitted;
  d["skipped_empty_tags"] = s.skipped_empty_tags;
  d["skipped_malformed"] = s.skipped_malformed;
  return d;
}

// Engine plus the Api view over it, sharing one open index.
class Engine {
 public:
  explicit Engine(const std::filesystem::path& dir)
      : engine_(std::make_shared<tempas::QueryEngine>(tempas::IndexSet::open(dir))),
        api_(engine_) {}

  py::list retrieve_tags(const std::vector<std::string>& tags, const std::string& from,
                         const std::string& to, std::size_t limit) const {
    py::list out;
    for (const auto& t :
         engine_->retrieve_tags(tempas::Query(to_tags(tags), to_period(from, to)), limit)) {
      out.append(py::make_tuple(t.tag.text(), t.score));
    }
    return out;
  }

  py::list explore_tags(const std::string& from, const std::string& to,
                        std::size_t limit) const {
    py::list out;
    for (const auto& t : engine_->explore_tags(to_period(from, to), limit)) {
      out.append(py::make_tuple(t.tag.text(), t.score));
    }
    return out;
  }

  py::list retrieve_sites(const std::vector<std::string>& tags, const std::string& from,
                          const std::string& to, std::size_t limit, std::size_t offset) const {
    py::list out;
    for (const auto& s : engine_->retrieve_sites(
             tempas::Query(to_tags(tags), to_period(from, to)), limit, offset)) {
      out.append(py::make_tuple(s.url.text(), s.score, texts(s.title)));
    }
    return out;
  }

  py::list retrieve_versions(const std::string& url, const std::vector<std::string>& tags,
                             const std::string& from, const std::string& to) const {
    py::list out;
    for (const auto& v : engine_->retrieve_versions(
             tempas::SiteUrl(url), tempas::Query(to_tags(tags), to_period(from, to)))) {
      out.append(py::make_tuple(v.time.seconds, texts(v.tags), v.overlap, v.total_tags));
    }
    return out;
  }

  std::vector<std::string> generate_title(const std::string& url, const std::string& from,
                                          const std::string& to, std::size_t k) const {
    return texts(engine_->generate_title(tempas::SiteUrl(url), to_period(from, to), k));
  }

  double score_site_pmi(const std::string& url, const std::vector<std::string>& tags,
                        const std::string& from, const std::string& to) const {
    return engine_->score_site_pmi(tempas::SiteUrl(url),
                                   tempas::Query(to_tags(tags), to_period(from, to)));
  }

  py::dict meta() const {
    const auto& m = engine_->index().meta();
    py::dict d;
    d["record_count"] = m.record_count;
    d["tag_count"] = m.tag_count;
    d["url_count"] = m.url_count;
    d["month_min"] = m.month_min ? py::cast(m.month_min->to_string()) : py::none();
    d["month_max"] = m.month_max ? py::cast(m.month_max->to_string()) : py::none();
    return d;
  }

  // Same status and body as the HTTP endpoint.
  py::tuple api(const std::string& path, const std::map<std::string, std::string>& params) const {
    tempas::Params p(params.begin(), params.end());
    const auto r = api_.handle(path, p);
    return py::make_tuple(r.status, json_to_python(r.body));
  }

 private:
  std::shared_ptr<const tempas::QueryEngine> engine_;
  tempas::Api api_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temporal tag search: index building and ranked retrieval";

  py::register_exception<tempas::IndexError>(m, "IndexError", PyExc_RuntimeError);
  py::register_exception<tempas::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def(
      "build_index",
      [](const std::filesystem::path& input, const std::filesystem::path& out, bool gzip,
         std::size_t memory_cap) {
        tempas::IndexBuilder builder(out, {memory_cap, 0});
        tempas::IngestStats stats;
        {
          py::gil_scoped_release release;
          stats = tempas::parse_file(input, gzip || tempas::looks_gzipped(input),
                                     [&](tempas::Record&& r) { builder.add(r); });
          builder.finish();
        }
        return stats_dict(stats);
      },
      py::arg("input"), py::arg("out"), py::arg("gzip") = false,
      py::arg("memory_cap") = std::size_t{1} << 30,
      "Builds an index directory from a tab-separated bookmark dump. Returns ingest counters.");

  m.def(
      "parse_line",
      [](const std::string& line) -> py::object {
        auto r = tempas::parse_line(line);
        if (auto* rec = std::get_if<tempas::Record>(&r)) {
          return py::make_tuple(rec->url.text(), rec->time.seconds, texts(rec->tags));
        }
        if (std::holds_alternative<tempas::EmptyTags>(r)) return py::str("skip");
        return py::none();
      },
      py::arg("line"),
      "(url, timestamp, tags) for a valid line, 'skip' for empty tags, None if malformed.");

  m.def(
      "month_of", [](std::int64_t t) { return tempas::month_of({t}).to_string(); },
      py::arg("timestamp"));
  m.def(
      "months_in",
      [](const std::string& from, const std::string& to) {
        std::vector<std::string> out;
        for (auto mo : tempas::months_in(to_period(from, to))) out.push_back(mo.to_string());
        return out;
      },
      py::arg("start"), py::arg("end"));
  m.def(
      "wayback_url",
      [](const std::string& url, std::int64_t t) {
        return tempas::wayback_url(tempas::SiteUrl(url), {t});
      },
      py::arg("url"), py::arg("timestamp"));

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::filesystem::path&>(), py::arg("index_dir"))
      .def("meta", &Engine::meta)
      .def("retrieve_tags", &Engine::retrieve_tags, py::arg("tags"), py::arg("start"),
           py::arg("end"), py::arg("limit") = 50)
      .def("explore_tags", &Engine::explore_tags, py::arg("start"), py::arg("end"),
           py::arg("limit") = 50)
      .def("retrieve_sites", &Engine::retrieve_sites, py::arg("tags"), py::arg("start"),
           py::arg("end"), py::arg("limit") = 20, py::arg("offset") = 0)
      .def("retrieve_versions", &Engine::retrieve_versions, py::arg("url"), py::arg("tags"),
           py::arg("start"), py::arg("end"))
      .def("generate_title", &Engine::generate_title, py::arg("url"), py::arg("start"),
           py::arg("end"), py::arg("k") = 5)
      .def("score_site_pmi", &Engine::score_site_pmi, py::arg("url"), py::arg("tags"),
           py::arg("start"), py::arg("end"))
      .def("api", &Engine::api, py::arg("path"), py::arg("params") = std::map<std::string, std::string>{});

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
