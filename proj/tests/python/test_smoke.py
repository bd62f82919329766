# Copyright 2026 The Tempas Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import gzip
import math

import pytest

import tempas

R1, R2, R3, R4, R5 = 1199491200, 1202601600, 1200787200, 1235865600, 1201219200

F1 = [
    ("http://a.com/", R1, "obama,election"),
    ("http://a.com/", R2, "obama,politics"),
    ("http://b.com/", R3, "election,news"),
    ("http://a.com/", R4, "obama"),
    ("http://c.com/", R5, "obama,election,news,blog"),
]


def dump(rows):
    return "".join(f"md5\tuser\t{url}\t{ts}\t{tags}\n" for url, ts, tags in rows)


@pytest.fixture()
def engine(tmp_path):
    src = tmp_path / "f1.tsv"
    src.write_text(dump(F1))
    stats = tempas.build_index(str(src), str(tmp_path / "index"))
    assert stats == {
        "lines_read": 5,
        "records_emitted": 5,
        "skipped_empty_tags": 0,
        "skipped_malformed": 0,
    }
    return tempas.Engine(str(tmp_path / "index"))


def test_parse_line():
    assert tempas.parse_line("m\tu1\thttp://a.com/\t1199508000\tobama,election") == (
        "http://a.com/",
        1199508000,
        ["election", "obama"],
    )
    assert tempas.parse_line("m\tu1\thttp://a.com/\t1199508000\t") == "skip"
    assert tempas.parse_line("m\tu1\thttp://a.com/\tnotanumber\tx") is None


def test_calendar_helpers():
    assert tempas.month_of(0) == "1970-01"
    assert tempas.month_of(2678400) == "1970-02"
    assert len(tempas.months_in("2005-01", "2008-12")) == 48
    assert tempas.wayback_url("http://a.com/", R1) == (
        "https://web.archive.org/web/20080105000000/http://a.com/"
    )
    with pytest.raises(ValueError):
        tempas.months_in("2009-01", "2008-01")


def test_queries(engine):
    assert engine.meta() == {
        "record_count": 5,
        "tag_count": 5,
        "url_count": 3,
        "month_min": "2008-01",
        "month_max": "2009-03",
    }
    assert engine.retrieve_tags(["obama"], "2008-01", "2008-12") == [
        ("election", 2),
        ("blog", 1),
        ("news", 1),
        ("politics", 1),
    ]
    assert engine.retrieve_tags(["obama", "election"], "2008-01", "2008-12") == [
        ("news", 3),
        ("blog", 2),
    ]
    assert [t for t, _ in engine.explore_tags("2008-01", "2008-02")] == [
        "election",
        "obama",
        "news",
        "blog",
        "politics",
    ]
    sites = engine.retrieve_sites(["obama", "election"], "2008-01", "2008-12")
    assert [(url, score) for url, score, _ in sites] == [("http://a.com/", 3), ("http://c.com/", 2)]
    assert sites[0][2] == ["obama", "election", "politics"]
    versions = engine.retrieve_versions("http://a.com/", ["obama", "election"], "2008-01", "2008-12")
    assert [(ts, overlap) for ts, _, overlap, _ in versions] == [(R1, 2), (R2, 1)]
    assert engine.generate_title("http://a.com/", "2009-01", "2009-12") == ["obama"]
    pmi = engine.score_site_pmi("http://a.com/", ["obama"], "2008-01", "2008-12")
    assert math.isclose(pmi, 4 * math.log(20 / 12))


def test_api(engine):
    status, body = engine.api("/api/meta")
    assert status == 200 and body["record_count"] == 5
    status, body = engine.api("/api/sites", {"tags": ""})
    assert status == 400 and body["code"] == "bad_query"
    status, body = engine.api("/api/versions", {"url": "http://zzz/", "tags": "obama"})
    assert status == 404 and body["code"] == "not_found"
    status, body = engine.api(
        "/api/versions",
        {"url": "http://a.com/", "tags": "obama,election", "from": "2008-01", "to": "2008-12"},
    )
    assert status == 200
    assert body[0]["wayback_url"].endswith("/20080105000000/http://a.com/")


def test_gzip_and_errors(tmp_path):
    src = tmp_path / "f1.tsv.gz"
    src.write_bytes(gzip.compress(dump(F1).encode()))
    stats = tempas.build_index(str(src), str(tmp_path / "index"))
    assert stats["records_emitted"] == 5
    with pytest.raises(RuntimeError, match="manifest missing"):
        tempas.Engine(str(tmp_path))
