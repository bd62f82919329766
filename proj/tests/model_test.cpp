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

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "tempas/model.hpp"

namespace tempas {
namespace {

using testing::period;

TEST(TagTest, NormalizesCaseAndWhitespace) {
  EXPECT_EQ(Tag::normalize("  Obama ")->text(), "obama");
  EXPECT_EQ(Tag::normalize("WWW")->text(), "www");
  EXPECT_FALSE(Tag::normalize("").has_value());
  EXPECT_FALSE(Tag::normalize("   ").has_value());
  EXPECT_FALSE(Tag::normalize("a,b").has_value());
  EXPECT_FALSE(Tag::normalize("a b").has_value());
  EXPECT_THROW(Tag(""), InvalidArgument);
}

TEST(TagTest, NonAsciiBytesPassThrough) {
  EXPECT_EQ(Tag::normalize("Über")->text(), "Über");
}

TEST(SiteUrlTest, RejectsEmptyAndTabs) {
  EXPECT_THROW(SiteUrl(""), InvalidArgument);
  EXPECT_THROW(SiteUrl("http://a\t.com/"), InvalidArgument);
  EXPECT_EQ(SiteUrl("http://a.com/").text(), "http://a.com/");
}

TEST(MonthTest, ParseAndFormat) {
  EXPECT_EQ(Month::parse("2008-01"), (Month{2008, 1}));
  EXPECT_EQ((Month{2009, 12}).to_string(), "2009-12");
  EXPECT_EQ((Month{987, 3}).to_string(), "0987-03");
  for (const char* bad : {"", "2008", "2008-1", "2008-13", "2008-00", "08-01", "2008/01",
                          "2008-01-01", "abcd-ef", "-008-01", "2008-+1"}) {
    EXPECT_THROW(Month::parse(bad), InvalidArgument) << bad;
  }
}

TEST(MonthTest, IndexRoundTrip) {
  for (std::uint32_t i = 1900 * 12; i < 2100 * 12; ++i) {
    EXPECT_EQ(Month::from_index(i).index(), i);
  }
  EXPECT_LT((Month{2007, 12}).index(), (Month{2008, 1}).index());
}

TEST(MonthOfTest, Examples) {
  EXPECT_EQ(month_of({0}), (Month{1970, 1}));
  EXPECT_EQ(month_of({2678400}), (Month{1970, 2}));
  EXPECT_EQ(month_of({2678399}), (Month{1970, 1}));
}

TEST(MonthOfTest, FixtureTimestamps) {
  EXPECT_EQ(month_of({testing::kR1}).to_string(), "2008-01");
  EXPECT_EQ(month_of({testing::kR2}).to_string(), "2008-02");
  EXPECT_EQ(month_of({testing::kR3}).to_string(), "2008-01");
  EXPECT_EQ(month_of({testing::kR4}).to_string(), "2009-03");
  EXPECT_EQ(month_of({testing::kR5}).to_string(), "2008-01");
}

TEST(MonthOfTest, AgreesWithCivilOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(0, 4102444800);  // through 2100
  for (int i = 0; i < 200000; ++i) {
    const std::int64_t t = dist(rng);
    const auto [y, m] = testing::oracle_month(t);
    ASSERT_EQ(month_of({t}), (Month{y, m})) << t;
  }
}

TEST(MonthsInTest, Examples) {
  EXPECT_EQ(months_in(period("2008-01", "2008-01")), (std::vector<Month>{{2008, 1}}));
  EXPECT_EQ(months_in(period("2007-11", "2008-02")),
            (std::vector<Month>{{2007, 11}, {2007, 12}, {2008, 1}, {2008, 2}}));
  const auto demo = months_in(period("2005-01", "2008-12"));
  EXPECT_EQ(demo.size(), 48u);
  EXPECT_EQ(demo.front(), (Month{2005, 1}));
  EXPECT_EQ(demo.back(), (Month{2008, 12}));
}

TEST(TimePeriodTest, RejectsInvertedBounds) {
  EXPECT_THROW(period("2009-01", "2008-01"), InvalidArgument);
}

TEST(RecordInPeriodTest, Examples) {
  const auto year = period("2008-01", "2008-12");
  EXPECT_TRUE(record_in_period(testing::make_record("http://a.com/", testing::kR1, {"x"}), year));
  EXPECT_FALSE(record_in_period(testing::make_record("http://a.com/", testing::kR4, {"x"}), year));
  EXPECT_TRUE(record_in_period(testing::make_record("http://a.com/", 1230767999, {"x"}), year));
  EXPECT_FALSE(record_in_period(testing::make_record("http://a.com/", 1230768000, {"x"}), year));
}

TEST(RecordTest, CanonicalizesTags) {
  const Record r(SiteUrl("http://a.com/"), Timestamp{5},
                 testing::tags({"obama", "election", "obama"}));
  EXPECT_EQ(testing::texts(r.tags), (std::vector<std::string>{"election", "obama"}));
  EXPECT_THROW(Record(SiteUrl("http://a.com/"), Timestamp{5}, {}), InvalidArgument);
  EXPECT_THROW(Record(SiteUrl("http://a.com/"), Timestamp{-1}, testing::tags({"a"})),
               InvalidArgument);
}

TEST(QueryTest, CanonicalizesTags) {
  const Query q(testing::tags({"b", "a", "b"}), period("2008-01", "2008-02"));
  EXPECT_EQ(testing::texts(q.tags), (std::vector<std::string>{"a", "b"}));
}

TEST(TimeFormatTest, CompactAndIso) {
  EXPECT_EQ(compact_utc({0}), "19700101000000");
  EXPECT_EQ(compact_utc({testing::kR1}), "20080105000000");
  EXPECT_EQ(iso_utc({1230767999}), "2008-12-31T23:59:59Z");
}

}  // namespace
}  // namespace tempas
