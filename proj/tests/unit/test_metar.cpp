// Copyright 2026 The Aeroflow Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "aeroflow/core/fileio.hpp"
#include "aeroflow/core/rng.hpp"
#include "aeroflow/metar/metar.hpp"
#include "support.hpp"

namespace aeroflow::metar {
namespace {

nlohmann::json golden() { return nlohmann::json::parse(read_text(testing::source_path("tests/data/metar_golden.json"))); }

TEST(Metar, GoldenCorpusFields) {
  const auto cases = golden();
  ASSERT_GE(cases.size(), 30u);
  for (const auto& c : cases) {
    SCOPED_TRACE(c["raw"].get<std::string>());
    const auto o = parse_metar(c["raw"].get<std::string>());
    EXPECT_EQ(o.station, c["station"].get<std::string>());
    EXPECT_EQ(o.day, c["day"].get<int>());
    EXPECT_EQ(o.hour, c["hour"].get<int>());
    EXPECT_EQ(o.minute, c["minute"].get<int>());
    EXPECT_EQ(o.wind_dir_deg, c["wind_dir_deg"].get<int>());
    EXPECT_EQ(o.wind_variable, c["wind_variable"].get<bool>());
    EXPECT_EQ(o.speed_unit == SpeedUnit::MetersPerSecond ? "MPS" : "KT", c["speed_unit"].get<std::string>());
    EXPECT_EQ(o.reported_speed, c["reported_speed"].get<int>());
    EXPECT_EQ(o.wind_speed_kt, c["wind_speed_kt"].get<double>());
    if (c["reported_gust"].is_null()) {
      EXPECT_FALSE(o.reported_gust.has_value());
      EXPECT_FALSE(o.wind_gust_kt.has_value());
    } else {
      EXPECT_EQ(o.reported_gust, c["reported_gust"].get<int>());
      EXPECT_EQ(o.wind_gust_kt, c["wind_gust_kt"].get<double>());
    }
    EXPECT_EQ(o.visibility_m, c["visibility_m"].get<int>());
    EXPECT_EQ(o.temp_c, c["temp_c"].get<int>());
    EXPECT_EQ(o.dewpoint_c, c["dewpoint_c"].get<int>());
    EXPECT_EQ(o.pressure_unit == PressureUnit::InchesHg ? "A" : "Q", c["pressure_unit"].get<std::string>());
    EXPECT_EQ(o.reported_pressure, c["reported_pressure"].get<int>());
    EXPECT_EQ(o.pressure_hpa, c["pressure_hpa"].get<double>());
    EXPECT_EQ(o.humidity_pct, c["humidity_pct"].get<double>());
  }
}

TEST(Metar, EmitParseRoundTrip) {
  for (const auto& c : golden()) {
    const auto o = parse_metar(c["raw"].get<std::string>());
    const auto text = emit_canonical(o);
    const auto back = parse_metar(text);
    EXPECT_TRUE(back.same_fields(o)) << c["raw"] << " -> " << text;
    EXPECT_EQ(emit_canonical(back), text);
  }
}

TEST(Metar, Humidity) {
  EXPECT_EQ(relative_humidity(18, 9), 55.656762504376644);
  EXPECT_EQ(relative_humidity(20, 19), 93.97450936662145);
  EXPECT_EQ(relative_humidity(-5, -10), 67.97045632401785);
  EXPECT_EQ(relative_humidity(30, 10), 28.93844339991472);
  EXPECT_EQ(relative_humidity(7, 7), 100.0);
  EXPECT_THROW(relative_humidity(61, 0), Error);
  EXPECT_THROW(relative_humidity(10, 11), Error);
}

struct BadCase {
  const char* text;
  ErrorCode code;
  const char* token;
};

TEST(Metar, ErrorsNameTokenAndOffset) {
  const BadCase cases[] = {
      {"EDDF 011020Z 9999 18/09 Q1015", ErrorCode::MissingGroup, "9999"},
      {"EDDF 011020Z ///// 9999 18/09 Q1015", ErrorCode::MissingGroup, "/////"},
      {"EDDF 011020Z 24012KT 18/09 Q1015", ErrorCode::MissingGroup, "18/09"},
      {"EDDF 011020Z 24012KT 9999 Q1015", ErrorCode::MissingGroup, "Q1015"},
      {"EDDF 011020Z 24012KT 9999 18/// Q1015", ErrorCode::MalformedReport, "18///"},
      {"EDDF 011020Z 24012KT 9999 18/09", ErrorCode::MissingGroup, ""},
      {"EDDF 011020Z 37012KT 9999 18/09 Q1015", ErrorCode::OutOfRange, "37012KT"},
      {"EDDF 321020Z 24012KT 9999 18/09 Q1015", ErrorCode::OutOfRange, "321020Z"},
      {"EDDF 011020Z 24012KT 9999 18/09 Q0700", ErrorCode::OutOfRange, "Q0700"},
      {"EDDF 011020Z 24012KT 9999 10/15 Q1015", ErrorCode::OutOfRange, "10/15"},
      {"ED1 011020Z 24012KT 9999 18/09 Q1015", ErrorCode::MalformedReport, "ED1"},
      {"EDDF 0110Z 24012KT 9999 18/09 Q1015", ErrorCode::MalformedReport, "0110Z"},
      {"EDDF 011020Z 24012KT 9999 XYZZY 18/09 Q1015", ErrorCode::MalformedReport, "XYZZY"},
      {"EDDF 011020Z NIL", ErrorCode::MissingGroup, "NIL"},
      {"", ErrorCode::MissingGroup, ""},
  };
  for (const auto& c : cases) {
    try {
      parse_metar(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const MetarError& e) {
      EXPECT_EQ(e.code(), c.code) << c.text << ": " << e.what();
      EXPECT_EQ(e.token(), c.token) << c.text;
      const std::string text = c.text;
      if (!e.token().empty()) {
        EXPECT_EQ(text.substr(e.offset(), e.token().size()), e.token());
      } else {
        EXPECT_EQ(e.offset(), text.size());
      }
    }
  }
}

TEST(Metar, Conversions) {
  auto o = parse_metar("KXYZ 011200Z 09010MPS 1 1/4SM 10/05 A2992");
  EXPECT_EQ(o.wind_speed_kt, 10 * 1.943844);
  EXPECT_EQ(o.visibility_m, 2012);  // 1.25 * 1609.344 = 2011.68
  EXPECT_EQ(o.pressure_hpa, 2992 / 100.0 * 33.8639);
  o = parse_metar("LXYZ 011200Z 27036KMH 9999 10/05 Q1000");
  EXPECT_EQ(o.speed_unit, SpeedUnit::Knots);
  EXPECT_EQ(o.reported_speed, 19);  // 36 km/h = 19.44 kt
  o = parse_metar("LXYZ 011200Z 00000KT 9999 M01/M01 Q1000=");
  EXPECT_EQ(o.wind_dir_deg, 0);
  EXPECT_FALSE(o.wind_variable);
  EXPECT_EQ(o.humidity_pct, 100.0);
  o = parse_metar("LXYZ 011200Z 36010KT 9999 10/05 Q1000");
  EXPECT_EQ(o.wind_dir_deg, 0);
}

TEST(Metar, FileWithContext) {
  const std::string text =
      "#CONTEXT year=2024 month=03 station_default=EDDF\n"
      "011020Z 24012KT 9999 18/09 Q1015\n"
      "\n"
      "EDDF 011050Z 24012KT 18/09 Q1015\n"
      "EGLL 011050Z 19015KT 8000 12/11 Q0998\r\n";
  const auto r = parse_metar_text(text);
  ASSERT_EQ(r.observations.size(), 2u);
  EXPECT_EQ(r.observations[0].station, "EDDF");
  EXPECT_EQ(r.observations[0].obs_time, day_start(make_date(2024, 3, 1)) + 10 * 3600 + 20 * 60);
  EXPECT_EQ(r.observations[1].station, "EGLL");
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].line, 4u);

  const FileContext ctx{2023, 11, "KJFK"};
  const auto back = parse_context_line(format_context_line(ctx));
  ASSERT_TRUE(back);
  EXPECT_EQ(back->year, 2023);
  EXPECT_EQ(back->month, 11u);
  EXPECT_EQ(back->station_default, "KJFK");
  EXPECT_FALSE(parse_context_line("#CONTEXT year=2023"));
}

TEST(Metar, ResolveTimeRejectsImpossibleDay) {
  const auto o = parse_metar("EDDF 301020Z 24012KT 9999 18/09 Q1015");
  EXPECT_THROW(resolve_time(o, 2023, 2), Error);
  EXPECT_EQ(resolve_time(o, 2023, 4), day_start(make_date(2023, 4, 30)) + 37200);
}

// Mutated reports and random byte strings must either parse or raise Error.
TEST(Metar, FuzzNeverCrashes) {
  std::vector<std::string> seeds;
  for (const auto& c : golden()) seeds.push_back(c["raw"].get<std::string>());
  const std::string alphabet = "0123456789ABCDEFGKMNPQRSTVWZ/ -+=";
  Rng rng(2024);
  std::size_t parsed = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string s;
    if (i % 4 == 0) {
      const auto len = rng.below(80);
      for (std::uint64_t k = 0; k < len; ++k) s.push_back(static_cast<char>(rng.below(256)));
    } else {
      s = seeds[rng.below(seeds.size())];
      const auto edits = 1 + rng.below(6);
      for (std::uint64_t k = 0; k < edits && !s.empty(); ++k) {
        const auto pos = rng.below(s.size());
        switch (rng.below(4)) {
          case 0: s[pos] = alphabet[rng.below(alphabet.size())]; break;
          case 1: s.erase(pos, 1 + rng.below(6)); break;
          case 2: s.insert(pos, 1, alphabet[rng.below(alphabet.size())]); break;
          default: s.resize(pos); break;
        }
      }
    }
    try {
      const auto o = parse_metar(s);
      ++parsed;
      ASSERT_GE(o.wind_dir_deg, 0);
      ASSERT_LT(o.wind_dir_deg, 360);
      ASSERT_GT(o.humidity_pct, 0.0);
      ASSERT_LE(o.humidity_pct, 100.0);
      ASSERT_TRUE(parse_metar(emit_canonical(o)).same_fields(o)) << s;
    } catch (const Error&) {
    }
  }
  EXPECT_GT(parsed, 0u);
}

}  // namespace
}  // namespace aeroflow::metar
