/*
 * Copyright (C) 2026 The dmcid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dmcid/bounds.hpp"
#include "dmcid/channel.hpp"
#include "dmcid/error.hpp"
#include "dmcid/estimation.hpp"
#include "dmcid/identify.hpp"
#include "dmcid/sensing.hpp"

namespace dmcid {

/// Shortest-roundtrip is not required; 17 significant digits always round-trip.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "not a real number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// Channel sets: {"channels":[{"matrix":[[...],...]}, ...]}
//
// Besides explicit matrices an entry may name a constructor:
//   {"kind":"bsc","p":0.1}  {"kind":"z_channel","q":0.5,"eps":0}
//   {"kind":"erasure","e":0.1}  {"kind":"identity","size":2}
//   {"kind":"random_dirichlet","inputs":2,"outputs":2,"concentration":1,"seed":7}

inline Channel channel_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("matrix")) {
      return Channel::from_rows(j.at("matrix").get<std::vector<std::vector<double>>>());
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "explicit") return Channel::from_rows(j.at("matrix").get<std::vector<std::vector<double>>>());
    if (kind == "bsc") return bsc(j.at("p").get<double>());
    if (kind == "z_channel") return z_channel(j.at("q").get<double>(), j.value("eps", 0.0));
    if (kind == "erasure") return binary_erasure(j.at("e").get<double>());
    if (kind == "identity") return identity_channel(j.at("size").get<std::size_t>());
    if (kind == "random_dirichlet") {
      Xoshiro256 gen(j.at("seed").get<std::uint64_t>());
      return random_dirichlet_channel(j.value("inputs", std::size_t{2}), j.value("outputs", std::size_t{2}),
                                      j.value("concentration", 1.0), gen);
    }
    throw Error(ErrorCode::ParseError, "unknown channel kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("channel entry: ") + e.what());
  }
}

inline std::vector<Channel> channels_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("channels") || !doc["channels"].is_array()) {
    throw Error(ErrorCode::ParseError, "expected an object with a \"channels\" array");
  }
  std::vector<Channel> out;
  for (const auto& entry : doc["channels"]) out.push_back(channel_from_json(entry));
  return out;
}

inline std::string channels_to_json(const std::vector<Channel>& channels) {
  std::ostringstream os;
  os << "{\"channels\":[";
  for (std::size_t j = 0; j < channels.size(); ++j) {
    if (j) os << ',';
    os << "{\"matrix\":[";
    for (std::size_t x = 0; x < channels[j].input_size(); ++x) {
      if (x) os << ',';
      os << '[';
      const auto r = channels[j].row(x);
      for (std::size_t y = 0; y < r.size(); ++y) os << (y ? "," : "") << format_real(r[y]);
      os << ']';
    }
    os << "]}";
  }
  os << "]}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// CSV schemas

namespace detail {

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

inline std::string trim_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace detail

/// Header `x,y,count`, one row per (x, y) in row-major order.
inline std::string count_matrix_to_csv(const CountMatrix& c) {
  std::ostringstream os;
  os << "x,y,count\n";
  for (std::size_t x = 0; x < c.input_size(); ++x)
    for (std::size_t y = 0; y < c.output_size(); ++y) os << x << ',' << y << ',' << c.count(x, y) << '\n';
  return os.str();
}

/// Alphabet sizes are inferred from the largest indices present.
inline CountMatrix count_matrix_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || detail::trim_cr(line) != "x,y,count") {
    throw Error(ErrorCode::ParseError, "expected header x,y,count");
  }
  struct Entry {
    std::size_t x, y;
    std::int64_t n;
  };
  std::vector<Entry> entries;
  std::size_t nx = 0, ny = 0;
  while (std::getline(in, line)) {
    line = detail::trim_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 3) throw Error(ErrorCode::ParseError, "count row needs 3 fields: " + line);
    const auto x = detail::parse_int(f[0]);
    const auto y = detail::parse_int(f[1]);
    const auto n = detail::parse_int(f[2]);
    if (x < 0 || y < 0) throw Error(ErrorCode::ParseError, "negative index: " + line);
    entries.push_back({static_cast<std::size_t>(x), static_cast<std::size_t>(y), n});
    nx = std::max(nx, static_cast<std::size_t>(x) + 1);
    ny = std::max(ny, static_cast<std::size_t>(y) + 1);
  }
  if (entries.empty()) throw Error(ErrorCode::ParseError, "no count rows");
  CountMatrix c(nx, std::max<std::size_t>(ny, 2));
  for (const auto& e : entries) c.add(e.x, e.y, e.n);
  return c;
}

/// Header `channel,input,sends`.
inline std::string ledger_to_csv(const SenseLedger& ledger) {
  std::ostringstream os;
  os << "channel,input,sends\n";
  for (std::size_t j = 0; j < ledger.channel_count(); ++j)
    for (std::size_t x = 0; x < ledger.input_size(); ++x) os << j << ',' << x << ',' << ledger.sends(j, x) << '\n';
  return os.str();
}

namespace detail {

inline std::string join_indices(const std::vector<std::size_t>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace detail

/// Header `round,eps_r,delta_r,T_r,survivors,total_senses`; survivors are
/// `;`-separated channel indices of C_{r+1}.
inline std::string identify_rounds_to_csv(const IdentifyReport& rep) {
  std::ostringstream os;
  os << "round,eps_r,delta_r,T_r,survivors,total_senses\n";
  for (const auto& r : rep.rounds) {
    os << r.schedule.round << ',' << format_real(r.schedule.eps) << ',' << format_real(r.schedule.delta) << ','
       << r.schedule.pulls << ',' << detail::join_indices(r.survivors, ';') << ',' << r.total_senses << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const RoundSchedule& s) {
  return {{"round", s.round}, {"eps_r", s.eps}, {"delta_r", s.delta}, {"T_r", s.pulls}};
}

inline nlohmann::json to_json(const IdentifyReport& rep) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : rep.rounds) {
    auto j = to_json(r.schedule);
    j["candidates"] = r.candidates;
    j["estimates"] = r.estimates;
    j["pac_pivot"] = r.pivot;
    j["pac_senses"] = r.pac_senses;
    j["survivors"] = r.survivors;
    j["total_senses"] = r.total_senses;
    rounds.push_back(std::move(j));
  }
  nlohmann::json out = {{"output_channel", rep.output_channel},
                        {"total_senses", rep.total_senses},
                        {"truncated", rep.truncated},
                        {"rounds", std::move(rounds)}};
  out["succeeded"] = rep.succeeded ? nlohmann::json(*rep.succeeded) : nlohmann::json(nullptr);
  return out;
}

inline nlohmann::json to_json(const LowerBoundReport& rep) {
  nlohmann::json perms = nlohmann::json::array();
  for (const auto& p : rep.chosen_permutations) perms.push_back({{"input", p.input}, {"output", p.output}});
  return {{"value", rep.value},
          {"best", rep.best},
          {"suboptimal", rep.suboptimal},
          {"per_channel_terms", rep.per_channel_terms},
          {"best_channel_term", rep.best_channel_term},
          {"chosen_permutations", std::move(perms)},
          {"mode", rep.mode == LowerBoundMode::Joint ? "joint" : "independent"},
          {"possibly_suboptimal", rep.possibly_suboptimal}};
}

namespace detail {

inline void dump_json_into(std::string& out, const nlohmann::json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(k).dump() + ": ";
        dump_json_into(out, v, indent + 2);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Scalar arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? ", " : ",\n";
        if (!flat) out += pad;
        dump_json_into(out, j[i], indent + 2);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Indented JSON with reals printed at 17 significant digits; non-finite reals become null.
inline std::string dump_json(const nlohmann::json& j) {
  std::string out;
  detail::dump_json_into(out, j, 0);
  return out + "\n";
}

}  // namespace dmcid
