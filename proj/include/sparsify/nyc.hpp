// Copyright 2026 The sparsify Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsify/errors.hpp"
#include "sparsify/instance.hpp"
#include "sparsify/rng.hpp"

namespace sparsify::nyc {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kHalfWindow = 5 * 60;
inline constexpr Timestamp kIntervalLength = 10 * 60;

namespace detail {

// Howard Hinnant's days_from_civil.
inline constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline constexpr void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2);
}

inline std::optional<int> parse_digits(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

// Accepts "YYYY-MM-DD HH:MM:SS" (the TLC export format) and RFC 3339
// "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)". Offsets other than UTC are applied.
inline std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = detail::trim(text);
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != ' ' && text[10] != 'T') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  const auto year = detail::parse_digits(text.substr(0, 4));
  const auto month = detail::parse_digits(text.substr(5, 2));
  const auto day = detail::parse_digits(text.substr(8, 2));
  const auto hour = detail::parse_digits(text.substr(11, 2));
  const auto minute = detail::parse_digits(text.substr(14, 2));
  const auto second = detail::parse_digits(text.substr(17, 2));
  if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
  if (*month < 1 || *month > 12 || *day < 1 || *day > 31 || *hour > 23 || *minute > 59 || *second > 60) {
    return std::nullopt;
  }
  std::string_view rest = text.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') rest.remove_prefix(1);
  }
  std::int64_t offset = 0;
  if (rest == "Z" || rest.empty()) {
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    const auto oh = detail::parse_digits(rest.substr(1, 2));
    const auto om = detail::parse_digits(rest.substr(4, 2));
    if (!oh || !om) return std::nullopt;
    offset = (rest[0] == '+' ? 1 : -1) * (*oh * 3600 + *om * 60);
  } else {
    return std::nullopt;
  }
  const auto days = detail::days_from_civil(*year, static_cast<unsigned>(*month), static_cast<unsigned>(*day));
  return days * 86400 + *hour * 3600 + *minute * 60 + *second - offset;
}

// RFC 3339 in UTC, second resolution.
inline std::string format_timestamp(Timestamp t) {
  std::int64_t days = t / 86400;
  std::int64_t secs = t % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  detail::civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

// Taxi zones with a symmetric adjacency relation. A zone is always
// compatible with itself.
class ZoneModel {
 public:
  void add_zone(int zone) { zones_.insert(zone); }
  void add_adjacency(int a, int b) {
    zones_.insert(a);
    zones_.insert(b);
    if (a != b) {
      adjacent_.insert({a, b});
      adjacent_.insert({b, a});
    }
  }
  bool contains(int zone) const { return zones_.contains(zone); }
  bool adjacent(int a, int b) const { return adjacent_.contains({a, b}); }
  bool compatible(int a, int b) const { return a == b || adjacent(a, b); }
  const std::set<int>& zones() const { return zones_; }

 private:
  std::set<int> zones_;
  std::set<std::pair<int, int>> adjacent_;
};

struct TripRecord {
  Timestamp pickup_time = 0;
  Timestamp dropoff_time = 0;
  int pickup_zone = 0;
  int dropoff_zone = 0;
};

struct TripData {
  std::vector<TripRecord> trips;
  ZoneModel zones;
  std::size_t dropped_rows = 0;
};

// Zone file: CSV of undirected `zone_a,zone_b` pairs; an optional header
// line is skipped and `z,z` registers a zone without neighbors.
inline ZoneModel read_zones(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open zone file " + path);
  ZoneModel model;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto fields = detail::split_csv(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    const auto a = fields.size() >= 2 ? detail::parse_digits(fields[0]) : std::nullopt;
    const auto b = fields.size() >= 2 ? detail::parse_digits(fields[1]) : std::nullopt;
    if (!a || !b) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError("malformed zone adjacency row: " + line);
    }
    first = false;
    model.add_adjacency(*a, *b);
  }
  return model;
}

// Trip CSV with (at least) the TLC columns tpep_pickup_datetime,
// tpep_dropoff_datetime, PULocationID, DOLocationID. Rows with unknown zones
// or unparseable fields are dropped and counted.
inline TripData ingest_trips(const std::string& trip_path, const std::string& zone_path) {
  TripData data;
  data.zones = read_zones(zone_path);
  std::ifstream in(trip_path);
  if (!in) throw IoError("cannot open trip file " + trip_path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("trip file has no header");
  const auto header = detail::split_csv(line);
  auto column = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError("trip file header lacks column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t pu_time = column("tpep_pickup_datetime");
  const std::size_t do_time = column("tpep_dropoff_datetime");
  const std::size_t pu_zone = column("PULocationID");
  const std::size_t do_zone = column("DOLocationID");
  const std::size_t needed = std::max({pu_time, do_time, pu_zone, do_zone}) + 1;

  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() < needed) {
      ++data.dropped_rows;
      continue;
    }
    const auto pt = parse_timestamp(fields[pu_time]);
    const auto dt = parse_timestamp(fields[do_time]);
    const auto pz = detail::parse_digits(fields[pu_zone]);
    const auto dz = detail::parse_digits(fields[do_zone]);
    if (!pt || !dt || !pz || !dz || !data.zones.contains(*pz) || !data.zones.contains(*dz)) {
      ++data.dropped_rows;
      continue;
    }
    data.trips.push_back({*pt, *dt, *pz, *dz});
  }
  return data;
}

// One interval of the trip replay: resources are sampled cars, types are
// rider zones with p_j proportional to pick-ups, and n = number of
// drop-offs in the supply window.
struct NycInterval {
  StochasticInstance instance;
  std::vector<int> car_zones;   // per resource
  std::vector<int> type_zones;  // per demand type
};

// Supply from drop-offs in [t - 5m, t), demand from pick-ups in [t, t + 5m).
// n cars and the rider distribution are sampled with replacement from the
// empirical zone distributions; a rider zone is compatible with every car in
// the same or an adjacent zone (possibly none).
inline NycInterval build_nyc_instance(const std::vector<TripRecord>& trips, const ZoneModel& zones,
                                      Timestamp t, RngStream rng) {
  std::map<int, int> drop_counts, pick_counts;
  int drops = 0, picks = 0;
  for (const auto& trip : trips) {
    if (trip.dropoff_time >= t - kHalfWindow && trip.dropoff_time < t) {
      ++drop_counts[trip.dropoff_zone];
      ++drops;
    }
    if (trip.pickup_time >= t && trip.pickup_time < t + kHalfWindow) {
      ++pick_counts[trip.pickup_zone];
      ++picks;
    }
  }
  if (drops == 0 || picks == 0) throw EmptyWindow("no supply or no demand around " + format_timestamp(t));

  // Cars: n draws from p_car by inverse CDF over zones in ascending order.
  std::vector<int> car_zones;
  car_zones.reserve(static_cast<std::size_t>(drops));
  for (int i = 0; i < drops; ++i) {
    auto u = static_cast<int>(rng.below(static_cast<std::uint64_t>(drops)));
    for (const auto& [zone, count] : drop_counts) {
      if (u < count) {
        car_zones.push_back(zone);
        break;
      }
      u -= count;
    }
  }

  std::vector<std::string> resources;
  resources.reserve(car_zones.size());
  for (std::size_t i = 0; i < car_zones.size(); ++i) {
    resources.push_back("car" + std::to_string(i) + "@" + std::to_string(car_zones[i]));
  }
  std::vector<DemandType> types;
  std::vector<int> type_zones;
  for (const auto& [zone, count] : pick_counts) {
    DemandType dt;
    dt.type_id = static_cast<int>(types.size());
    dt.probability = static_cast<double>(count) / static_cast<double>(picks);
    for (std::size_t i = 0; i < car_zones.size(); ++i) {
      if (zones.compatible(zone, car_zones[i])) dt.compatible.push_back(static_cast<int>(i));
    }
    types.push_back(std::move(dt));
    type_zones.push_back(zone);
  }
  StochasticInstance::Options options;
  options.allow_empty_compatibility = true;
  return {StochasticInstance(std::move(resources), std::move(types), drops, options), std::move(car_zones),
          std::move(type_zones)};
}

}  // namespace sparsify::nyc
