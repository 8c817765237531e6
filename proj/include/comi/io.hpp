#pragma once

// File formats for the batch tools. Inputs: JSON distributions/test
// functions, one-real-per-line sample lists, all parse failures mapped to
// io_error (semantic validation keeps its own codes). Outputs: every number
// is printed with 17 significant digits so it re-parses to the exact double
// and identical runs stay byte-identical; the infinite divergence marker is
// serialized as the string "Infinite".

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "comi/discrete.hpp"
#include "comi/divergences.hpp"
#include "comi/errors.hpp"

namespace comi {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// 17-digit number, or "Infinite" for the marker / a non-finite double.
inline std::string fmt_value(double v) {
  return std::isfinite(v) ? fmt_g17(v) : std::string("Infinite");
}

inline std::string fmt_value(const DivergenceValue& v) {
  return v.is_infinite() ? std::string("Infinite") : fmt_g17(v.value());
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const std::exception& e) {
    raise(errc::io_error, "bad JSON in " + path + ": " + e.what());
  }
}

// {"probs": [...], "labels": [...]} with labels optional. Structural problems
// are io_error; mass validation failures keep their domain codes.
inline DiscreteDistribution load_distribution(const std::string& path) {
  const nlohmann::json j = load_json(path);
  std::vector<double> probs;
  std::vector<std::string> labels;
  try {
    probs = j.at("probs").get<std::vector<double>>();
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    raise(errc::io_error, "bad distribution file " + path + ": " + e.what());
  }
  return make_discrete(std::move(probs), std::move(labels));
}

// {"values": [...]} aligned with the distribution support.
inline TestFunction load_test_function(const std::string& path) {
  const nlohmann::json j = load_json(path);
  std::vector<double> values;
  try {
    values = j.at("values").get<std::vector<double>>();
  } catch (const std::exception& e) {
    raise(errc::io_error, "bad test-function file " + path + ": " + e.what());
  }
  return TestFunction(std::move(values));
}

// One real per line; blank lines skipped.
inline std::vector<double> load_samples(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    double v = 0.0;
    std::size_t used = 0;
    bool ok = true;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      ok = false;
    }
    require(ok && used == token.size(), errc::io_error,
            path + ":" + std::to_string(lineno) + ": not a number");
    out.push_back(v);
  }
  return out;
}

// Flat JSON object with insertion-ordered keys and fmt_value numbers; enough
// for the report payloads, which never nest.
class JsonObjectWriter {
 public:
  JsonObjectWriter& field(std::string_view key, std::string_view text) {
    append_key(key);
    body_ += '"';
    escape_into(body_, text);
    body_ += '"';
    return *this;
  }

  JsonObjectWriter& number(std::string_view key, double v) {
    if (!std::isfinite(v)) return field(key, "Infinite");
    append_key(key);
    body_ += fmt_g17(v);
    return *this;
  }

  JsonObjectWriter& number(std::string_view key, const DivergenceValue& v) {
    if (v.is_infinite()) return field(key, "Infinite");
    return number(key, v.value());
  }

  JsonObjectWriter& number(std::string_view key, std::uint64_t v) {
    append_key(key);
    body_ += std::to_string(v);
    return *this;
  }

  JsonObjectWriter& boolean(std::string_view key, bool v) {
    append_key(key);
    body_ += v ? "true" : "false";
    return *this;
  }

  std::string str() const { return "{" + body_ + "}"; }

 private:
  void append_key(std::string_view key) {
    if (!body_.empty()) body_ += ", ";
    body_ += '"';
    escape_into(body_, key);
    body_ += "\": ";
  }

  static void escape_into(std::string& out, std::string_view text) {
    for (char c : text) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
  }

  std::string body_;
};

}  // namespace comi
