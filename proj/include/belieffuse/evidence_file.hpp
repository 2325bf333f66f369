#pragma once

// Evidence files: a JSON object
//
//   {
//     "frame": ["a", "b", "c"],
//     "sources": [
//       {"name": "s1", "masses": {"a": [0.6, 0.0], "a,b": [0.4, 0.0]}},
//       ...
//     ]
//   }
//
// Mass keys are comma-joined element names in frame order; values are
// [re, im] pairs. Omitted subsets carry zero mass. Bit k of a subset code
// is frame element k.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "belieffuse/evidence.hpp"

namespace belieffuse {

// Malformed input: bad JSON, wrong structure, or an unparsable subset key.
class EvidenceParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct EvidenceSource {
  std::string name;
  Cbba masses;
};

struct EvidenceFile {
  Frame frame;
  std::vector<EvidenceSource> sources;
};

// One problem with one source. `key` is empty for whole-source findings.
struct Finding {
  std::string source;
  std::string key;
  std::string message;

  std::string to_string() const {
    std::string out = "source '" + source + "'";
    if (!key.empty()) out += ", key \"" + key + "\"";
    return out + ": " + message;
  }
};

namespace detail {

inline std::string source_label(std::size_t index, const std::string& name) {
  return "sources[" + std::to_string(index) + "] ('" + name + "')";
}

// Parses "a,b" against the frame. Returns the code or a diagnostic naming
// the 1-based character position of the offending element.
inline std::variant<SubsetCode, std::string> parse_subset_key(const Frame& frame, std::string_view key) {
  if (key.empty()) return SubsetCode{};
  SubsetCode code;
  std::optional<std::size_t> previous;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = key.find(',', pos);
    const std::string_view name = key.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const std::string column = std::to_string(pos + 1);
    if (name.empty()) return "empty element name at character " + column;
    const auto index = frame.index_of(name);
    if (!index) return "unknown element '" + std::string(name) + "' at character " + column;
    if (previous && *index == *previous) {
      return "element '" + std::string(name) + "' repeated at character " + column;
    }
    if (previous && *index < *previous) {
      return "element '" + std::string(name) + "' at character " + column +
             " is out of frame order (must come before '" + frame.element(*previous) + "')";
    }
    code.bits |= std::uint32_t{1} << *index;
    previous = index;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return code;
}

inline std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

struct EvidenceRead {
  EvidenceFile file;
  std::vector<Finding> key_findings;  // keys that could not be resolved; skipped in `file`
};

// Parses the structure and resolves every key it can. Structural problems
// throw; bad keys are collected.
inline EvidenceRead read_evidence(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw EvidenceParseError("invalid JSON at " + detail::locate(text, e.byte > 0 ? e.byte - 1 : 0) +
                             ": " + e.what());
  }
  if (!doc.is_object()) throw EvidenceParseError("top level must be an object");
  if (!doc.contains("frame") || !doc["frame"].is_array()) {
    throw EvidenceParseError("\"frame\" must be an array of element names");
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < doc["frame"].size(); ++i) {
    const auto& e = doc["frame"][i];
    if (!e.is_string()) throw EvidenceParseError("frame[" + std::to_string(i) + "] is not a string");
    auto name = e.get<std::string>();
    if (name.find(',') != std::string::npos) {
      throw EvidenceParseError("frame[" + std::to_string(i) + "] '" + name + "' contains a comma");
    }
    names.push_back(std::move(name));
  }
  EvidenceRead out;
  try {
    out.file.frame = Frame(std::move(names));
  } catch (const std::exception& e) {
    throw EvidenceParseError(std::string("invalid frame: ") + e.what());
  }
  const Frame& frame = out.file.frame;

  if (!doc.contains("sources") || !doc["sources"].is_array()) {
    throw EvidenceParseError("\"sources\" must be an array");
  }
  const auto& sources = doc["sources"];
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& src = sources[s];
    const std::string where = "sources[" + std::to_string(s) + "]";
    if (!src.is_object()) throw EvidenceParseError(where + " is not an object");
    if (!src.contains("name") || !src["name"].is_string()) {
      throw EvidenceParseError(where + " needs a string \"name\"");
    }
    EvidenceSource source{src["name"].get<std::string>(), Cbba(frame)};
    const std::string label = detail::source_label(s, source.name);
    if (!src.contains("masses") || !src["masses"].is_object()) {
      throw EvidenceParseError(label + ": \"masses\" must be an object");
    }
    for (const auto& [key, value] : src["masses"].items()) {
      if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
        throw EvidenceParseError(label + ", key \"" + key + "\": value must be a [re, im] pair");
      }
      auto parsed = detail::parse_subset_key(frame, key);
      if (auto* msg = std::get_if<std::string>(&parsed)) {
        out.key_findings.push_back({source.name, key, *msg});
        continue;
      }
      source.masses.set(std::get<SubsetCode>(parsed), Complex{value[0].get<double>(), value[1].get<double>()});
    }
    out.file.sources.push_back(std::move(source));
  }
  return out;
}

// Strict parse: any unresolvable key is an error.
inline EvidenceFile parse_evidence(std::string_view text) {
  auto read = read_evidence(text);
  if (!read.key_findings.empty()) {
    std::string msg;
    for (const auto& f : read.key_findings) {
      if (!msg.empty()) msg += "\n";
      msg += f.to_string();
    }
    throw EvidenceParseError(msg);
  }
  return std::move(read.file);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Mass-function axiom violations of every source.
inline std::vector<Finding> validate_evidence(const EvidenceFile& file) {
  std::vector<Finding> out;
  for (const auto& src : file.sources) {
    for (const auto& v : validate(src.masses)) {
      const std::string key = v.kind == Violation::Kind::sum_not_one ? "" : file.frame.label(v.code);
      out.push_back({src.name, v.kind == Violation::Kind::empty_set_key ? "" : key, v.message});
    }
  }
  return out;
}

inline std::string to_json(const EvidenceFile& file) {
  using nlohmann::json;
  json doc;
  doc["frame"] = file.frame.elements();
  doc["sources"] = json::array();
  for (const auto& src : file.sources) {
    json masses = json::object();
    for (const auto& [code, v] : src.masses.masses()) {
      masses[code.empty() ? std::string() : file.frame.label(code)] = {v.real(), v.imag()};
    }
    doc["sources"].push_back({{"name", src.name}, {"masses", masses}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace belieffuse
