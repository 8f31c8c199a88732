/// \file options.hpp
/// \brief The string options database that drives all solver composition.
///
/// Keys are lowercase tokens joined by underscores; nested components read
/// their configuration through prefix scopes (e.g. "fieldsplit_p_ksp_type").
/// The database records which keys were consumed, so typos can be surfaced
/// after solver construction, and keeps a log of every resolved lookup with
/// its effective value, which is what run reports embed.

#pragma once

#include <cstdlib>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pctk/common.hpp"

namespace pctk {

class OptionsDb {
public:
  OptionsDb() = default;

  OptionsDb(const OptionsDb& other) {
    std::lock_guard<std::mutex> lock(other.mutex_);
    entries_ = other.entries_;
    pos_ = other.pos_;
    resolved_ = other.resolved_;
    resolved_seen_ = other.resolved_seen_;
  }

  OptionsDb& operator=(const OptionsDb& other) {
    if (this != &other) {
      OptionsDb tmp(other);
      std::lock_guard<std::mutex> lock(mutex_);
      entries_ = std::move(tmp.entries_);
      pos_ = std::move(tmp.pos_);
      resolved_ = std::move(tmp.resolved_);
      resolved_seen_ = std::move(tmp.resolved_seen_);
    }
    return *this;
  }

  /// Later insertions override earlier ones for the same key; the key keeps
  /// its original position in insertion order.
  void set(const std::string& key, std::string value) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = pos_.find(key);
    if (it != pos_.end()) {
      entries_[it->second].value = std::move(value);
      return;
    }
    pos_.emplace(key, entries_.size());
    entries_.push_back({key, std::move(value), false});
  }

  bool contains(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return pos_.count(key) > 0;
  }

  /// Value lookup by full key; marks the key consumed when present.
  std::optional<std::string> lookup(const std::string& full_key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = pos_.find(full_key);
    if (it == pos_.end()) return std::nullopt;
    entries_[it->second].consumed = true;
    return entries_[it->second].value;
  }

  /// Records the effective value a component resolved for a key (stored value
  /// or default). First resolution wins; reports embed this log.
  void note_resolved(const std::string& full_key, const std::string& effective) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (resolved_seen_.insert(full_key).second)
      resolved_.push_back({full_key, effective});
  }

  /// Keys never consumed by any lookup, in insertion order.
  std::vector<std::string> unused_keys() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<std::string> out;
    for (const Entry& e : entries_)
      if (!e.consumed) out.push_back(e.key);
    return out;
  }

  std::vector<std::pair<std::string, std::string>> entries() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) out.push_back({e.key, e.value});
    return out;
  }

  std::vector<std::pair<std::string, std::string>> resolved() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return resolved_;
  }

  /// "key: value" lines in insertion order; parse_file() inverts this.
  std::string render() const {
    std::string out;
    for (const auto& [k, v] : entries()) {
      out += k;
      out += ": ";
      out += v;
      out += "\n";
    }
    return out;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
  }

  friend bool operator==(const OptionsDb& a, const OptionsDb& b) {
    return a.entries() == b.entries();
  }

private:
  struct Entry {
    std::string key;
    std::string value;
    mutable bool consumed = false;
  };

  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> pos_;
  mutable std::vector<std::pair<std::string, std::string>> resolved_;
  mutable std::unordered_set<std::string> resolved_seen_;
};

namespace detail {

/// A token names a key when it starts with '-' followed by a non-numeric
/// character, so that negative numbers can appear as values.
inline bool is_key_token(const std::string& t) {
  if (t.size() < 2 || t[0] != '-') return false;
  const char c = t[1] == '-' ? (t.size() > 2 ? t[2] : '\0') : t[1];
  return c != '\0' && !(c >= '0' && c <= '9') && c != '.';
}

inline std::string strip_dashes(const std::string& t) {
  std::size_t i = 0;
  while (i < t.size() && t[i] == '-') ++i;
  return t.substr(i);
}

}  // namespace detail

/// Parses "-key [value]" token streams (e.g. CLI pass-through). A key
/// followed by another key, or by nothing, is a flag with value "true".
inline void parse_args_into(OptionsDb& db, const std::vector<std::string>& tokens) {
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!detail::is_key_token(tokens[i]))
      throw Error(detail::strfmt("option parse error at token %zu: expected '-key', got '%s'",
                                 i + 1, tokens[i].c_str()));
    const std::string key = detail::strip_dashes(tokens[i]);
    ++i;
    if (i < tokens.size() && !detail::is_key_token(tokens[i])) {
      db.set(key, tokens[i]);
      ++i;
    } else {
      db.set(key, "true");
    }
  }
}

inline OptionsDb parse_args(const std::vector<std::string>& tokens) {
  OptionsDb db;
  parse_args_into(db, tokens);
  return db;
}

/// Parses option file text: one "key: value" or "-key value" per line,
/// '#' comments (at line start or preceded by whitespace), blank lines
/// ignored. UTF-8, '\n' separators.
inline void parse_file_into(OptionsDb& db, const std::string& text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos
                                                                 : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // strip comments: '#' at start of line or after whitespace
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);

    std::string key, value;
    const std::size_t colon = line.find(':');
    if (line[0] == '-') {
      const std::size_t sp = line.find_first_of(" \t");
      key = detail::strip_dashes(sp == std::string::npos ? line : line.substr(0, sp));
      if (sp != std::string::npos) {
        const std::size_t vstart = line.find_first_not_of(" \t", sp);
        if (vstart != std::string::npos) value = line.substr(vstart);
      }
      if (value.empty()) value = "true";
    } else if (colon != std::string::npos) {
      key = line.substr(0, colon);
      const auto kend = key.find_last_not_of(" \t");
      if (kend != std::string::npos) key = key.substr(0, kend + 1);
      const std::size_t vstart = line.find_first_not_of(" \t", colon + 1);
      value = vstart == std::string::npos ? "" : line.substr(vstart);
    } else {
      throw Error(detail::strfmt(
          "options file parse error at line %zu: expected 'key: value' or '-key value'",
          line_no));
    }
    if (key.empty())
      throw Error(detail::strfmt("options file parse error at line %zu: empty key", line_no));
    db.set(key, value);
  }
}

inline OptionsDb parse_file(const std::string& text) {
  OptionsDb db;
  parse_file_into(db, text);
  return db;
}

/// Prefix-scoped view of an OptionsDb. The prefix is empty or ends in '_'.
class OptionsScope {
public:
  explicit OptionsScope(const OptionsDb& db, std::string prefix = "")
      : db_(&db), prefix_(std::move(prefix)) {
    require(prefix_.empty() || prefix_.back() == '_',
            "OptionsScope: prefix must be empty or end with '_'");
  }

  const OptionsDb& db() const { return *db_; }
  const std::string& prefix() const { return prefix_; }
  std::string full_key(std::string_view key) const {
    return prefix_ + std::string(key);
  }

  /// Value of prefix+key, or the default when absent. Marks the key consumed
  /// and logs the effective value either way.
  std::string get(std::string_view key, std::string_view default_value) const {
    const std::string fk = full_key(key);
    auto v = db_->lookup(fk);
    const std::string eff = v ? *v : std::string(default_value);
    db_->note_resolved(fk, eff);
    return eff;
  }

  /// Present-only lookup; marks and logs only when the key exists.
  std::optional<std::string> get_if(std::string_view key) const {
    const std::string fk = full_key(key);
    auto v = db_->lookup(fk);
    if (v) db_->note_resolved(fk, *v);
    return v;
  }

  bool has(std::string_view key) const { return db_->contains(full_key(key)); }

  double get_real(std::string_view key, double default_value) const {
    const std::string s = get(key, detail::strfmt("%.17g", default_value));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw ConfigError(full_key(key),
                        "option " + full_key(key) + ": expected a real number, got '" + s + "'");
    return v;
  }

  index_t get_int(std::string_view key, index_t default_value) const {
    const std::string s = get(key, detail::strfmt("%d", default_value));
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
      throw ConfigError(full_key(key),
                        "option " + full_key(key) + ": expected an integer, got '" + s + "'");
    return static_cast<index_t>(v);
  }

  bool get_flag(std::string_view key, bool default_value = false) const {
    const std::string s = get(key, default_value ? "true" : "false");
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(full_key(key),
                      "option " + full_key(key) + ": expected a boolean, got '" + s + "'");
  }

  /// Child scope with prefix extended by one segment and a single '_'.
  OptionsScope child(std::string_view segment) const {
    require(!segment.empty(), "OptionsScope::child: empty segment");
    std::string p = prefix_ + std::string(segment);
    if (p.back() != '_') p += '_';
    return OptionsScope(*db_, std::move(p));
  }

private:
  const OptionsDb* db_;
  std::string prefix_;
};

}  // namespace pctk
