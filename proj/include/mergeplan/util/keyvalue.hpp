#pragma once

// Minimal line-oriented "[section] / key = value" documents. Used for
// scenario, rule, planner and behavior-parameter files. Sections may repeat
// (one [agent] or [rule] block per item) and every entry remembers its line
// so validation errors can point at the offending field.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mergeplan::util {

class DocumentError : public std::runtime_error {
 public:
  DocumentError(std::string field, std::size_t line, const std::string& what);

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

class Section {
 public:
  Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const { return name_; }
  std::size_t line() const { return line_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void add(std::string key, std::string value, std::size_t line);
  const Entry* find(std::string_view key) const;
  const Entry& require(std::string_view key) const;

  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  long get_int(std::string_view key) const;
  bool get_bool(std::string_view key) const;

  std::optional<double> opt_double(std::string_view key) const;
  std::optional<long> opt_int(std::string_view key) const;
  std::optional<bool> opt_bool(std::string_view key) const;
  std::optional<std::string> opt_string(std::string_view key) const;

  // Every key must belong to `known`; unknown keys are reported with their line.
  void reject_unknown(const std::vector<std::string_view>& known) const;

 private:
  std::string name_;
  std::size_t line_;
  std::vector<Entry> entries_;
};

class Document {
 public:
  static Document parse(std::string_view text);
  static Document load(const std::string& path);

  const std::vector<Section>& sections() const { return sections_; }
  std::vector<const Section*> all(std::string_view name) const;
  const Section* find(std::string_view name) const;
  const Section& require(std::string_view name) const;

 private:
  std::vector<Section> sections_;
};

double parse_double(const Entry& e);
long parse_int(const Entry& e);
bool parse_bool(const Entry& e);

// Shortest representation that round-trips through parse_double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace mergeplan::util
