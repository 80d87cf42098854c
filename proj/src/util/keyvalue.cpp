#include "mergeplan/util/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mergeplan::util {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string describe(std::string_view field, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "line " << line;
  if (!field.empty()) os << ", field '" << field << "'";
  os << ": " << what;
  return os.str();
}

}  // namespace

DocumentError::DocumentError(std::string field, std::size_t line, const std::string& what)
    : std::runtime_error(describe(field, line, what)), field_(std::move(field)), line_(line) {}

void Section::add(std::string key, std::string value, std::size_t line) {
  if (find(key) != nullptr) {
    throw DocumentError(key, line, "duplicate key in [" + name_ + "]");
  }
  entries_.push_back({std::move(key), std::move(value), line});
}

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const Entry& Section::require(std::string_view key) const {
  const Entry* e = find(key);
  if (e == nullptr) {
    throw DocumentError(std::string(key), line_, "missing in [" + name_ + "]");
  }
  return *e;
}

std::string Section::get_string(std::string_view key) const { return require(key).value; }
double Section::get_double(std::string_view key) const { return parse_double(require(key)); }
long Section::get_int(std::string_view key) const { return parse_int(require(key)); }
bool Section::get_bool(std::string_view key) const { return parse_bool(require(key)); }

std::optional<double> Section::opt_double(std::string_view key) const {
  const Entry* e = find(key);
  return e ? std::optional(parse_double(*e)) : std::nullopt;
}
std::optional<long> Section::opt_int(std::string_view key) const {
  const Entry* e = find(key);
  return e ? std::optional(parse_int(*e)) : std::nullopt;
}
std::optional<bool> Section::opt_bool(std::string_view key) const {
  const Entry* e = find(key);
  return e ? std::optional(parse_bool(*e)) : std::nullopt;
}
std::optional<std::string> Section::opt_string(std::string_view key) const {
  const Entry* e = find(key);
  return e ? std::optional(e->value) : std::nullopt;
}

void Section::reject_unknown(const std::vector<std::string_view>& known) const {
  for (const auto& e : entries_) {
    bool ok = false;
    for (auto k : known) ok = ok || e.key == k;
    if (!ok) throw DocumentError(e.key, e.line, "unknown key in [" + name_ + "]");
  }
}

Document Document::parse(std::string_view text) {
  Document doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;

    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw DocumentError("", line_no, "malformed section header");
      }
      doc.sections_.emplace_back(std::string(trim(line.substr(1, line.size() - 2))), line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DocumentError("", line_no, "expected 'key = value'");
    }
    if (doc.sections_.empty()) {
      throw DocumentError(std::string(trim(line.substr(0, eq))), line_no, "entry outside of a section");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw DocumentError("", line_no, "empty key");
    doc.sections_.back().add(std::string(key), std::string(trim(line.substr(eq + 1))), line_no);
  }
  return doc;
}

Document Document::load(const std::string& path) { return parse(read_file(path)); }

std::vector<const Section*> Document::all(std::string_view name) const {
  std::vector<const Section*> out;
  for (const auto& s : sections_) {
    if (s.name() == name) out.push_back(&s);
  }
  return out;
}

const Section* Document::find(std::string_view name) const {
  for (const auto& s : sections_) {
    if (s.name() == name) return &s;
  }
  return nullptr;
}

const Section& Document::require(std::string_view name) const {
  const Section* s = find(name);
  if (s == nullptr) throw DocumentError(std::string(name), 0, "missing section");
  return *s;
}

double parse_double(const Entry& e) {
  const std::string& v = e.value;
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  double out = 0.0;
  const char* first = v.data();
  if (!v.empty() && v.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw DocumentError(e.key, e.line, "expected a number, got '" + v + "'");
  }
  return out;
}

long parse_int(const Entry& e) {
  const std::string& v = e.value;
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw DocumentError(e.key, e.line, "expected an integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw DocumentError(e.key, e.line, "expected true or false, got '" + e.value + "'");
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace mergeplan::util
