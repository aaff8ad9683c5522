#include "raredis/output_parse.hpp"

#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include "raredis/text.hpp"

namespace raredis {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_refusal(const std::string& s) {
  std::string t = ascii_lower(trim(s));
  while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.pop_back();
  if (t.empty() || t == "none" || t == "n/a" || t == "no entities" ||
      t == "none found" || t == "none mentioned") {
    return true;
  }
  static const std::regex none_re(
      R"(^(there (are|is) )?no\b.*\b(mentioned|found|identified|present|extracted|listed|detected)\b.*$)");
  return std::regex_match(t, none_re);
}

// Strips list markers like "1. ", "2) ", "- ", "* ", "• ".
std::string strip_marker(const std::string& line) {
  static const std::regex marker_re(R"(^\s*(\d+[.)]|[-*\xE2\x80\xA2\x97\xA6]+)\s+(.*)$)");
  std::smatch m;
  if (std::regex_match(line, m, marker_re)) return m[2].str();
  return line;
}

bool has_marker(const std::string& line) {
  static const std::regex marker_re(R"(^\s*(\d+[.)]|[-*\xE2\x80\xA2]+)\s+\S.*$)");
  return std::regex_match(line, marker_re);
}

std::string clean_item(std::string s) {
  s = trim(s);
  // surrounding quotes / brackets
  auto paired = [](char a, char b, const std::string& t) {
    return t.size() >= 2 && t.front() == a && t.back() == b;
  };
  while (paired('"', '"', s) || paired('\'', '\'', s) || paired('[', ']', s) ||
         paired('(', ')', s)) {
    s = trim(s.substr(1, s.size() - 2));
  }
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';' ||
                        s.back() == ':')) {
    s.pop_back();
  }
  return trim(s);
}

// Splits on commas outside parentheses.
std::vector<std::string> comma_split(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')' && depth > 0) --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

ParsedOutput parse_llm_output(const std::string& raw_text) {
  ParsedOutput out;
  std::string body = trim(raw_text);
  if (is_refusal(body)) return out;

  std::vector<std::string> lines;
  {
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!trim(line).empty()) lines.push_back(line);
    }
  }

  std::vector<std::string> candidates;
  bool structured = false;
  bool any_marker = false;
  for (const std::string& l : lines) {
    if (has_marker(l)) {
      any_marker = true;
      break;
    }
  }
  if (any_marker) {
    structured = true;
    for (const std::string& l : lines) {
      if (has_marker(l)) candidates.push_back(strip_marker(l));
    }
  } else if (lines.size() > 1) {
    structured = true;
    candidates = lines;
  } else if (!lines.empty()) {
    const std::string& only = lines[0];
    std::vector<std::string> parts = comma_split(only);
    if (parts.size() > 1) {
      structured = true;
      candidates = parts;
    } else {
      candidates.push_back(only);
    }
  }

  std::set<std::string> seen;
  for (const std::string& c : candidates) {
    std::string item = clean_item(c);
    if (item.empty() || is_refusal(item)) continue;
    std::string key = ascii_lower(item);
    if (!seen.insert(key).second) continue;
    out.items.push_back(item);
  }

  if (!structured && !out.items.empty()) {
    // Lone candidate covering the whole response; flag prose-looking ones.
    if (word_tokens(out.items[0]).size() > 8 ||
        out.items[0].find(". ") != std::string::npos) {
      out.unstructured = true;
    }
  }
  return out;
}

}  // namespace raredis
