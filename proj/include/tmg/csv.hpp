#pragma once

// Minimal RFC-4180 CSV reader/writer. Handles quoted fields, escaped
// quotes ("") and CRLF line endings; that is all the event extracts need.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "tmg/core.hpp"

namespace tmg {
namespace csv {

// Reads one record (possibly spanning multiple physical lines inside
// quotes). Returns false at end of input.
inline bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;

  std::string cur;
  bool in_quotes = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(cur);
      return true;
    }
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        int nxt = in.peek();
        if (nxt == '"') {
          cur.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && cur.empty()) {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      fields.push_back(cur);
      return true;
    } else {
      cur.push_back(ch);
    }
    c = in.get();
  }
}

inline std::string escape(const std::string& field) {
  bool need = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!need) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

inline void write_record(std::ostream& out,
                         const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace csv
}  // namespace tmg
