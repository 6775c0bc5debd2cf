#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "halmos/algebra.hpp"
#include "halmos/errors.hpp"

namespace halmos {

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

}  // namespace detail

/// Read one algebra from the line-oriented file format:
///
///   algebra <name>
///   carrier: <label> <label> ...
///   op <name>/<arity>:
///   <table rows>
///
/// A table for arity k over n elements has n^(k-1) rows of n labels, in
/// row-major order (last argument varies within a row); arity 0 has a single
/// row with a single label.  '#' starts a comment.  Format violations raise
/// ParseError carrying the line number.
inline FiniteAlgebra parse_algebra(std::istream& in) {
  std::vector<std::string> lines;
  {
    std::string line;
    while (std::getline(in, line)) {
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      lines.push_back(line);
    }
  }

  std::size_t at = 0;
  auto next_content = [&]() -> int {
    while (at < lines.size()) {
      if (!detail::split_tokens(lines[at]).empty()) return static_cast<int>(at) + 1;
      ++at;
    }
    return 0;  // exhausted
  };

  if (!next_content()) throw ParseError("empty algebra file", 1);
  {
    auto tokens = detail::split_tokens(lines[at]);
    if (tokens.size() != 2 || tokens[0] != "algebra") {
      throw ParseError("expected 'algebra <name>'", static_cast<int>(at) + 1);
    }
  }
  const std::string name = detail::split_tokens(lines[at])[1];
  ++at;

  if (!next_content()) throw ParseError("missing carrier line", static_cast<int>(at));
  std::vector<std::string> labels;
  {
    const int line_no = static_cast<int>(at) + 1;
    auto tokens = detail::split_tokens(lines[at]);
    if (tokens[0] != "carrier:") throw ParseError("expected 'carrier: <labels>'", line_no);
    labels.assign(tokens.begin() + 1, tokens.end());
    if (labels.empty()) throw ParseError("carrier has no elements", line_no);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        if (labels[i] == labels[j]) {
          throw ParseError("duplicate carrier label " + labels[i], line_no);
        }
      }
    }
    ++at;
  }
  const int n = static_cast<int>(labels.size());
  auto label_index = [&](const std::string& l) {
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == l) return i;
    }
    return -1;
  };

  std::vector<Operation> ops;
  std::vector<std::vector<int>> tables;
  while (next_content()) {
    const int header_line = static_cast<int>(at) + 1;
    auto tokens = detail::split_tokens(lines[at]);
    if (tokens[0] != "op" || tokens.size() != 2) {
      throw ParseError("expected 'op <name>/<arity>:'", header_line);
    }
    const std::string& decl = tokens[1];
    const std::size_t slash = decl.find('/');
    if (slash == std::string::npos || decl.back() != ':') {
      throw ParseError("expected 'op <name>/<arity>:'", header_line);
    }
    const std::string op_name = decl.substr(0, slash);
    int arity = -1;
    try {
      arity = std::stoi(decl.substr(slash + 1, decl.size() - slash - 2));
    } catch (...) {
      throw ParseError("bad arity in '" + decl + "'", header_line);
    }
    if (op_name.empty() || arity < 0) throw ParseError("bad operation declaration", header_line);
    for (const auto& existing : ops) {
      if (existing.name == op_name) {
        throw ParseError("operation " + op_name + " defined twice", header_line);
      }
    }
    ++at;

    std::uint64_t rows = 1;
    for (int i = 1; i < arity; ++i) rows *= static_cast<std::uint64_t>(n);
    const std::size_t row_width = arity == 0 ? 1 : static_cast<std::size_t>(n);
    std::vector<int> table;
    for (std::uint64_t r = 0; r < rows; ++r) {
      if (!next_content()) {
        throw ParseError("table for " + op_name + " is missing row " + std::to_string(r + 1),
                         static_cast<int>(at));
      }
      const int row_line = static_cast<int>(at) + 1;
      auto cells = detail::split_tokens(lines[at]);
      if (cells.size() != row_width) {
        throw ParseError("table row for " + op_name + " has " + std::to_string(cells.size()) +
                             " cells, expected " + std::to_string(row_width),
                         row_line);
      }
      for (const auto& cell : cells) {
        const int e = label_index(cell);
        if (e < 0) {
          throw ParseError("unknown label " + cell + " in table for " + op_name, row_line);
        }
        table.push_back(e);
      }
      ++at;
    }
    ops.push_back(Operation{op_name, arity});
    tables.push_back(std::move(table));
  }

  return FiniteAlgebra(name, Signature(std::move(ops)), std::move(labels), std::move(tables));
}

inline FiniteAlgebra parse_algebra(const std::string& text) {
  std::istringstream in(text);
  return parse_algebra(in);
}

inline FiniteAlgebra load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open algebra file " + path);
  return parse_algebra(in);
}

}  // namespace halmos
