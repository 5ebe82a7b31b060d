// Copyright 2026 The svaicl Authors.
//
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

#include "svaicl/codeparse.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include <fmt/format.h>
#include <tree_sitter/api.h>

#include "svaicl/error.hpp"

extern "C" {
const TSLanguage* tree_sitter_c(void);
const TSLanguage* tree_sitter_cpp(void);
}

namespace svaicl {

namespace {

enum class CharClass { kSeparator, kUpper, kLower, kDigit };

CharClass classify(char c) {
  const auto u = static_cast<unsigned char>(c);
  if (u >= 'A' && u <= 'Z') return CharClass::kUpper;
  if (u >= 'a' && u <= 'z') return CharClass::kLower;
  if (u >= '0' && u <= '9') return CharClass::kDigit;
  return CharClass::kSeparator;
}

bool is_ident_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Multi-character punctuators; the longest match wins.
constexpr std::array<std::string_view, 27> kPunctuators = {
    "<<=", ">>=", "->*", "...", "<=>",                                    //
    "::",  "->",  "++",  "--",  "<<",  ">>", "<=", ">=", "==", "!=", "&&",  //
    "||",  "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", ".*", "##"};

bool is_string_prefix(std::string_view ident) {
  return ident == "L" || ident == "u" || ident == "U" || ident == "u8";
}

// Scans a quoted literal starting at `pos` (the opening quote). Stops after the
// closing quote, or at end of line for unterminated literals.
std::size_t scan_quoted(std::string_view code, std::size_t pos) {
  const char quote = code[pos];
  std::size_t i = pos + 1;
  while (i < code.size()) {
    const char c = code[i];
    if (c == '\\' && i + 1 < code.size()) {
      i += 2;
      continue;
    }
    ++i;
    if (c == quote || c == '\n') break;
  }
  return i;
}

class TreeSitterBackend final : public SyntaxBackend {
 public:
  explicit TreeSitterBackend(Grammar grammar)
      : grammar_(grammar), parser_(ts_parser_new(), &ts_parser_delete) {
    const TSLanguage* lang = grammar == Grammar::kC ? tree_sitter_c() : tree_sitter_cpp();
    if (!ts_parser_set_language(parser_.get(), lang))
      throw Error(ErrorKind::kInternal,
                  fmt::format("tree-sitter rejected the {} grammar (ABI mismatch)",
                              to_string(grammar)));
  }

  Grammar grammar() const override { return grammar_; }

  SyntaxTree parse(std::string_view code) override {
    std::unique_ptr<TSTree, decltype(&ts_tree_delete)> tree(
        ts_parser_parse_string(parser_.get(), nullptr, code.data(),
                               static_cast<std::uint32_t>(code.size())),
        &ts_tree_delete);
    if (!tree) throw ParseFailure("tree-sitter returned no tree");

    SyntaxTree out;
    const TSNode root = ts_tree_root_node(tree.get());
    out.has_error = ts_node_has_error(root);

    TSTreeCursor cursor = ts_tree_cursor_new(root);
    std::uint32_t depth = 0;
    for (;;) {
      const TSNode node = ts_tree_cursor_current_node(&cursor);
      out.preorder.push_back({ts_node_type(node), ts_node_is_named(node), depth});
      if (ts_tree_cursor_goto_first_child(&cursor)) {
        ++depth;
        continue;
      }
      bool advanced = false;
      while (!advanced) {
        if (ts_tree_cursor_goto_next_sibling(&cursor)) {
          advanced = true;
        } else if (ts_tree_cursor_goto_parent(&cursor)) {
          --depth;
        } else {
          break;
        }
      }
      if (!advanced) break;
    }
    ts_tree_cursor_delete(&cursor);
    return out;
  }

 private:
  Grammar grammar_;
  std::unique_ptr<TSParser, decltype(&ts_parser_delete)> parser_;
};

}  // namespace

std::vector<std::string> split_camel_case(std::string_view code) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  CharClass prev = CharClass::kSeparator;
  for (std::size_t i = 0; i < code.size(); ++i) {
    const CharClass cls = classify(code[i]);
    if (cls == CharClass::kSeparator) {
      flush();
      prev = cls;
      continue;
    }
    bool boundary = false;
    if (prev == CharClass::kLower && cls == CharClass::kUpper) boundary = true;
    if ((prev == CharClass::kDigit) != (cls == CharClass::kDigit) &&
        prev != CharClass::kSeparator)
      boundary = true;
    if (prev == CharClass::kUpper && cls == CharClass::kUpper && i + 1 < code.size() &&
        classify(code[i + 1]) == CharClass::kLower)
      boundary = true;
    if (boundary) flush();
    current.push_back(code[i]);
    prev = cls;
  }
  flush();
  return out;
}

std::string camel_case_text(std::string_view code) {
  std::string out;
  for (const auto& piece : split_camel_case(code)) {
    if (!out.empty()) out.push_back(' ');
    out += piece;
  }
  return out;
}

TokenSet::TokenSet(std::initializer_list<std::string_view> tokens) {
  tokens_.reserve(tokens.size());
  for (auto t : tokens) tokens_.emplace_back(t);
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

TokenSet::TokenSet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
}

bool TokenSet::contains(std::string_view token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

std::vector<std::string> lex_code(std::string_view code) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = code.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(code[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && code[i + 1] == '/') {
      while (i < n && code[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && code[i + 1] == '*') {
      const auto end = code.find("*/", i + 2);
      i = end == std::string_view::npos ? n : end + 2;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_char(static_cast<unsigned char>(code[j]))) ++j;
      if (j < n && (code[j] == '"' || code[j] == '\'') && is_string_prefix(code.substr(i, j - i)))
        j = scan_quoted(code, j);
      out.emplace_back(code.substr(i, j - i));
      i = j;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(static_cast<unsigned char>(code[i + 1])))) {
      std::size_t j = i + 1;
      while (j < n) {
        const auto d = static_cast<unsigned char>(code[j]);
        if ((d == '+' || d == '-') &&
            (code[j - 1] == 'e' || code[j - 1] == 'E' || code[j - 1] == 'p' || code[j - 1] == 'P')) {
          ++j;
          continue;
        }
        if (is_ident_char(d) || d == '.' || d == '\'') {
          ++j;
          continue;
        }
        break;
      }
      out.emplace_back(code.substr(i, j - i));
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      const std::size_t j = scan_quoted(code, i);
      out.emplace_back(code.substr(i, j - i));
      i = j;
      continue;
    }
    std::size_t len = 1;
    for (auto p : kPunctuators) {
      if (p.size() > len && code.substr(i, p.size()) == p) len = p.size();
    }
    out.emplace_back(code.substr(i, len));
    i += len;
  }
  return out;
}

TokenSet tokenize_code(std::string_view code) { return TokenSet(lex_code(code)); }

std::string_view to_string(Grammar g) { return g == Grammar::kC ? "c" : "cpp"; }

std::unique_ptr<SyntaxBackend> make_tree_sitter_backend(Grammar grammar) {
  return std::make_unique<TreeSitterBackend>(grammar);
}

AstSequence serialize_tree(const SyntaxTree& tree, std::size_t cap) {
  AstSequence seq;
  for (const auto& node : tree.preorder) {
    if (!node.named || node.kind == "comment") continue;
    ++seq.source_len;
    if (seq.items.size() < cap) seq.items.push_back(node.kind);
  }
  return seq;
}

CodeParser::CodeParser(GrammarChoice choice) : choice_(choice) {}
CodeParser::~CodeParser() = default;
CodeParser::CodeParser(CodeParser&&) noexcept = default;
CodeParser& CodeParser::operator=(CodeParser&&) noexcept = default;

void CodeParser::set_backend(std::unique_ptr<SyntaxBackend> backend) {
  (backend->grammar() == Grammar::kC ? c_ : cpp_) = std::move(backend);
}

SyntaxBackend& CodeParser::backend(Grammar g) {
  auto& slot = g == Grammar::kC ? c_ : cpp_;
  if (!slot) slot = make_tree_sitter_backend(g);
  return *slot;
}

AstSequence CodeParser::parse(std::string_view code, std::size_t cap) {
  if (cap == 0) throw UsageError("AST sequence cap must be at least 1");
  std::vector<Grammar> order;
  switch (choice_) {
    case GrammarChoice::kAuto: order = {Grammar::kC, Grammar::kCpp}; break;
    case GrammarChoice::kC: order = {Grammar::kC}; break;
    case GrammarChoice::kCpp: order = {Grammar::kCpp}; break;
  }
  for (Grammar g : order) {
    const SyntaxTree tree = backend(g).parse(code);
    if (tree.has_error) continue;
    AstSequence seq = serialize_tree(tree, cap);
    if (seq.items.empty()) continue;
    return seq;
  }
  throw ParseFailure("code could not be parsed without syntax errors");
}

AstSequence parse_to_ast_sequence(std::string_view code, std::size_t cap) {
  thread_local CodeParser parser;
  return parser.parse(code, cap);
}

CodeViews make_code_views(CodeParser& parser, std::string_view code, std::size_t cap) {
  return {parser.parse(code, cap), tokenize_code(code)};
}

}  // namespace svaicl
