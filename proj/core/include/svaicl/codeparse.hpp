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

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace svaicl {

/// Splits identifiers on CamelCase boundaries (lower->Upper, acronym->Word,
/// letter<->digit). Any character outside [A-Za-z0-9] or a non-ASCII byte
/// separates identifiers; underscores included.
///   "getUserName" -> get User Name,  "HTTPServer2" -> HTTP Server 2
std::vector<std::string> split_camel_case(std::string_view code);

/// split_camel_case joined with single spaces, the encoder input format.
std::string camel_case_text(std::string_view code);

/// Deduplicated set of lexical tokens. Equality ignores insertion order.
class TokenSet {
 public:
  TokenSet() = default;
  TokenSet(std::initializer_list<std::string_view> tokens);
  explicit TokenSet(std::vector<std::string> tokens);

  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  /// Sorted, unique.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }

  bool operator==(const TokenSet&) const = default;

 private:
  std::vector<std::string> tokens_;
};

/// C/C++ lexer: identifiers, keywords, number / string / char literals and
/// operator symbols (longest match). Comments and whitespace are dropped.
std::vector<std::string> lex_code(std::string_view code);

TokenSet tokenize_code(std::string_view code);

/// Pre-order node-kind labels of a syntax tree.
struct AstSequence {
  std::vector<std::string> items;
  /// Number of labels before the cap was applied.
  std::size_t source_len = 0;

  bool operator==(const AstSequence&) const = default;
};

inline constexpr std::size_t kDefaultAstCap = 2000;

enum class Grammar { kC, kCpp };

/// kAuto tries C first, then C++.
enum class GrammarChoice { kAuto, kC, kCpp };

std::string_view to_string(Grammar g);

/// One node of a parsed tree, flattened in pre-order.
struct SyntaxNode {
  std::string kind;
  bool named = false;
  std::uint32_t depth = 0;
};

struct SyntaxTree {
  std::vector<SyntaxNode> preorder;
  /// True when the tree holds any error or missing node.
  bool has_error = false;
};

/// Parser backend. Instances are not thread-safe; give each worker its own.
class SyntaxBackend {
 public:
  virtual ~SyntaxBackend() = default;
  virtual Grammar grammar() const = 0;
  virtual SyntaxTree parse(std::string_view code) = 0;
};

/// tree-sitter backed parser for the vendored C or C++ grammar.
std::unique_ptr<SyntaxBackend> make_tree_sitter_backend(Grammar grammar);

/// Serializes a tree: named nodes in pre-order, anonymous (punctuation and
/// keyword) nodes and comments dropped, truncated to `cap`.
AstSequence serialize_tree(const SyntaxTree& tree, std::size_t cap);

/// Owns one backend per grammar, created on first use.
class CodeParser {
 public:
  explicit CodeParser(GrammarChoice choice = GrammarChoice::kAuto);
  ~CodeParser();
  CodeParser(CodeParser&&) noexcept;
  CodeParser& operator=(CodeParser&&) noexcept;

  /// Throws ParseFailure when no permitted grammar parses `code` cleanly,
  /// UsageError when cap is 0.
  AstSequence parse(std::string_view code, std::size_t cap = kDefaultAstCap);

  /// Installs a custom backend, replacing the tree-sitter default for its grammar.
  void set_backend(std::unique_ptr<SyntaxBackend> backend);

 private:
  SyntaxBackend& backend(Grammar g);

  GrammarChoice choice_;
  std::unique_ptr<SyntaxBackend> c_;
  std::unique_ptr<SyntaxBackend> cpp_;
};

/// Convenience wrapper over a thread-local CodeParser (auto grammar).
AstSequence parse_to_ast_sequence(std::string_view code, std::size_t cap = kDefaultAstCap);

/// The three code views consumed by the similarity pipeline.
struct CodeViews {
  AstSequence ast;
  TokenSet tokens;
};

CodeViews make_code_views(CodeParser& parser, std::string_view code,
                          std::size_t cap = kDefaultAstCap);

}  // namespace svaicl
