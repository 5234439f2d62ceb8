#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace totp {

/// Sequence of binary choices (0 = left, 1 = right) leading from the root to a
/// node. The root is the empty path; depth equals length.
class NodePath {
 public:
  NodePath() = default;

  /// Parses a string over {0,1}; "-" and "" denote the root.
  static NodePath parse(std::string_view text);

  std::size_t depth() const noexcept { return length_; }
  bool is_root() const noexcept { return length_ == 0; }

  unsigned operator[](std::size_t i) const noexcept {
    return static_cast<unsigned>((words_[i / 64] >> (i % 64)) & 1U);
  }

  void push_back(unsigned bit);
  void pop_back();

  NodePath child(unsigned bit) const {
    NodePath c = *this;
    c.push_back(bit);
    return c;
  }
  NodePath parent() const {
    NodePath p = *this;
    p.pop_back();
    return p;
  }
  NodePath prefix(std::size_t len) const;

  bool is_prefix_of(const NodePath& other) const noexcept;

  /// "-" for the root, otherwise the bits as '0'/'1' characters.
  std::string to_string() const;

  std::size_t hash() const noexcept;

  friend bool operator==(const NodePath& a, const NodePath& b) noexcept {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }
  /// Orders by depth first, then lexicographically by choices.
  friend std::strong_ordering operator<=>(const NodePath& a, const NodePath& b) noexcept;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t length_ = 0;
};

}  // namespace totp

template <>
struct std::hash<totp::NodePath> {
  std::size_t operator()(const totp::NodePath& p) const noexcept { return p.hash(); }
};
