#include "totp/node_path.hpp"

#include "totp/common.hpp"

namespace totp {

NodePath NodePath::parse(std::string_view text) {
  NodePath p;
  if (text == "-") {
    return p;
  }
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParseError("node path must be a string over {0,1} or '-': '" + std::string(text) + "'");
    }
    p.push_back(c == '1' ? 1U : 0U);
  }
  return p;
}

void NodePath::push_back(unsigned bit) {
  if (length_ % 64 == 0) {
    words_.push_back(0);
  }
  if (bit != 0) {
    words_.back() |= std::uint64_t{1} << (length_ % 64);
  }
  ++length_;
}

void NodePath::pop_back() {
  if (length_ == 0) {
    throw NotInTreeError("the root has no parent");
  }
  --length_;
  if (length_ % 64 == 0) {
    words_.pop_back();
  } else {
    words_.back() &= ~(std::uint64_t{1} << (length_ % 64));
  }
}

NodePath NodePath::prefix(std::size_t len) const {
  NodePath p;
  for (std::size_t i = 0; i < len && i < length_; ++i) {
    p.push_back((*this)[i]);
  }
  return p;
}

bool NodePath::is_prefix_of(const NodePath& other) const noexcept {
  if (length_ > other.length_) {
    return false;
  }
  for (std::size_t i = 0; i < length_; ++i) {
    if ((*this)[i] != other[i]) {
      return false;
    }
  }
  return true;
}

std::string NodePath::to_string() const {
  if (length_ == 0) {
    return "-";
  }
  std::string s;
  s.reserve(length_);
  for (std::size_t i = 0; i < length_; ++i) {
    s.push_back((*this)[i] != 0U ? '1' : '0');
  }
  return s;
}

std::size_t NodePath::hash() const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ length_;
  for (std::uint64_t w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::strong_ordering operator<=>(const NodePath& a, const NodePath& b) noexcept {
  if (auto c = a.length_ <=> b.length_; c != 0) {
    return c;
  }
  for (std::size_t i = 0; i < a.length_; ++i) {
    if (auto c = a[i] <=> b[i]; c != 0) {
      return c;
    }
  }
  return std::strong_ordering::equal;
}

}  // namespace totp
