#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace tbrl::text {

class TokenSequence;
TokenSequence tokenize(std::string_view text);

// Lowercase, non-empty tokens. Only tokenize() builds one.
class TokenSequence {
 public:
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  bool operator==(const TokenSequence&) const = default;

 private:
  TokenSequence() = default;
  std::vector<std::string> tokens_;

  friend TokenSequence tokenize(std::string_view text);
};

// Splits on anything that is not an ASCII letter or digit.
inline TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) != 0 && c < 128) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      seq.tokens_.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) seq.tokens_.push_back(std::move(current));
  return seq;
}

inline std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace tbrl::text
