#include "danlg/mr.hpp"

#include <algorithm>
#include <optional>

#include "danlg/error.hpp"
#include "danlg/text.hpp"

namespace danlg {
namespace {

constexpr std::string_view kSpace = " \t\r\n\f\v";
constexpr std::string_view kDaForbidden = "()[]&;=,";
constexpr std::string_view kAttributeForbidden = "()[];=";

bool is_space(char c) { return kSpace.find(c) != std::string_view::npos; }

bool contains_any(std::string_view s, std::string_view chars) {
  return s.find_first_of(chars) != std::string_view::npos;
}

// Returns the reason a value is not renderable, or nullopt when it is.
std::optional<std::string> value_problem(std::string_view value) {
  if (value.empty()) return "empty value";
  if (trim(value).size() != value.size()) return "value is not trimmed";
  int paren = 0;
  int bracket = 0;
  for (char c : value) {
    switch (c) {
      case '(': ++paren; break;
      case ')': if (--paren < 0) return "unbalanced ')' in value"; break;
      case '[': ++bracket; break;
      case ']': if (--bracket < 0) return "unbalanced ']' in value"; break;
      case ';':
        if (paren == 0 && bracket == 0) return "top-level ';' in value";
        break;
      default: break;
    }
  }
  if (paren != 0 || bracket != 0) return "unbalanced brackets in value";
  return std::nullopt;
}

class MrParser {
 public:
  explicit MrParser(std::string_view text) : text_(text) {}

  MeaningRepresentation parse() {
    skip_space();
    if (pos_ == text_.size()) throw MalformedMr(0, "empty MR");

    const auto structural = text_.find_first_of("([=", pos_);
    if (structural != std::string_view::npos && text_[structural] == '[') {
      // E2E flat form: the whole string is a bracketed slot list.
      std::vector<DaGroup> groups;
      groups.push_back(
          DaGroup{"inform", bracket_slots(pos_, text_.size())});
      return build(std::move(groups));
    }

    std::vector<DaGroup> groups;
    while (true) {
      skip_space();
      if (pos_ == text_.size()) break;
      if (!groups.empty() && text_[pos_] == '&') {
        ++pos_;
        skip_space();
        if (pos_ == text_.size()) {
          throw MalformedMr(pos_, "dangling '&' without a following group");
        }
      }
      groups.push_back(group());
    }
    return build(std::move(groups));
  }

 private:
  MeaningRepresentation build(std::vector<DaGroup> groups) {
    try {
      return MeaningRepresentation(std::move(groups));
    } catch (const Error& e) {
      throw MalformedMr(0, e.what());
    }
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  DaGroup group() {
    const std::size_t da_start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           text_[pos_] != '(') {
      const char c = text_[pos_];
      if (c == ')') throw MalformedMr(pos_, "unbalanced parentheses");
      if (kDaForbidden.find(c) != std::string_view::npos) {
        throw MalformedMr(pos_, std::string("unexpected '") + c +
                                    "' in DA name");
      }
      ++pos_;
    }
    std::string da(text_.substr(da_start, pos_ - da_start));
    if (da.empty()) throw MalformedMr(da_start, "empty DA name");
    skip_space();
    if (pos_ == text_.size()) {
      throw MalformedMr(da_start, "trailing garbage '" + da + "'");
    }
    if (text_[pos_] != '(') {
      throw MalformedMr(pos_, "expected '(' after DA name");
    }
    const std::size_t open = pos_++;
    const std::size_t body_start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    if (pos_ == text_.size()) throw MalformedMr(open, "unbalanced parentheses");
    const std::size_t body_end = pos_++;
    return DaGroup{std::move(da), slots(body_start, body_end)};
  }

  std::vector<SlotValue> slots(std::size_t begin, std::size_t end) {
    const std::string_view body = text_.substr(begin, end - begin);
    if (trim(body).empty()) return {};
    const auto structural = body.find_first_of("=[(");
    if (structural != std::string_view::npos && body[structural] == '[') {
      return bracket_slots(begin, end);
    }
    std::vector<SlotValue> out;
    for (auto [piece_begin, piece_end] : split_top_level(begin, end, ';')) {
      const std::string_view piece =
          text_.substr(piece_begin, piece_end - piece_begin);
      if (trim(piece).empty()) throw MalformedMr(piece_begin, "empty slot");
      const auto eq = piece.find('=');
      if (eq == std::string_view::npos) {
        throw MalformedMr(piece_begin, "slot without '='");
      }
      out.push_back(make_slot(piece.substr(0, eq), piece.substr(eq + 1),
                              piece_begin));
    }
    return out;
  }

  std::vector<SlotValue> bracket_slots(std::size_t begin, std::size_t end) {
    std::vector<SlotValue> out;
    for (auto [piece_begin, piece_end] : split_top_level(begin, end, ',')) {
      const std::string_view raw =
          text_.substr(piece_begin, piece_end - piece_begin);
      const std::string_view piece = trim(raw);
      if (piece.empty()) throw MalformedMr(piece_begin, "empty slot");
      const auto open = piece.find('[');
      if (open == std::string_view::npos || piece.back() != ']') {
        throw MalformedMr(piece_begin, "slot without '[value]'");
      }
      out.push_back(make_slot(piece.substr(0, open),
                              piece.substr(open + 1, piece.size() - open - 2),
                              piece_begin));
    }
    return out;
  }

  SlotValue make_slot(std::string_view attribute, std::string_view value,
                      std::size_t at) {
    attribute = trim(attribute);
    value = trim(value);
    if (attribute.empty()) throw MalformedMr(at, "empty attribute");
    if (contains_any(attribute, kAttributeForbidden)) {
      throw MalformedMr(at, "invalid character in attribute '" +
                                std::string(attribute) + "'");
    }
    if (auto problem = value_problem(value)) throw MalformedMr(at, *problem);
    return SlotValue{std::string(attribute), std::string(value)};
  }

  // Splits [begin, end) on `sep` outside any () or [] nesting.
  std::vector<std::pair<std::size_t, std::size_t>> split_top_level(
      std::size_t begin, std::size_t end, char sep) const {
    std::vector<std::pair<std::size_t, std::size_t>> pieces;
    int paren = 0;
    int bracket = 0;
    std::size_t start = begin;
    for (std::size_t i = begin; i < end; ++i) {
      const char c = text_[i];
      if (c == '(') ++paren;
      else if (c == ')') --paren;
      else if (c == '[') ++bracket;
      else if (c == ']') --bracket;
      if (bracket < 0) throw MalformedMr(i, "unbalanced brackets");
      if (c == sep && paren == 0 && bracket == 0) {
        pieces.emplace_back(start, i);
        start = i + 1;
      }
    }
    if (bracket != 0) throw MalformedMr(begin, "unbalanced brackets");
    pieces.emplace_back(start, end);
    return pieces;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

MeaningRepresentation::MeaningRepresentation(std::vector<DaGroup> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw Error(ErrorCode::kInvalidMr, "an MR needs at least one DA group");
  }
  for (const auto& group : groups_) {
    if (group.da.empty()) throw Error(ErrorCode::kInvalidMr, "empty DA name");
    for (char c : group.da) {
      if (is_space(c) || kDaForbidden.find(c) != std::string_view::npos) {
        throw Error(ErrorCode::kInvalidMr,
                    "invalid character in DA name '" + group.da + "'");
      }
    }
    for (const auto& slot : group.slots) {
      if (slot.attribute.empty() ||
          trim(slot.attribute).size() != slot.attribute.size() ||
          contains_any(slot.attribute, kAttributeForbidden)) {
        throw Error(ErrorCode::kInvalidMr,
                    "invalid attribute '" + slot.attribute + "'");
      }
      if (auto problem = value_problem(slot.value)) {
        throw Error(ErrorCode::kInvalidMr,
                    *problem + " for attribute '" + slot.attribute + "'");
      }
    }
  }
}

std::size_t MeaningRepresentation::attribute_count() const noexcept {
  std::size_t n = 0;
  for (const auto& group : groups_) n += group.slots.size();
  return n;
}

std::vector<std::string> MeaningRepresentation::da_signature() const {
  std::vector<std::string> out;
  out.reserve(groups_.size());
  for (const auto& group : groups_) out.push_back(group.da);
  return out;
}

std::string MeaningRepresentation::da_label() const {
  std::string out;
  for (const auto& group : groups_) {
    if (!out.empty()) out += " & ";
    out += group.da;
  }
  return out;
}

std::vector<std::string> MeaningRepresentation::attributes() const {
  std::vector<std::string> out;
  for (const auto& group : groups_) {
    for (const auto& slot : group.slots) out.push_back(slot.attribute);
  }
  return out;
}

MeaningRepresentation parse_mr(std::string_view text) {
  return MrParser(text).parse();
}

std::string render_mr(const MeaningRepresentation& mr) {
  std::string out;
  for (const auto& group : mr.groups()) {
    if (!out.empty()) out += " & ";
    out += group.da;
    if (group.slots.empty()) {
      out += " (  )";
      continue;
    }
    out += " ( ";
    for (std::size_t i = 0; i < group.slots.size(); ++i) {
      if (i > 0) out += " ; ";
      out += group.slots[i].attribute;
      out += " = ";
      out += group.slots[i].value;
    }
    out += " )";
  }
  return out;
}

}  // namespace danlg
