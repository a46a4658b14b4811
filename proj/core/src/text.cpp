#include "danlg/text.hpp"

#include <openssl/evp.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <array>
#include <charconv>
#include <system_error>
#include <stdexcept>

#include "danlg/error.hpp"

namespace danlg {
namespace {

icu::UnicodeString to_nfc(std::string_view text) {
  icu::UnicodeString raw = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return raw;
  icu::UnicodeString out = nfc->normalize(raw, status);
  return U_FAILURE(status) ? raw : out;
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_bracket(UChar32 c) {
  const int8_t type = u_charType(c);
  return type == U_START_PUNCTUATION || type == U_END_PUNCTUATION;
}

// Collapses whitespace on an already-normalized ICU string.
std::string collapse(const icu::UnicodeString& s) {
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    const UChar32 c = s.char32At(i);
    if (is_space(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) out.append(static_cast<UChar>(u' '));
    pending_space = false;
    out.append(c);
  }
  return to_utf8(out);
}

}  // namespace

std::vector<std::string> word_tokenize(std::string_view text) {
  icu::UnicodeString s = to_nfc(text);
  s.toLower(icu::Locale::getRoot());
  std::vector<std::string> tokens;
  icu::UnicodeString current;
  auto flush = [&] {
    if (!current.isEmpty()) {
      tokens.push_back(to_utf8(current));
      current.remove();
    }
  };
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    const UChar32 c = s.char32At(i);
    if (is_space(c) || u_ispunct(c)) {
      flush();
    } else {
      current.append(c);
    }
  }
  flush();
  return tokens;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(kSpace);
  return text.substr(first, last - first + 1);
}

std::string normalize_space(std::string_view text) {
  return collapse(to_nfc(text));
}

std::string normalize_for_match(std::string_view text) {
  icu::UnicodeString s = to_nfc(text);
  s.toLower(icu::Locale::getRoot());
  return collapse(s);
}

std::string strip_enclosing_punctuation(std::string_view text) {
  const icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  int32_t begin = 0;
  int32_t end = s.length();
  while (begin < end) {
    const UChar32 c = s.char32At(begin);
    if (!(is_space(c) || (u_ispunct(c) && !is_bracket(c)))) break;
    begin = s.moveIndex32(begin, 1);
  }
  while (end > begin) {
    const int32_t prev = s.moveIndex32(end, -1);
    const UChar32 c = s.char32At(prev);
    if (!(is_space(c) || (u_ispunct(c) && !is_bracket(c)))) break;
    end = prev;
  }
  return to_utf8(s.tempSubStringBetween(begin, end));
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sentence_id(std::string_view text) {
  return sha256_hex(normalize_space(text)).substr(0, 16);
}

std::string pair_id(std::string_view candidate, std::string_view reference) {
  std::string joined = normalize_space(candidate);
  joined.push_back('\x1f');
  joined += normalize_space(reference);
  return sha256_hex(joined).substr(0, 16);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kFormat, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace danlg
