#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace danlg {

struct SlotValue {
  std::string attribute;
  std::string value;

  friend bool operator==(const SlotValue&, const SlotValue&) = default;
  friend auto operator<=>(const SlotValue&, const SlotValue&) = default;
};

// One simple dialogue act with its slots, in corpus order. Duplicate
// attributes are legal ("action = think ; action = eat").
struct DaGroup {
  std::string da;
  std::vector<SlotValue> slots;

  friend bool operator==(const DaGroup&, const DaGroup&) = default;
  friend auto operator<=>(const DaGroup&, const DaGroup&) = default;
};

/// A dialogue-act meaning representation: one or more DA groups.
///
/// Construction validates the invariants that make the canonical rendering
/// re-parseable: DA names carry no whitespace or structural characters,
/// attributes carry none of `( ) ; = [ ]`, values are trimmed, non-empty,
/// bracket-balanced and free of top-level `;`.
class MeaningRepresentation {
 public:
  explicit MeaningRepresentation(std::vector<DaGroup> groups);

  const std::vector<DaGroup>& groups() const noexcept { return groups_; }

  /// Total slot count across groups.
  std::size_t attribute_count() const noexcept;

  /// Ordered DA names, one per group.
  std::vector<std::string> da_signature() const;

  /// DA names joined with " & "; the multiclass label for this MR.
  std::string da_label() const;

  /// Attribute names across all groups, in order, with repetitions.
  std::vector<std::string> attributes() const;

  friend bool operator==(const MeaningRepresentation&,
                         const MeaningRepresentation&) = default;
  friend auto operator<=>(const MeaningRepresentation&,
                          const MeaningRepresentation&) = default;

 private:
  std::vector<DaGroup> groups_;
};

/// Parses the surface MR syntax.
///
/// Accepted forms:
///   - `da ( attr = value ; attr = value )`, groups joined by whitespace or `&`
///   - `da(attr[value], attr[value])` as shipped by the ViGGO distribution
///   - `attr[value], attr[value]` as shipped by E2E; the DA is `inform`
///
/// Values may contain balanced parentheses (`esrb = M (for Mature)`) and
/// commas. Throws MalformedMr with a byte offset on any syntax error.
MeaningRepresentation parse_mr(std::string_view text);

/// Canonical form `da ( a = v ; b = w )`, zero-slot groups as `da (  )`,
/// groups joined with " & ".
std::string render_mr(const MeaningRepresentation& mr);

}  // namespace danlg
