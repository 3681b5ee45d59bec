#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "percospec/core/error.hpp"
#include "percospec/core/geometry.hpp"

namespace percospec {

inline constexpr std::uint32_t side_bit(SideTag t) { return 1u << static_cast<unsigned>(t); }

/// Summary of one occupied (black) component of the occupied set restricted to a region.
struct ComponentInfo {
  std::uint32_t sides = 0;
  bool circuit = false;  // contains a loop around the hole of a full annulus

  [[nodiscard]] bool touches(SideTag t) const { return (sides & side_bit(t)) != 0; }
  [[nodiscard]] bool spans() const { return touches(SideTag::inner) && touches(SideTag::outer); }
};

/*
 * Pattern over {O, V}; alternatives are separated by '|'. Full annuli are matched cyclically,
 * half and quarter annuli linearly from the flat side at angle 0 counter-clockwise.
 */
struct ArmEventSpec {
  Region region;
  std::string pattern;

  ArmEventSpec() = default;
  ArmEventSpec(Region g, std::string p) : region(g), pattern(std::move(p)) { validate(); }

  void validate() const {
    if (!region.is_annular()) throw ParameterError("arm events need an annulus-kind region");
    if (pattern.empty()) throw ParameterError("arm pattern must be nonempty");
    bool any = false;
    for (char c : pattern) {
      if (c == '|') {
        if (!any) throw ParameterError("empty alternative in arm pattern");
        any = false;
      } else if (c == 'O' || c == 'V') {
        any = true;
      } else {
        throw ParameterError("arm pattern letters must be O, V or |");
      }
    }
    if (!any) throw ParameterError("empty alternative in arm pattern");
  }

  [[nodiscard]] bool cyclic() const { return region.kind() == RegionKind::annulus; }
};

namespace arms {

inline ArmEventSpec four_arm(double r, double R) { return {Region::annulus({0, 0}, r, R), "OVOV"}; }
inline ArmEventSpec one_arm(double r, double R) { return {Region::annulus({0, 0}, r, R), "O"}; }
inline ArmEventSpec one_vacant_arm(double r, double R) { return {Region::annulus({0, 0}, r, R), "V"}; }
inline ArmEventSpec two_arm(double r, double R) { return {Region::annulus({0, 0}, r, R), "OV"}; }
inline ArmEventSpec three_arm_half(double r, double R) { return {Region::half_annulus({0, 0}, r, R), "OVO|VOV"}; }
inline ArmEventSpec two_arm_quarter(double r, double R) { return {Region::quarter_annulus({0, 0}, r, R), "OV|VO"}; }

}  // namespace arms

/*
 * Maximal alternating arm word realised by the occupied components of a region, read off
 * through planar duality: between two disjoint spanning occupied components there is always a
 * spanning vacant path, and a vacant path next to a flat side exists unless the neighbouring
 * occupied component touches that side.
 */
inline std::string arm_word(const std::vector<ComponentInfo>& comps, RegionKind kind) {
  int m = 0;
  bool circuit = false, start_blocked = false, end_blocked = false, bridged = false;
  for (const auto& c : comps) {
    circuit = circuit || c.circuit;
    if (c.touches(SideTag::flat_start) && c.touches(SideTag::flat_end)) bridged = true;
    if (!c.spans()) continue;
    ++m;
    if (c.touches(SideTag::flat_start)) start_blocked = true;
    if (c.touches(SideTag::flat_end)) end_blocked = true;
  }
  std::string w;
  if (kind == RegionKind::annulus) {
    if (m == 0) return circuit ? "" : "V";
    if (m == 1) return circuit ? "O" : "OV";
    for (int i = 0; i < m; ++i) w += "OV";
    return w;
  }
  if (kind == RegionKind::rect) throw ParameterError("arm_word needs an annulus-kind region");
  if (m == 0) return bridged ? "" : "V";
  if (!start_blocked) w += 'V';
  for (int i = 0; i < m; ++i) {
    if (i > 0) w += 'V';
    w += 'O';
  }
  if (!end_blocked) w += 'V';
  return w;
}

inline bool is_subsequence(std::string_view pat, std::string_view word) {
  std::size_t j = 0;
  for (char c : word) {
    if (j < pat.size() && pat[j] == c) ++j;
  }
  return j == pat.size();
}

/// Subsequence match of any alternative of `pattern`; cyclic words are tried at every rotation.
inline bool match_arm_pattern(std::string_view pattern, const std::string& word, bool cyclic) {
  std::size_t start = 0;
  while (start <= pattern.size()) {
    std::size_t bar = pattern.find('|', start);
    if (bar == std::string_view::npos) bar = pattern.size();
    const std::string_view alt = pattern.substr(start, bar - start);
    if (!cyclic || word.empty()) {
      if (is_subsequence(alt, word)) return true;
    } else {
      for (std::size_t r = 0; r < word.size(); ++r) {
        const std::string rot = word.substr(r) + word.substr(0, r);
        if (is_subsequence(alt, rot)) return true;
      }
    }
    start = bar + 1;
  }
  return false;
}

}  // namespace percospec
