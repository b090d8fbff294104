#pragma once
/**
 * @file event.hpp
 * @brief ConflictEvent and its CSV interchange format.
 *
 * Column order (fixed):
 *   kind,metric,value,t,x,y,id_a,class_a,id_b,class_b,movement,p2v_type,ped_role,severe,jaywalk
 * value, t, x, y use 3 decimals; severe/jaywalk are 0/1; absent optional fields are empty.
 * id_a < id_b lexicographically; rows are sorted by (t, id_a, id_b, metric).
 */

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "intersafe/types.hpp"

namespace intersafe {

enum class ConflictKind : std::uint8_t { P2V, V2V };
enum class Metric : std::uint8_t { TTC, PET };

std::string_view to_string(ConflictKind k);
std::string_view to_string(Metric m);

struct ConflictEvent {
  ConflictKind kind = ConflictKind::V2V;
  Metric metric = Metric::TTC;
  double value = 0.0;  // seconds
  double t = 0.0;      // seconds since midnight
  Vec2 location;
  std::string id_a;
  ObjectClass class_a = ObjectClass::Car;
  std::string id_b;
  ObjectClass class_b = ObjectClass::Car;
  std::optional<MovementCode> movement;
  std::optional<int> p2v_type;
  std::optional<CrosswalkRole> ped_role;
  bool severe = false;
  bool jaywalk = false;
};

inline constexpr const char* kEventHeader =
    "kind,metric,value,t,x,y,id_a,class_a,id_b,class_b,movement,p2v_type,ped_role,severe,jaywalk";

/// P2V when exactly one participant is a pedestrian, V2V when neither is; nullopt for two pedestrians.
std::optional<ConflictKind> conflict_kind(ObjectClass a, ObjectClass b);

bool event_less(const ConflictEvent& a, const ConflictEvent& b);
void sort_events(std::vector<ConflictEvent>& events);

void write_events(std::ostream& out, const std::vector<ConflictEvent>& events);
std::vector<ConflictEvent> read_events(std::istream& in);
std::vector<ConflictEvent> read_events(const std::filesystem::path& path);

}  // namespace intersafe
