#include "intersafe/event.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#include "intersafe/errors.hpp"
#include "intersafe/format.hpp"

namespace intersafe {

std::string_view to_string(ConflictKind k) { return k == ConflictKind::P2V ? "P2V" : "V2V"; }
std::string_view to_string(Metric m) { return m == Metric::TTC ? "TTC" : "PET"; }

std::optional<ConflictKind> conflict_kind(ObjectClass a, ObjectClass b) {
  const int peds = (a == ObjectClass::Pedestrian) + (b == ObjectClass::Pedestrian);
  if (peds == 2) return std::nullopt;
  return peds == 1 ? ConflictKind::P2V : ConflictKind::V2V;
}

bool event_less(const ConflictEvent& a, const ConflictEvent& b) {
  return std::tie(a.t, a.id_a, a.id_b, a.metric, a.value) < std::tie(b.t, b.id_a, b.id_b, b.metric, b.value);
}

void sort_events(std::vector<ConflictEvent>& events) { std::sort(events.begin(), events.end(), event_less); }

void write_events(std::ostream& out, const std::vector<ConflictEvent>& events) {
  out << kEventHeader << '\n';
  for (const ConflictEvent& e : events) {
    out << to_string(e.kind) << ',' << to_string(e.metric) << ',' << fixed(e.value, 3) << ',' << fixed(e.t, 3)
        << ',' << fixed(e.location.x, 3) << ',' << fixed(e.location.y, 3) << ',' << e.id_a << ','
        << to_string(e.class_a) << ',' << e.id_b << ',' << to_string(e.class_b) << ','
        << (e.movement ? e.movement->str() : "") << ',' << (e.p2v_type ? std::to_string(*e.p2v_type) : "") << ','
        << (e.ped_role ? to_string(*e.ped_role) : "") << ',' << (e.severe ? 1 : 0) << ',' << (e.jaywalk ? 1 : 0)
        << '\n';
  }
}

namespace {

double to_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw DataError("events line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<ConflictEvent> read_events(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEventHeader) throw DataError("events file: unexpected header");
  std::vector<ConflictEvent> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 15) throw DataError("events line " + std::to_string(line_no) + ": expected 15 fields");
    ConflictEvent e;
    if (f[0] == "P2V") e.kind = ConflictKind::P2V;
    else if (f[0] == "V2V") e.kind = ConflictKind::V2V;
    else throw DataError("events line " + std::to_string(line_no) + ": bad kind");
    if (f[1] == "TTC") e.metric = Metric::TTC;
    else if (f[1] == "PET") e.metric = Metric::PET;
    else throw DataError("events line " + std::to_string(line_no) + ": bad metric");
    e.value = to_double(f[2], line_no);
    e.t = to_double(f[3], line_no);
    e.location = {to_double(f[4], line_no), to_double(f[5], line_no)};
    e.id_a = f[6];
    e.id_b = f[8];
    const auto ca = parse_object_class(f[7]);
    const auto cb = parse_object_class(f[9]);
    if (!ca || !cb) throw DataError("events line " + std::to_string(line_no) + ": bad class");
    e.class_a = *ca;
    e.class_b = *cb;
    if (!f[10].empty()) {
      e.movement = MovementCode::parse(f[10]);
      if (!e.movement) throw DataError("events line " + std::to_string(line_no) + ": bad movement");
    }
    if (!f[11].empty()) e.p2v_type = static_cast<int>(to_double(f[11], line_no));
    if (!f[12].empty()) {
      e.ped_role = parse_crosswalk_role(f[12]);
      if (!e.ped_role) throw DataError("events line " + std::to_string(line_no) + ": bad role");
    }
    e.severe = f[13] == "1";
    e.jaywalk = f[14] == "1";
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConflictEvent> read_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open events file: " + path.string());
  return read_events(in);
}

}  // namespace intersafe
