#pragma once

#include <string>
#include <vector>

#include "fbqo/boundstate.hpp"
#include "fbqo/lattice.hpp"

namespace fbqo {

// {"model", "N", "J", "params": {...}, "disorder": {...}}
LatticeModel lattice_from_json(const std::string& text);

// [{"omega0", "couplings": [...]}] with optional "cls" / "envelope" generators and "g".
std::vector<EmitterSpec> emitters_from_json(const LatticeModel& m, const std::string& text);

// "a:50" or "b:3,7" -> site index.
Index parse_site(const LatticeModel& m, const std::string& spec);

}  // namespace fbqo
