#pragma once

#include <string>

#include "biopepa/model.hpp"

namespace biopepa {

/// Parses model text into a system. Throws ParseError on malformed input;
/// semantic cross-reference problems are left to check_wellformed. The
/// grammar is the ASCII concrete syntax documented in docs/grammar.md:
///   <<  >>  (+)  (-)  (.)       reactant / product / activator / inhibitor / modifier
///   <*>  <a, b>  <>             cooperation sync sets
///   name@location               species references
BioPepaSystem parse(const std::string& text, const std::string& file = "<input>");

BioPepaSystem parse_file(const std::string& path);

/// Canonical text form; parse(serialize(s)) is structurally equal to s.
std::string serialize(const BioPepaSystem& system);

}  // namespace biopepa
