#pragma once
// JSON instance files: a top-level array of factors, each
// {"weights":[...],"means":[...],"variances":[...]}.

#include <filesystem>
#include <string>
#include <vector>

#include "factored/gmm.hpp"

namespace factored {

// Parses the canonical instance shape.  Malformed documents (bad JSON, wrong
// shape, or parameters a Gmm1D rejects) throw BadParameter with a diagnostic.
std::vector<Gmm1D> parse_instance_json(const std::string& text);
std::vector<Gmm1D> load_instance(const std::filesystem::path& path);

// Serializes to the same shape (2-space indentation); parse(serialize(x))
// reproduces x exactly (doubles are emitted with round-trip precision).
std::string instance_to_json(const std::vector<Gmm1D>& factors);
void save_instance(const std::filesystem::path& path, const std::vector<Gmm1D>& factors);

}  // namespace factored
