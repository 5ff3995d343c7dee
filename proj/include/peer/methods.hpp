#pragma once

#include <string>
#include <vector>

#include "peer/tableau.hpp"

namespace peer {

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// One of the shipped super-convergent methods: "imex-peer2s",
/// "imex-peer3s" or "imex-peer4s", fully derived.
MethodTableau builtin(const std::string& name);

/// Parse a tableau from its text serialization. Structural invariants are
/// enforced; derived matrices are always recomputed, never read.
MethodTableau parse_tableau(const std::string& text);

MethodTableau load_tableau_file(const std::string& path);

/// Text serialization: label, s, c, gamma, row-major P, strictly lower
/// entries of R and S2, all at 17 significant digits.
std::string serialize_tableau(const MethodTableau& t);

/// Resolve a --method argument: builtin name first, then file path.
MethodTableau resolve_method(const std::string& name_or_path);

}  // namespace peer
