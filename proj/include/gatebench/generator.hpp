#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gatebench/types.hpp"

namespace gatebench {

/// Parses and validates an atom pool file (JSON array of AtomFact).
std::vector<AtomFact> load_atom_pool(const std::filesystem::path& path);
std::vector<AtomFact> parse_atom_pool(std::string_view json_text);

/// Throws ValidationError naming the first offending atom.
void validate_pool(std::span<const AtomFact> pool);

/// Lowercase hex SHA-256 of the sorted-key, whitespace-free pool JSON.
std::string pool_hash(std::span<const AtomFact> pool);

/// The 390-case shape: rank/successor at 4/6/8, interval decoy at
/// 4/6/7/8/9/11, pair control at 2, 30 cases per cell.
CountSpec d4v2_spec();

/// "builtin:d4v2" or a JSON file {"cells":[{"family","depth","count"}]}.
CountSpec load_count_spec(const std::string& path_or_builtin);
json count_spec_to_json(const CountSpec& spec);

/// Atoms one case of the family needs at this depth (2 + d for interval decoy).
int required_atoms(Family family, int depth);

/// Deterministic in (pool, spec, seed). Synthetic cells are generated with
/// generate_synthetic_family using a per-cell seed.
BenchmarkManifest generate_benchmark(std::span<const AtomFact> pool, const CountSpec& spec, std::uint64_t seed);

/// In-context families over fictional entities. Names never collide with
/// tokens of `exclude` (pass the temporal pool).
std::vector<CompositionCase> generate_synthetic_family(Family family, int n_cases, int depth, std::uint64_t seed,
                                                       std::span<const AtomFact> exclude = {});

/// Recomputes a temporal case's gold from canonical values alone.
std::string gold_answer_oracle(const CompositionCase& c, std::span<const AtomFact> pool);

/// Serialized manifest text; byte-identical for identical manifests.
std::string manifest_to_string(const BenchmarkManifest& m);
BenchmarkManifest load_manifest(const std::filesystem::path& path);

}  // namespace gatebench
