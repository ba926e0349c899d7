#pragma once

// JSON forms of germs, groups, partitions, classifications, join specs and
// certificates. Emission uses insertion-ordered objects so that parsing an
// emitted document and dumping it again reproduces the same bytes.
// Readers throw InputError naming the JSON pointer of the offending value.

#include "twoline/cosets.hpp"
#include "twoline/dline.hpp"
#include "twoline/germs.hpp"
#include "twoline/join.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace twoline::io {

using Json = nlohmann::ordered_json;

// Parses text; syntax errors become InputError with line and column.
Json parse(const std::string& text, const std::string& source = "input");
Json read_file(const std::string& path);
std::string dump(const Json& j);  // two-space indent, trailing newline

// ---------------------------------------------------------------- germs

Json to_json(const germs::Germ& g);
germs::Germ germ_from_json(const Json& j, const std::string& at = "");
// Exact germs as germ JSON; numeric ones as orientation plus samples.
Json to_json(const germs::AnyGerm& g);
Json to_json(const germs::JetCoefficient& c);  // number, "nonexistent" or "indeterminate"
Json to_json(const germs::Jet& j);
Json to_json(const germs::SmoothnessReport& r);

// ---------------------------------------------------------------- groups

struct GroupSpec {
  cosets::FiniteGroup group;
  std::map<std::string, std::vector<std::string>> subgroups;

  // Named subgroup; InputError if unknown or not a subgroup.
  cosets::Subgroup subgroup(const std::string& name) const;
};

GroupSpec group_from_json(const Json& j);
Json to_json(const cosets::CosetPartition& p, const cosets::FiniteGroup& g);
cosets::CosetPartition partition_from_json(const Json& j, const cosets::FiniteGroup& g);

// ---------------------------------------------------------------- structures

struct StructureSpec {
  germs::Germ h = germs::Germ::identity();
  int k = 2;
};

// Accepts {"special_atlas": {"h": germ}, "k": n} or a bare germ.
StructureSpec structure_from_json(const Json& j);
Json to_json(const StructureSpec& s);

std::string intersection_name(cosets::IntersectionType t);  // "Empty", "JPlus", "JMinus", "FullD"
Json classification_json(const Param& a, const Param& b, int k, const dline::DiffeoClasses& c);

// ---------------------------------------------------------------- join

// Map forms: "identity", {"samples": [[x, y], ...]}, {"poly": [c0, c1, ...]},
// {"rescaled_power": e}; poly and rescaled_power take an optional
// "domain": [lo, hi], defaulting to the given interval.
join::NumericDiffeo map_from_json(const Json& j, double lo, double hi, const std::string& at);

struct JoinSpec {
  join::ChainAtlas atlas;
  int k = 2;
  std::vector<double> tol;
  int grid_level = 4;
  join::CollapseOrder order = join::CollapseOrder::LeftToRight;
  int samples = 64;
};

// Charts: {"image": [lo, hi], "label"?, "map"?} where map sends a model
// coordinate to the image (default identity). Transitions {"between": [i,
// i+1], <map form or "map": form>}; missing ones are derived from the chart
// maps on the overlap.
JoinSpec join_spec_from_json(const Json& j);

Json to_json(const join::SmoothCert& c);
join::SmoothCert cert_from_json(const Json& j);
Json collapse_json(const join::CollapseResult& r, int samples);

struct VerifySpec {
  join::NumericDiffeo map;
  join::VerifyOptions options;
};

// {"map": form, "domain": [lo, hi], "seams": [...], "k": n, "tol": x | [..]}
// or a bare map form with "domain".
VerifySpec verify_spec_from_json(const Json& j);

}  // namespace twoline::io
