#pragma once

#include "onda/er_model.hpp"
#include "onda/physical_model.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace onda {

struct Inheritance
{
    std::string super_id;
    std::string hierarchy_id;

    friend bool operator==(const Inheritance&, const Inheritance&) = default;
};

/// A diagram part-way through hierarchy lowering, plus what the removed
/// hierarchies left behind for table mapping.
struct LoweredDiagram
{
    Diagram diagram;
    /// COMPLETE sub id -> super; the sub's PK becomes an FK to the super.
    std::map<std::string, Inheritance> inherits_from;
    /// Entity id -> table-level CHECK texts (SINGLE discriminators).
    std::map<std::string, std::vector<std::string>> table_checks;
    /// Removed SINGLE sub id -> id of the entity that absorbed it.
    std::map<std::string, std::string> merged_into;
    /// Entity id -> origin of its table when it is not the entity itself.
    std::map<std::string, Origin> table_origins;

    friend bool operator==(const LoweredDiagram&, const LoweredDiagram&) = default;
};

/// Applies one hierarchy's strategy and removes the hierarchy. Hierarchies
/// nested below `h` must already be lowered.
LoweredDiagram lower_hierarchy(const LoweredDiagram& state, const Hierarchy& h);
LoweredDiagram lower_hierarchy(const Diagram& diagram, const Hierarchy& h);

/// Lowers every hierarchy, deepest first (ties by hierarchy id).
LoweredDiagram lower_hierarchies(const Diagram& diagram);

/// How a (non-identifying) relationship materialises.
struct RelationalAction
{
    enum class Kind { InlineForeignKey, AssociationTable };

    Kind kind = Kind::AssociationTable;
    /// 0 for end_a, 1 for end_b. Meaningless for many-to-many.
    int dependent_end = 0;
    /// Association key is the dependent side only (otherwise both sides).
    bool key_is_dependent = false;
    /// Inline FK may be NULL.
    bool nullable = false;
    /// Inline FK carries a UNIQUE constraint; association table gets a UNIQUE on the other side.
    bool one_to_one = false;

    friend bool operator==(const RelationalAction&, const RelationalAction&) = default;
};

/// Classifies a relationship by cardinality and mode. The table names of both
/// ends settle the 1:1 dependent side when the minimums tie.
RelationalAction map_relationship(const Relationship& rel, GenerationMode mode, std::string_view table_a,
                                  std::string_view table_b);

/// Lowers a valid diagram to an ordered physical model. Throws ContractError
/// when validate(diagram, mode) reports errors.
PhysicalModel transform(const Diagram& diagram, GenerationMode mode);

/// Stable topological order on FK dependencies (targets first, ties by name).
/// Cycles are broken by deferring a minimum set of FKs, recorded in `deferred`.
PhysicalModel order_tables(PhysicalModel model);

} // namespace onda
