#pragma once
// The assembled set families, the sampled generator banks they came from, and
// witness partitions.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "galvin/layout.hpp"
#include "galvin/mask.hpp"

namespace galvin {

// Sampled generators per bucket: banks[0] = { empty set }, banks[d] = { the
// whole last bucket }, and r independent uniform tau-subsets per interior
// bucket.
struct GeneratorBank {
    BucketLayout layout;
    std::vector<std::vector<SubsetMask>> banks;
    int r = 0;
};

// One permuted copy's build artifacts, kept so verification can replay the
// structured search: the permutation sigma (local element x maps to global
// element perm[x]) and the bank the copy was assembled from.
struct CopyProvenance {
    std::vector<int> perm;
    GeneratorBank bank;
};

// A candidate family. `sets` is canonical: sorted ascending (mask value
// order) and deduplicated; pre_dedup counts assembled members before the
// merge so the raw construction size stays visible.
struct GalvinFamily {
    int n = 0;
    int d = 0;
    Variant variant = Variant::standard;
    uint64_t seed = 0;
    int copies = 1;
    std::vector<SubsetMask> sets;
    uint64_t pre_dedup = 0;
    std::vector<CopyProvenance> provenance;   // empty when parsed or composed
    std::optional<MixedSizePlan> plan;        // for size checking of the two mixed variants

    // Index of a member in the canonical order, or -1.
    int find_index(const SubsetMask& s) const {
        auto it = std::lower_bound(sets.begin(), sets.end(), s);
        if (it != sets.end() && *it == s) return int(it - sets.begin());
        return -1;
    }

    void canonicalize() {
        std::sort(sets.begin(), sets.end());
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    }
};

// An ordered witness partition for a challenge set A. Parts are authoritative
// masks; indices[i] is the member's position in the family's canonical order,
// with -1 marking the one legitimate non-member part (the complement half of
// a classic-variant witness). balance_twice[i] = 2|A intersect S_i| - |S_i|:
// 0 for an exactly balanced part, +1 for the single odd-size part an
// odd-ground-set witness may end with.
struct PartitionWitness {
    std::vector<SubsetMask> parts;
    std::vector<int> balance_twice;
    std::vector<int> indices;
};

}  // namespace galvin
