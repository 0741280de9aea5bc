#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace blicket {

// Objects are dense indices 0..n-1, displayed as A, B, C, ...
constexpr int kMaxObjects = 16;

using ObjectId = int;

std::string object_name(ObjectId id);

// A subset of the object universe stored as a bitmask (bit i <=> object i).
class ObjectSet {
public:
    constexpr ObjectSet() = default;
    constexpr explicit ObjectSet(std::uint32_t mask) : mask_(mask) {}
    ObjectSet(std::initializer_list<ObjectId> ids);

    static ObjectSet all(int n_objects);

    constexpr std::uint32_t mask() const { return mask_; }
    bool contains(ObjectId id) const { return (mask_ >> id) & 1u; }
    int size() const { return __builtin_popcount(mask_); }
    bool empty() const { return mask_ == 0; }
    // Highest index + 1, i.e. the smallest universe this set fits into.
    int extent() const { return mask_ == 0 ? 0 : 32 - __builtin_clz(mask_); }

    ObjectSet with(ObjectId id) const { return ObjectSet(mask_ | (1u << id)); }
    ObjectSet operator&(ObjectSet o) const { return ObjectSet(mask_ & o.mask_); }
    ObjectSet operator|(ObjectSet o) const { return ObjectSet(mask_ | o.mask_); }
    bool subset_of(ObjectSet o) const { return (mask_ & ~o.mask_) == 0; }

    std::vector<ObjectId> members() const;
    // "{A,B}" style.
    std::string to_string() const;

    // Lexicographic comparison of the sorted member lists.
    static bool lex_less(ObjectSet a, ObjectSet b);

    friend constexpr bool operator==(ObjectSet, ObjectSet) = default;

private:
    std::uint32_t mask_ = 0;
};

// All 2^n subsets ordered by size, then lexicographically. This order is the
// tie-break contract for every argmax over placements.
std::vector<ObjectSet> canonical_subsets(int n_objects);

enum class Form { Disjunctive, Conjunctive };

const char* form_name(Form f);
Form parse_form(const std::string& s);

class Hypothesis {
public:
    Hypothesis(Form form, ObjectSet blickets);

    Form form() const { return form_; }
    ObjectSet blickets() const { return blickets_; }
    int threshold() const { return form_ == Form::Disjunctive ? 1 : 2; }

    std::string to_string() const;  // "Conj{A,B}"

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;

private:
    Form form_;
    ObjectSet blickets_;
};

void to_json(nlohmann::json& j, const Hypothesis& h);
Hypothesis hypothesis_from_json(const nlohmann::json& j);

// Pure detector semantics: lights iff at least `threshold` blickets are placed.
bool detector_lit(const Hypothesis& h, ObjectSet placed, int n_objects);

enum class Family { Default, Extended, Custom };

const char* family_name(Family f);
Family parse_family(const std::string& s);

class HypothesisSpace {
public:
    HypothesisSpace(int n_objects, std::vector<Hypothesis> hypotheses, Family family = Family::Custom);

    int n_objects() const { return n_objects_; }
    Family family() const { return family_; }
    const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
    std::size_t size() const { return hypotheses_.size(); }
    const Hypothesis& operator[](std::size_t i) const { return hypotheses_[i]; }

    // Index of h in this space, or -1.
    int index_of(const Hypothesis& h) const;

    friend bool operator==(const HypothesisSpace&, const HypothesisSpace&) = default;

private:
    int n_objects_;
    std::vector<Hypothesis> hypotheses_;
    Family family_;
};

HypothesisSpace enumerate_space(int n_objects, Family family);

void to_json(nlohmann::json& j, const HypothesisSpace& s);
HypothesisSpace space_from_json(const nlohmann::json& j);

struct Trial {
    ObjectSet placed;
    bool lit = false;
};

using Evidence = std::vector<Trial>;

bool consistent(const Hypothesis& h, const Evidence& evidence, int n_objects);

enum class SplitMode { None, ConjunctiveOnly, DisjunctiveOnly, LeaveOneOutConj, LeaveOneOutDisj, LeaveOneOutBoth };

const char* split_mode_name(SplitMode m);
SplitMode parse_split_mode(const std::string& s);

struct SplitSpec {
    SplitMode mode = SplitMode::None;
    // Indices into the space. Empty for a leave-one-out mode means "the first
    // hypothesis of each held-out form".
    std::vector<int> held_out_indices;
};

struct Split {
    std::vector<Hypothesis> train;
    std::vector<Hypothesis> test;
};

Split split_space(const HypothesisSpace& space, const SplitSpec& spec);

}  // namespace blicket
