#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace blicket::prompt {

enum class Structure { Disjunctive, Conjunctive };
enum class Style { Freeform, FewShot };

struct Condition {
    bool hypotheses_given = true;
    Structure structure = Structure::Disjunctive;
    Style style = Style::Freeform;

    // "given-disjunctive-freeform" style slug.
    std::string slug() const;
    static Condition from_slug(const std::string& s);

    friend bool operator==(const Condition&, const Condition&) = default;
};

// All eight conditions: given before not-given, disjunctive before
// conjunctive, freeform before few-shot.
std::vector<Condition> all_conditions();

enum class TruthStructure { Conjunctive, Disjunctive, Undetermined };
enum class Machine { Striped, Dotted, None };

const char* truth_structure_name(TruthStructure t);
const char* machine_name(Machine m);

struct PromptDoc {
    Condition condition;
    std::string text;
    std::set<std::string> truth_blickets;
    TruthStructure truth_structure = TruthStructure::Undetermined;
};

PromptDoc render_prompt(const Condition& c);

// The three objects of the test machine, and every object named anywhere in
// the prompts.
const std::vector<std::string>& task_objects();
const std::vector<std::string>& object_lexicon();

struct ParsedAnswer {
    std::set<std::string> blickets_claimed;
    Machine structure_claimed = Machine::None;
    int truncated_to = 0;  // sentences actually kept
};

// Names are matched case-insensitively against `names` (plus known aliases).
// A sentence that uses "blicket(s)" as a noun claims every name it mentions,
// unless the name is negated ("X is not a blicket").
ParsedAnswer parse_answer(const std::string& text, const std::vector<std::string>& names = object_lexicon(),
                          int sentence_limit = 2);

enum class StructureScore { Correct, Wrong, NotApplicable };
const char* structure_score_name(StructureScore s);

struct Score {
    int n_correct = 0;
    int n_wrong = 0;
    StructureScore structure = StructureScore::NotApplicable;

    friend bool operator==(const Score&, const Score&) = default;
};

Score score_answer(const ParsedAnswer& parsed, const PromptDoc& doc);

// A reply stating exactly the truth of `doc` in the few-shot output style.
std::string perfect_reply(const PromptDoc& doc);

// Recorded replies for the conditions each model was run on.
enum class Model { Gpt3, Palm };
const char* model_name(Model m);
std::optional<std::string> recorded_reply(Model m, const Condition& c);

nlohmann::json parsed_to_json(const ParsedAnswer& p);
nlohmann::json score_to_json(const Score& s);

// Not part of the canonical prompt set: the freeform layout with arbitrary
// object names and checks, for building new probes.
struct CustomCheck {
    std::vector<std::size_t> placed;  // indices into objects
    bool lit = false;
};

std::string render_custom_freeform(const std::vector<std::string>& objects, const std::vector<CustomCheck>& checks);

}  // namespace blicket::prompt
