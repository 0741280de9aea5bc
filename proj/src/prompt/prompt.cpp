#include "blicket/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "blicket/errors.hpp"

namespace blicket::prompt {

namespace {

// Verbatim prompt segments and recorded replies. Spacing irregularities
// ("Then I  put", "red half dome", "dotted patterned") are part of the
// recorded prompts and must stay.
constexpr const char* kFreeformPreamble =
    "A blicket detector is a special kind of machine, objects that are different colors and shapes either make the machine turn on or not. If the object is a blicket and placed on the machine then the machine will turn on. Sometimes 1, 2 or 3 blickets make the machine turn on. Our goal is to make the machine turn on and figure out which shapes make it do so.";

constexpr const char* kFreeformQuestion =
    "Can you tell me which objects are blickets? Does this checkerboard pattern blicket detector behave like the striped pattern blicket detector or like the dotted pattern blicket detector?";

const char* const kFreeformGiven[] = {
    "First I have a striped pattern blicket detector, it behaves in the following way: I have 3 objects, one blue pyramid, one green cube and one orange sphere. First I put the blue pyramid on the striped pattern blicket machine and it does not light up. Then I put the orange sphere on the striped pattern blicket machine and it does not light up. Then I put the blue pyramid and the orange sphere on the striped pattern blicket machine and it did light up!",
    "Then I have a dotted pattern blicket detector. I have 3 different objects now, a yellow cylinder, a purple cone, and a red dome. First I put the purple cone on the dotted pattern blicket detector and it did light up! Then I put the yellow cylinder on the dotted pattern blicket detector and it does not light up. Then I put the yellow cylinder and the purple cone on the dotted pattern blicket detector and it did light up!",
};

const char* const kFreeformNotGiven[] = {
    "First I have a striped pattern blicket detector, it behaves in the following way: I have 3 objects, one blue pyramid, one green cube and one orange sphere. First I put the blue pyramid on the striped pattern blicket detector and it does not light up. Then I put the green cube on the striped pattern blicket detector and it does not light up. Then I put the blue pyramid and the orange sphere on the striped pattern blicket detector and it did light up!",
    "Then I have a dotted pattern blicket detector. I have 3 different objects now, a yellow cylinder, a purple cone, and a red dome. First I put the purple cone on the dotted pattern blicket detector and it does not light up. Then I put the yellow cylinder on the dotted pattern blicket detector and it does not light up. Then I put the red half dome and the purple cone on the dotted pattern blicket detector and it did light up!",
};

constexpr const char* kFreeformDisjunctive =
    "Then I have a checkerboard pattern blicket detector. I have 3 new objects, a teal prism, a pink frustum and a brown torus. This machine could work like the dotted patterned blicket detector or it could work like the striped pattern blicket detector. First I put the brown torus on the checkerboard pattern blicket detector and it does light up! Then I put the pink frustum on the checkerboard pattern blicket detector and it does not light up. Then I  put the teal prism on the checkerboard pattern blicket detector and it does not light up. Then I  put the brown torus and the pink frustum on the checkerboard pattern blicket detector and it did light up! Then I  put the teal prism and the brown torus on the checkerboard pattern blicket detector and it did light up! Then I  put the teal prism and the pink frustum and the brown torus on the checkerboard pattern blicket detector and it did light up! Then I put the pink frustum and the teal prism on the checkerboard pattern blicket detector and it does not light up.";

constexpr const char* kFreeformConjunctive =
    "Then I have a checkerboard pattern blicket detector. I have 3 new objects, a teal prism, a pink frustum and a brown torus. This machine could work like the dotted patterned blicket detector or it could work like the striped pattern blicket detector. First I put the brown torus on the checkerboard pattern blicket detector and it does not light up. Then I put the pink frustum and the brown torus on the checkerboard pattern blicket detector and it does not light up. Then I put the teal prism on the checkerboard pattern blicket detector and it does not light up. Then I  put the teal prism and the pink frustum on the checkerboard pattern blicket detector and it does not light up. Then I put the pink frustum on the checkerboard pattern blicket detector and it does not light up. Then I  put the teal prism and the brown torus on the checkerboard pattern blicket detector and it does light up! Then I put the teal prism and the pink frustum and the brown torus on the checkerboard pattern blicket detector and it did light up!";

constexpr const char* kFewShotPreamble =
    "If we put objects on the machine, then it will either light up or not. Some objects are blickets, and others are not. A striped machine needs two blickets to make it light up, and a dotted machine needs one blicket to make it light up. Please identify which objects are blickets and whether the machine behaves like the striped machine or the dotted machine.";

const char* const kFewShotGiven[] = {
    "Input: There is a blue pyramid, a green cube, and an orange sphere. If we put the blue pyramid on the machine, then it does not light up. If we put the orange sphere on the machine, then it does not light up. If we put the blue pyramid and the orange sphere on the machine, then it does light up.",
    "Output: The blue pyramid and orange sphere are blickets. This machine behaves like the striped machine.",
    "Input: There is a yellow cylinder, a purple cone, and a red dome. If we put the purple cone on the machine, then it does light up. If we put the yellow cylinder on the machine, then it does not light up. If we put the yellow cylinder and the purple cone on the machine, then it does light up.",
    "Output: The purple cone is a blicket. This machine behaves like the dotted machine.",
};

const char* const kFewShotNotGiven[] = {
    "Input: There is a blue pyramid, a green cube, and an orange sphere. If we put the blue pyramid on the machine, then it does not light up. If we put the green cube on the machine, then it does not light up. If we put the blue pyramid and the orange sphere on the machine, then it does light up.",
    "Output: The orange sphere is a blicket, and the blue pyramid is maybe a blicket.",
    "Input: There is a yellow cylinder, a purple cone, and a red dome. If we put the purple cone on the machine, then it does light up. If we put the yellow cylinder on the machine, then it does not light up. If we put the red dome and the purple cone on the machine, then it does light up.",
    "Output: The red dome is a blicket and the purple cone is maybe a blicket.",
};

const char* const kFewShotDisjunctive[] = {
    "There is a teal prism, a pink frustum, and a brown torus. If we put the brown torus on the machine, then it does light up. If we put the pink frustum and the brown torus on the machine, then it does light up. If we put the teal prism on the machine, then it does not light up. If we put the teal prism and the pink frustum on the machine, then it does not light up. If we put the pink frustum on the machine, then it does not light up. If we put the teal prism and the brown torus on the machine, then it does light up. If we put the teal prism and the pink frustum and the brown torus on the machine, then it does light up.",
    "Output:",
};

const char* const kFewShotConjunctive[] = {
    "Input: There is a teal prism, a pink frustum, and a brown torus. If we put the brown torus on the machine, then it does not light up. If we put the pink frustum and the brown torus on the machine, then it does not light up. If we put the teal prism on the machine, then it does not light up. If we put the teal prism and the pink frustum on the machine, then it does not light up. If we put the pink frustum on the machine, then it does not light up. If we put the teal prism and the brown torus on the machine, then it does light up. If we put the teal prism and the pink frustum and the brown torus on the machine, then it does light up.",
    "Output:",
};

const char* const kGpt3Freeform[] = {
    "The objects that are blickets are the blue pyramid, the orange sphere, the purple cone, the yellow cylinder, the brown torus, the pink frustum and the teal prism. This checkerboard pattern blicket detector behaves like the dotted pattern blicket detector.",
    "The objects that are blickets are the teal prism, the pink frustum and the brown torus. This checkerboard pattern blicket detector behaves like the striped pattern blicket detector.",
    "The objects that are blickets are the blue pyramid, the orange sphere, the yellow cylinder, the purple cone, the red dome, the teal prism, the pink frustum, and the brown torus. This checkerboard pattern blicket detector behaves like the striped pattern blicket detector.",
    "The objects that are blickets are the blue pyramid, the green cube, the orange sphere, the yellow cylinder, the purple cone, the red dome, the teal prism, the pink frustum, and the brown torus. This checkerboard pattern blicket detector behaves like the dotted pattern blicket detector.",
};

const char* const kPalmFreeform[] = {
    "The answer is that the checkerboard pattern blicket detector behaves like the striped pattern blicket detector. The blickets are the brown torus and the pink frustum. The reason why the checkerboard pattern blicket detector behaves like the striped pattern blicket detector is because the machine only turns on when the brown torus and the pink frustum are on the machine. The machine does not turn on when the brown torus and the teal prism are on the machine. The machine does not turn on when the pink frustum and the teal prism are on the machine. The machine does not turn on...",
    "The checkerboard pattern blicket detector behaves like the striped pattern blicket detector. The blickets are the teal prism and the brown torus. The checkerboard pattern blicket detector behaves like the dotted pattern blicket detector. The blickets are the teal prism and the brown torus. The checkerboard pattern blicket detector behaves like the striped pattern blicket detector. The blickets are the teal prism and the pink frustum. The checkerboard pattern blicket detector behaves like the dotted pattern blicket detector. The blickets are the...",
    "This is a very difficult problem. It is not possible to figure out which objects are blickets and which are not. It is not possible to figure out how the checkerboard pattern blicket detector works. This is a very difficult problem. It is not possible to figure out which objects are blickets and which are not. It is not possible to figure out how the checkerboard pattern blicket detector works. This is a very difficult problem. It is not possible to figure out which objects are blickets and which are not. It is not possible to figure out how the checkerboard...",
    "The checkerboard pattern blicket detector behaves like the striped pattern blicket detector. The blickets are the teal prism and the brown torus. The checkerboard pattern blicket detector behaves like the dotted pattern blicket detector. The blickets are the teal prism and the brown torus. The checkerboard pattern blicket detector behaves like the striped pattern blicket detector. The blickets are the teal prism and the pink frustum. The checkerboard pattern blicket detector behaves like the dotted pattern blicket detector. The blickets are the...",
};

const char* const kPalmFewShot[] = {
    "The brown torus is a blicket. This machine behaves like the dotted machine.",
    "The teal prism and brown torus are blickets. This machine behaves like the striped machine.",
    "The brown torus is a blicket, and the pink frustum is maybe a blicket.",
    "The teal prism is a blicket, and the pink frustum is maybe a blicket.",
};

const char* const kTestObjects[] = {"teal prism", "pink frustum", "brown torus"};

const std::vector<std::pair<std::string, std::string>>& aliases() {
    static const std::vector<std::pair<std::string, std::string>> a{{"red half dome", "red dome"}};
    return a;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool word_at(const std::string& text, std::size_t pos, std::size_t len) {
    const bool left = pos == 0 || !is_word_char(text[pos - 1]);
    const bool right = pos + len >= text.size() || !is_word_char(text[pos + len]);
    return left && right;
}

std::vector<std::string> sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            if (auto t = trim(cur); !t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (auto t = trim(cur); !t.empty()) out.push_back(t);
    return out;
}

struct Mention {
    std::size_t pos;
    std::size_t len;
    std::string name;
};

std::vector<Mention> find_mentions(const std::string& sentence, const std::vector<std::string>& names) {
    std::vector<std::pair<std::string, std::string>> patterns;
    for (const auto& n : names) patterns.emplace_back(lower(n), n);
    for (const auto& [alias, canonical] : aliases())
        if (std::find(names.begin(), names.end(), canonical) != names.end()) patterns.emplace_back(alias, canonical);

    std::vector<Mention> found;
    for (const auto& [pat, canonical] : patterns)
        for (auto p = sentence.find(pat); p != std::string::npos; p = sentence.find(pat, p + 1))
            if (word_at(sentence, p, pat.size())) found.push_back({p, pat.size(), canonical});
    std::sort(found.begin(), found.end(), [](const Mention& a, const Mention& b) {
        return a.pos != b.pos ? a.pos < b.pos : a.len > b.len;
    });
    std::vector<Mention> kept;
    for (const auto& m : found)
        if (kept.empty() || m.pos >= kept.back().pos + kept.back().len) kept.push_back(m);
    return kept;
}

bool has_word(const std::string& text, const std::string& word) {
    for (auto p = text.find(word); p != std::string::npos; p = text.find(word, p + 1))
        if (word_at(text, p, word.size())) return true;
    return false;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '\n';
        out += parts[i];
    }
    return out;
}

template <std::size_t N>
void append(std::vector<std::string>& out, const char* const (&segments)[N]) {
    out.insert(out.end(), std::begin(segments), std::end(segments));
}

int condition_index(const Condition& c) {
    return (c.hypotheses_given ? 0 : 2) + (c.structure == Structure::Disjunctive ? 0 : 1);
}

}  // namespace

std::string Condition::slug() const {
    std::string s = hypotheses_given ? "given" : "not-given";
    s += structure == Structure::Disjunctive ? "-disjunctive" : "-conjunctive";
    s += style == Style::Freeform ? "-freeform" : "-fewshot";
    return s;
}

Condition Condition::from_slug(const std::string& s) {
    for (const auto& c : all_conditions())
        if (c.slug() == s) return c;
    throw InvalidInput("unknown prompt condition: " + s);
}

std::vector<Condition> all_conditions() {
    std::vector<Condition> out;
    for (bool given : {true, false})
        for (Structure s : {Structure::Disjunctive, Structure::Conjunctive})
            for (Style st : {Style::Freeform, Style::FewShot}) out.push_back({given, s, st});
    return out;
}

const char* truth_structure_name(TruthStructure t) {
    switch (t) {
        case TruthStructure::Conjunctive: return "conjunctive";
        case TruthStructure::Disjunctive: return "disjunctive";
        case TruthStructure::Undetermined: return "undetermined";
    }
    return "?";
}

const char* machine_name(Machine m) {
    switch (m) {
        case Machine::Striped: return "striped";
        case Machine::Dotted: return "dotted";
        case Machine::None: return "none";
    }
    return "?";
}

const char* structure_score_name(StructureScore s) {
    switch (s) {
        case StructureScore::Correct: return "correct";
        case StructureScore::Wrong: return "wrong";
        case StructureScore::NotApplicable: return "n/a";
    }
    return "?";
}

const char* model_name(Model m) { return m == Model::Gpt3 ? "gpt-3" : "palm"; }

const std::vector<std::string>& task_objects() {
    static const std::vector<std::string> v(std::begin(kTestObjects), std::end(kTestObjects));
    return v;
}

const std::vector<std::string>& object_lexicon() {
    static const std::vector<std::string> v{"blue pyramid", "green cube",  "orange sphere",
                                            "yellow cylinder", "purple cone", "red dome",
                                            "teal prism",   "pink frustum", "brown torus"};
    return v;
}

PromptDoc render_prompt(const Condition& c) {
    PromptDoc doc;
    doc.condition = c;
    std::vector<std::string> parts;
    if (c.style == Style::Freeform) {
        parts.push_back(kFreeformPreamble);
        c.hypotheses_given ? append(parts, kFreeformGiven) : append(parts, kFreeformNotGiven);
        parts.push_back(c.structure == Structure::Disjunctive ? kFreeformDisjunctive : kFreeformConjunctive);
        parts.push_back(kFreeformQuestion);
    } else {
        parts.push_back(kFewShotPreamble);
        c.hypotheses_given ? append(parts, kFewShotGiven) : append(parts, kFewShotNotGiven);
        c.structure == Structure::Disjunctive ? append(parts, kFewShotDisjunctive) : append(parts, kFewShotConjunctive);
    }
    doc.text = join(parts);
    if (c.structure == Structure::Disjunctive)
        doc.truth_blickets = {"brown torus"};
    else
        doc.truth_blickets = {"teal prism", "brown torus"};
    if (!c.hypotheses_given)
        doc.truth_structure = TruthStructure::Undetermined;
    else
        doc.truth_structure =
            c.structure == Structure::Disjunctive ? TruthStructure::Disjunctive : TruthStructure::Conjunctive;
    return doc;
}

ParsedAnswer parse_answer(const std::string& text, const std::vector<std::string>& names, int sentence_limit) {
    if (sentence_limit < 1) throw InvalidInput("sentence limit must be >= 1");
    static const std::regex blicket_noun(R"(\bblickets?\b(?!\s+(detector|machine)))");

    ParsedAnswer out;
    auto all = sentences(lower(text));
    if (static_cast<int>(all.size()) > sentence_limit) all.resize(static_cast<std::size_t>(sentence_limit));
    out.truncated_to = static_cast<int>(all.size());

    bool like_striped = false, like_dotted = false, bare_striped = false, bare_dotted = false;
    for (const auto& s : all) {
        like_striped = like_striped || s.find("like the striped") != std::string::npos;
        like_dotted = like_dotted || s.find("like the dotted") != std::string::npos;
        bare_striped = bare_striped || has_word(s, "striped");
        bare_dotted = bare_dotted || has_word(s, "dotted");

        if (!std::regex_search(s, blicket_noun)) continue;
        const auto mentions = find_mentions(s, names);
        for (std::size_t i = 0; i < mentions.size(); ++i) {
            const auto& m = mentions[i];
            const std::size_t after = m.pos + m.len;
            const std::size_t until = i + 1 < mentions.size() ? mentions[i + 1].pos : s.size();
            const std::string before = s.substr(0, m.pos);
            const bool negated = has_word(s.substr(after, until - after), "not") || ends_with(before, "not ") ||
                                 ends_with(before, "not the ");
            if (!negated) out.blickets_claimed.insert(m.name);
        }
    }
    if (like_striped != like_dotted)
        out.structure_claimed = like_striped ? Machine::Striped : Machine::Dotted;
    else if (!like_striped && bare_striped != bare_dotted)
        out.structure_claimed = bare_striped ? Machine::Striped : Machine::Dotted;
    return out;
}

Score score_answer(const ParsedAnswer& parsed, const PromptDoc& doc) {
    Score s;
    for (const auto& name : parsed.blickets_claimed) (doc.truth_blickets.count(name) ? s.n_correct : s.n_wrong)++;
    switch (doc.truth_structure) {
        case TruthStructure::Undetermined: s.structure = StructureScore::NotApplicable; break;
        case TruthStructure::Conjunctive:
            s.structure = parsed.structure_claimed == Machine::Striped ? StructureScore::Correct : StructureScore::Wrong;
            break;
        case TruthStructure::Disjunctive:
            s.structure = parsed.structure_claimed == Machine::Dotted ? StructureScore::Correct : StructureScore::Wrong;
            break;
    }
    return s;
}

std::string perfect_reply(const PromptDoc& doc) {
    std::vector<std::string> names;
    for (const auto& o : task_objects())
        if (doc.truth_blickets.count(o)) names.push_back(o);
    std::string reply = "The ";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) reply += i + 1 == names.size() ? " and " : ", ";
        reply += names[i];
    }
    reply += names.size() == 1 ? " is a blicket." : " are blickets.";
    if (doc.truth_structure == TruthStructure::Conjunctive) reply += " This machine behaves like the striped machine.";
    if (doc.truth_structure == TruthStructure::Disjunctive) reply += " This machine behaves like the dotted machine.";
    return reply;
}

std::optional<std::string> recorded_reply(Model m, const Condition& c) {
    const int i = condition_index(c);
    if (m == Model::Gpt3) {
        if (c.style == Style::FewShot) return std::nullopt;
        return kGpt3Freeform[i];
    }
    return c.style == Style::Freeform ? kPalmFreeform[i] : kPalmFewShot[i];
}

nlohmann::json parsed_to_json(const ParsedAnswer& p) {
    return {{"blickets_claimed", p.blickets_claimed},
            {"structure_claimed", machine_name(p.structure_claimed)},
            {"truncated_to", p.truncated_to}};
}

nlohmann::json score_to_json(const Score& s) {
    return {{"n_correct", s.n_correct}, {"n_wrong", s.n_wrong}, {"structure", structure_score_name(s.structure)}};
}

std::string render_custom_freeform(const std::vector<std::string>& objects, const std::vector<CustomCheck>& checks) {
    if (objects.empty()) throw InvalidInput("custom prompt needs at least one object");
    std::ostringstream os;
    os << kFreeformPreamble << '\n';
    os << "I have a blicket detector and " << objects.size() << (objects.size() == 1 ? " object" : " objects");
    for (std::size_t i = 0; i < objects.size(); ++i)
        os << (i == 0 ? ", a " : i + 1 == objects.size() ? " and a " : ", a ") << objects[i];
    os << '.';
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const auto& chk = checks[k];
        if (chk.placed.empty()) throw InvalidInput("custom check places no objects");
        os << (k == 0 ? " First I put the " : " Then I put the ");
        for (std::size_t j = 0; j < chk.placed.size(); ++j) {
            if (chk.placed[j] >= objects.size()) throw InvalidInput("custom check references an unknown object");
            if (j) os << " and the ";
            os << objects[chk.placed[j]];
        }
        os << " on the blicket detector and it " << (chk.lit ? "does light up!" : "does not light up.");
    }
    os << "\nCan you tell me which objects are blickets?";
    return os.str();
}

}  // namespace blicket::prompt
