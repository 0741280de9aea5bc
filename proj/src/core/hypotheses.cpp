#include "blicket/hypotheses.hpp"

#include <algorithm>
#include <sstream>

#include "blicket/errors.hpp"

namespace blicket {

std::string object_name(ObjectId id) {
    if (id < 26) return std::string(1, static_cast<char>('A' + id));
    return "O" + std::to_string(id);
}

ObjectSet::ObjectSet(std::initializer_list<ObjectId> ids) {
    for (ObjectId id : ids) {
        if (id < 0 || id >= kMaxObjects) throw InvalidInput("object index out of range: " + std::to_string(id));
        mask_ |= 1u << id;
    }
}

ObjectSet ObjectSet::all(int n_objects) {
    return ObjectSet(n_objects >= 32 ? ~0u : ((1u << n_objects) - 1u));
}

std::vector<ObjectId> ObjectSet::members() const {
    std::vector<ObjectId> out;
    for (ObjectId i = 0; i < 32; ++i)
        if (contains(i)) out.push_back(i);
    return out;
}

std::string ObjectSet::to_string() const {
    std::string s = "{";
    bool first = true;
    for (ObjectId id : members()) {
        if (!first) s += ",";
        s += object_name(id);
        first = false;
    }
    return s + "}";
}

bool ObjectSet::lex_less(ObjectSet a, ObjectSet b) {
    const auto ma = a.members();
    const auto mb = b.members();
    return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

std::vector<ObjectSet> canonical_subsets(int n_objects) {
    if (n_objects < 0 || n_objects > kMaxObjects) throw InvalidInput("n_objects out of range");
    std::vector<ObjectSet> out;
    out.reserve(std::size_t{1} << n_objects);
    for (std::uint32_t m = 0; m < (1u << n_objects); ++m) out.emplace_back(m);
    std::sort(out.begin(), out.end(), [](ObjectSet a, ObjectSet b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return ObjectSet::lex_less(a, b);
    });
    return out;
}

const char* form_name(Form f) { return f == Form::Disjunctive ? "disjunctive" : "conjunctive"; }

Form parse_form(const std::string& s) {
    if (s == "disjunctive") return Form::Disjunctive;
    if (s == "conjunctive") return Form::Conjunctive;
    throw InvalidInput("unknown form: " + s);
}

Hypothesis::Hypothesis(Form form, ObjectSet blickets) : form_(form), blickets_(blickets) {
    if (blickets_.size() < threshold())
        throw InvalidInput("hypothesis needs at least " + std::to_string(threshold()) + " blicket(s)");
}

std::string Hypothesis::to_string() const {
    return std::string(form_ == Form::Disjunctive ? "Disj" : "Conj") + blickets_.to_string();
}

void to_json(nlohmann::json& j, const Hypothesis& h) {
    j = nlohmann::json{{"form", form_name(h.form())}, {"blickets", h.blickets().members()}};
}

Hypothesis hypothesis_from_json(const nlohmann::json& j) {
    try {
        ObjectSet b;
        for (const auto& v : j.at("blickets")) {
            const int id = v.get<int>();
            if (id < 0 || id >= kMaxObjects) throw InvalidInput("blicket index out of range");
            b = b.with(id);
        }
        return Hypothesis(parse_form(j.at("form").get<std::string>()), b);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed hypothesis: ") + e.what());
    }
}

bool detector_lit(const Hypothesis& h, ObjectSet placed, int n_objects) {
    if (!placed.subset_of(ObjectSet::all(n_objects)))
        throw InvalidInput("placement " + placed.to_string() + " outside object universe");
    return (placed & h.blickets()).size() >= h.threshold();
}

const char* family_name(Family f) {
    switch (f) {
        case Family::Default: return "default";
        case Family::Extended: return "extended";
        case Family::Custom: return "custom";
    }
    return "custom";
}

Family parse_family(const std::string& s) {
    if (s == "default") return Family::Default;
    if (s == "extended") return Family::Extended;
    if (s == "custom") return Family::Custom;
    throw InvalidConfig("unknown hypothesis family: " + s);
}

HypothesisSpace::HypothesisSpace(int n_objects, std::vector<Hypothesis> hypotheses, Family family)
    : n_objects_(n_objects), hypotheses_(std::move(hypotheses)), family_(family) {
    if (n_objects_ < 1 || n_objects_ > kMaxObjects) throw InvalidConfig("n_objects must be in [1, 16]");
    const ObjectSet universe = ObjectSet::all(n_objects_);
    for (std::size_t i = 0; i < hypotheses_.size(); ++i) {
        if (!hypotheses_[i].blickets().subset_of(universe))
            throw InvalidConfig("hypothesis " + hypotheses_[i].to_string() + " outside object universe");
        for (std::size_t k = 0; k < i; ++k)
            if (hypotheses_[k] == hypotheses_[i])
                throw InvalidConfig("duplicate hypothesis " + hypotheses_[i].to_string());
    }
}

int HypothesisSpace::index_of(const Hypothesis& h) const {
    for (std::size_t i = 0; i < hypotheses_.size(); ++i)
        if (hypotheses_[i] == h) return static_cast<int>(i);
    return -1;
}

HypothesisSpace enumerate_space(int n_objects, Family family) {
    if (n_objects < 1 || n_objects > kMaxObjects) throw InvalidConfig("n_objects must be in [1, 16]");
    if (family == Family::Custom) throw InvalidConfig("custom spaces are not enumerable");
    if (family == Family::Default && n_objects < 2)
        throw InvalidConfig("default family needs at least 2 objects for a conjunctive pair");

    std::vector<ObjectSet> subsets;
    for (std::uint32_t m = 1; m < (1u << n_objects); ++m) subsets.emplace_back(m);
    std::sort(subsets.begin(), subsets.end(), ObjectSet::lex_less);

    std::vector<Hypothesis> hs;
    for (ObjectSet s : subsets)
        if (family == Family::Extended || s.size() == 1) hs.emplace_back(Form::Disjunctive, s);
    for (ObjectSet s : subsets)
        if ((family == Family::Extended && s.size() >= 2) || s.size() == 2) hs.emplace_back(Form::Conjunctive, s);
    return HypothesisSpace(n_objects, std::move(hs), family);
}

void to_json(nlohmann::json& j, const HypothesisSpace& s) {
    j = nlohmann::json{{"n_objects", s.n_objects()}, {"family", family_name(s.family())}};
    if (s.family() == Family::Custom) j["hypotheses"] = s.hypotheses();
}

HypothesisSpace space_from_json(const nlohmann::json& j) {
    try {
        const int n = j.value("n_objects", 3);
        const Family fam = parse_family(j.value("family", std::string("default")));
        if (fam != Family::Custom) return enumerate_space(n, fam);
        std::vector<Hypothesis> hs;
        for (const auto& h : j.at("hypotheses")) hs.push_back(hypothesis_from_json(h));
        return HypothesisSpace(n, std::move(hs), Family::Custom);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed hypothesis space: ") + e.what());
    }
}

bool consistent(const Hypothesis& h, const Evidence& evidence, int n_objects) {
    return std::all_of(evidence.begin(), evidence.end(),
                       [&](const Trial& t) { return detector_lit(h, t.placed, n_objects) == t.lit; });
}

const char* split_mode_name(SplitMode m) {
    switch (m) {
        case SplitMode::None: return "none";
        case SplitMode::ConjunctiveOnly: return "conjunctive-only";
        case SplitMode::DisjunctiveOnly: return "disjunctive-only";
        case SplitMode::LeaveOneOutConj: return "leave-one-out-conj";
        case SplitMode::LeaveOneOutDisj: return "leave-one-out-disj";
        case SplitMode::LeaveOneOutBoth: return "leave-one-out-both";
    }
    return "none";
}

SplitMode parse_split_mode(const std::string& s) {
    for (SplitMode m : {SplitMode::None, SplitMode::ConjunctiveOnly, SplitMode::DisjunctiveOnly,
                        SplitMode::LeaveOneOutConj, SplitMode::LeaveOneOutDisj, SplitMode::LeaveOneOutBoth})
        if (s == split_mode_name(m)) return m;
    throw InvalidConfig("unknown split mode: " + s);
}

namespace {

int first_of_form(const HypothesisSpace& space, Form f) {
    for (std::size_t i = 0; i < space.size(); ++i)
        if (space[i].form() == f) return static_cast<int>(i);
    throw InvalidConfig(std::string("space has no ") + form_name(f) + " hypothesis to hold out");
}

}  // namespace

Split split_space(const HypothesisSpace& space, const SplitSpec& spec) {
    const auto& all = space.hypotheses();
    auto of_form = [&](Form f) {
        std::vector<Hypothesis> out;
        std::copy_if(all.begin(), all.end(), std::back_inserter(out), [f](const Hypothesis& h) { return h.form() == f; });
        return out;
    };

    switch (spec.mode) {
        case SplitMode::None: return {all, all};
        case SplitMode::ConjunctiveOnly: return {of_form(Form::Conjunctive), all};
        case SplitMode::DisjunctiveOnly: return {of_form(Form::Disjunctive), all};
        default: break;
    }

    std::vector<int> held = spec.held_out_indices;
    if (held.empty()) {
        if (spec.mode != SplitMode::LeaveOneOutConj) held.push_back(first_of_form(space, Form::Disjunctive));
        if (spec.mode != SplitMode::LeaveOneOutDisj) held.push_back(first_of_form(space, Form::Conjunctive));
    }
    std::vector<bool> is_held(space.size(), false);
    for (int idx : held) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= space.size())
            throw InvalidConfig("held-out index out of range: " + std::to_string(idx));
        const Form f = space[idx].form();
        if ((spec.mode == SplitMode::LeaveOneOutConj && f != Form::Conjunctive) ||
            (spec.mode == SplitMode::LeaveOneOutDisj && f != Form::Disjunctive))
            throw InvalidConfig("held-out hypothesis " + space[idx].to_string() + " does not match split mode");
        is_held[idx] = true;
    }

    Split out;
    for (std::size_t i = 0; i < space.size(); ++i) (is_held[i] ? out.test : out.train).push_back(all[i]);
    return out;
}

}  // namespace blicket
