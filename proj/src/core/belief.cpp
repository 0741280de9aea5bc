#include "blicket/belief.hpp"

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "blicket/errors.hpp"

namespace blicket {

namespace {

constexpr double kNormTol = 1e-12;
// Two candidate scores closer than this are treated as tied.
constexpr double kTieTol = 1e-12;

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

Belief::Belief(std::shared_ptr<const HypothesisSpace> space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_) throw InvalidInput("belief needs a hypothesis space");
    if (weights_.size() != space_->size()) throw InvalidInput("belief needs one weight per hypothesis");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("belief weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) throw InvalidInput("belief has no support");
    for (double& w : weights_) w /= total;
}

Belief Belief::uniform(std::shared_ptr<const HypothesisSpace> space) {
    const std::size_t n = space ? space->size() : 0;
    return Belief(std::move(space), std::vector<double>(n, 1.0));
}

Belief Belief::uniform(HypothesisSpace space) {
    return uniform(std::make_shared<const HypothesisSpace>(std::move(space)));
}

Belief Belief::from_prior(std::shared_ptr<const HypothesisSpace> space, std::span<const Hypothesis> sampler,
                          std::span<const double> weights) {
    if (sampler.size() != weights.size()) throw InvalidInput("prior needs one weight per hypothesis");
    std::vector<double> w(space->size(), 0.0);
    for (std::size_t i = 0; i < sampler.size(); ++i) {
        const int idx = space->index_of(sampler[i]);
        if (idx < 0) throw InvalidInput("prior hypothesis " + sampler[i].to_string() + " not in space");
        w[idx] += weights[i];
    }
    return Belief(std::move(space), std::move(w));
}

std::vector<std::size_t> Belief::support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0) out.push_back(i);
    return out;
}

std::size_t Belief::support_size() const {
    return static_cast<std::size_t>(std::count_if(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; }));
}

std::uint64_t Belief::support_mask() const {
    if (weights_.size() > 64) throw InvalidInput("support masks need at most 64 hypotheses");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0) m |= std::uint64_t{1} << i;
    return m;
}

double Belief::probability_lit(ObjectSet placed) const {
    double p = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0 && detector_lit((*space_)[i], placed, space_->n_objects())) p += weights_[i];
    return p;
}

Belief update(const Belief& b, ObjectSet placed, bool lit) {
    const auto& space = b.space();
    std::vector<double> w(b.weights().begin(), b.weights().end());
    double kept = 0.0;
    bool removed = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0.0 && detector_lit(space[i], placed, space.n_objects()) != lit) {
            w[i] = 0.0;
            removed = true;
        }
        kept += w[i];
    }
    if (kept <= 0.0)
        throw Contradiction("no supported hypothesis is consistent with " + placed.to_string() +
                            (lit ? " lit" : " dark"));
    // Renormalizing an unchanged vector could move its last bits.
    if (!removed) return b;
    return Belief(b.space_ptr(), std::move(w));
}

double entropy(const Belief& b) {
    double h = 0.0;
    for (double w : b.weights()) h += plogp(w);
    return h;
}

double info_gain(const Belief& b, ObjectSet placed) {
    const auto& space = b.space();
    double mass_lit = 0.0, mass_dark = 0.0;
    for (std::size_t i : b.support())
        (detector_lit(space[i], placed, space.n_objects()) ? mass_lit : mass_dark) += b.weight(i);
    double expected = 0.0;
    if (mass_lit > 0.0) expected += mass_lit * entropy(update(b, placed, true));
    if (mass_dark > 0.0) expected += mass_dark * entropy(update(b, placed, false));
    const double gain = entropy(b) - expected;
    return gain < kNormTol ? 0.0 : gain;
}

ObjectSet greedy_policy(const Belief& b) {
    if (b.support_size() < 2) throw NothingToLearn();
    ObjectSet best;
    double best_gain = -1.0;
    for (ObjectSet s : canonical_subsets(b.space().n_objects())) {
        const double g = info_gain(b, s);
        if (g > best_gain + kTieTol) {
            best_gain = g;
            best = s;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Policy trees

int PolicyTree::depth() const {
    if (nodes_.empty()) return 0;
    std::function<int(int)> rec = [&](int i) -> int {
        const Node& n = nodes_[i];
        if (n.terminal) return 0;
        return 1 + std::max(rec(n.on_lit), rec(n.on_dark));
    };
    return rec(0);
}

int PolicyTree::leaf_count() const { return static_cast<int>(leaf_hypotheses().size()); }

std::vector<int> PolicyTree::leaf_hypotheses() const {
    std::vector<int> out;
    for (const Node& n : nodes_)
        if (n.terminal) out.push_back(n.hypothesis);
    return out;
}

std::string PolicyTree::to_text(const HypothesisSpace& space) const {
    std::ostringstream os;
    if (nodes_.empty()) return "";
    std::function<void(int, int)> rec = [&](int i, int indent) {
        const Node& n = nodes_[i];
        const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        if (n.terminal) {
            os << pad << "Done: " << space[n.hypothesis].to_string() << "\n";
            return;
        }
        os << pad << "Test objects " << n.check.to_string() << "\n";
        os << pad << "  (Detector on)\n";
        rec(n.on_lit, indent + 2);
        os << pad << "  (Detector off)\n";
        rec(n.on_dark, indent + 2);
    };
    rec(0, 0);
    return os.str();
}

nlohmann::json PolicyTree::to_json(const HypothesisSpace& space) const {
    std::function<nlohmann::json(int)> rec = [&](int i) -> nlohmann::json {
        const Node& n = nodes_[i];
        if (n.terminal)
            return {{"type", "terminal"}, {"hypothesis_index", n.hypothesis}, {"hypothesis", space[n.hypothesis]}};
        return {{"type", "check"}, {"placed", n.check.members()}, {"lit", rec(n.on_lit)}, {"dark", rec(n.on_dark)}};
    };
    return nodes_.empty() ? nlohmann::json(nullptr) : rec(0);
}

// ---------------------------------------------------------------------------
// Planners. Both work on bitmasks over hypothesis indices: with deterministic
// likelihoods the renormalized posterior is a function of its support.

namespace {

struct MaskedSpace {
    std::vector<double> prior;
    std::vector<ObjectSet> placements;    // canonical order
    std::vector<std::uint64_t> lit_mask;  // hypotheses lighting per placement

    explicit MaskedSpace(const Belief& b) : prior(b.weights().begin(), b.weights().end()) {
        const auto& space = b.space();
        if (space.size() > 64) throw InvalidInput("planner supports at most 64 hypotheses");
        placements = canonical_subsets(space.n_objects());
        for (ObjectSet p : placements) {
            std::uint64_t m = 0;
            for (std::size_t i = 0; i < space.size(); ++i)
                if (detector_lit(space[i], p, space.n_objects())) m |= std::uint64_t{1} << i;
            lit_mask.push_back(m);
        }
    }

    double mass(std::uint64_t s) const {
        double m = 0.0;
        for (; s; s &= s - 1) m += prior[__builtin_ctzll(s)];
        return m;
    }

    int most_probable(std::uint64_t s) const {
        int best = __builtin_ctzll(s);
        for (; s; s &= s - 1) {
            const int i = __builtin_ctzll(s);
            if (prior[i] > prior[best]) best = i;
        }
        return best;
    }
};

struct TreeBuilder {
    std::vector<PolicyTree::Node> nodes;

    int terminal(int hypothesis) {
        PolicyTree::Node n;
        n.hypothesis = hypothesis;
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }

    int internal(ObjectSet check) {
        PolicyTree::Node n;
        n.terminal = false;
        n.check = check;
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }
};

}  // namespace

PlanResult min_expected_steps(const Belief& b) {
    const MaskedSpace ms(b);
    const std::uint64_t root = b.support_mask();

    // cost(S) = mass(S) * expected steps from S; additive over the two branches.
    struct Entry {
        double cost;
        int placement;  // -1: no informative check
    };
    std::unordered_map<std::uint64_t, Entry> memo;

    std::function<double(std::uint64_t)> cost = [&](std::uint64_t s) -> double {
        if ((s & (s - 1)) == 0) return 0.0;
        if (auto it = memo.find(s); it != memo.end()) return it->second.cost;
        double best = std::numeric_limits<double>::infinity();
        int best_p = -1;
        for (std::size_t p = 0; p < ms.placements.size(); ++p) {
            const std::uint64_t lit = s & ms.lit_mask[p];
            const std::uint64_t dark = s & ~ms.lit_mask[p];
            if (lit == 0 || dark == 0) continue;
            const double c = cost(lit) + cost(dark);
            if (c < best - kTieTol) {
                best = c;
                best_p = static_cast<int>(p);
            }
        }
        const double total = best_p < 0 ? 0.0 : ms.mass(s) + best;
        memo[s] = {total, best_p};
        return total;
    };

    const double root_cost = cost(root);

    TreeBuilder tb;
    std::function<int(std::uint64_t)> build = [&](std::uint64_t s) -> int {
        if ((s & (s - 1)) == 0) return tb.terminal(__builtin_ctzll(s));
        const int p = memo.at(s).placement;
        if (p < 0) return tb.terminal(ms.most_probable(s));
        const int id = tb.internal(ms.placements[p]);
        const int lit = build(s & ms.lit_mask[p]);
        const int dark = build(s & ~ms.lit_mask[p]);
        tb.nodes[id].on_lit = lit;
        tb.nodes[id].on_dark = dark;
        return id;
    };
    build(root);

    return {root_cost / ms.mass(root), PolicyTree(std::move(tb.nodes))};
}

PlanResult greedy_plan(const Belief& b) {
    TreeBuilder tb;
    std::function<double(const Belief&, int&)> rec = [&](const Belief& cur, int& node_id) -> double {
        if (cur.support_size() == 1) {
            node_id = tb.terminal(static_cast<int>(cur.support().front()));
            return 0.0;
        }
        const ObjectSet check = greedy_policy(cur);
        const double p_lit = cur.probability_lit(check);
        if (p_lit <= 0.0 || p_lit >= 1.0) {
            // Remaining hypotheses are indistinguishable.
            const auto sup = cur.support();
            int best = static_cast<int>(sup.front());
            for (std::size_t i : sup)
                if (cur.weight(i) > cur.weight(best)) best = static_cast<int>(i);
            node_id = tb.terminal(best);
            return 0.0;
        }
        node_id = tb.internal(check);
        int lit_id = -1;
        int dark_id = -1;
        const double v_lit = rec(update(cur, check, true), lit_id);
        const double v_dark = rec(update(cur, check, false), dark_id);
        tb.nodes[node_id].on_lit = lit_id;
        tb.nodes[node_id].on_dark = dark_id;
        return 1.0 + p_lit * v_lit + (1.0 - p_lit) * v_dark;
    };
    int root = -1;
    const double value = rec(b, root);
    return {value, PolicyTree(std::move(tb.nodes))};
}

QuizAnswers map_quiz_answers(const Belief& b) {
    const auto& space = b.space();
    QuizAnswers out;
    out.is_blicket.assign(space.n_objects(), false);
    double conj = 0.0;
    double disj = 0.0;
    for (ObjectId o = 0; o < space.n_objects(); ++o) {
        double mass = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i)
            if (space[i].blickets().contains(o)) mass += b.weight(i);
        out.is_blicket[o] = mass > 0.5 + kTieTol;
    }
    for (std::size_t i = 0; i < space.size(); ++i) (space[i].form() == Form::Conjunctive ? conj : disj) += b.weight(i);
    out.modality = conj > disj + kTieTol ? Form::Conjunctive : Form::Disjunctive;
    return out;
}

}  // namespace blicket
