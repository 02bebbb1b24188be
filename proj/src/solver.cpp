#include "dualsmpc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dualsmpc/errors.hpp"
#include "dualsmpc/filter.hpp"
#include "dualsmpc/lp.hpp"

namespace dualsmpc {

namespace {

// w never loses to v anywhere when w <= v + tol componentwise.
bool dominates(const Vec& w, const Vec& v, double tol) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > v[i] + tol) return false;
    }
    return true;
}

struct Witness {
    double margin;            // best advantage of v over the set across the simplex
    Vec belief;               // where that advantage is attained (margin > 0 only)
    std::vector<int> active;  // `against` entries certifying a rejection
};

// The margin max_{pi} min_{u in against} pi . (u - v), computed through the
// LP dual: minimize, over convex combinations y of the rows (u - v), the
// largest coordinate. The dual has only n_states + 1 constraints no matter
// how large `against` grows. By strong duality its constraint multipliers
// are the primal optimum, i.e. the witness belief, and the combination
// weights y name the vectors certifying a rejection.
Witness find_witness(const AlphaVector& v, const std::vector<const AlphaVector*>& against,
                     int original_index) {
    const int n = static_cast<int>(v.coeffs.size());
    const int m = static_cast<int>(against.size());
    // Reused workspaces: the filters call this millions of times.
    static thread_local Vec objective;
    static thread_local std::vector<lp::Constraint> constraints;

    // Variables: y_0..y_{m-1}, then the split t = t+ - t-. Maximize -t.
    objective.assign(m + 2, 0.0);
    objective[m] = -1.0;
    objective[m + 1] = 1.0;

    constraints.resize(n + 1);
    for (int i = 0; i < n; ++i) {
        lp::Constraint& c = constraints[i];
        c.coeffs.assign(m + 2, 0.0);
        for (int k = 0; k < m; ++k) c.coeffs[k] = against[k]->coeffs[i] - v.coeffs[i];
        c.coeffs[m] = -1.0;
        c.coeffs[m + 1] = 1.0;
        c.rel = lp::Relation::less_equal;
        c.rhs = 0.0;
    }
    lp::Constraint& convex = constraints[n];
    convex.coeffs.assign(m + 2, 1.0);
    convex.coeffs[m] = 0.0;
    convex.coeffs[m + 1] = 0.0;
    convex.rel = lp::Relation::equal;
    convex.rhs = 1.0;

    const lp::Result res = lp::maximize(objective, constraints);
    if (res.status != lp::Status::optimal)
        throw LpFailureError("witness LP did not reach an optimum", original_index);

    Witness w;
    w.margin = -res.objective;
    w.belief.assign(n, 0.0);
    for (int i = 0; i < n; ++i) w.belief[i] = std::max(0.0, res.duals[i]);
    for (int k = 0; k < m; ++k)
        if (res.x[k] > 1e-10) w.active.push_back(k);
    return w;
}

struct Decision {
    bool rejected = false;
    Vec belief;                       // admit: a belief where the candidate wins
    std::vector<std::size_t> active;  // reject: positions into `kept` certifying it
};

// Decides one candidate against the vectors vecs[kept[...]] without ever
// solving an LP over the whole kept set. The margin LP runs against a small
// working subset seeded from `cert` (the positions that settled the previous,
// usually similar, candidate); while it stays inconclusive the kept winner at
// the current witness belief joins the subset. Rejections come only from an
// LP margin, which is sound against any subset; the full-set scan is used
// only to certify admissions. `cert` is updated with whatever settled the
// candidate.
Decision decide_candidate(const AlphaVector& cand, const std::vector<AlphaVector>& vecs,
                          const std::vector<std::size_t>& kept,
                          std::vector<std::size_t>& cert, double tolerance) {
    Decision d;
    // A certificate vector that pointwise-dominates the candidate settles it
    // without any LP at all.
    for (std::size_t c : cert) {
        if (dominates(vecs[kept[c]].coeffs, cand.coeffs, tolerance)) {
            d.rejected = true;
            d.active.assign(1, c);
            cert = d.active;
            return d;
        }
    }

    static thread_local std::vector<std::size_t> working;
    static thread_local std::vector<const AlphaVector*> ptrs;
    working = cert;
    if (working.empty()) working.push_back(0);
    for (;;) {
        ptrs.clear();
        for (std::size_t w : working) ptrs.push_back(&vecs[kept[w]]);
        const Witness wit = find_witness(cand, ptrs, -1);
        if (wit.margin <= tolerance) {
            d.rejected = true;
            for (int k : wit.active) d.active.push_back(working[k]);
            cert = d.active;
            return d;
        }
        const double cand_val = dot(wit.belief, cand.coeffs);
        double best_val = std::numeric_limits<double>::infinity();
        std::size_t best = 0;
        for (std::size_t p = 0; p < kept.size(); ++p) {
            const double val = dot(wit.belief, vecs[kept[p]].coeffs);
            if (val < best_val) {
                best_val = val;
                best = p;
            }
        }
        if (best_val - cand_val > tolerance) {  // wins against every kept vector here
            d.belief = wit.belief;
            cert.assign(working.begin(), working.end());
            return d;
        }
        if (std::find(working.begin(), working.end(), best) != working.end()) {
            // The subset LP and the scan disagree within roundoff; settle with
            // one LP over the full kept set.
            ptrs.clear();
            for (std::size_t p : kept) ptrs.push_back(&vecs[p]);
            const Witness full = find_witness(cand, ptrs, -1);
            if (full.margin <= tolerance) {
                d.rejected = true;
                for (int k : full.active) d.active.push_back(static_cast<std::size_t>(k));
                cert = d.active;
            } else {
                d.belief = full.belief;
                cert.assign(working.begin(), working.end());
            }
            return d;
        }
        working.push_back(best);
    }
}

// Lark-style filtering: seed the kept set with the best vector at every
// simplex corner, then admit candidates only when an LP produces a witness
// belief, moving the winner at that belief into the kept set.
std::vector<std::size_t> lp_filter(const std::vector<AlphaVector>& vecs,
                                   const std::vector<std::size_t>& candidates,
                                   double tolerance) {
    if (candidates.size() <= 1) return candidates;
    const int n = static_cast<int>(vecs[candidates[0]].coeffs.size());

    std::vector<std::size_t> frontier = candidates;
    std::size_t head = 0;
    std::vector<std::size_t> kept;
    // Removes position pos (>= head) in constant time; the order of the
    // still-unprocessed tail does not matter.
    auto take = [&](std::size_t pos) {
        kept.push_back(frontier[pos]);
        frontier[pos] = frontier[head];
        ++head;
    };

    for (int corner = 0; corner < n && head < frontier.size(); ++corner) {
        std::size_t best = head;
        for (std::size_t p = head + 1; p < frontier.size(); ++p) {
            if (vecs[frontier[p]].coeffs[corner] < vecs[frontier[best]].coeffs[corner])
                best = p;
        }
        take(best);
    }

    // Certificate positions refer into `kept`, which only grows, so the set
    // that settled one candidate seeds the decision for the next: consecutive
    // cross-sum candidates tend to fall to the same few vectors.
    std::vector<std::size_t> certificate;
    while (head < frontier.size()) {
        const std::size_t f = frontier[head];
        const Decision d = decide_candidate(vecs[f], vecs, kept, certificate, tolerance);
        if (d.rejected) {
            ++head;
            continue;
        }
        // d.belief is where f beats every kept vector; keep whichever pending
        // candidate is minimal there (f itself if nothing is smaller).
        std::size_t best = head;
        double best_val = dot(d.belief, vecs[f].coeffs);
        for (std::size_t p = head + 1; p < frontier.size(); ++p) {
            const double val = dot(d.belief, vecs[frontier[p]].coeffs);
            if (val < best_val) {
                best = p;
                best_val = val;
            }
        }
        take(best);
    }

    std::sort(kept.begin(), kept.end());
    return kept;
}

// Cross-sum acc + proj with the LP filter applied to each candidate as it is
// generated, so the product set is never materialized. Without the look-ahead
// winner search the admitted set can carry some redundancy; a final lp_filter
// pass restores minimality.
std::vector<AlphaVector> cross_sum_streamed(const std::vector<AlphaVector>& acc,
                                            const std::vector<AlphaVector>& proj,
                                            int action, double tolerance) {
    const int n = static_cast<int>(acc.front().coeffs.size());
    std::vector<AlphaVector> kept;

    // The product's minimum at a simplex corner separates into the factors'
    // corner minima, so the corner-optimal candidates are known up front.
    for (int i = 0; i < n; ++i) {
        const AlphaVector* bu = &acc.front();
        for (const AlphaVector& u : acc)
            if (u.coeffs[i] < bu->coeffs[i]) bu = &u;
        const AlphaVector* bg = &proj.front();
        for (const AlphaVector& g : proj)
            if (g.coeffs[i] < bg->coeffs[i]) bg = &g;
        AlphaVector seed{bu->coeffs, action};
        for (int j = 0; j < n; ++j) seed.coeffs[j] += bg->coeffs[j];
        bool duplicate = false;
        for (const AlphaVector& k : kept)
            if (k.coeffs == seed.coeffs) {
                duplicate = true;
                break;
            }
        if (!duplicate) kept.push_back(std::move(seed));
    }

    // Candidates stream u-major, so the candidates sharing one g are far
    // apart in the stream yet rejected by similar certificates; caching one
    // certificate per g makes the first, cheap LP settle almost everything.
    // Positions stay valid because kept only grows.
    std::vector<std::size_t> kept_idx(kept.size());
    std::iota(kept_idx.begin(), kept_idx.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> cert_by_g(proj.size());
    AlphaVector cand{Vec(n, 0.0), action};
    for (const AlphaVector& u : acc) {
        for (std::size_t j = 0; j < proj.size(); ++j) {
            const AlphaVector& g = proj[j];
            for (int i = 0; i < n; ++i) cand.coeffs[i] = u.coeffs[i] + g.coeffs[i];
            std::vector<std::size_t>& cert = cert_by_g[j];
            for (;;) {
                const Decision d = decide_candidate(cand, kept, kept_idx, cert, tolerance);
                if (d.rejected) break;
                // Admit the whole product's winner at the witness belief, not
                // the candidate: the product minimum separates over the
                // factors, and the winner is minimal there among all
                // candidates past and future (a rejected or kept one cannot
                // win where the current candidate still beats every kept
                // vector), so the kept set stays parsimonious exactly as in
                // the materialized filter.
                std::size_t iu = 0, jg = 0;
                double best_u = std::numeric_limits<double>::infinity();
                double best_g = std::numeric_limits<double>::infinity();
                for (std::size_t p = 0; p < acc.size(); ++p) {
                    const double val = dot(d.belief, acc[p].coeffs);
                    if (val < best_u) {
                        best_u = val;
                        iu = p;
                    }
                }
                for (std::size_t p = 0; p < proj.size(); ++p) {
                    const double val = dot(d.belief, proj[p].coeffs);
                    if (val < best_g) {
                        best_g = val;
                        jg = p;
                    }
                }
                AlphaVector winner{acc[iu].coeffs, action};
                for (int i = 0; i < n; ++i) winner.coeffs[i] += proj[jg].coeffs[i];
                const bool settled = winner.coeffs == cand.coeffs;
                kept.push_back(std::move(winner));
                kept_idx.push_back(kept_idx.size());
                cert.push_back(kept_idx.size() - 1);
                if (settled) break;  // the candidate itself went in
            }
        }
    }

    std::vector<std::size_t> all(kept.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::vector<std::size_t> minimal = lp_filter(kept, all, tolerance);
    std::vector<AlphaVector> out;
    out.reserve(minimal.size());
    for (std::size_t i : minimal) out.push_back(std::move(kept[i]));
    return out;
}

void sort_set(AlphaVectorSet& set) {
    std::sort(set.vectors.begin(), set.vectors.end(),
              [](const AlphaVector& a, const AlphaVector& b) {
                  if (a.action != b.action) return a.action < b.action;
                  return a.coeffs < b.coeffs;
              });
}

// Projection of a future vector through action a and observation th:
// g[i] = discount * sum_j T[a][i][j] O[a][j][th] gamma[j].
Vec project(const PomdpModel& model, int a, int th, const Vec& gamma, double discount) {
    Vec g(model.n_states, 0.0);
    const Mat& t = model.transition[a];
    const Mat& o = model.observation[a];
    for (int i = 0; i < model.n_states; ++i) {
        double s = 0.0;
        for (int j = 0; j < model.n_states; ++j) s += t[i][j] * o[j][th] * gamma[j];
        g[i] = discount * s;
    }
    return g;
}

AlphaVectorSet backup_impl(const PomdpModel& model, const AlphaVectorSet& next,
                           const SolveConfig& config, bool do_prune) {
    AlphaVectorSet out;
    out.stage = next.stage - 1;

    for (int a = 0; a < model.n_actions; ++a) {
        std::vector<AlphaVector> acc{{model.stage_cost[a], a}};
        for (int th = 0; th < model.n_observations; ++th) {
            AlphaVectorSet proj;
            proj.stage = out.stage;
            proj.vectors.reserve(next.vectors.size());
            for (const AlphaVector& gamma : next.vectors) {
                proj.vectors.push_back({project(model, a, th, gamma.coeffs, config.discount), a});
            }
            if (do_prune)
                proj = prune(proj, config.pruning_mode, config.prune_tolerance);

            const std::size_t product = acc.size() * proj.vectors.size();
            if (product > config.max_cross_sum) {
                throw ResourceLimitError(
                    "cross-sum of " + std::to_string(acc.size()) + " x " +
                    std::to_string(proj.vectors.size()) +
                    " vectors exceeds the cap of " + std::to_string(config.max_cross_sum));
            }
            // Large products are filtered while streaming instead of being
            // materialized; the result is the same parsimonious set.
            constexpr std::size_t kStreamCrossSum = 200000;
            if (do_prune && config.pruning_mode == PruningMode::exact_lp &&
                product > kStreamCrossSum) {
                acc = cross_sum_streamed(acc, proj.vectors, a, config.prune_tolerance);
                continue;
            }
            std::vector<AlphaVector> crossed;
            crossed.reserve(product);
            for (const AlphaVector& u : acc) {
                for (const AlphaVector& g : proj.vectors) {
                    AlphaVector sum{u.coeffs, a};
                    for (int i = 0; i < model.n_states; ++i) sum.coeffs[i] += g.coeffs[i];
                    crossed.push_back(std::move(sum));
                }
            }
            if (do_prune) {
                AlphaVectorSet tmp{std::move(crossed), out.stage};
                tmp = prune(tmp, config.pruning_mode, config.prune_tolerance);
                acc = std::move(tmp.vectors);
            } else {
                acc = std::move(crossed);
            }
        }
        out.vectors.insert(out.vectors.end(), acc.begin(), acc.end());
    }

    if (do_prune) out = prune(out, config.pruning_mode, config.prune_tolerance);
    sort_set(out);
    return out;
}

void require_valid(const PomdpModel& model) {
    const ValidationReport report = validate_model(model);
    if (!report.ok())
        throw std::invalid_argument("invalid model: " + report.violations.front());
}

}  // namespace

Evaluation evaluate(const AlphaVectorSet& set, const Belief& belief) {
    if (set.vectors.empty()) throw std::invalid_argument("evaluate: empty alpha set");
    Evaluation best{std::numeric_limits<double>::infinity(), kNoAction, -1};
    for (std::size_t v = 0; v < set.vectors.size(); ++v) {
        const double val = dot(belief.probs(), set.vectors[v].coeffs);
        if (val < best.value ||
            (val == best.value && set.vectors[v].action < best.action)) {
            best = {val, set.vectors[v].action, static_cast<int>(v)};
        }
    }
    return best;
}

Evaluation evaluate(const PolicyStack& stack, int stage, const Belief& belief) {
    if (stage < 0 || stage >= static_cast<int>(stack.per_stage.size()))
        throw std::out_of_range("evaluate: stage out of range");
    return evaluate(stack.per_stage[stage], belief);
}

AlphaVectorSet prune(const AlphaVectorSet& set, PruningMode mode, double tolerance) {
    if (set.vectors.empty()) throw std::invalid_argument("prune: empty alpha set");
    const auto& vecs = set.vectors;

    // Near-duplicates land adjacent under a lexicographic sort, so one linear
    // pass removes them; cross sums produce them in bulk. Exact ties keep the
    // earliest vector.
    std::vector<std::size_t> order(vecs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (vecs[a].coeffs != vecs[b].coeffs) return vecs[a].coeffs < vecs[b].coeffs;
        return a < b;
    });
    std::vector<std::size_t> survivors;
    survivors.reserve(order.size());
    auto near_equal = [&](const Vec& a, const Vec& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > tolerance) return false;
        return true;
    };
    for (std::size_t idx : order) {
        if (!survivors.empty() &&
            near_equal(vecs[survivors.back()].coeffs, vecs[idx].coeffs))
            continue;
        survivors.push_back(idx);
    }
    std::sort(survivors.begin(), survivors.end());

    // The pairwise sweep is quadratic, so under exact_lp it is only worth
    // running when the candidate set is modest; the LP filter alone already
    // yields the parsimonious set. dominance_only always runs it: that is
    // what the mode means.
    constexpr std::size_t kPairwiseCap = 2048;
    if (mode == PruningMode::dominance_only || survivors.size() <= kPairwiseCap) {
        std::vector<std::size_t> undominated;
        std::vector<bool> alive(survivors.size(), true);
        for (std::size_t i = 0; i < survivors.size(); ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < survivors.size(); ++j) {
                if (!alive[j]) continue;
                if (dominates(vecs[survivors[i]].coeffs, vecs[survivors[j]].coeffs,
                              tolerance)) {
                    alive[j] = false;
                } else if (dominates(vecs[survivors[j]].coeffs, vecs[survivors[i]].coeffs,
                                     tolerance)) {
                    alive[i] = false;
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < survivors.size(); ++i)
            if (alive[i]) undominated.push_back(survivors[i]);
        survivors = std::move(undominated);
    }

    if (mode == PruningMode::exact_lp)
        survivors = lp_filter(vecs, survivors, tolerance);

    AlphaVectorSet out;
    out.stage = set.stage;
    out.vectors.reserve(survivors.size());
    for (std::size_t i : survivors) out.vectors.push_back(vecs[i]);
    return out;
}

AlphaVectorSet backup_stage(const PomdpModel& model, const AlphaVectorSet& next,
                            const SolveConfig& config) {
    return backup_impl(model, next, config, true);
}

AlphaVectorSet backup_stage_unpruned(const PomdpModel& model, const AlphaVectorSet& next,
                                     const SolveConfig& config) {
    return backup_impl(model, next, config, false);
}

PolicyStack solve(const PomdpModel& model, const SolveConfig& config) {
    check_config(config);
    require_valid(model);

    PolicyStack stack;
    stack.per_stage.resize(config.horizon + 1);
    stack.per_stage[config.horizon] =
        AlphaVectorSet{{{model.terminal_cost, kNoAction}}, config.horizon};
    for (int k = config.horizon - 1; k >= 0; --k) {
        stack.per_stage[k] = backup_stage(model, stack.per_stage[k + 1], config);
    }
    return stack;
}

namespace {

double bf_recurse(const PomdpModel& model, double discount, const Belief& belief,
                  int remaining) {
    if (remaining == 0) return terminal_value(model, belief);
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < model.n_actions; ++a) {
        double q = expected_stage_cost(model, belief, a);
        const Belief predicted = predict(model, belief, a);
        const Mat& o = model.observation[a];
        for (int th = 0; th < model.n_observations; ++th) {
            double lik = 0.0;
            for (int j = 0; j < model.n_states; ++j) lik += predicted[j] * o[j][th];
            if (lik <= 0.0) continue;  // unreachable branch
            const Belief posterior = update(model, predicted, a, th);
            q += discount * lik * bf_recurse(model, discount, posterior, remaining - 1);
        }
        best = std::min(best, q);
    }
    return best;
}

void check_bruteforce_guard(const PomdpModel& model, const SolveConfig& config) {
    const double leaves =
        std::pow(static_cast<double>(model.n_actions) * model.n_observations,
                 static_cast<double>(config.horizon));
    if (leaves > 1e7) {
        throw ResourceLimitError("belief tree needs about " + std::to_string(leaves) +
                                 " leaf evaluations; the guard is 1e7");
    }
}

}  // namespace

Vec bruteforce_action_values(const PomdpModel& model, const SolveConfig& config,
                             const Belief& belief) {
    check_config(config);
    require_valid(model);
    check_bruteforce_guard(model, config);
    if (config.horizon == 0) return {};

    Vec q(model.n_actions, 0.0);
    for (int a = 0; a < model.n_actions; ++a) {
        q[a] = expected_stage_cost(model, belief, a);
        const Belief predicted = predict(model, belief, a);
        const Mat& o = model.observation[a];
        for (int th = 0; th < model.n_observations; ++th) {
            double lik = 0.0;
            for (int j = 0; j < model.n_states; ++j) lik += predicted[j] * o[j][th];
            if (lik <= 0.0) continue;
            const Belief posterior = update(model, predicted, a, th);
            q[a] += config.discount * lik *
                    bf_recurse(model, config.discount, posterior, config.horizon - 1);
        }
    }
    return q;
}

Evaluation bruteforce_value(const PomdpModel& model, const SolveConfig& config,
                            const Belief& belief) {
    if (config.horizon == 0) {
        check_config(config);
        return {terminal_value(model, belief), kNoAction, -1};
    }
    const Vec q = bruteforce_action_values(model, config, belief);
    Evaluation best{q[0], 0, -1};
    for (int a = 1; a < model.n_actions; ++a) {
        if (q[a] < best.value) best = {q[a], a, -1};
    }
    return best;
}

MdpSolution solve_mdp(const PomdpModel& model, const SolveConfig& config) {
    check_config(config);
    require_valid(model);

    MdpSolution sol;
    sol.value.assign(config.horizon + 1, Vec(model.n_states, 0.0));
    sol.action.assign(config.horizon, std::vector<int>(model.n_states, 0));
    sol.value[config.horizon] = model.terminal_cost;

    for (int k = config.horizon - 1; k >= 0; --k) {
        for (int i = 0; i < model.n_states; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_action = 0;
            for (int a = 0; a < model.n_actions; ++a) {
                double q = model.stage_cost[a][i] +
                           config.discount * dot(model.transition[a][i], sol.value[k + 1]);
                if (q < best) {
                    best = q;
                    best_action = a;
                }
            }
            sol.value[k][i] = best;
            sol.action[k][i] = best_action;
        }
    }
    return sol;
}

}  // namespace dualsmpc
