#include "qbn/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace qbn {

std::string display_state(StateIndex x, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int g = 0; g < n; ++g)
        if (gene_bit(x, g, n)) s[static_cast<std::size_t>(g)] = '1';
    return s;
}

StateIndex parse_display_state(std::string_view bits) {
    StateIndex x = 0;
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw ParseError("state string must contain only '0' and '1'");
        x = (x << 1) | static_cast<StateIndex>(c - '0');
    }
    return x;
}

std::uint64_t reverse_bits(std::uint64_t x, int n) {
    std::uint64_t r = 0;
    for (int i = 0; i < n; ++i)
        if (x >> i & 1) r |= std::uint64_t{1} << (n - 1 - i);
    return r;
}

// ---------------------------------------------------------------------------
// Transition table
// ---------------------------------------------------------------------------

StateIndex TransitionTable::step_many(StateIndex x, std::uint64_t t) const {
    // Past |state space| steps the orbit is on its cycle, so the tail of a
    // long t can be reduced modulo the cycle length.
    std::uint64_t direct = std::min<std::uint64_t>(t, size());
    for (std::uint64_t i = 0; i < direct; ++i) x = succ[x];
    t -= direct;
    if (t == 0) return x;

    std::uint64_t period = 1;
    for (StateIndex y = succ[x]; y != x; y = succ[y]) ++period;
    for (std::uint64_t i = 0, r = t % period; i < r; ++i) x = succ[x];
    return x;
}

std::vector<StateIndex> TransitionTable::power_map(std::uint64_t t) const {
    std::vector<StateIndex> result(size());
    std::iota(result.begin(), result.end(), StateIndex{0});
    std::vector<StateIndex> base = succ;
    std::vector<StateIndex> tmp(size());
    while (t > 0) {
        if (t & 1) {
            for (std::uint64_t x = 0; x < size(); ++x) tmp[x] = base[result[x]];
            result.swap(tmp);
        }
        t >>= 1;
        if (t == 0) break;
        for (std::uint64_t x = 0; x < size(); ++x) tmp[x] = base[base[x]];
        base.swap(tmp);
    }
    return result;
}

bool eval_expr(const BoolExpr& e, StateIndex x, const NetworkSpec& spec) {
    switch (e.kind) {
    case NodeKind::Variable: {
        int g = e.var >= 0 ? e.var : spec.gene_index(e.name);
        if (g < 0) throw UndefinedVariable("undefined variable '" + e.name + "'");
        return gene_bit(x, g, spec.n()) != 0;
    }
    case NodeKind::Constant: return e.value;
    case NodeKind::Not: return !eval_expr(*e.lhs, x, spec);
    case NodeKind::And: return eval_expr(*e.lhs, x, spec) && eval_expr(*e.rhs, x, spec);
    case NodeKind::Or: return eval_expr(*e.lhs, x, spec) || eval_expr(*e.rhs, x, spec);
    }
    return false;
}

namespace {

// Flat postfix program for one rule; keeps the 2^n * n evaluation loop free
// of pointer chasing.
struct CompiledRule {
    enum class Op : std::uint8_t { PushVar, PushConst, Not, And, Or };
    struct Step {
        Op op;
        std::uint32_t arg; // PushVar: gene index; PushConst: 0/1
    };
    std::vector<Step> steps;

    void compile(const BoolExpr& e, const NetworkSpec& spec) {
        switch (e.kind) {
        case NodeKind::Variable: {
            int g = e.var >= 0 ? e.var : spec.gene_index(e.name);
            if (g < 0) throw UndefinedVariable("undefined variable '" + e.name + "'");
            steps.push_back({Op::PushVar, static_cast<std::uint32_t>(g)});
            return;
        }
        case NodeKind::Constant:
            steps.push_back({Op::PushConst, e.value ? 1u : 0u});
            return;
        case NodeKind::Not:
            compile(*e.lhs, spec);
            steps.push_back({Op::Not, 0});
            return;
        case NodeKind::And:
        case NodeKind::Or:
            compile(*e.lhs, spec);
            compile(*e.rhs, spec);
            steps.push_back({e.kind == NodeKind::And ? Op::And : Op::Or, 0});
            return;
        }
    }

    bool eval(StateIndex x, int n, std::uint32_t* stack) const {
        int top = -1;
        for (const Step& s : steps) {
            switch (s.op) {
            case Op::PushVar: stack[++top] = static_cast<std::uint32_t>(gene_bit(x, static_cast<int>(s.arg), n)); break;
            case Op::PushConst: stack[++top] = s.arg; break;
            case Op::Not: stack[top] ^= 1u; break;
            case Op::And: --top; stack[top] &= stack[top + 1]; break;
            case Op::Or: --top; stack[top] |= stack[top + 1]; break;
            }
        }
        return stack[0] != 0;
    }
};

} // namespace

TransitionTable build_transition_table(const NetworkSpec& spec) {
    const int n = spec.n();
    if (n <= 0) throw EmptyNetwork("network declares no genes");
    if (n > kMaxGenes)
        throw CapacityExceeded("transition table for " + std::to_string(n) +
                               " genes exceeds the " + std::to_string(kMaxGenes) + "-gene limit");

    std::vector<CompiledRule> rules(static_cast<std::size_t>(n));
    std::size_t max_steps = 1;
    for (int g = 0; g < n; ++g) {
        rules[g].compile(*spec.rules[g], spec);
        max_steps = std::max(max_steps, rules[g].steps.size());
    }

    TransitionTable table;
    table.n = n;
    table.succ.resize(std::uint64_t{1} << n);
    std::vector<std::uint32_t> stack(max_steps);
    for (std::uint64_t x = 0; x < table.size(); ++x) {
        StateIndex y = 0;
        for (int g = 0; g < n; ++g)
            if (rules[g].eval(static_cast<StateIndex>(x), n, stack.data()))
                y |= StateIndex{1} << (n - 1 - g);
        table.succ[x] = y;
    }
    return table;
}

// ---------------------------------------------------------------------------
// Attractor analysis
// ---------------------------------------------------------------------------

AttractorAnalysis analyze_attractors(const TransitionTable& table) {
    const std::uint64_t N = table.size();
    enum : std::uint8_t { White, Gray, Done };
    std::vector<std::uint8_t> color(N, White);
    std::vector<int> attr(N, -1);
    std::vector<int> depth(N, 0);
    std::vector<std::vector<StateIndex>> cycles;

    std::vector<StateIndex> path;
    for (std::uint64_t s0 = 0; s0 < N; ++s0) {
        if (color[s0] != White) continue;
        path.clear();
        StateIndex x = static_cast<StateIndex>(s0);
        while (color[x] == White) {
            color[x] = Gray;
            path.push_back(x);
            x = table.succ[x];
        }

        int base_attr;
        int base_depth;
        std::size_t transient_end = path.size();
        if (color[x] == Gray) {
            // Closed a new cycle inside the current path; split it off.
            std::size_t k = path.size();
            while (path[k - 1] != x) --k;
            --k;
            std::vector<StateIndex> cyc(path.begin() + static_cast<std::ptrdiff_t>(k), path.end());
            std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
            base_attr = static_cast<int>(cycles.size());
            base_depth = 0;
            for (StateIndex c : cyc) {
                attr[c] = base_attr;
                depth[c] = 0;
                color[c] = Done;
            }
            cycles.push_back(std::move(cyc));
            transient_end = k;
        } else {
            base_attr = attr[x];
            base_depth = depth[x];
        }
        for (std::size_t i = transient_end; i-- > 0;) {
            StateIndex p = path[i];
            attr[p] = base_attr;
            depth[p] = base_depth + static_cast<int>(transient_end - i);
            color[p] = Done;
        }
    }

    // Deterministic report order: ascending smallest cycle state.
    std::vector<int> order(cycles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return cycles[a][0] < cycles[b][0]; });
    std::vector<int> rank(cycles.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

    AttractorAnalysis out;
    out.attractors.resize(cycles.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        out.attractors[i].cycle_states = std::move(cycles[order[i]]);
    out.attractor_of.resize(N);
    for (std::uint64_t s = 0; s < N; ++s) {
        int a = rank[attr[s]];
        out.attractor_of[s] = a;
        ++out.attractors[a].basin_size;
        out.attractors[a].max_transient = std::max(out.attractors[a].max_transient, depth[s]);
    }
    return out;
}

std::vector<AttractorInfo> find_attractors(const TransitionTable& table) {
    return analyze_attractors(table).attractors;
}

std::vector<StateIndex> basin_of(const TransitionTable& table, const AttractorInfo& attractor) {
    AttractorAnalysis analysis = analyze_attractors(table);
    int which = -1;
    for (std::size_t i = 0; i < analysis.attractors.size(); ++i)
        if (analysis.attractors[i].cycle_states[0] == attractor.cycle_states[0])
            which = static_cast<int>(i);
    if (which < 0) throw NotOnAttractor("attractor does not belong to this table");

    std::vector<StateIndex> basin;
    basin.reserve(analysis.attractors[which].basin_size);
    for (std::uint64_t s = 0; s < table.size(); ++s)
        if (analysis.attractor_of[s] == which) basin.push_back(static_cast<StateIndex>(s));
    return basin;
}

int transient_horizon(const TransitionTable& table) {
    int horizon = 0;
    for (const AttractorInfo& a : analyze_attractors(table).attractors)
        horizon = std::max(horizon, a.max_transient);
    return horizon;
}

std::vector<StateIndex> unfold_cycle(const TransitionTable& table, StateIndex s) {
    std::vector<StateIndex> cycle{s};
    for (StateIndex x = table.succ[s]; x != s; x = table.succ[x]) {
        // A transient orbit never returns to s; it circles some other cycle
        // forever, so past 2^n collected states s cannot be on an attractor.
        if (cycle.size() >= table.size())
            throw NotOnAttractor("state " + display_state(s, table.n) +
                                 " is not on an attractor cycle");
        cycle.push_back(x);
    }
    return cycle;
}

void write_stg(const TransitionTable& table, std::ostream& os, bool as_display_strings) {
    for (std::uint64_t x = 0; x < table.size(); ++x) {
        if (as_display_strings)
            os << display_state(static_cast<StateIndex>(x), table.n) << ' '
               << display_state(table.succ[x], table.n) << '\n';
        else
            os << x << ' ' << table.succ[x] << '\n';
    }
}

} // namespace qbn
