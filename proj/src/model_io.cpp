#include "dualsmpc/model_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include "dualsmpc/text.hpp"

namespace dualsmpc {

namespace {

std::string compose_message(ParseError::Kind kind, int line, int column,
                            const std::string& message) {
    std::string s = ParseError::kind_name(kind);
    if (line > 0) {
        s += " at line " + std::to_string(line);
        if (column > 0) s += ", column " + std::to_string(column);
    }
    s += ": " + message;
    return s;
}

}  // namespace

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : std::runtime_error(compose_message(kind, line, column, message)),
      kind_(kind),
      line_(line),
      column_(column) {}

const char* ParseError::kind_name(Kind kind) {
    switch (kind) {
        case Kind::syntax: return "syntax error";
        case Kind::dimension: return "dimension mismatch";
        case Kind::stochasticity: return "stochasticity violation";
        case Kind::unknown_name: return "unknown name";
        case Kind::duplicate: return "duplicate definition";
        case Kind::value: return "value out of range";
    }
    return "parse error";
}

namespace {

using Kind = ParseError::Kind;

struct Token {
    std::string text;
    int line = 0;
    int col = 0;
};

[[noreturn]] void fail(Kind kind, const Token& at, const std::string& message) {
    throw ParseError(kind, at.line, at.col, message);
}

/// Splits into comment-stripped token lines; ':' is always its own token.
std::vector<std::vector<Token>> tokenize(std::istream& in) {
    std::vector<std::vector<Token>> lines;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::vector<Token> toks;
        std::size_t i = 0;
        while (i < raw.size()) {
            const unsigned char c = static_cast<unsigned char>(raw[i]);
            if (std::isspace(c)) {
                ++i;
                continue;
            }
            if (raw[i] == ':') {
                toks.push_back({":", lineno, static_cast<int>(i) + 1});
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < raw.size() && raw[j] != ':' &&
                   !std::isspace(static_cast<unsigned char>(raw[j])))
                ++j;
            toks.push_back({raw.substr(i, j - i), lineno, static_cast<int>(i) + 1});
            i = j;
        }
        if (!toks.empty()) lines.push_back(std::move(toks));
    }
    return lines;
}

bool parse_int(const std::string& text, int& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (errno != 0 || end != text.c_str() + text.size()) return false;
    if (v < -1000000000L || v > 1000000000L) return false;
    out = static_cast<int>(v);
    return true;
}

double require_real(const Token& tok) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.text.c_str(), &end);
    if (errno == ERANGE || end != tok.text.c_str() + tok.text.size() ||
        tok.text.empty() || !std::isfinite(v))
        fail(Kind::syntax, tok, "expected a number, got '" + tok.text + "'");
    return v;
}

Mat uniform_matrix(int rows, int cols) { return Mat(rows, Vec(cols, 1.0 / cols)); }

Mat identity_matrix(int n) {
    Mat m(n, Vec(n, 0.0));
    for (int i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

class PomdpParser {
public:
    ParseResult run(std::istream& in) {
        lines_ = tokenize(in);
        while (li_ < lines_.size()) {
            const std::vector<Token>& line = lines_[li_];
            const std::string& head = line[0].text;
            if (head == "discount") parse_discount(line);
            else if (head == "values") parse_values(line);
            else if (head == "states") parse_space(line, state_names_, n_states_, "state");
            else if (head == "actions") parse_space(line, action_names_, n_actions_, "action");
            else if (head == "observations") parse_space(line, obs_names_, n_obs_, "observation");
            else if (head == "start") parse_start(line);
            else if (head == "T") parse_table(line, /*is_transition=*/true);
            else if (head == "O") parse_table(line, /*is_transition=*/false);
            else if (head == "R") parse_cost(line);
            else if (head == "terminal") parse_terminal(line);
            else fail(Kind::syntax, line[0], "unknown directive '" + head + "'");
            ++li_;
        }
        return finalize();
    }

private:
    // --- token-level helpers -------------------------------------------------

    const Token& tok_at(const std::vector<Token>& line, std::size_t idx) const {
        if (idx >= line.size())
            fail(Kind::syntax, line.back(), "unexpected end of line after '" +
                                                line.back().text + "'");
        return line[idx];
    }

    void expect_colon(const std::vector<Token>& line, std::size_t idx) const {
        const Token& t = tok_at(line, idx);
        if (t.text != ":") fail(Kind::syntax, t, "expected ':', got '" + t.text + "'");
    }

    void expect_end(const std::vector<Token>& line, std::size_t idx) const {
        if (idx < line.size())
            fail(Kind::syntax, line[idx], "unexpected token '" + line[idx].text + "'");
    }

    /// Resolves a state/action/observation token: '*' -> -1 when wildcards
    /// are allowed, a decimal index, or a declared name.
    int resolve(const Token& tok, const std::vector<std::string>& names, int count,
                const char* what, bool allow_wildcard) const {
        if (tok.text == "*") {
            if (!allow_wildcard)
                fail(Kind::syntax, tok, std::string("'*' is not allowed for the ") + what);
            return -1;
        }
        int idx = 0;
        if (parse_int(tok.text, idx)) {
            if (idx < 0 || idx >= count)
                fail(Kind::dimension, tok, std::string(what) + " index " + tok.text +
                                               " out of range [0," +
                                               std::to_string(count - 1) + "]");
            return idx;
        }
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == tok.text) return static_cast<int>(i);
        fail(Kind::unknown_name, tok,
             std::string("'") + tok.text + "' is not a declared " + what);
    }

    std::vector<int> broadcast(int resolved, int count) const {
        if (resolved >= 0) return {resolved};
        std::vector<int> all(count);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }

    void require_tables(const Token& head) const {
        if (!allocated_)
            fail(Kind::syntax, head,
                 "declare states:, actions: and observations: before '" + head.text +
                     ":'");
    }

    // --- header directives ---------------------------------------------------

    void parse_discount(const std::vector<Token>& line) {
        if (discount_) fail(Kind::duplicate, line[0], "discount: appears twice");
        expect_colon(line, 1);
        const double v = require_real(tok_at(line, 2));
        expect_end(line, 3);
        if (!(v >= 0.0 && v <= 1.0))
            fail(Kind::value, line[2], "discount must be in [0,1]");
        discount_ = v;
    }

    void parse_values(const std::vector<Token>& line) {
        if (values_seen_) fail(Kind::duplicate, line[0], "values: appears twice");
        expect_colon(line, 1);
        const Token& t = tok_at(line, 2);
        expect_end(line, 3);
        if (t.text == "reward") values_reward_ = true;
        else if (t.text != "cost")
            fail(Kind::syntax, t, "values: must be 'reward' or 'cost'");
        values_seen_ = true;
    }

    void parse_space(const std::vector<Token>& line, std::vector<std::string>& names,
                     int& count, const char* what) {
        if (count > 0)
            fail(Kind::duplicate, line[0], line[0].text + ": appears twice");
        expect_colon(line, 1);
        tok_at(line, 2);  // at least one token required
        int n = 0;
        if (line.size() == 3 && parse_int(line[2].text, n)) {
            if (n < 1) fail(Kind::value, line[2], "count must be >= 1");
            count = n;
        } else {
            for (std::size_t i = 2; i < line.size(); ++i) {
                int dummy;
                if (parse_int(line[i].text, dummy))
                    fail(Kind::syntax, line[i],
                         std::string(what) + " names must not be integers");
                for (const std::string& seen : names)
                    if (seen == line[i].text)
                        fail(Kind::duplicate, line[i],
                             std::string(what) + " name '" + line[i].text +
                                 "' repeated");
                names.push_back(line[i].text);
            }
            count = static_cast<int>(names.size());
        }
        if (count > 100000) fail(Kind::value, line[2], "declared size too large");
        maybe_allocate(line[0]);
    }

    void maybe_allocate(const Token& at) {
        if (allocated_ || n_states_ < 1 || n_actions_ < 1 || n_obs_ < 1) return;
        const long long t_cells = 1LL * n_actions_ * n_states_ * n_states_;
        const long long o_cells = 1LL * n_actions_ * n_states_ * n_obs_;
        if (t_cells > 50000000LL || o_cells > 50000000LL)
            fail(Kind::value, at, "declared sizes are too large for exact solving");
        T_.assign(n_actions_, Mat(n_states_, Vec(n_states_, 0.0)));
        O_.assign(n_actions_, Mat(n_states_, Vec(n_obs_, 0.0)));
        R_.assign(n_actions_, Vec(n_states_, 0.0));
        terminal_.assign(n_states_, 0.0);
        t_full_.assign(n_actions_, false);
        o_full_.assign(n_actions_, false);
        t_line_.assign(n_actions_, 0);
        o_line_.assign(n_actions_, 0);
        allocated_ = true;
    }

    void parse_start(const std::vector<Token>& line) {
        if (start_) fail(Kind::duplicate, line[0], "start: appears twice");
        if (n_states_ < 1)
            fail(Kind::syntax, line[0], "start: requires states: first");
        expect_colon(line, 1);
        const Token& first = tok_at(line, 2);
        if (line.size() == 3 && first.text == "uniform") {
            start_ = Vec(n_states_, 1.0 / n_states_);
            return;
        }
        int idx = 0;
        const bool is_index = parse_int(first.text, idx);
        if (line.size() == 3 && !is_index) {
            // A single name: point mass on that state.
            const int s = resolve(first, state_names_, n_states_, "state", false);
            Vec p(n_states_, 0.0);
            p[s] = 1.0;
            start_ = p;
            return;
        }
        if (line.size() == 3 && is_index && n_states_ > 1) {
            // A single integer with several states: a state index.
            if (idx < 0 || idx >= n_states_)
                fail(Kind::dimension, first, "state index " + first.text +
                                                 " out of range [0," +
                                                 std::to_string(n_states_ - 1) + "]");
            Vec p(n_states_, 0.0);
            p[idx] = 1.0;
            start_ = p;
            return;
        }
        if (static_cast<int>(line.size()) - 2 != n_states_)
            fail(Kind::dimension, first,
                 "start: has " + std::to_string(line.size() - 2) +
                     " entries, expected " + std::to_string(n_states_));
        Vec p(n_states_);
        double sum = 0.0;
        for (int i = 0; i < n_states_; ++i) {
            p[i] = require_real(line[2 + i]);
            if (p[i] < 0.0)
                fail(Kind::value, line[2 + i], "start probabilities must be >= 0");
            sum += p[i];
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            fail(Kind::stochasticity, line[0],
                 "start: sums to " + format_g17(sum) + ", expected 1");
        start_ = p;
    }

    // --- probability tables --------------------------------------------------

    void parse_table(const std::vector<Token>& line, bool is_transition) {
        require_tables(line[0]);
        const char* what = is_transition ? "transition" : "observation";
        const int cols = is_transition ? n_states_ : n_obs_;
        std::vector<Mat>& table = is_transition ? T_ : O_;
        std::vector<bool>& full = is_transition ? t_full_ : o_full_;
        std::vector<int>& def_line = is_transition ? t_line_ : o_line_;

        expect_colon(line, 1);
        const int a = resolve(tok_at(line, 2), action_names_, n_actions_, "action", true);

        // `T: a` alone: a matrix block (or a keyword line) follows.
        // `T: a uniform|identity`: keyword on the same line.
        // `T: a : i : j p`: a single entry.
        if (line.size() == 3 || (line.size() == 4 && line[3].text != ":")) {
            Mat m;
            if (line.size() == 4) {
                m = keyword_matrix(line[3], what, cols);
            } else if (li_ + 1 < lines_.size() && lines_[li_ + 1].size() == 1 &&
                       (lines_[li_ + 1][0].text == "uniform" ||
                        lines_[li_ + 1][0].text == "identity")) {
                ++li_;
                m = keyword_matrix(lines_[li_][0], what, cols);
            } else {
                m = read_matrix_block(line[0], n_states_, cols, what);
            }
            for (int act : broadcast(a, n_actions_)) {
                if (full[act])
                    fail(Kind::duplicate, line[0],
                         std::string(what) + " matrix for action '" +
                             action_label(act) + "' defined twice");
                table[act] = m;
                full[act] = true;
                if (def_line[act] == 0) def_line[act] = line[0].line;
            }
            return;
        }

        // Single entry.
        expect_colon(line, 3);
        const int i = resolve(tok_at(line, 4), state_names_, n_states_, "state", true);
        expect_colon(line, 5);
        const int j = resolve(tok_at(line, 6),
                              is_transition ? state_names_ : obs_names_, cols,
                              is_transition ? "state" : "observation", true);
        const double p = require_real(tok_at(line, 7));
        expect_end(line, 8);
        if (p < 0.0)
            fail(Kind::value, line[7], "probabilities must be >= 0");
        for (int act : broadcast(a, n_actions_)) {
            for (int row : broadcast(i, n_states_))
                for (int col : broadcast(j, cols)) table[act][row][col] = p;
            if (def_line[act] == 0) def_line[act] = line[0].line;
        }
    }

    Mat keyword_matrix(const Token& tok, const std::string& what, int cols) const {
        if (tok.text == "uniform") return uniform_matrix(n_states_, cols);
        if (tok.text == "identity") {
            if (cols != n_states_)
                fail(Kind::dimension, tok,
                     "identity needs a square matrix; " + what + " is " +
                         std::to_string(n_states_) + "x" + std::to_string(cols));
            return identity_matrix(n_states_);
        }
        fail(Kind::syntax, tok,
             "expected 'uniform', 'identity' or ':', got '" + tok.text + "'");
    }

    Mat read_matrix_block(const Token& head, int rows, int cols,
                          const std::string& what) {
        Mat m(rows, Vec(cols));
        for (int r = 0; r < rows; ++r) {
            if (li_ + 1 >= lines_.size())
                fail(Kind::syntax, head,
                     "unexpected end of file inside the " + what + " matrix");
            ++li_;
            const std::vector<Token>& row = lines_[li_];
            if (static_cast<int>(row.size()) != cols)
                fail(Kind::dimension, row[0],
                     what + " matrix row " + std::to_string(r) + " has " +
                         std::to_string(row.size()) + " entries, expected " +
                         std::to_string(cols));
            for (int c = 0; c < cols; ++c) {
                m[r][c] = require_real(row[c]);
                if (m[r][c] < 0.0)
                    fail(Kind::value, row[c], "probabilities must be >= 0");
            }
        }
        return m;
    }

    // --- costs and the terminal extension -------------------------------------

    void parse_cost(const std::vector<Token>& line) {
        require_tables(line[0]);
        expect_colon(line, 1);
        const int a = resolve(tok_at(line, 2), action_names_, n_actions_, "action", true);
        expect_colon(line, 3);
        const int i = resolve(tok_at(line, 4), state_names_, n_states_, "state", true);
        expect_colon(line, 5);
        const Token& next_state = tok_at(line, 6);
        expect_colon(line, 7);
        const Token& obs = tok_at(line, 8);
        if (next_state.text != "*" || obs.text != "*")
            fail(Kind::syntax, next_state.text != "*" ? next_state : obs,
                 "only '*' is supported in the next-state and observation "
                 "positions (costs depend on state and action only)");
        const double v = require_real(tok_at(line, 9));
        expect_end(line, 10);
        for (int act : broadcast(a, n_actions_))
            for (int row : broadcast(i, n_states_)) R_[act][row] = v;
    }

    void parse_terminal(const std::vector<Token>& line) {
        require_tables(line[0]);
        if (terminal_seen_) fail(Kind::duplicate, line[0], "terminal: appears twice");
        expect_colon(line, 1);
        if (static_cast<int>(line.size()) - 2 != n_states_)
            fail(Kind::dimension, tok_at(line, 2),
                 "terminal: has " + std::to_string(line.size() - 2) +
                     " entries, expected " + std::to_string(n_states_));
        for (int i = 0; i < n_states_; ++i) terminal_[i] = require_real(line[2 + i]);
        terminal_seen_ = true;
    }

    // --- assembly --------------------------------------------------------------

    std::string action_label(int a) const {
        return a < static_cast<int>(action_names_.size()) ? action_names_[a]
                                                          : std::to_string(a);
    }

    /// Negates one cost table and shifts it up to stay nonnegative. A uniform
    /// shift adds the same amount to every policy's cost, so the optimal
    /// decisions are unchanged.
    double negate_and_shift(std::vector<Vec*> tables) {
        double min_entry = 0.0;
        for (Vec* t : tables)
            for (double& v : *t) {
                v = -v;
                min_entry = std::min(min_entry, v);
            }
        if (min_entry < 0.0)
            for (Vec* t : tables)
                for (double& v : *t) v += -min_entry;
        return -min_entry;
    }

    ParseResult finalize() {
        if (!allocated_) {
            throw ParseError(Kind::syntax, 0, 0,
                             "missing states:/actions:/observations: declarations");
        }

        ParseResult result;
        if (values_reward_) {
            std::vector<Vec*> stage;
            for (Vec& r : R_) stage.push_back(&r);
            const double stage_shift = negate_and_shift(stage);
            const double terminal_shift = negate_and_shift({&terminal_});
            std::string note = "values: reward converted to costs by negation";
            if (stage_shift > 0.0 || terminal_shift > 0.0) {
                note += "; shifted stage costs by " + format_shortest(stage_shift) +
                        " and terminal costs by " + format_shortest(terminal_shift) +
                        " to keep them nonnegative (optimal decisions unchanged)";
            }
            result.warnings.push_back(note);
        }

        check_rows(T_, t_line_, "transition", n_states_);
        check_rows(O_, o_line_, "observation", n_obs_);

        for (int a = 0; a < n_actions_; ++a)
            for (int i = 0; i < n_states_; ++i)
                if (R_[a][i] < 0.0)
                    throw ParseError(Kind::value, 0, 0,
                                     "stage cost for action '" + action_label(a) +
                                         "' state " + std::to_string(i) + " is " +
                                         format_shortest(R_[a][i]) +
                                         "; costs must be >= 0");
        for (int i = 0; i < n_states_; ++i)
            if (terminal_[i] < 0.0)
                throw ParseError(Kind::value, 0, 0,
                                 "terminal cost for state " + std::to_string(i) +
                                     " is " + format_shortest(terminal_[i]) +
                                     "; costs must be >= 0");

        PomdpModel& m = result.model;
        m.n_states = n_states_;
        m.n_actions = n_actions_;
        m.n_observations = n_obs_;
        m.transition = std::move(T_);
        m.observation = std::move(O_);
        m.stage_cost = std::move(R_);
        m.terminal_cost = std::move(terminal_);
        m.labels.states = std::move(state_names_);
        m.labels.actions = std::move(action_names_);
        m.labels.observations = std::move(obs_names_);

        const ValidationReport report = validate_model(m);
        if (!report.ok()) {
            const std::string& first = report.violations.front();
            Kind kind = Kind::dimension;
            if (first.find("sum") != std::string::npos) kind = Kind::stochasticity;
            else if (first.find("probability") != std::string::npos ||
                     first.find("cost") != std::string::npos)
                kind = Kind::value;
            throw ParseError(kind, 0, 0, first);
        }

        result.discount = discount_;
        result.start = start_;
        return result;
    }

    void check_rows(const std::vector<Mat>& table, const std::vector<int>& def_line,
                    const char* what, int cols) const {
        (void)cols;
        for (int a = 0; a < n_actions_; ++a) {
            for (int i = 0; i < n_states_; ++i) {
                double sum = 0.0;
                for (double p : table[a][i]) sum += p;
                if (std::abs(sum - 1.0) > kProbTolerance) {
                    std::string msg = std::string(what) + " matrix for action '" +
                                      action_label(a) + "' row " +
                                      std::to_string(i) + " sums to " +
                                      format_g17(sum);
                    if (def_line[a] == 0)
                        msg = std::string(what) + " matrix for action '" +
                              action_label(a) + "' is never defined";
                    throw ParseError(Kind::stochasticity, def_line[a], 0, msg);
                }
            }
        }
    }

    std::vector<std::vector<Token>> lines_;
    std::size_t li_ = 0;

    std::optional<double> discount_;
    bool values_seen_ = false;
    bool values_reward_ = false;
    std::vector<std::string> state_names_, action_names_, obs_names_;
    int n_states_ = 0, n_actions_ = 0, n_obs_ = 0;
    bool allocated_ = false;

    std::vector<Mat> T_, O_;
    std::vector<Vec> R_;
    Vec terminal_;
    std::optional<Vec> start_;
    bool terminal_seen_ = false;
    std::vector<bool> t_full_, o_full_;
    std::vector<int> t_line_, o_line_;
};

bool names_serializable(const std::vector<std::string>& names, int count) {
    if (static_cast<int>(names.size()) != count) return false;
    for (const std::string& n : names) {
        if (n.empty()) return false;
        int dummy;
        if (parse_int(n, dummy)) return false;
        for (char c : n)
            if (std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '#' ||
                c == '*')
                return false;
    }
    return true;
}

void write_space(std::ostream& os, const char* directive,
                 const std::vector<std::string>& names, int count) {
    os << directive << ':';
    if (names_serializable(names, count)) {
        for (const std::string& n : names) os << ' ' << n;
    } else {
        os << ' ' << count;
    }
    os << '\n';
}

bool is_identity(const Mat& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != m.size()) return false;
        for (std::size_t j = 0; j < m[i].size(); ++j)
            if (m[i][j] != (i == j ? 1.0 : 0.0)) return false;
    }
    return true;
}

bool is_uniform(const Mat& m) {
    for (const Vec& row : m) {
        const double u = 1.0 / static_cast<double>(row.size());
        for (double p : row)
            if (p != u) return false;
    }
    return true;
}

void write_table(std::ostream& os, const char* directive, const std::vector<Mat>& table,
                 bool prefer_identity) {
    for (std::size_t a = 0; a < table.size(); ++a) {
        const Mat& m = table[a];
        const bool identity = is_identity(m);
        const bool uniform = is_uniform(m);
        if (prefer_identity ? identity : uniform) {
            os << directive << ": " << a << (prefer_identity ? " identity" : " uniform")
               << '\n';
        } else if (prefer_identity ? uniform : identity) {
            os << directive << ": " << a << (prefer_identity ? " uniform" : " identity")
               << '\n';
        } else {
            os << directive << ": " << a << '\n';
            for (const Vec& row : m) {
                for (std::size_t j = 0; j < row.size(); ++j)
                    os << (j ? " " : "") << format_g17(row[j]);
                os << '\n';
            }
        }
    }
}

}  // namespace

ParseResult parse_pomdp(std::istream& in) { return PomdpParser().run(in); }

ParseResult parse_pomdp(const std::string& text) {
    std::istringstream in(text);
    return parse_pomdp(in);
}

std::string serialize(const PomdpModel& model) {
    std::ostringstream os;
    os << "discount: 1\n";
    os << "values: cost\n";
    write_space(os, "states", model.labels.states, model.n_states);
    write_space(os, "actions", model.labels.actions, model.n_actions);
    write_space(os, "observations", model.labels.observations, model.n_observations);
    write_table(os, "T", model.transition, /*prefer_identity=*/true);
    write_table(os, "O", model.observation, /*prefer_identity=*/false);
    for (int a = 0; a < model.n_actions; ++a)
        for (int i = 0; i < model.n_states; ++i)
            os << "R: " << a << " : " << i << " : * : * "
               << format_g17(model.stage_cost[a][i]) << '\n';
    bool any_terminal = false;
    for (double v : model.terminal_cost) any_terminal = any_terminal || v != 0.0;
    if (any_terminal) {
        os << "# terminal: is a nonstandard extension (cost of stopping per state)\n";
        os << "terminal:";
        for (double v : model.terminal_cost) os << ' ' << format_g17(v);
        os << '\n';
    }
    return os.str();
}

PomdpModel healthcare_model() {
    const Mat progress = {{0.8, 0.2, 0.0}, {0.0, 0.9, 0.1}, {0.0, 0.0, 1.0}};
    const Mat stay_or_recover = {{0.8, 0.2, 0.0}, {0.75, 0.25, 0.0}, {0.0, 0.0, 1.0}};
    const double third = 1.0 / 3.0;
    const Mat flat = {{third, third, third}, {third, third, third}, {third, third, third}};
    const Mat coarse = {{0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}, {0.3, 0.3, 0.4}};
    const Mat sharp = {{0.9, 0.05, 0.05}, {0.05, 0.9, 0.05}, {0.05, 0.05, 0.9}};

    PomdpModel m;
    m.n_states = 3;
    m.n_actions = 4;
    m.n_observations = 3;
    m.transition = {progress, progress, identity_matrix(3), stay_or_recover};
    m.observation = {flat, coarse, sharp, coarse};
    m.stage_cost = {{0.0, 5.0, 5.0}, {1.0, 1.0, 1.0}, {4.0, 3.0, 4.0}, {4.0, 2.0, 4.0}};
    m.terminal_cost = {0.0, 4.0, 30.0};
    m.labels.states = {"stage1", "stage2", "stage3"};
    m.labels.actions = {"skip", "appointment", "diagnose", "treatment"};
    m.labels.observations = {"obs1", "obs2", "obs3"};
    return m;
}

void write_policy(std::ostream& os, const PolicyStack& stack) {
    const int n = stack.per_stage.empty() || stack.per_stage[0].vectors.empty()
                      ? 0
                      : static_cast<int>(stack.per_stage[0].vectors[0].coeffs.size());
    os << "# policy stages=" << stack.per_stage.size() << " states=" << n << '\n';
    for (std::size_t k = 0; k < stack.per_stage.size(); ++k) {
        const AlphaVectorSet& set = stack.per_stage[k];
        os << "stage " << k << " vectors " << set.vectors.size() << '\n';
        for (const AlphaVector& v : set.vectors) {
            os << v.action;
            for (double c : v.coeffs) os << ' ' << format_g17(c);
            os << '\n';
        }
    }
}

std::string policy_text(const PolicyStack& stack) {
    std::ostringstream os;
    write_policy(os, stack);
    return os.str();
}

PolicyStack read_policy(std::istream& in) {
    const std::vector<std::vector<Token>> lines = tokenize(in);
    PolicyStack stack;
    int n_coeffs = -1;
    std::size_t li = 0;
    while (li < lines.size()) {
        const std::vector<Token>& head = lines[li];
        if (head.size() != 4 || head[0].text != "stage" || head[2].text != "vectors")
            fail(Kind::syntax, head[0],
                 "expected 'stage <k> vectors <m>', got '" + head[0].text + "...'");
        int stage = 0, count = 0;
        if (!parse_int(head[1].text, stage) ||
            stage != static_cast<int>(stack.per_stage.size()))
            fail(Kind::syntax, head[1],
                 "stages must be numbered consecutively from 0");
        if (!parse_int(head[3].text, count) || count < 1)
            fail(Kind::value, head[3], "each stage needs at least one vector");
        ++li;
        AlphaVectorSet set;
        set.stage = stage;
        for (int v = 0; v < count; ++v, ++li) {
            if (li >= lines.size())
                fail(Kind::syntax, head[0],
                     "unexpected end of file inside stage " + std::to_string(stage));
            const std::vector<Token>& row = lines[li];
            int action = 0;
            if (!parse_int(row[0].text, action) || action < -1)
                fail(Kind::syntax, row[0], "expected an action index, got '" +
                                               row[0].text + "'");
            if (n_coeffs < 0) n_coeffs = static_cast<int>(row.size()) - 1;
            if (static_cast<int>(row.size()) - 1 != n_coeffs || n_coeffs < 1)
                fail(Kind::dimension, row[0],
                     "vector has " + std::to_string(row.size() - 1) +
                         " coefficients, expected " + std::to_string(n_coeffs));
            AlphaVector vec;
            vec.action = action;
            vec.coeffs.resize(n_coeffs);
            for (int c = 0; c < n_coeffs; ++c) vec.coeffs[c] = require_real(row[1 + c]);
            set.vectors.push_back(std::move(vec));
        }
        stack.per_stage.push_back(std::move(set));
    }
    if (stack.per_stage.empty())
        throw ParseError(Kind::syntax, 0, 0, "policy file has no stages");
    return stack;
}

}  // namespace dualsmpc
