// Command-line frontend: expansion, corpus verification, covering-system
// decomposition, coset inspection, and matrix search.

#include "thetaforge/corpus.hpp"
#include "thetaforge/decompose.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>

using namespace thetaforge;

namespace {

std::vector<Rational> parse_weights(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(Rational::parse(cell));
    return out;
}

std::vector<long long> parse_ints(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoll(cell));
    return out;
}

nlohmann::json series_json(const Series& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, c] : s.terms()) {
        nlohmann::json t;
        t["qexp"] = k.qexp.str();
        nlohmann::json v = nlohmann::json::object();
        for (const auto& [sym, e] : k.vexp) v[sym] = e.str();
        t["vexp"] = v;
        t["coeff"] = c.str();
        arr.push_back(std::move(t));
    }
    return arr;
}

int run_expand(const std::string& expr_text, const std::string& order_text, bool structured) {
    Rational order = Rational::parse(order_text);
    Series s = evaluate(parse_expr(expr_text), order);
    if (structured) {
        nlohmann::json j;
        j["order"] = order.str();
        j["terms"] = series_json(s);
        std::cout << j.dump(2) << "\n";
    } else {
        if (s.is_zero()) {
            std::cout << "0\n";
            return 0;
        }
        for (const auto& [k, c] : s.terms())
            std::cout << k.str() << " : " << c.str() << "\n";
    }
    return 0;
}

Corpus load_corpus(const std::string& override_path) {
    std::string dir = override_path.empty() ? Corpus::default_directory() : override_path;
    if (dir.empty())
        throw std::runtime_error("no corpus directory (set --corpus or $THETAFORGE_CORPUS)");
    return Corpus::load_directory(dir);
}

int run_verify(const std::string& name, bool all, const std::string& order_text,
               bool structured, const std::string& corpus_path, bool sequential) {
    Corpus corpus = load_corpus(corpus_path);
    std::optional<Rational> order;
    if (!order_text.empty()) order = Rational::parse(order_text);

    std::vector<VerifyReport> reports;
    if (all) {
        reports = verify_all(corpus, order, !sequential);
    } else {
        auto matches = corpus.find_all(name);
        if (matches.empty()) {
            std::cerr << "no corpus entry matches '" << name << "'\n";
            return 2;
        }
        for (const auto* id : matches) reports.push_back(verify(*id, order));
    }
    std::cout << (structured ? report_json(reports) + "\n" : report_table(reports));
    return any_failure(reports) ? 1 : 0;
}

int run_decompose(const std::string& expr_text, const std::string& matrix_text,
                  const std::string& weights_text, const std::string& reps_mode,
                  const std::string& window_mode, const std::string& mode,
                  const std::string& check_order_text, bool structured) {
    IntMatrix b = IntMatrix::parse(matrix_text);
    ThetaCombo product = lower_theta_combo(parse_expr(expr_text));
    if (product.terms().size() != 1)
        throw std::runtime_error("decompose expects a single product of theta factors");
    const ComboTerm& term = product.terms().front();
    if (term.scalar != 1 || !term.coeff.is_one())
        throw std::runtime_error("decompose expects an unscaled product of theta factors");
    std::vector<ThetaFactor> factors = term.factors;

    if (!weights_text.empty()) {
        // Optional cross-check: supplied weights must be proportional to the
        // factors' intrinsic q-weights.
        std::vector<Rational> w = parse_weights(weights_text);
        if (w.size() != factors.size())
            throw std::runtime_error("--weights length does not match factor count");
        Rational ratio(0);
        for (size_t i = 0; i < w.size(); ++i) {
            Rational intrinsic = factors[i].weight();
            Rational r = w[i] / intrinsic;
            if (!(r > Rational(0))) throw std::runtime_error("weights must be positive");
            if (i == 0)
                ratio = r;
            else if (!(r == ratio))
                throw std::runtime_error("--weights are not proportional to the factors' q-weights");
        }
    }

    ResidueWindow window =
        window_mode == "centered" ? ResidueWindow::Centered : ResidueWindow::Standard;
    PreparedInput prep = prepare_input(factors, b, window);
    if (reps_mode == "theorem" && prep.kind != RepsKind::Theorem)
        throw std::runtime_error(
            "theorem-style representatives refused: no adjugate entry coprime to det");
    if (reps_mode == "general" && prep.kind == RepsKind::Theorem) {
        prep.input.reps = cosets(b);
        prep.kind = RepsKind::General;
    }

    ThetaCombo combo;
    if (mode == "sum")
        combo = decompose_sum_diff(prep.input, CombineMode::Sum);
    else if (mode == "diff")
        combo = decompose_sum_diff(prep.input, CombineMode::Diff);
    else
        combo = decompose(prep.input);

    // The emitted combination is checked against the product (or the signed
    // product pair) before being printed; a mismatch here is an engine bug.
    Rational check_order = Rational::parse(check_order_text);
    Series expect;
    if (mode == "product") {
        expect = expand_combo(product, check_order);
    } else {
        ThetaCombo flipped;
        for (const auto& t : product.terms()) {
            ComboTerm ft = t;
            for (auto& f : ft.factors)
                f = ThetaFactor(f.first().negated(), f.second().negated());
            flipped.push(std::move(ft));
        }
        Series plain = expand_combo(product, check_order);
        Series neg = expand_combo(flipped, check_order);
        expect = mode == "sum" ? plain + neg : plain - neg;
    }
    if (auto mm = first_mismatch(expect, expand_combo(combo, check_order), check_order))
        throw std::runtime_error("internal check failed at " + mm->key.str());
    std::string stamp = "verified to order " + check_order.str();

    std::string reps_note = prep.kind == RepsKind::Theorem
                                ? "theorem representatives r*e_" +
                                      std::to_string(prep.theorem_column + 1)
                                : "general coset representatives (theorem form refused)";
    if (structured) {
        nlohmann::json j;
        j["combo"] = print_combo(combo);
        j["reps"] = reps_note;
        j["terms"] = combo.terms().size();
        j["check_order"] = check_order.str();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << print_combo(combo) << "\n";
        std::cout << "# reps: " << reps_note << "\n";
        std::cout << "# " << stamp << "\n";
    }
    return 0;
}

int run_cosets(const std::string& matrix_text, bool structured) {
    IntMatrix b = IntMatrix::parse(matrix_text);
    long long d = det(b);
    SmithData s = smith(b);
    CosetSystem cs = cosets(b);
    if (structured) {
        nlohmann::json j;
        j["det"] = d;
        nlohmann::json diag = nlohmann::json::array();
        for (int i = 0; i < b.n(); ++i) diag.push_back(s.D.at(i, i));
        j["smith_diagonal"] = diag;
        j["determinantal_divisors"] = s.dk;
        j["invariant_factors"] = s.sk;
        nlohmann::json reps = nlohmann::json::array();
        for (const auto& r : cs.reps) reps.push_back(r);
        j["reps"] = reps;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "det = " << d << "\n";
        std::cout << "smith D = diag(";
        for (int i = 0; i < b.n(); ++i) std::cout << (i ? "," : "") << s.D.at(i, i);
        std::cout << ")\n";
        std::cout << "determinantal divisors:";
        for (auto v : s.dk) std::cout << " " << v;
        std::cout << "\ninvariant factors:";
        for (auto v : s.sk) std::cout << " " << v;
        std::cout << "\n" << cs.reps.size() << " coset representatives:\n";
        for (const auto& r : cs.reps) {
            std::cout << "  (";
            for (size_t i = 0; i < r.size(); ++i) std::cout << (i ? "," : "") << r[i];
            std::cout << ")\n";
        }
    }
    return 0;
}

int run_search(int n, const std::string& weights_text, int bound, long long max_det,
               bool structured) {
    std::vector<Rational> w = parse_weights(weights_text);
    auto found = search_orthogonal(n, w, bound, max_det);
    if (structured) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& m : found) {
            nlohmann::json j;
            j["matrix"] = m.str();
            j["det"] = det(m);
            arr.push_back(std::move(j));
        }
        std::cout << arr.dump(2) << "\n";
    } else {
        for (const auto& m : found)
            std::cout << "det " << det(m) << ":  " << m.str() << "\n";
        std::cout << found.size() << " matrices\n";
    }
    return 0;
}

int run_solve_exponents(const std::string& targets_text, int bound, long long max_weight,
                        bool structured) {
    auto targets = parse_ints(targets_text);
    auto sols = solve_exponent_system(targets, bound, max_weight);
    if (structured) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& s : sols) {
            nlohmann::json j;
            j["weights"] = s.weights;
            j["matrix"] = s.b.str();
            arr.push_back(std::move(j));
        }
        std::cout << arr.dump(2) << "\n";
    } else {
        for (const auto& s : sols) {
            std::cout << "l = (";
            for (size_t i = 0; i < s.weights.size(); ++i)
                std::cout << (i ? "," : "") << s.weights[i];
            std::cout << ")  B = " << s.b.str() << "\n";
        }
        std::cout << sols.size() << " solutions\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thetaforge: exact theta-function identities via integer-matrix "
                 "exact covering systems"};
    app.require_subcommand(1);

    std::string format = "text";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}));

    // expand
    auto* expand_cmd = app.add_subcommand("expand", "Expand an expression as a q-series");
    std::string expand_expr, expand_order = "20";
    expand_cmd->add_option("expr", expand_expr, "DSL expression")->required();
    expand_cmd->add_option("--order", expand_order, "Truncation order (rational)");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Verify corpus identities");
    std::string verify_name, verify_order, corpus_path;
    bool verify_all_flag = false, sequential = false;
    verify_cmd->add_option("name", verify_name, "Identity name (or family prefix)");
    verify_cmd->add_flag("--all", verify_all_flag, "Verify every corpus entry");
    verify_cmd->add_option("--order", verify_order, "Truncation order (default: per-entry hint)");
    verify_cmd->add_option("--corpus", corpus_path, "Corpus directory override");
    verify_cmd->add_flag("--sequential", sequential, "Disable parallel verification");

    // decompose
    auto* dec_cmd = app.add_subcommand("decompose", "Covering-system decomposition of a theta product");
    std::string dec_expr, dec_matrix, dec_weights, dec_reps = "auto", dec_window = "standard";
    std::string dec_mode = "product", dec_check = "30";
    dec_cmd->add_option("expr", dec_expr, "Product of theta factors")->required();
    dec_cmd->add_option("--matrix", dec_matrix, "Integer matrix, rows ';'-separated")->required();
    dec_cmd->add_option("--weights", dec_weights, "Expected weights l (cross-check)");
    dec_cmd->add_option("--reps", dec_reps, "Representative choice")
        ->check(CLI::IsMember({"auto", "theorem", "general"}));
    dec_cmd->add_option("--window", dec_window, "Residue window for theorem reps")
        ->check(CLI::IsMember({"standard", "centered"}));
    dec_cmd->add_option("--mode", dec_mode, "Decompose the product, or the +/- pair")
        ->check(CLI::IsMember({"product", "sum", "diff"}));
    dec_cmd->add_option("--check-order", dec_check, "Verification stamp order");

    // cosets
    auto* cosets_cmd = app.add_subcommand("cosets", "Coset representatives and Smith data");
    std::string cosets_matrix;
    cosets_cmd->add_option("--matrix", cosets_matrix, "Integer matrix")->required();

    // search
    auto* search_cmd = app.add_subcommand("search", "Search generalized-orthogonal matrices");
    int search_n = 2, search_bound = 1;
    long long search_max_det = 16;
    std::string search_weights;
    search_cmd->add_option("--n", search_n, "Dimension")->required();
    search_cmd->add_option("--l", search_weights, "Weights l, comma-separated rationals")->required();
    search_cmd->add_option("--bound", search_bound, "Entry bound")->required();
    search_cmd->add_option("--max-det", search_max_det, "Maximum determinant");

    // solve-exponents
    auto* solve_cmd = app.add_subcommand("solve-exponents",
                                         "Solve l_1 b_1j^2 + ... + l_n b_nj^2 = target_j");
    std::string solve_targets;
    int solve_bound = 3;
    long long solve_max_weight = 0;
    solve_cmd->add_option("--targets", solve_targets, "Column targets, comma-separated")->required();
    solve_cmd->add_option("--bound", solve_bound, "Entry bound");
    solve_cmd->add_option("--max-weight", solve_max_weight, "Weight bound (default max target)");

    CLI11_PARSE(app, argc, argv);
    bool structured = format == "structured";

    try {
        if (app.got_subcommand(expand_cmd))
            return run_expand(expand_expr, expand_order, structured);
        if (app.got_subcommand(verify_cmd)) {
            if (!verify_all_flag && verify_name.empty()) {
                std::cerr << "verify: give an identity name or --all\n";
                return 2;
            }
            return run_verify(verify_name, verify_all_flag, verify_order, structured,
                              corpus_path, sequential);
        }
        if (app.got_subcommand(dec_cmd))
            return run_decompose(dec_expr, dec_matrix, dec_weights, dec_reps, dec_window,
                                 dec_mode, dec_check, structured);
        if (app.got_subcommand(cosets_cmd)) return run_cosets(cosets_matrix, structured);
        if (app.got_subcommand(search_cmd))
            return run_search(search_n, search_weights, search_bound, search_max_det, structured);
        if (app.got_subcommand(solve_cmd))
            return run_solve_exponents(solve_targets, solve_bound, solve_max_weight, structured);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
