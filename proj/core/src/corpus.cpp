#include "thetaforge/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <atomic>
#include <fstream>
#include <thread>
#include <sstream>
#include <stdexcept>

#ifndef THETAFORGE_CORPUS_DIR
#define THETAFORGE_CORPUS_DIR ""
#endif

namespace thetaforge {

std::string to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::Pass: return "pass";
        case VerifyStatus::Fail: return "fail";
        case VerifyStatus::PaperDiscrepancy: return "paper-discrepancy";
    }
    return "?";
}

namespace {

bool name_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '.' || c == '-';
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

/// Entry framing: directives and "name:" starts are recognized at column 0;
/// expression continuation lines are indented. Expressions themselves remain
/// whitespace-insensitive.
struct RawEntry {
    std::vector<std::pair<std::string, int>> directives; // text, line
    std::string name;
    std::string body; // everything after "name:"
    int line = 0;
};

std::vector<RawEntry> split_entries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file " + path);
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    std::vector<RawEntry> entries;
    RawEntry pending; // collects directives until its identity line arrives
    RawEntry* open = nullptr;

    while (std::getline(in, line)) {
        ++lineno;
        std::string code = line.substr(0, line.find('#'));
        if (strip(code).empty()) continue;
        if (!saw_header) {
            if (strip(code) != "thetaforge-dsl 1")
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": missing 'thetaforge-dsl 1' header");
            saw_header = true;
            continue;
        }
        bool indented = code[0] == ' ' || code[0] == '\t';
        std::string t = strip(code);
        if (!indented && t[0] == '@') {
            pending.directives.emplace_back(t, lineno);
            open = nullptr;
            continue;
        }
        size_t name_end = 0;
        while (name_end < t.size() && name_char(t[name_end])) ++name_end;
        bool is_start = !indented && name_end > 0 && name_end < t.size() &&
                        t.compare(name_end, 1, ":") == 0;
        if (is_start) {
            pending.name = t.substr(0, name_end);
            pending.body = t.substr(name_end + 1);
            pending.line = lineno;
            entries.push_back(std::move(pending));
            pending = RawEntry{};
            open = &entries.back();
        } else {
            if (!open)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected 'name:' or '@directive'");
            open->body += "\n" + t;
        }
    }
    if (!pending.directives.empty())
        throw std::runtime_error(path + ": dangling directives at end of file");
    return entries;
}

} // namespace

void Corpus::append_file(const std::string& path) {
    for (const RawEntry& raw : split_entries(path)) {
        Identity id;
        id.name = raw.name;
        id.source_file = path;
        id.source_line = raw.line;
        for (const auto& [d, dline] : raw.directives) {
            std::istringstream ds(d);
            std::string head;
            ds >> head;
            if (head == "@order") {
                std::string v;
                ds >> v;
                id.order_hint = Rational::parse(v);
            } else if (head == "@param") {
                std::string pname;
                long long pval = 0;
                ds >> pname >> pval;
                if (pname.empty())
                    throw std::runtime_error(path + ":" + std::to_string(dline) + ": bad @param");
                id.params.emplace_back(pname, pval);
            } else if (head == "@discrepancy") {
                id.discrepancy = true;
            } else if (head == "@note") {
                std::string rest;
                std::getline(ds, rest);
                id.note = strip(rest);
            } else {
                throw std::runtime_error(path + ":" + std::to_string(dline) +
                                         ": unknown directive " + head);
            }
        }
        id.is_correction = id.name.size() > 10 &&
                           id.name.substr(id.name.size() - 10) == ".corrected";
        auto eq = raw.body.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(raw.line) +
                                     ": identity needs 'lhs = rhs'");
        try {
            id.lhs = parse_expr(raw.body.substr(0, eq));
            id.rhs = parse_expr(raw.body.substr(eq + 1));
        } catch (const ParseError& e) {
            throw std::runtime_error(path + ":" + std::to_string(raw.line) + " (" + id.name +
                                     "): " + e.what());
        }
        entries_.push_back(std::move(id));
    }
}

Corpus Corpus::load_file(const std::string& path) {
    Corpus c;
    c.append_file(path);
    return c;
}

Corpus Corpus::load_directory(const std::string& path) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(path))
        if (e.is_regular_file() && e.path().extension() == ".tf")
            files.push_back(e.path().string());
    if (files.empty()) throw std::runtime_error("no corpus files (*.tf) in " + path);
    std::sort(files.begin(), files.end());
    Corpus c;
    for (const auto& f : files) c.append_file(f);

    // Corrections must attach to a discrepancy-marked base entry.
    for (const auto& id : c.entries_) {
        if (!id.is_correction) continue;
        std::string base = id.name.substr(0, id.name.size() - 10);
        const Identity* b = c.find(base);
        if (!b)
            throw std::runtime_error("correction " + id.name + " has no base entry");
        if (!b->discrepancy)
            throw std::runtime_error("correction " + id.name +
                                     " attached to a non-discrepancy entry");
    }
    return c;
}

std::string Corpus::default_directory() {
    if (const char* env = std::getenv("THETAFORGE_CORPUS"); env && *env) return env;
    return THETAFORGE_CORPUS_DIR;
}

const Identity* Corpus::find(const std::string& name) const {
    for (const auto& id : entries_)
        if (id.name == name) return &id;
    return nullptr;
}

std::vector<const Identity*> Corpus::find_all(const std::string& name_or_prefix) const {
    std::vector<const Identity*> out;
    for (const auto& id : entries_)
        if (id.name == name_or_prefix ||
            (id.name.size() > name_or_prefix.size() &&
             id.name.compare(0, name_or_prefix.size(), name_or_prefix) == 0 &&
             (id.name[name_or_prefix.size()] == '-' || id.name[name_or_prefix.size()] == '.')))
            out.push_back(&id);
    return out;
}

VerifyReport verify(const Identity& id, std::optional<Rational> order) {
    VerifyReport rep;
    rep.name = id.name;
    rep.order = order.value_or(id.order_hint);
    auto start = std::chrono::steady_clock::now();
    try {
        Series lhs = evaluate(id.lhs, rep.order);
        Series rhs = evaluate(id.rhs, rep.order);
        rep.mismatch = first_mismatch(lhs, rhs, rep.order);
        if (!rep.mismatch) {
            // A discrepancy-marked literal that suddenly verifies means the
            // stored verdict is wrong: flag it.
            rep.status = id.discrepancy ? VerifyStatus::Fail : VerifyStatus::Pass;
            if (id.discrepancy)
                rep.error = "entry is marked paper-discrepancy but verifies";
        } else {
            rep.status = id.discrepancy ? VerifyStatus::PaperDiscrepancy : VerifyStatus::Fail;
        }
    } catch (const std::exception& e) {
        rep.status = VerifyStatus::Fail;
        rep.error = e.what();
    }
    auto stop = std::chrono::steady_clock::now();
    rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
    return rep;
}

std::vector<VerifyReport> verify_all(const Corpus& corpus, std::optional<Rational> order,
                                     bool parallel) {
    const auto& entries = corpus.entries();
    std::vector<VerifyReport> reports(entries.size());
    unsigned workers = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1;
    if (workers <= 1) {
        for (size_t i = 0; i < entries.size(); ++i) reports[i] = verify(entries[i], order);
        return reports;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= entries.size()) return;
                reports[i] = verify(entries[i], order);
            }
        });
    for (auto& t : pool) t.join();
    return reports;
}

std::string report_table(const std::vector<VerifyReport>& reports) {
    size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    std::ostringstream out;
    int pass = 0, fail = 0, disc = 0;
    for (const auto& r : reports) {
        out << r.name << std::string(width - r.name.size() + 2, ' ')
            << "order " << r.order.str() << "  " << to_string(r.status) << "  "
            << r.millis << " ms";
        if (r.mismatch)
            out << "  first mismatch at " << r.mismatch->key.str() << ": lhs "
                << r.mismatch->lhs.str() << ", rhs " << r.mismatch->rhs.str();
        if (!r.error.empty()) out << "  [" << r.error << "]";
        out << "\n";
        (r.status == VerifyStatus::Pass   ? pass
         : r.status == VerifyStatus::Fail ? fail
                                          : disc)++;
    }
    out << pass << " passed, " << disc << " paper-discrepancy, " << fail << " failed, "
        << reports.size() << " total\n";
    return out.str();
}

std::string report_json(const std::vector<VerifyReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["name"] = r.name;
        j["order"] = r.order.str();
        j["status"] = to_string(r.status);
        if (r.mismatch) {
            nlohmann::json m;
            m["qexp"] = r.mismatch->key.qexp.str();
            nlohmann::json v = nlohmann::json::object();
            for (const auto& [sym, e] : r.mismatch->key.vexp) v[sym] = e.str();
            m["vexp"] = v;
            m["lhs"] = r.mismatch->lhs.str();
            m["rhs"] = r.mismatch->rhs.str();
            j["mismatch"] = m;
        } else {
            j["mismatch"] = nullptr;
        }
        j["millis"] = r.millis;
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

bool any_failure(const std::vector<VerifyReport>& reports) {
    return std::any_of(reports.begin(), reports.end(), [](const VerifyReport& r) {
        return r.status == VerifyStatus::Fail;
    });
}

} // namespace thetaforge
