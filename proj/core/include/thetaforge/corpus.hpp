#pragma once

#include "thetaforge/expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace thetaforge {

/// One corpus entry: a named identity with both sides as DSL expressions.
/// Entries marked `discrepancy` record a display whose literal transcription
/// fails exact expansion; the passing corrected form is stored alongside
/// under the name "<base>.corrected".
struct Identity {
    std::string name;
    std::vector<std::pair<std::string, long long>> params;
    AstPtr lhs, rhs;
    Rational order_hint = Rational(40);
    bool discrepancy = false;       // literal form expected to fail
    bool is_correction = false;     // name has the ".corrected" suffix
    std::string note;
    std::string source_file;
    int source_line = 0;
};

enum class VerifyStatus { Pass, Fail, PaperDiscrepancy };

std::string to_string(VerifyStatus s);

struct VerifyReport {
    std::string name;
    Rational order;
    VerifyStatus status = VerifyStatus::Fail;
    std::optional<Mismatch> mismatch;
    std::string error;   // populated when expansion itself failed
    long long millis = 0;
};

class Corpus {
public:
    static Corpus load_file(const std::string& path);
    static Corpus load_directory(const std::string& path);
    /// Compiled-in default directory, overridable with $THETAFORGE_CORPUS.
    static std::string default_directory();

    const std::vector<Identity>& entries() const { return entries_; }
    const Identity* find(const std::string& name) const;
    /// All entries whose name or name prefix matches (family lookup).
    std::vector<const Identity*> find_all(const std::string& name_or_prefix) const;

    size_t size() const { return entries_.size(); }

private:
    void append_file(const std::string& path);
    std::vector<Identity> entries_;
};

/// Expands both sides at `order` (default: the entry's hint) and compares
/// term maps exactly. A discrepancy-marked literal is expected to fail; it
/// reports PaperDiscrepancy with the first mismatch. Expansion errors surface
/// as failing reports, never exceptions.
VerifyReport verify(const Identity& id, std::optional<Rational> order = std::nullopt);

/// Verifies every entry (concurrently) and returns reports in corpus order.
std::vector<VerifyReport> verify_all(const Corpus& corpus,
                                     std::optional<Rational> order = std::nullopt,
                                     bool parallel = true);

std::string report_table(const std::vector<VerifyReport>& reports);
std::string report_json(const std::vector<VerifyReport>& reports);
bool any_failure(const std::vector<VerifyReport>& reports);

} // namespace thetaforge
