#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace matrep {

/// Subsets of a ground set are single-word bitmasks; ground sets are
/// capped at 31 elements so every set operation is one machine op.
using Mask = std::uint32_t;

inline constexpr int kMaxElements = 31;

inline int popcount(Mask m) { return std::popcount(m); }
inline Mask bit(int i) { return Mask{1} << i; }
inline bool contains(Mask set, int i) { return (set >> i) & 1u; }
inline Mask full_mask(int n) { return n == 0 ? 0u : (Mask{1} << n) - 1u; }

/// Iterates set bits low to high.
template <typename F>
void for_each_bit(Mask m, F&& f) {
    while (m) {
        int i = std::countr_zero(m);
        f(i);
        m &= m - 1;
    }
}

enum class ErrorCode {
    // matroid
    EmptyBasisFamily,
    UnequalCardinality,
    ExchangeAxiomViolated,
    ElementNotInGround,
    CorankOutOfRange,
    NotAFlat,
    NotAHyperplane,
    // constructions
    LabelCollision,
    NotModularInRight,
    RestrictionMismatch,
    BasepointLoopOrColoop,
    CircuitAxiomViolated,
    RestrictionNotUniform,
    NotCoindependent,
    // pasture
    NotAGroup,
    P1Violated,
    P2ClosureContradiction,
    P3NotUnique,
    P3Missing,
    UnknownName,
    NotPrimePower,
    SourceTargetMismatch,
    // representation engine
    SupportViolation,
    SearchBudgetExceeded,
    NotAGpcMatroid,
    TRestrictionsNotIsomorphic,
    HarmonizationFailed,
    NoAdmissibleH0,
    ExtensionAmbiguous,
    NormalizationImpossible,
    NoDisjointCorank2Flat,
    NMustBeAtLeast3,
    // cli / io
    ParseError,
    ValidationError,
    HypothesisFailed,
    InternalError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptyBasisFamily: return "EmptyBasisFamily";
        case ErrorCode::UnequalCardinality: return "UnequalCardinality";
        case ErrorCode::ExchangeAxiomViolated: return "ExchangeAxiomViolated";
        case ErrorCode::ElementNotInGround: return "ElementNotInGround";
        case ErrorCode::CorankOutOfRange: return "CorankOutOfRange";
        case ErrorCode::NotAFlat: return "NotAFlat";
        case ErrorCode::NotAHyperplane: return "NotAHyperplane";
        case ErrorCode::LabelCollision: return "LabelCollision";
        case ErrorCode::NotModularInRight: return "NotModularInRight";
        case ErrorCode::RestrictionMismatch: return "RestrictionMismatch";
        case ErrorCode::BasepointLoopOrColoop: return "BasepointLoopOrColoop";
        case ErrorCode::CircuitAxiomViolated: return "CircuitAxiomViolated";
        case ErrorCode::RestrictionNotUniform: return "RestrictionNotUniform";
        case ErrorCode::NotCoindependent: return "NotCoindependent";
        case ErrorCode::NotAGroup: return "NotAGroup";
        case ErrorCode::P1Violated: return "P1Violated";
        case ErrorCode::P2ClosureContradiction: return "P2ClosureContradiction";
        case ErrorCode::P3NotUnique: return "P3NotUnique";
        case ErrorCode::P3Missing: return "P3Missing";
        case ErrorCode::UnknownName: return "UnknownName";
        case ErrorCode::NotPrimePower: return "NotPrimePower";
        case ErrorCode::SourceTargetMismatch: return "SourceTargetMismatch";
        case ErrorCode::SupportViolation: return "SupportViolation";
        case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorCode::NotAGpcMatroid: return "NotAGpcMatroid";
        case ErrorCode::TRestrictionsNotIsomorphic: return "TRestrictionsNotIsomorphic";
        case ErrorCode::HarmonizationFailed: return "HarmonizationFailed";
        case ErrorCode::NoAdmissibleH0: return "NoAdmissibleH0";
        case ErrorCode::ExtensionAmbiguous: return "ExtensionAmbiguous";
        case ErrorCode::NormalizationImpossible: return "NormalizationImpossible";
        case ErrorCode::NoDisjointCorank2Flat: return "NoDisjointCorank2Flat";
        case ErrorCode::NMustBeAtLeast3: return "NMustBeAtLeast3";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::HypothesisFailed: return "HypothesisFailed";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// An ordered list of distinct labels. The input order is the canonical
/// order: it fixes bitmask positions and every "least element" tie-break
/// downstream.
class GroundSet {
public:
    GroundSet() = default;

    explicit GroundSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (static_cast<int>(labels_.size()) > kMaxElements)
            fail(ErrorCode::ValidationError, "ground set exceeds " + std::to_string(kMaxElements) + " elements");
        for (int i = 0; i < size(); ++i) {
            auto [it, fresh] = index_.emplace(labels_[i], i);
            if (!fresh) fail(ErrorCode::LabelCollision, "duplicate label '" + labels_[i] + "'");
        }
    }

    int size() const { return static_cast<int>(labels_.size()); }
    Mask all() const { return full_mask(size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int i) const { return labels_[i]; }

    bool has(const std::string& label) const { return index_.count(label) > 0; }

    int index_of(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) fail(ErrorCode::ElementNotInGround, "no element '" + label + "'");
        return it->second;
    }

    Mask mask_of(std::span<const std::string> labels) const {
        Mask m = 0;
        for (const auto& l : labels) m |= bit(index_of(l));
        return m;
    }

    Mask mask_of(std::initializer_list<std::string> labels) const {
        return mask_of(std::span<const std::string>(labels.begin(), labels.end()));
    }

    std::vector<std::string> labels_of(Mask m) const {
        std::vector<std::string> out;
        for_each_bit(m, [&](int i) { out.push_back(labels_[i]); });
        return out;
    }

    bool operator==(const GroundSet& o) const { return labels_ == o.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace matrep
