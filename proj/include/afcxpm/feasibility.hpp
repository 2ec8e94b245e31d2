#pragma once

#include <string>
#include <vector>

#include "afcxpm/material.hpp"

namespace afcxpm {

/// Multipass design point for single-photon sensitivity.
///
/// The detuning is tied to the comb: Δ = f·n_t·F·γ, so γ/Δ = 1/(f n_t F)
/// in the same γ-linear / Δ-angular convention as the phase law. The atom
/// number is N = n_t·d·A/(λ₀²/n²) with N_g = N/2 atoms left in the ground
/// state and the probe stored on the other half.
struct DesignPoint {
    double d = 30.0;              // optical depth per tooth
    double finesse = 3.2;
    int n_teeth = 110;
    double f = 3.0;               // detuning safety factor, > 1
    int passes = 930;             // m
    double bandwidth_hz = 500e3;  // signal bandwidth B
    MaterialParams params = {};   // area 0 selects A = λ₀²/n²

    double area() const;
    double area_factor() const;   // A / (λ₀²/n²)
    double eta() const;
    double detuning() const;      // rad/s
    double atoms() const;
    double ground_atoms() const { return 0.5 * atoms(); }

    /// Throws ConfigError on f ≤ 1, m < 1, n_t < 1, d < 0, F ≤ 0 or B < 0.
    void validate() const;
};

/// The worked multipass point: f = 3, d = 30, B = 500 kHz, F = 3.2,
/// n_t = 110, γ = 9 kHz, m = 930, A = λ₀²/n².
DesignPoint example_design_point();

struct Condition {
    std::string name;
    std::string quantity;  // what the bound applies to ("m", "d", "zeta_l", ...)
    std::string relation;  // ">", "<="
    double value = 0.0;    // actual value of `quantity`
    double bound = 0.0;
    bool satisfied = false;
};

struct FeasibilityReport {
    DesignPoint point;
    double eta = 0.0;
    double detuning = 0.0;           // rad/s
    double phase_per_photon = 0.0;   // with ground-state transfer
    double zeta_l_single = 0.0;
    double loss_budget = 0.1;
    double absolute_floor = 0.0;     // η = 1 limit of the pass-number bound
    std::vector<Condition> conditions;

    bool all_satisfied() const;
    const Condition& get(const std::string& name) const;
};

inline constexpr double kDefaultLossBudget = 0.1;

/// Conditions, by name:
///   cond1        m > 8π a / (budget·η)        (80π/η at budget 0.1, a = 1)
///   cond_d       d > 128π² a Δ² / (n_t η γ² m²)
///   cond2        m > 8√2 π f F √(a n_t / (d η))
///   cond_bw      m > 16√2 π² f B √a / (√(n_t η d) γ)
///   loss_ok      m ζL₁ ≤ budget
///   sensitivity  √(η N_g) m φ₁ > 1
FeasibilityReport check_conditions(const DesignPoint& p, double loss_budget = kDefaultLossBudget);

struct Range {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    /// Inclusive grid min, min+step, ... ≤ max. Throws ConfigError if empty
    /// or step ≤ 0 with max > min.
    std::vector<double> values() const;
};

struct SearchTargets {
    double bandwidth_hz = 500e3;
    double loss_budget = kDefaultLossBudget;
};

struct SearchRanges {
    Range d{10.0, 50.0, 5.0};
    Range finesse{2.0, 5.0, 0.2};
    Range n_teeth{50.0, 150.0, 10.0};
    Range f{2.0, 5.0, 0.5};
};

struct SearchEntry {
    DesignPoint point;  // passes = smallest m meeting every lower bound
    double zeta_l_total = 0.0;
    bool feasible = false;
    std::string limiting;  // lower bound that set m
};

struct SearchResult {
    bool feasible = false;
    DesignPoint best;
    FeasibilityReport report;      // of `best`, when feasible
    std::string binding;           // why nothing is feasible
    std::size_t evaluated = 0;
    std::vector<SearchEntry> pareto;  // feasible points not dominated in (m, ζL)
};

/// Grid search for the feasible point with the fewest passes. Ties go to
/// smaller d, then smaller n_t.
SearchResult minimal_passes(const SearchTargets& targets, const SearchRanges& ranges,
                            const MaterialParams& params, int threads = 1);

}  // namespace afcxpm
