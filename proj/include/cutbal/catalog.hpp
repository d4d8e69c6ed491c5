#pragma once

// Built-in scenario catalogue. Every entry is a fully specified, deterministic
// run: fixed x0, fixed integrator settings, and a claimed flow-balance bound
// claimed_k that the suites re-verify at every sample (infinity claims that
// no uniform bound exists and the run is the non-convergence counterexample).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/schedule.hpp"

namespace cutbal {

struct CatalogEntry {
    std::string name;
    std::string summary;
    double claimed_k = 1.0;
    Scenario scenario;
};

namespace detail {

inline Scenario make_scenario(int n, TimeMode mode, double horizon, StateVector x0,
                              CoefficientSchedule sched, double h, int stride,
                              bool order_events) {
    Scenario sc;
    sc.n = n;
    sc.mode = mode;
    sc.horizon = horizon;
    sc.x0 = std::move(x0);
    sc.schedule = std::move(sched);
    sc.schedule.finalize(n, horizon, mode);
    sc.integrator.h = h;
    sc.integrator.tol = 1e-6;
    sc.integrator.refine_order_events = order_events;
    sc.sampling.stride = stride;
    return sc;
}

inline std::vector<CatalogEntry> build_catalog() {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<CatalogEntry> es;

    es.push_back({"example1",
                  "three agents whose middle value oscillates forever; no uniform "
                  "flow-balance bound exists",
                  inf,
                  make_scenario(3, TimeMode::Continuous, 50.0, {4.0, 0.0, -4.0},
                                CoefficientSchedule::example1(), 1e-3, 1, false)});

    es.push_back({"example2",
                  "endogenous four-agent rule; the middle pair meets in finite time and all "
                  "interaction stops",
                  1.0,
                  make_scenario(4, TimeMode::Continuous, 6.0, {0.0, 0.4, 0.6, 1.0},
                                CoefficientSchedule::example2(), 1e-4, 1, true)});

    {
        SquareMatrix<double> r(2, 1.0);
        es.push_back({"capacitor-network",
                      "two capacitors (1 and 2 farad) through a unit resistor; balance bound "
                      "equals the capacitance ratio",
                      2.0,
                      make_scenario(2, TimeMode::Continuous, 10.0, {0.0, 1.0},
                                    CoefficientSchedule::capacitor_network({1.0, 2.0}, r), 1e-3,
                                    1, false)});
    }

    {
        SquareMatrix<double> a(3, 0.0);
        a(0, 1) = a(1, 0) = 0.5;
        a(1, 2) = a(2, 1) = 5.0;
        es.push_back({"crossing",
                      "symmetric constant coupling tuned so two agents swap order once along "
                      "the way to consensus",
                      1.0,
                      make_scenario(3, TimeMode::Continuous, 30.0, {0.5, 0.0, 1.0},
                                    CoefficientSchedule::constant(a), 2e-4, 2, true)});
    }

    es.push_back({"t-quarter",
                  "two internally tied groups whose cross coupling has a tail budget of 0.2; "
                  "the groups can never meet",
                  1.0,
                  make_scenario(4, TimeMode::Continuous, 30.0, {0.0, 0.0, 1.0, 1.0},
                                CoefficientSchedule::t_quarter(2, 0.2, 1.0), 1e-3, 1, false)});

    {
        SquareMatrix<double> base(3, 0.0);
        base(0, 1) = base(1, 0) = 1.0;
        base(0, 2) = base(2, 0) = 0.5;
        base(1, 2) = base(2, 1) = 0.25;
        es.push_back({"decaying-tail",
                      "symmetric coupling with an integrable exponential tail; every agent "
                      "freezes at its own limit",
                      1.0,
                      make_scenario(3, TimeMode::Continuous, 30.0, {0.0, 0.5, 1.0},
                                    CoefficientSchedule::decaying_tail(base, 1.0), 1e-3, 1,
                                    true)});
    }

    es.push_back({"bounded-confidence",
                  "agents listen only to values within radius 1; clusters form where gaps "
                  "open",
                  1.0,
                  make_scenario(6, TimeMode::Continuous, 6.0, {0.0, 0.3, 0.8, 1.7, 2.2, 2.5},
                                CoefficientSchedule::bounded_confidence(6, 1.0), 1e-4, 2, true)});

    es.push_back({"normalized-bounded-confidence",
                  "bounded confidence with neighbour-count normalization; flow-balanced with "
                  "bound n",
                  6.0,
                  make_scenario(6, TimeMode::Continuous, 8.0, {0.0, 0.25, 0.5, 1.8, 2.05, 2.3},
                                CoefficientSchedule::normalized_bounded_confidence(6, 0.8), 1e-4, 2,
                                true)});

    es.push_back({"kernel-threshold",
                  "triangular influence kernel with cut-off radius 1.2",
                  1.0,
                  make_scenario(6, TimeMode::Continuous, 8.0, {0.0, 0.4, 0.8, 1.2, 1.6, 2.0},
                                CoefficientSchedule::kernel(6, KernelId::RadiallyDecreasingThreshold, 1.2, 0.0),
                                1e-4, 2, true)});

    es.push_back({"kernel-gaussian",
                  "truncated gaussian influence kernel, radius 1, sigma 0.5",
                  1.0,
                  make_scenario(6, TimeMode::Continuous, 8.0, {0.0, 0.35, 0.7, 1.3, 1.65, 2.0},
                                CoefficientSchedule::kernel(6, KernelId::GaussianTruncated, 1.0, 0.5),
                                1e-4, 2, true)});

    {
        SquareMatrix<double> s0(4, 0.0), s1(4, 0.0), tm(2, 0.5);
        s0(0, 1) = s0(1, 0) = 1.0;
        s0(2, 3) = s0(3, 2) = 1.0;
        s1(1, 2) = s1(2, 1) = 1.0;
        s1(0, 3) = s1(3, 0) = 1.0;
        es.push_back({"random-markov",
                      "two symmetric pairing states alternating by a seeded markov chain, "
                      "dwell 0.25",
                      1.0,
                      make_scenario(4, TimeMode::Continuous, 40.0, {0.0, 0.3, 0.7, 1.0},
                                    CoefficientSchedule::random_markov({s0, s1}, tm, 0.25, 7), 1e-3,
                                    1, true)});
    }

    {
        SquareMatrix<double> a(5, 1.0);
        for (int i = 0; i < 5; ++i) a(i, i) = 0.0;
        es.push_back({"consensus",
                      "complete symmetric unit coupling; plain consensus at the average",
                      1.0,
                      make_scenario(5, TimeMode::Continuous, 20.0, {0.0, 0.25, 0.5, 0.75, 1.0},
                                    CoefficientSchedule::constant(a), 1e-3, 1, false)});
    }

    {
        SquareMatrix<double> a(5, 0.2);
        es.push_back({"dt-average",
                      "discrete time, every weight 1/5: consensus at the mean after one step",
                      1.0,
                      make_scenario(5, TimeMode::Discrete, 8.0, {0.0, 1.0, 2.0, 3.0, 4.0},
                                    CoefficientSchedule::constant(a), 1.0, 1, false)});
    }

    return es;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& scenario_catalog() {
    static const std::vector<CatalogEntry> entries = detail::build_catalog();
    return entries;
}

inline const CatalogEntry* find_catalog_entry(const std::string& name) {
    for (const CatalogEntry& e : scenario_catalog())
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace cutbal
