#pragma once

// Coefficient schedules: the map (t, x) -> CoefficientMatrix driving
//   dx_i/dt = sum_j a_ij(t) (x_j - x_i)        (continuous time)
//   x(t+1)  = A(t) x(t)                        (discrete time)
//
// Four kinds are supported: piecewise-constant in t, a catalogue of closed
// forms, state-dependent (endogenous) rules, and a seeded finite-state Markov
// switch. Evaluation is pure: equal (t, x, schedule) give bitwise-equal
// matrices, and the Markov state sequence is precomputed from counter-based
// draws so lookups are random-access in t.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/rng.hpp"

namespace cutbal {

enum class TimeMode { Continuous, Discrete };

enum class ScheduleKind { PiecewiseConstant, ClosedForm, Endogenous, RandomMarkov };

enum class ClosedFormId { Example1, CapacitorNetwork, TQuarter, Constant, DecayingTail };

enum class EndogenousId { BoundedConfidence, NormalizedBoundedConfidence, Kernel, Example2 };

enum class KernelId { RadiallyDecreasingThreshold, GaussianTruncated };

// Discrete regime label of a schedule at some (t, x): which time piece is
// active and, for endogenous rules, which pair interactions are switched on.
// Integration freezes a signature across a step to get one-sided evaluation
// at switching instants.
struct RegimeSignature {
    std::size_t piece = 0;
    std::vector<std::uint64_t> bits;

    bool operator==(const RegimeSignature&) const = default;

    bool test(int k) const { return (bits[k / 64] >> (k % 64)) & 1u; }
    void set(int k) { bits[k / 64] |= std::uint64_t{1} << (k % 64); }
    void resize_bits(int nbits) { bits.assign((nbits + 63) / 64, 0); }
};

struct SchedulePiece {
    double t0 = 0.0;
    double t1 = 0.0;
    CoefficientMatrix a;
};

class CoefficientSchedule {
public:
    CoefficientSchedule() = default;

    // ---- factories ------------------------------------------------------

    static CoefficientSchedule piecewise_constant(std::vector<SchedulePiece> pieces) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::PiecewiseConstant;
        s.pieces_ = std::move(pieces);
        if (!s.pieces_.empty()) s.n_ = s.pieces_.front().a.n();
        return s;
    }

    static CoefficientSchedule example1() {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::ClosedForm;
        s.cf_id_ = ClosedFormId::Example1;
        s.n_ = 3;
        return s;
    }

    // a_ij = 1 / (C_i * R_ij) wherever R_ij > 0; R must be symmetric.
    static CoefficientSchedule capacitor_network(std::vector<double> capacitances,
                                                 CoefficientMatrix resistances) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::ClosedForm;
        s.cf_id_ = ClosedFormId::CapacitorNetwork;
        s.capacitances_ = std::move(capacitances);
        s.resistances_ = std::move(resistances);
        s.n_ = static_cast<int>(s.capacitances_.size());
        return s;
    }

    // Two groups (the first m agents vs the rest), complete symmetric graphs
    // at rate `intra` inside each group, and symmetric cross-group rates
    // c*exp(-t) with c chosen so the total cross integral over [0, inf)
    // equals `budget`.
    static CoefficientSchedule t_quarter(int m, double budget, double intra) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::ClosedForm;
        s.cf_id_ = ClosedFormId::TQuarter;
        s.tq_m_ = m;
        s.tq_budget_ = budget;
        s.tq_intra_ = intra;
        return s;
    }

    static CoefficientSchedule constant(CoefficientMatrix a) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::ClosedForm;
        s.cf_id_ = ClosedFormId::Constant;
        s.cf_matrix_ = std::move(a);
        s.n_ = s.cf_matrix_.n();
        return s;
    }

    static CoefficientSchedule decaying_tail(CoefficientMatrix base, double rate) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::ClosedForm;
        s.cf_id_ = ClosedFormId::DecayingTail;
        s.cf_matrix_ = std::move(base);
        s.cf_rate_ = rate;
        s.n_ = s.cf_matrix_.n();
        return s;
    }

    static CoefficientSchedule bounded_confidence(int n, double radius) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::Endogenous;
        s.endo_id_ = EndogenousId::BoundedConfidence;
        s.radius_ = radius;
        s.n_ = n;
        return s;
    }

    static CoefficientSchedule normalized_bounded_confidence(int n, double radius) {
        CoefficientSchedule s = bounded_confidence(n, radius);
        s.endo_id_ = EndogenousId::NormalizedBoundedConfidence;
        return s;
    }

    static CoefficientSchedule kernel(int n, KernelId id, double radius, double sigma) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::Endogenous;
        s.endo_id_ = EndogenousId::Kernel;
        s.kernel_id_ = id;
        s.radius_ = radius;
        s.sigma_ = sigma;
        s.n_ = n;
        return s;
    }

    // Four agents; a_13 = a_31 = a_24 = a_42 = 1 while x_1 < x_2 < x_3 < x_4
    // holds strictly, all zero otherwise.
    static CoefficientSchedule example2() {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::Endogenous;
        s.endo_id_ = EndogenousId::Example2;
        s.n_ = 4;
        return s;
    }

    static CoefficientSchedule random_markov(std::vector<CoefficientMatrix> states,
                                             CoefficientMatrix transition, double dwell,
                                             std::uint64_t seed, int initial_state = 0) {
        CoefficientSchedule s;
        s.kind_ = ScheduleKind::RandomMarkov;
        s.mk_states_ = std::move(states);
        s.mk_transition_ = std::move(transition);
        s.mk_dwell_ = dwell;
        s.mk_seed_ = seed;
        s.mk_initial_ = initial_state;
        if (!s.mk_states_.empty()) s.n_ = s.mk_states_.front().n();
        return s;
    }

    // ---- inspection ------------------------------------------------------

    ScheduleKind kind() const { return kind_; }
    ClosedFormId closed_form_id() const { return cf_id_; }
    EndogenousId endogenous_id() const { return endo_id_; }
    KernelId kernel_id() const { return kernel_id_; }
    int n() const { return n_; }
    double horizon() const { return horizon_; }
    bool endogenous() const { return kind_ == ScheduleKind::Endogenous; }
    double radius() const { return radius_; }
    double sigma() const { return sigma_; }
    double decay_rate() const { return cf_rate_; }
    int t_quarter_m() const { return tq_m_; }
    double t_quarter_budget() const { return tq_budget_; }
    double t_quarter_intra() const { return tq_intra_; }
    const CoefficientMatrix& constant_matrix() const { return cf_matrix_; }
    const std::vector<double>& capacitances() const { return capacitances_; }
    const CoefficientMatrix& resistances() const { return resistances_; }
    const std::vector<SchedulePiece>& pieces() const { return pieces_; }
    const std::vector<CoefficientMatrix>& markov_states() const { return mk_states_; }
    const CoefficientMatrix& markov_transition() const { return mk_transition_; }
    double markov_dwell() const { return mk_dwell_; }
    std::uint64_t markov_seed() const { return mk_seed_; }
    int markov_initial_state() const { return mk_initial_; }

    // ---- validation / setup ---------------------------------------------

    // Checks all kind-specific invariants against (n, horizon, mode) and
    // precomputes the Markov state sequence. Must run before evaluation.
    void finalize(int n, double horizon, TimeMode mode) {
        if (n < 1) throw SchemaError("schedule: n must be >= 1");
        if (!(horizon > 0.0)) throw SchemaError("schedule: horizon must be positive");
        if (n_ != 0 && n_ != n)
            throw SchemaError("schedule: dimension " + std::to_string(n_) +
                              " does not match scenario n = " + std::to_string(n));
        n_ = n;
        horizon_ = horizon;
        mode_ = mode;
        const bool zero_diag = (mode == TimeMode::Continuous);

        switch (kind_) {
            case ScheduleKind::PiecewiseConstant: {
                if (pieces_.empty()) throw SchemaError("piecewise schedule: no pieces");
                const double btol = 1e-12 * std::max(1.0, horizon);
                if (std::abs(pieces_.front().t0) > btol)
                    throw SchemaError("piecewise schedule: first piece must start at t = 0");
                for (std::size_t k = 0; k < pieces_.size(); ++k) {
                    const auto& p = pieces_[k];
                    if (p.a.n() != n_) throw SchemaError("piecewise schedule: matrix size mismatch");
                    if (!(p.t1 > p.t0))
                        throw SchemaError("piecewise schedule: piece " + std::to_string(k) +
                                          " has t1 <= t0");
                    if (k + 1 < pieces_.size() && std::abs(p.t1 - pieces_[k + 1].t0) > btol)
                        throw SchemaError("piecewise schedule: pieces must partition [0, horizon] "
                                          "without gaps or overlap");
                    validate_coefficients(p.a, zero_diag, "piecewise schedule piece " + std::to_string(k));
                }
                if (std::abs(pieces_.back().t1 - horizon) > btol)
                    throw SchemaError("piecewise schedule: pieces must end at the horizon");
                break;
            }
            case ScheduleKind::ClosedForm:
                finalize_closed_form(zero_diag);
                break;
            case ScheduleKind::Endogenous:
                finalize_endogenous();
                break;
            case ScheduleKind::RandomMarkov:
                finalize_markov(zero_diag);
                break;
        }
        finalized_ = true;
    }

    bool finalized() const { return finalized_; }

    // ---- evaluation ------------------------------------------------------

    RegimeSignature signature(double t, const StateVector& x) const {
        RegimeSignature sig;
        sig.piece = piece_index(t);
        if (kind_ != ScheduleKind::Endogenous) return sig;
        if (endo_id_ == EndogenousId::Example2) {
            sig.resize_bits(1);
            if (x[0] < x[1] && x[1] < x[2] && x[2] < x[3]) sig.set(0);
            return sig;
        }
        // One bit per unordered pair: the pair interacts iff |x_i - x_j| < radius.
        sig.resize_bits(n_ * (n_ - 1) / 2);
        int k = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j, ++k)
                if (std::abs(x[i] - x[j]) < radius_) sig.set(k);
        return sig;
    }

    // Evaluates the coefficient functions at (t, x) inside the regime `sig`
    // fixed by the caller; this is how one-sided values at switching instants
    // are obtained.
    CoefficientMatrix at_signature(double t, const StateVector& x, const RegimeSignature& sig) const {
        switch (kind_) {
            case ScheduleKind::PiecewiseConstant:
                return pieces_[sig.piece].a;
            case ScheduleKind::RandomMarkov:
                return mk_states_[mk_seq_[sig.piece]];
            case ScheduleKind::ClosedForm:
                return closed_form_at(t);
            case ScheduleKind::Endogenous:
                return endogenous_at(x, sig);
        }
        return CoefficientMatrix(n_);
    }

    CoefficientMatrix at(double t, const StateVector& x) const {
        return at_signature(t, x, signature(t, x));
    }

    // Next declared time discontinuity strictly after t (piece boundaries,
    // Markov dwell multiples); +inf when the kind has none.
    double next_breakpoint_after(double t) const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (kind_ == ScheduleKind::PiecewiseConstant) {
            for (const auto& p : pieces_)
                if (p.t1 > t + 1e-15 * std::max(1.0, std::abs(t))) return p.t1;
            return inf;
        }
        if (kind_ == ScheduleKind::RandomMarkov) {
            const double k = std::floor(t / mk_dwell_ + 1e-12) + 1.0;
            const double next = k * mk_dwell_;
            return next > t ? next : (k + 1.0) * mk_dwell_;
        }
        return inf;
    }

    std::size_t piece_index(double t) const {
        if (kind_ == ScheduleKind::PiecewiseConstant) {
            // Last piece whose start lies at or before t (right-continuous).
            std::size_t lo = 0;
            for (std::size_t k = 1; k < pieces_.size(); ++k)
                if (pieces_[k].t0 <= t) lo = k;
                else break;
            return lo;
        }
        if (kind_ == ScheduleKind::RandomMarkov) {
            auto k = static_cast<long long>(std::floor(t / mk_dwell_));
            k = std::max(0ll, std::min<long long>(k, static_cast<long long>(mk_seq_.size()) - 1));
            return static_cast<std::size_t>(k);
        }
        return 0;
    }

private:
    void finalize_closed_form(bool zero_diag) {
        switch (cf_id_) {
            case ClosedFormId::Example1:
                if (n_ != 3) throw SchemaError("example1 schedule requires n = 3");
                break;
            case ClosedFormId::CapacitorNetwork: {
                if (static_cast<int>(capacitances_.size()) != n_)
                    throw SchemaError("capacitor-network: capacitances must have length n");
                for (double c : capacitances_)
                    if (!(c > 0.0)) throw SchemaError("capacitor-network: capacitances must be positive");
                if (resistances_.empty()) {
                    resistances_ = CoefficientMatrix(n_, 1.0);
                    for (int i = 0; i < n_; ++i) resistances_(i, i) = 0.0;
                }
                if (resistances_.n() != n_)
                    throw SchemaError("capacitor-network: resistances must be n x n");
                if (!is_symmetric(resistances_))
                    throw SchemaError("capacitor-network: resistances must be symmetric");
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j)
                        if (resistances_(i, j) < 0.0)
                            throw SchemaError("capacitor-network: negative resistance");
                break;
            }
            case ClosedFormId::TQuarter:
                if (tq_m_ < 1 || tq_m_ >= n_)
                    throw SchemaError("t-quarter: group size m must satisfy 1 <= m < n");
                if (tq_budget_ < 0.0) throw SchemaError("t-quarter: budget must be nonnegative");
                if (tq_intra_ < 0.0) throw SchemaError("t-quarter: intra rate must be nonnegative");
                break;
            case ClosedFormId::Constant:
            case ClosedFormId::DecayingTail:
                if (cf_matrix_.n() != n_) throw SchemaError("constant schedule: matrix must be n x n");
                validate_coefficients(cf_matrix_, zero_diag, "schedule matrix");
                if (cf_id_ == ClosedFormId::DecayingTail && !(cf_rate_ > 0.0))
                    throw SchemaError("decaying-tail: rate must be positive");
                break;
        }
    }

    void finalize_endogenous() {
        if (mode_ == TimeMode::Discrete)
            throw SchemaError("endogenous schedules are continuous-time only");
        switch (endo_id_) {
            case EndogenousId::Example2:
                if (n_ != 4) throw SchemaError("example2 schedule requires n = 4");
                break;
            case EndogenousId::BoundedConfidence:
            case EndogenousId::NormalizedBoundedConfidence:
                if (!(radius_ > 0.0)) throw SchemaError("bounded confidence: radius must be positive");
                break;
            case EndogenousId::Kernel:
                if (!(radius_ > 0.0)) throw SchemaError("kernel: radius must be positive");
                if (kernel_id_ == KernelId::GaussianTruncated && !(sigma_ > 0.0))
                    throw SchemaError("kernel: sigma must be positive");
                break;
        }
    }

    void finalize_markov(bool zero_diag) {
        if (mk_states_.empty()) throw SchemaError("random-markov: needs at least one state matrix");
        const int k = static_cast<int>(mk_states_.size());
        for (int s = 0; s < k; ++s) {
            if (mk_states_[s].n() != n_) throw SchemaError("random-markov: state matrix size mismatch");
            validate_coefficients(mk_states_[s], zero_diag, "random-markov state " + std::to_string(s));
        }
        if (mk_transition_.n() != k)
            throw SchemaError("random-markov: transition matrix must be k x k for k state matrices");
        for (int i = 0; i < k; ++i) {
            double row = 0.0;
            for (int j = 0; j < k; ++j) {
                if (mk_transition_(i, j) < 0.0)
                    throw SchemaError("random-markov: negative transition probability");
                row += mk_transition_(i, j);
            }
            if (std::abs(row - 1.0) > 1e-9)
                throw SchemaError("random-markov: transition rows must sum to 1");
        }
        if (!(mk_dwell_ > 0.0)) throw SchemaError("random-markov: dwell must be positive");
        if (mk_initial_ < 0 || mk_initial_ >= k)
            throw SchemaError("random-markov: initial state out of range");

        const auto intervals = static_cast<std::size_t>(std::ceil(horizon_ / mk_dwell_)) + 1;
        mk_seq_.assign(intervals, 0);
        int state = mk_initial_;
        mk_seq_[0] = state;
        for (std::size_t i = 1; i < intervals; ++i) {
            const double u = bits_to_unit(splitmix64(mix_keys(mk_seed_, i)));
            double cum = 0.0;
            int next = k - 1;
            for (int j = 0; j < k; ++j) {
                cum += mk_transition_(state, j);
                if (u < cum) {
                    next = j;
                    break;
                }
            }
            state = next;
            mk_seq_[i] = state;
        }
    }

    CoefficientMatrix closed_form_at(double t) const {
        CoefficientMatrix a(n_);
        switch (cf_id_) {
            case ClosedFormId::Example1: {
                const double s = std::sin(t), c = std::cos(t), et = std::exp(t), emt = std::exp(-t);
                a(0, 1) = 1.0 / (et * (3.0 - s) + 1.0);
                a(2, 1) = 1.0 / (et * (3.0 + s) + 1.0);
                a(1, 0) = 0.5 + (s + c) / (6.0 + 2.0 * emt);
                a(1, 2) = 0.5 - (s + c) / (6.0 + 2.0 * emt);
                break;
            }
            case ClosedFormId::CapacitorNetwork:
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j)
                        if (i != j && resistances_(i, j) > 0.0)
                            a(i, j) = 1.0 / (capacitances_[i] * resistances_(i, j));
                break;
            case ClosedFormId::TQuarter: {
                const int m = tq_m_;
                const double cross =
                    tq_budget_ / (2.0 * m * (n_ - m)) * std::exp(-t);
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j) {
                        if (i == j) continue;
                        const bool gi = i < m, gj = j < m;
                        a(i, j) = (gi == gj) ? tq_intra_ : cross;
                    }
                break;
            }
            case ClosedFormId::Constant:
                a = cf_matrix_;
                break;
            case ClosedFormId::DecayingTail: {
                a = cf_matrix_;
                a *= std::exp(-cf_rate_ * t);
                break;
            }
        }
        return a;
    }

    CoefficientMatrix endogenous_at(const StateVector& x, const RegimeSignature& sig) const {
        CoefficientMatrix a(n_);
        if (endo_id_ == EndogenousId::Example2) {
            if (sig.test(0)) a(0, 2) = a(2, 0) = a(1, 3) = a(3, 1) = 1.0;
            return a;
        }
        if (endo_id_ == EndogenousId::NormalizedBoundedConfidence) {
            std::vector<int> count(n_, 0);
            int k = 0;
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j, ++k)
                    if (sig.test(k)) {
                        ++count[i];
                        ++count[j];
                    }
            k = 0;
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j, ++k)
                    if (sig.test(k)) {
                        a(i, j) = 1.0 / count[i];
                        a(j, i) = 1.0 / count[j];
                    }
            return a;
        }
        int k = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j, ++k) {
                if (!sig.test(k)) continue;
                double v = 1.0;
                if (endo_id_ == EndogenousId::Kernel) {
                    const double z = x[i] - x[j];
                    v = kernel_id_ == KernelId::RadiallyDecreasingThreshold
                            ? std::max(0.0, 1.0 - std::abs(z) / radius_)
                            : std::exp(-z * z / (2.0 * sigma_ * sigma_));
                }
                a(i, j) = v;
                a(j, i) = v;
            }
        return a;
    }

    ScheduleKind kind_ = ScheduleKind::ClosedForm;
    int n_ = 0;
    double horizon_ = 0.0;
    TimeMode mode_ = TimeMode::Continuous;
    bool finalized_ = false;

    std::vector<SchedulePiece> pieces_;

    ClosedFormId cf_id_ = ClosedFormId::Constant;
    CoefficientMatrix cf_matrix_;
    double cf_rate_ = 1.0;
    std::vector<double> capacitances_;
    CoefficientMatrix resistances_;
    int tq_m_ = 0;
    double tq_budget_ = 0.0;
    double tq_intra_ = 1.0;

    EndogenousId endo_id_ = EndogenousId::BoundedConfidence;
    KernelId kernel_id_ = KernelId::RadiallyDecreasingThreshold;
    double radius_ = 1.0;
    double sigma_ = 1.0;

    std::vector<CoefficientMatrix> mk_states_;
    CoefficientMatrix mk_transition_;
    double mk_dwell_ = 1.0;
    std::uint64_t mk_seed_ = 0;
    int mk_initial_ = 0;
    std::vector<int> mk_seq_;
};

// Drift of the consensus dynamics for fixed coefficients:
// v_i = sum_j a_ij (x_j - x_i).
inline StateVector consensus_rhs(const CoefficientMatrix& a, const StateVector& x) {
    const int n = a.n();
    StateVector v(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * (x[j] - x[i]);
        v[i] = s;
    }
    return v;
}

// Bounds-checked schedule evaluation at (t, x).
inline CoefficientMatrix evaluate_schedule(const CoefficientSchedule& sched, double t,
                                           const StateVector& x) {
    if (!sched.finalized()) throw PreconditionError("evaluate_schedule: schedule not finalized");
    if (!(t >= 0.0) || t > sched.horizon())
        throw PreconditionError("evaluate_schedule: t = " + std::to_string(t) +
                                " outside [0, horizon]");
    if (static_cast<int>(x.size()) != sched.n())
        throw PreconditionError("evaluate_schedule: state has dimension " +
                                std::to_string(x.size()) + ", schedule expects " +
                                std::to_string(sched.n()));
    return sched.at(t, x);
}

}  // namespace cutbal
