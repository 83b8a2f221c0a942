#include "qbound/nonsignaling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "qbound/rng.hpp"
#include "qbound/simplex.hpp"

namespace qbound {

std::size_t BoxDims::table_size() const {
    return static_cast<std::size_t>(a) * b * c * x * y * z;
}

NSBox::NSBox(BoxDims d, std::vector<double> data) : dims(d), table(std::move(data)) {
    if (dims.x < 1 || dims.y < 1 || dims.z < 1 || dims.a < 1 || dims.b < 1 || dims.c < 1)
        throw std::invalid_argument("NSBox: alphabet sizes must be positive");
    if (table.size() != dims.table_size()) throw std::invalid_argument("NSBox: wrong table size");
    const std::size_t cells = static_cast<std::size_t>(dims.x) * dims.y * dims.z;
    for (std::size_t s = 0; s < table.size(); s += cells) {
        double sum = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            if (table[s + i] < -kTableTol) throw std::invalid_argument("NSBox: negative probability");
            if (table[s + i] < 0.0) table[s + i] = 0.0;
            sum += table[s + i];
        }
        if (std::abs(sum - 1.0) > kTableTol) throw std::invalid_argument("NSBox: slice not normalized");
        for (std::size_t i = 0; i < cells; ++i) table[s + i] /= sum;
    }
}

std::size_t NSBox::index(int a, int b, int ch, int x, int y, int zo) const {
    return ((((static_cast<std::size_t>(a) * dims.b + b) * dims.c + ch) * dims.x + x) * dims.y + y) *
               dims.z + zo;
}

double NSBox::p(int a, int b, int ch, int x, int y, int zo) const {
    return table[index(a, b, ch, x, y, zo)];
}

NSBox NSBox::uniform(const BoxDims& dims) {
    const double cell = 1.0 / (static_cast<double>(dims.x) * dims.y * dims.z);
    return NSBox(dims, std::vector<double>(dims.table_size(), cell));
}

std::vector<Violation> check_nonsignaling(const NSBox& box, double tol) {
    const auto& d = box.dims;
    const std::size_t cells = static_cast<std::size_t>(d.x) * d.y * d.z;
    for (std::size_t s = 0; s < box.table.size(); s += cells) {
        double sum = 0.0;
        for (std::size_t i = 0; i < cells; ++i) sum += box.table[s + i];
        if (std::abs(sum - 1.0) > kTableTol)
            throw std::invalid_argument("check_nonsignaling: box slice is not normalized");
    }
    std::vector<Violation> out;

    // P(x,y | a,b,c) must not depend on c
    for (int a = 0; a < d.a; ++a) {
        for (int b = 0; b < d.b; ++b) {
            for (int ch = 1; ch < d.c; ++ch) {
                double mag = 0.0;
                for (int x = 0; x < d.x; ++x) {
                    for (int y = 0; y < d.y; ++y) {
                        double ref = 0.0, cur = 0.0;
                        for (int zo = 0; zo < d.z; ++zo) {
                            ref += box.p(a, b, 0, x, y, zo);
                            cur += box.p(a, b, ch, x, y, zo);
                        }
                        mag = std::max(mag, std::abs(cur - ref));
                    }
                }
                if (mag > tol) out.push_back({1, a, b, ch, mag});
            }
        }
    }
    // P(x,z | a,b,c) must not depend on b
    for (int a = 0; a < d.a; ++a) {
        for (int ch = 0; ch < d.c; ++ch) {
            for (int b = 1; b < d.b; ++b) {
                double mag = 0.0;
                for (int x = 0; x < d.x; ++x) {
                    for (int zo = 0; zo < d.z; ++zo) {
                        double ref = 0.0, cur = 0.0;
                        for (int y = 0; y < d.y; ++y) {
                            ref += box.p(a, 0, ch, x, y, zo);
                            cur += box.p(a, b, ch, x, y, zo);
                        }
                        mag = std::max(mag, std::abs(cur - ref));
                    }
                }
                if (mag > tol) out.push_back({2, a, b, ch, mag});
            }
        }
    }
    // P(y,z | a,b,c) must not depend on a
    for (int b = 0; b < d.b; ++b) {
        for (int ch = 0; ch < d.c; ++ch) {
            for (int a = 1; a < d.a; ++a) {
                double mag = 0.0;
                for (int y = 0; y < d.y; ++y) {
                    for (int zo = 0; zo < d.z; ++zo) {
                        double ref = 0.0, cur = 0.0;
                        for (int x = 0; x < d.x; ++x) {
                            ref += box.p(0, b, ch, x, y, zo);
                            cur += box.p(a, b, ch, x, y, zo);
                        }
                        mag = std::max(mag, std::abs(cur - ref));
                    }
                }
                if (mag > tol) out.push_back({3, a, b, ch, mag});
            }
        }
    }
    return out;
}

bool is_nonsignaling(const NSBox& box, double tol) {
    return check_nonsignaling(box, tol).empty();
}

double statistical_distance(std::span<const double> p, std::span<const double> q, int d) {
    if (p.size() != q.size()) throw std::invalid_argument("statistical_distance: alphabet mismatch");
    if (d < 1) throw std::invalid_argument("statistical_distance: bad normalizer");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return acc / d;
}

JointTable xy_joint_table(const NSBox& box, int ch) {
    const auto& d = box.dims;
    if (d.x != d.y) throw std::invalid_argument("xy_joint_table: outcome alphabets differ");
    if (d.a != d.b) throw std::invalid_argument("xy_joint_table: setting counts differ");
    if (ch < 0 || ch >= d.c) throw std::out_of_range("xy_joint_table: channel out of range");
    std::vector<double> data(static_cast<std::size_t>(d.a) * d.b * d.x * d.y, 0.0);
    std::size_t i = 0;
    for (int a = 0; a < d.a; ++a)
        for (int b = 0; b < d.b; ++b)
            for (int x = 0; x < d.x; ++x)
                for (int y = 0; y < d.y; ++y) {
                    double s = 0.0;
                    for (int zo = 0; zo < d.z; ++zo) s += box.p(a, b, ch, x, y, zo);
                    data[i++] = s;
                }
    return JointTable(d.x, d.a, std::move(data));
}

std::vector<DistanceResult> distance_bound_check(const NSBox& box, double i_n) {
    if (!is_nonsignaling(box))
        throw std::invalid_argument("distance_bound_check: box is signaling; hypothesis unmet");

    const auto& dm = box.dims;
    const int d = dm.x;
    std::vector<DistanceResult> results;
    results.reserve(static_cast<std::size_t>(dm.a) * dm.c);

    std::vector<double> pxz(static_cast<std::size_t>(d) * dm.z);
    std::vector<double> product(pxz.size());
    for (int a = 0; a < dm.a; ++a) {
        for (int ch = 0; ch < dm.c; ++ch) {
            // marginal over y at b = 0 (certified: independent of b)
            for (int x = 0; x < d; ++x)
                for (int zo = 0; zo < dm.z; ++zo) {
                    double s = 0.0;
                    for (int y = 0; y < dm.y; ++y) s += box.p(a, 0, ch, x, y, zo);
                    pxz[static_cast<std::size_t>(x) * dm.z + zo] = s;
                }
            for (int zo = 0; zo < dm.z; ++zo) {
                double pz = 0.0;
                for (int x = 0; x < d; ++x) pz += pxz[static_cast<std::size_t>(x) * dm.z + zo];
                for (int x = 0; x < d; ++x)
                    product[static_cast<std::size_t>(x) * dm.z + zo] = pz / d;
            }
            DistanceResult r;
            r.setting_a = a;
            r.setting_c = ch;
            r.delta = statistical_distance(pxz, product, d);
            r.bound = d / 4.0 * i_n;
            r.slack = r.bound - r.delta;
            results.push_back(r);
        }
    }
    return results;
}

PointwiseReport pointwise_bound_check(const NSBox& box) {
    if (!is_nonsignaling(box))
        throw std::invalid_argument("pointwise_bound_check: box is signaling");

    const auto& dm = box.dims;
    const int d = dm.x;
    const int n = dm.a;
    const JointTable joint = xy_joint_table(box, 0);
    PointwiseReport report;
    report.i_n = evaluate_in(joint).value;
    constexpr double tol = 1e-8;

    // Alice outcome marginals per setting, P(x | A); b choice is irrelevant.
    std::vector<std::vector<double>> px(n, std::vector<double>(d, 0.0));
    for (int a = 1; a <= n; ++a)
        for (int x = 0; x < d; ++x) {
            double s = 0.0;
            for (int y = 0; y < d; ++y) s += joint.prob(a, 1, x, y);
            px[a - 1][x] = s;
        }

    auto flag = [&report](std::string check, int setting, int outcome, double lhs, double rhs) {
        report.violations.push_back({std::move(check), setting, outcome, lhs, rhs});
    };

    // equality bound: P(X=Y | A,B) <= 1 - |P_X(x|A,B) - P_Y(x|A,B)|
    for (int a = 1; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) {
            double equal = 0.0;
            for (int k = 0; k < d; ++k) equal += joint.prob(a, b, k, k);
            for (int x = 0; x < d; ++x) {
                double mx = 0.0, my = 0.0;
                for (int y = 0; y < d; ++y) mx += joint.prob(a, b, x, y);
                for (int xx = 0; xx < d; ++xx) my += joint.prob(a, b, xx, x);
                const double rhs = 1.0 - std::abs(mx - my);
                if (equal > rhs + tol) flag("equality-bound", (a - 1) * n + (b - 1), x, equal, rhs);
            }
        }
    }

    // telescoped chain: sum_i |P(x|A_i) - P(x|A_{i+1})| <= I_N, where the
    // final step compares against P(x-1 | A_1) by the wraparound relabeling
    for (int x = 0; x < d; ++x) {
        double chain = 0.0;
        for (int i = 0; i < n; ++i) {
            const double next =
                i + 1 < n ? px[i + 1][x] : px[0][((x - 1) % d + d) % d];
            chain += std::abs(px[i][x] - next);
        }
        if (chain > report.i_n + tol) flag("chain-sum", 0, x, chain, report.i_n);
    }

    // neighbor-outcome bound: |P(x|A) - P(x+1|A)| <= I_N
    for (int a = 0; a < n; ++a)
        for (int x = 0; x < d; ++x) {
            const double lhs = std::abs(px[a][x] - px[a][(x + 1) % d]);
            if (lhs > report.i_n + tol) flag("neighbor-bound", a, x, lhs, report.i_n);
        }

    // uniform-marginal bound: |P(x|A) - 1/d| <= (d/4) I_N
    const double budget = d / 4.0 * report.i_n;
    for (int a = 0; a < n; ++a)
        for (int x = 0; x < d; ++x) {
            const double lhs = std::abs(px[a][x] - 1.0 / d);
            if (lhs > budget + tol) flag("uniform-marginal", a, x, lhs, budget);
        }

    return report;
}

namespace {

SchmidtState random_schmidt_state(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.05, 1.0);
    std::vector<double> g(d);
    double norm2 = 0.0;
    for (double& v : g) {
        v = amp(rng);
        norm2 += v * v;
    }
    for (double& v : g) v /= std::sqrt(norm2);
    return SchmidtState(d, std::move(g));
}

// row-stochastic channel R[ch](zo | label); identity-on-label when c == 1
std::vector<double> label_channel(int c, int z, int labels, std::mt19937_64& rng) {
    std::vector<double> r(static_cast<std::size_t>(c) * labels * z, 0.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int ch = 0; ch < c; ++ch) {
        for (int m = 0; m < labels; ++m) {
            double* row = r.data() + (static_cast<std::size_t>(ch) * labels + m) * z;
            if (c == 1) {
                row[m % z] = 1.0;
            } else {
                double sum = 0.0;
                for (int zo = 0; zo < z; ++zo) sum += row[zo] = unit(rng);
                for (int zo = 0; zo < z; ++zo) row[zo] /= sum;
            }
        }
    }
    return r;
}

std::vector<int> random_outcome_map(int n, int d, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, d - 1);
    std::vector<int> m(n);
    for (int& v : m) v = pick(rng);
    return m;
}

}  // namespace

NSBox sample_nonsignaling(const BoxDims& dims, std::uint64_t seed) {
    auto rng = make_engine(derive_seed(seed, 0xb0f));
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    SampleWeights w{unit(rng), unit(rng), unit(rng)};
    const double sum = w.quantum + w.local + w.uniform;
    w.quantum /= sum;
    w.local /= sum;
    w.uniform /= sum;
    return sample_nonsignaling(dims, seed, w);
}

NSBox sample_nonsignaling(const BoxDims& dims, std::uint64_t seed, const SampleWeights& weights) {
    if (dims.table_size() > 100000)
        throw std::length_error("sample_nonsignaling: alphabet product exceeds 10^5");
    if (dims.x != dims.y || dims.a != dims.b)
        throw std::invalid_argument("sample_nonsignaling: bipartite alphabets must match");
    if (weights.quantum < 0 || weights.local < 0 || weights.uniform < 0 ||
        std::abs(weights.quantum + weights.local + weights.uniform - 1.0) > 1e-9)
        throw std::invalid_argument("sample_nonsignaling: weights must be a convex combination");

    const int d = dims.x, n = dims.a, z = dims.z, c = dims.c;
    auto rng = make_engine(derive_seed(seed, 0x5a3));
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    const SettingsFamily family(d, n);

    std::vector<double> data(dims.table_size(), 0.0);
    NSBox shape;  // only for index()
    shape.dims = dims;

    // (i) classical mixture of quantum boxes; mixture label m feeds z
    if (weights.quantum > 0.0) {
        std::vector<JointTable> tables;
        std::vector<double> wm(z);
        double wsum = 0.0;
        for (int m = 0; m < z; ++m) {
            tables.push_back(born_joint_table(random_schmidt_state(d, rng), family));
            wsum += wm[m] = unit(rng);
        }
        const auto chan = label_channel(c, z, z, rng);
        for (int m = 0; m < z; ++m) {
            const double wq = weights.quantum * wm[m] / wsum;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int x = 0; x < d; ++x)
                        for (int y = 0; y < d; ++y) {
                            const double pq = wq * tables[m].prob(a + 1, b + 1, x, y);
                            for (int ch = 0; ch < c; ++ch)
                                for (int zo = 0; zo < z; ++zo)
                                    data[shape.index(a, b, ch, x, y, zo)] +=
                                        pq * chan[(static_cast<std::size_t>(ch) * z + m) * z + zo];
                        }
        }
    }

    // (ii) local deterministic strategies; z reveals the strategy index
    if (weights.local > 0.0) {
        const int n_strat = std::max(z, 2);
        std::vector<double> ws(n_strat);
        double wsum = 0.0;
        for (double& v : ws) wsum += v = unit(rng);
        const auto chan = label_channel(c, z, n_strat, rng);
        for (int s = 0; s < n_strat; ++s) {
            const double wl = weights.local * ws[s] / wsum;
            const auto fa = random_outcome_map(n, d, rng);
            const auto gb = random_outcome_map(n, d, rng);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int ch = 0; ch < c; ++ch)
                        for (int zo = 0; zo < z; ++zo)
                            data[shape.index(a, b, ch, fa[a], gb[b], zo)] +=
                                wl * chan[(static_cast<std::size_t>(ch) * n_strat + s) * z + zo];
        }
    }

    // (iii) uniform box
    if (weights.uniform > 0.0) {
        const double cell = weights.uniform / (static_cast<double>(d) * d * z);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int ch = 0; ch < c; ++ch)
                    for (int x = 0; x < d; ++x)
                        for (int y = 0; y < d; ++y)
                            for (int zo = 0; zo < z; ++zo)
                                data[shape.index(a, b, ch, x, y, zo)] += cell;
    }

    NSBox box(dims, std::move(data));
    if (!is_nonsignaling(box))
        throw std::logic_error("sample_nonsignaling: generated box fails certification");
    return box;
}

namespace {

// flat index over the LP variables P(x,y,zo | a,b) with c fixed
struct LpIndex {
    int d, n, z;
    int operator()(int a, int b, int x, int y, int zo) const {
        return (((a * n + b) * d + x) * d + y) * z + zo;
    }
    int count() const { return n * n * d * d * z; }
};

}  // namespace

double lp_max_delta(int d, int n, int z, double i_cap, std::span<const int> sign_pattern) {
    if (d < 2 || n < 1 || z < 1) throw std::invalid_argument("lp_max_delta: bad alphabet sizes");
    if (static_cast<long long>(d) * d * z * n * n > 4096)
        throw std::length_error("lp_max_delta: variable count exceeds 4096");
    if (i_cap < 0.0) throw std::invalid_argument("lp_max_delta: i_cap must be nonnegative");
    if (static_cast<int>(sign_pattern.size()) != d)
        throw std::invalid_argument("lp_max_delta: sign pattern must have d entries");
    for (int s : sign_pattern)
        if (s != 1 && s != -1) throw std::invalid_argument("lp_max_delta: signs must be +/-1");

    const LpIndex idx{d, n, z};
    lp::Problem pb;
    pb.n_vars = idx.count();

    // normalization per (a,b)
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::vector<double> row(pb.n_vars, 0.0);
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y)
                    for (int zo = 0; zo < z; ++zo) row[idx(a, b, x, y, zo)] = 1.0;
            pb.eq_rows.push_back(std::move(row));
            pb.eq_rhs.push_back(1.0);
        }
    // P(x,z | a,b) independent of b
    for (int a = 0; a < n; ++a)
        for (int x = 0; x < d; ++x)
            for (int zo = 0; zo < z; ++zo)
                for (int b = 1; b < n; ++b) {
                    std::vector<double> row(pb.n_vars, 0.0);
                    for (int y = 0; y < d; ++y) {
                        row[idx(a, b, x, y, zo)] += 1.0;
                        row[idx(a, 0, x, y, zo)] -= 1.0;
                    }
                    pb.eq_rows.push_back(std::move(row));
                    pb.eq_rhs.push_back(0.0);
                }
    // P(y,z | a,b) independent of a
    for (int b = 0; b < n; ++b)
        for (int y = 0; y < d; ++y)
            for (int zo = 0; zo < z; ++zo)
                for (int a = 1; a < n; ++a) {
                    std::vector<double> row(pb.n_vars, 0.0);
                    for (int x = 0; x < d; ++x) {
                        row[idx(a, b, x, y, zo)] += 1.0;
                        row[idx(0, b, x, y, zo)] -= 1.0;
                    }
                    pb.eq_rows.push_back(std::move(row));
                    pb.eq_rhs.push_back(0.0);
                }

    // I_N(P_{XY|AB}) <= i_cap, with the wraparound term on (a=0, b=n-1)
    {
        std::vector<double> row(pb.n_vars, 0.0);
        auto add_term = [&](int a, int b, bool x_minus_y, int shift) {
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y) {
                    const int diff = x_minus_y ? x - y : y - x - shift;
                    const int k = ((diff % d) + d) % d;
                    for (int zo = 0; zo < z; ++zo) row[idx(a, b, x, y, zo)] += k;
                }
        };
        for (int i = 0; i < n; ++i) {
            add_term(i, i, true, 0);
            if (i + 1 < n)
                add_term(i + 1, i, false, 0);
            else
                add_term(0, n - 1, false, 1);
        }
        pb.ub_rows.push_back(std::move(row));
        pb.ub_rhs.push_back(i_cap);
    }

    // objective: sum_x sign[x] (P(x, z0 | a=0) - P(z0)/d) / d at z0 = 0,
    // with marginals taken at (a,b) = (0,0)
    pb.objective.assign(pb.n_vars, 0.0);
    double sign_sum = 0.0;
    for (int s : sign_pattern) sign_sum += s;
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y)
            pb.objective[idx(0, 0, x, y, 0)] =
                sign_pattern[x] / static_cast<double>(d) - sign_sum / (static_cast<double>(d) * d);

    const auto sol = lp::solve(pb);
    if (sol.status == lp::Status::infeasible)
        throw std::runtime_error("lp_max_delta: LP reported infeasible");
    if (sol.status == lp::Status::unbounded)
        throw std::logic_error("lp_max_delta: unbounded (feasible region is a polytope)");
    if (sol.duality_gap > 1e-7) throw std::logic_error("lp_max_delta: duality gap exceeds 1e-7");
    return sol.objective;
}

double lp_max_delta_all_patterns(int d, int n, int z, double i_cap) {
    if (d > 4) throw std::length_error("lp_max_delta_all_patterns: sign enumeration limited to d <= 4");
    std::vector<int> pattern(d, 1);
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        for (int x = 0; x < d; ++x) pattern[x] = (mask >> x) & 1u ? -1 : 1;
        best = std::max(best, lp_max_delta(d, n, z, i_cap, pattern));
    }
    return best;
}

}  // namespace qbound
