#include "uqem/gst.hpp"

#include <cmath>
#include <random>

#include "uqem/circuit.hpp"
#include "uqem/errors.hpp"
#include "uqem/fidelity.hpp"
#include "uqem/rng.hpp"

namespace uqem {

using nlohmann::json;

namespace {

// Base-4 digit of `index` for position `pos` among `count` positions, first
// position most significant.
int digit(std::size_t index, std::size_t pos, std::size_t count) {
    return static_cast<int>((index >> (2 * (count - 1 - pos))) & 3U);
}

Matrix inverse_checked(const Matrix& m, const char* what) {
    const double cond = condition_number(m);
    if (!(cond < kMaxConditionNumber)) {
        throw InversionError(std::string(what) + " is singular or ill-conditioned (condition number " +
                                 std::to_string(cond) + ")",
                             cond);
    }
    return m.inverse();
}

Matrix resample(const TomographyData& data, Rng& rng) {
    Matrix out(data.values.rows(), data.values.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            const auto& c = data.counts[static_cast<std::size_t>(i * out.cols() + j)];
            const std::int64_t n = c.total();
            const double p_plus = static_cast<double>(c.plus) / static_cast<double>(n);
            const double p_zero = static_cast<double>(c.zero) / static_cast<double>(n);
            std::binomial_distribution<std::int64_t> draw_plus(n, p_plus);
            const std::int64_t plus = draw_plus(rng);
            std::int64_t zero = 0;
            if (p_plus < 1.0 && n > plus) {
                std::binomial_distribution<std::int64_t> draw_zero(n - plus, std::min(1.0, p_zero / (1.0 - p_plus)));
                zero = draw_zero(rng);
            }
            const std::int64_t minus = n - plus - zero;
            out(i, j) = static_cast<double>(plus - minus) / static_cast<double>(n);
        }
    }
    return out;
}

json estimate_entry(const std::string& label, const PtmMap& estimate, const PtmMap& ideal,
                    const std::optional<double>& se) {
    json e;
    e["label"] = label;
    e["ptm"] = matrix_to_json(estimate.matrix());
    e["fidelity"] = process_fidelity(estimate, ideal);
    if (se) e["fidelity_se"] = *se;
    return e;
}

}  // namespace

double EntryCounts::mean() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(plus - minus) / static_cast<double>(n);
}

double condition_number(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0.0;
    const double smallest = s[s.size() - 1];
    return smallest > 0.0 ? s[0] / smallest : std::numeric_limits<double>::infinity();
}

TomographyData measure_tomography(const DeviceModel& device, const EffectiveOp* op, std::span<const int> qubits,
                                  const MeasurementMode& mode, std::uint64_t stream) {
    const int reg = device.n_qubits();
    const auto k = qubits.size();
    if (k == 0 || static_cast<int>(k) > reg) {
        throw ValidationError("measure_tomography: bad qubit list");
    }
    for (int q : qubits) {
        if (q < 0 || q >= reg) throw ValidationError("measure_tomography: qubit outside the register");
    }
    if (op != nullptr && static_cast<std::size_t>(op->n_qubits()) != k) {
        throw ValidationError("measure_tomography: op '" + op->label + "' does not match the qubit list");
    }
    const auto dim = pauli_dim(static_cast<int>(k));

    std::vector<CompiledOp> compiled;
    if (op != nullptr) compiled.push_back(compile_op(*op, device, reg, qubits));
    std::vector<const CompiledOp*> op_ptrs;
    for (const auto& c : compiled) op_ptrs.push_back(&c);

    std::vector<Vector> preps(dim);
    std::vector<RowVector> effects(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<int> p(static_cast<std::size_t>(reg), 0);
        std::vector<Pauli> letters(static_cast<std::size_t>(reg), Pauli::I);
        for (std::size_t m = 0; m < k; ++m) {
            p[static_cast<std::size_t>(qubits[m])] = digit(j, m, k);
            letters[static_cast<std::size_t>(qubits[m])] = static_cast<Pauli>(digit(j, m, k));
        }
        preps[j] = noisy_preparation(p, device).entries();
        effects[j] = device.effect(PauliString(letters)).entries();
    }

    TomographyData out;
    out.n_qubits = static_cast<int>(k);
    out.values = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (mode.exact()) {
        for (std::size_t j = 0; j < dim; ++j) {
            const Vector s = compiled.empty() ? preps[j] : Vector(compiled.front().exact * preps[j]);
            for (std::size_t i = 0; i < dim; ++i) {
                out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = effects[i].dot(s);
            }
        }
        return out;
    }

    out.counts.resize(dim * dim);
    const auto entries = static_cast<std::int64_t>(dim * dim);
#pragma omp parallel for schedule(static)
    for (std::int64_t e = 0; e < entries; ++e) {
        const auto i = static_cast<std::size_t>(e) / dim;
        const auto j = static_cast<std::size_t>(e) % dim;
        Rng rng = Rng::derive(mode.seed, stream, static_cast<std::uint64_t>(e));
        EntryCounts c;
        Vector state;
        for (std::int64_t s = 0; s < mode.shots; ++s) {
            state = preps[j];
            const double mid = propagate_shot(state, op_ptrs, rng);
            const double v = mid == 0.0 ? 0.0 : mid * sample_outcome(effects[i], state, rng);
            if (v > 0.5) {
                ++c.plus;
            } else if (v < -0.5) {
                ++c.minus;
            } else {
                ++c.zero;
            }
        }
        out.counts[static_cast<std::size_t>(e)] = c;
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.mean();
    }
    return out;
}

GramMatrix measure_gram(const DeviceModel& device, std::span<const int> qubits, const MeasurementMode& mode,
                        std::uint64_t stream) {
    auto data = measure_tomography(device, nullptr, qubits, mode, stream);
    return GramMatrix{data.n_qubits, std::move(data.values)};
}

Matrix measure_transfer(const DeviceModel& device, const EffectiveOp& op, std::span<const int> qubits,
                        const MeasurementMode& mode, std::uint64_t stream) {
    return measure_tomography(device, &op, qubits, mode, stream).values;
}

Matrix estimate_readout(const Matrix& gram) {
    const int n = gram.rows() == 4 ? 1 : 2;
    if (gram.rows() != gram.cols() || static_cast<std::size_t>(gram.rows()) != pauli_dim(n)) {
        throw ValidationError("estimate_readout: Gram matrix must be 4x4 or 16x16");
    }
    inverse_checked(gram, "Gram matrix");
    return gram * preparation_matrix(n).inverse();
}

PtmMap estimate_gate(const Matrix& B_hat, const Matrix& transfer) {
    if (B_hat.rows() != transfer.rows() || transfer.rows() != transfer.cols()) {
        throw ValidationError("estimate_gate: dimension mismatch");
    }
    const int n = B_hat.rows() == 4 ? 1 : 2;
    return PtmMap(n, inverse_checked(B_hat, "readout estimate") * transfer * preparation_matrix(n).inverse());
}

GateSetEstimate linear_inversion(const GramMatrix& g, const std::map<std::string, Matrix>& transfers) {
    GateSetEstimate est;
    est.n_qubits = g.n_qubits;
    est.A_hat = preparation_matrix(g.n_qubits);
    est.B_hat = estimate_readout(g.matrix);
    for (const auto& [label, t] : transfers) {
        est.U_hat.emplace(label, estimate_gate(est.B_hat, t));
    }
    return est;
}

QubitCharacterization characterize_qubit(const DeviceModel& device, int qubit, const std::vector<EffectiveOp>& ops,
                                         const MeasurementMode& mode) {
    QubitCharacterization out;
    out.qubit = qubit;
    const int where[] = {qubit};
    const auto base = 100 * static_cast<std::uint64_t>(qubit);
    out.gram = measure_tomography(device, nullptr, where, mode, base);
    out.B_hat = estimate_readout(out.gram.values);
    out.transfers.resize(ops.size());
    out.ops.resize(ops.size());
    for (std::size_t k = 0; k < ops.size(); ++k) {
        out.transfers[k] = measure_tomography(device, &ops[k], where, mode, base + 1 + k);
        out.ops[k] = ops[k];
        out.ops[k].ptm = estimate_gate(out.B_hat, out.transfers[k].values);
    }
    return out;
}

TwoQubitCharacterization characterize_two_qubit(const DeviceModel& device, const EffectiveOp& op,
                                                const Matrix& B_hat_0, const Matrix& B_hat_1,
                                                const MeasurementMode& mode, std::uint64_t stream) {
    if (device.n_qubits() != 2) {
        throw ValidationError("characterize_two_qubit: needs a two-qubit device");
    }
    TwoQubitCharacterization out;
    const int where[] = {0, 1};
    out.transfer = measure_tomography(device, &op, where, mode, stream);
    out.B_hat = kron(B_hat_0, B_hat_1);
    out.op = op;
    out.op.ptm = estimate_gate(out.B_hat, out.transfer.values);
    return out;
}

std::optional<double> bootstrap_fidelity_se(const std::vector<const TomographyData*>& grams,
                                            const TomographyData& transfer, const PtmMap& ideal, int resamples,
                                            std::uint64_t seed) {
    if (!transfer.sampled() || resamples < 2) return std::nullopt;
    for (const auto* g : grams) {
        if (!g->sampled()) return std::nullopt;
    }
    std::vector<double> f(static_cast<std::size_t>(resamples));
#pragma omp parallel for schedule(static)
    for (int r = 0; r < resamples; ++r) {
        Rng rng = Rng::derive(seed, 0x6273, static_cast<std::uint64_t>(r));
        Matrix B;
        for (const auto* g : grams) {
            const Matrix b = resample(*g, rng) * preparation_states_1q().inverse();
            B = B.size() == 0 ? b : kron(B, b);
        }
        const Matrix t = resample(transfer, rng);
        double value = std::numeric_limits<double>::quiet_NaN();
        try {
            value = process_fidelity(estimate_gate(B, t), ideal);
        } catch (const NumericalError&) {
        }
        f[static_cast<std::size_t>(r)] = value;
    }
    double sum = 0.0;
    double sq = 0.0;
    int used = 0;
    for (double v : f) {
        if (std::isnan(v)) continue;
        sum += v;
        sq += v * v;
        ++used;
    }
    if (used < 2) return std::nullopt;
    const double mean = sum / used;
    return std::sqrt(std::max(0.0, (sq - used * mean * mean) / (used - 1)));
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json gate_set_report(const DeviceModel& device, const std::vector<double>& phis, const MeasurementMode& mode,
                     int bootstrap_resamples) {
    json doc;
    doc["n_qubits"] = device.n_qubits();
    doc["mode"] = {{"shots", mode.shots}, {"seed", mode.seed}};
    doc["bootstrap_resamples"] = mode.exact() ? 0 : bootstrap_resamples;

    const auto ideal_ops = basis_operations_1q();
    std::vector<QubitCharacterization> chars;
    doc["qubits"] = json::array();
    for (int q = 0; q < device.n_qubits(); ++q) {
        chars.push_back(characterize_qubit(device, q, ideal_ops, mode));
        const auto& c = chars.back();
        json entry;
        entry["qubit"] = q;
        entry["gram"] = matrix_to_json(c.gram.values);
        entry["B_hat"] = matrix_to_json(c.B_hat);
        entry["ops"] = json::array();
        for (std::size_t k = 0; k < ideal_ops.size(); ++k) {
            const auto se = bootstrap_fidelity_se({&c.gram}, c.transfers[k], ideal_ops[k].ptm, bootstrap_resamples,
                                                  mode.seed + 7919 * (100 * static_cast<std::uint64_t>(q) + k + 1));
            entry["ops"].push_back(estimate_entry(ideal_ops[k].label, c.ops[k].ptm, ideal_ops[k].ptm, se));
        }
        doc["qubits"].push_back(std::move(entry));
    }

    doc["two_qubit"] = json::array();
    if (device.n_qubits() == 2) {
        for (std::size_t p = 0; p < phis.size(); ++p) {
            const EffectiveOp op = gate_op(ControlledPhase{phis[p]});
            const auto stream = 1000 + static_cast<std::uint64_t>(p);
            const auto c = characterize_two_qubit(device, op, chars[0].B_hat, chars[1].B_hat, mode, stream);
            const auto se = bootstrap_fidelity_se({&chars[0].gram, &chars[1].gram}, c.transfer, op.ptm,
                                                  bootstrap_resamples, mode.seed + 7919 * stream);
            json e = estimate_entry(op.label, c.op.ptm, op.ptm, se);
            e["phi"] = phis[p];
            doc["two_qubit"].push_back(std::move(e));
        }
    }
    return doc;
}

}  // namespace uqem
