#pragma once

// Pauli-transfer-matrix (PTM) algebra.
//
// Conventions used throughout the library:
//   state       |rho>>_i  = Tr(sigma_i rho)              (not divided by 2^n)
//   observable  <<Q|_i    = Tr(sigma_i Q) / 2^n
//   map         M_ij      = Tr(sigma_i E(sigma_j)) / 2^n
// so that <<Q| M_N ... M_1 |rho>> = Tr(Q E_N(...E_1(rho))). Mixing the two
// normalizations silently breaks tomography, so only the constructors below
// should produce these objects from density matrices.
//
// Pauli strings are indexed base 4 with I=0, X=1, Y=2, Z=3 and the first
// qubit as the most significant digit; tensor() follows the same order.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace uqem {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kValidationTol = 1e-9;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

/// Number of Pauli strings on n qubits, 4^n.
constexpr std::size_t pauli_dim(int n_qubits) { return std::size_t{1} << (2 * n_qubits); }
constexpr std::size_t hilbert_dim(int n_qubits) { return std::size_t{1} << n_qubits; }

class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(std::vector<Pauli> letters);

    static PauliString from_str(std::string_view text);
    static PauliString from_index(int n_qubits, std::size_t index);
    static PauliString identity(int n_qubits);

    int n_qubits() const { return static_cast<int>(letters_.size()); }
    std::size_t index() const;
    std::span<const Pauli> letters() const { return letters_; }
    Pauli operator[](std::size_t q) const { return letters_[q]; }
    std::string str() const;
    bool is_identity() const;

    friend bool operator==(const PauliString&, const PauliString&) = default;

  private:
    std::vector<Pauli> letters_;
};

CMatrix pauli_matrix(Pauli p);
CMatrix pauli_matrix(const PauliString& p);

/// Column vector Tr(sigma_i rho).
class PtmState {
  public:
    PtmState() = default;
    PtmState(int n_qubits, Vector entries);

    int n_qubits() const { return n_qubits_; }
    const Vector& entries() const { return entries_; }
    double operator[](std::size_t i) const { return entries_[static_cast<Eigen::Index>(i)]; }

  private:
    int n_qubits_ = 0;
    Vector entries_;
};

/// Row vector Tr(sigma_i Q) / 2^n.
class PtmObservable {
  public:
    PtmObservable() = default;
    PtmObservable(int n_qubits, RowVector entries);

    /// Unit coordinate row for a Pauli observable.
    static PtmObservable pauli(const PauliString& p);

    int n_qubits() const { return n_qubits_; }
    const RowVector& entries() const { return entries_; }
    double operator[](std::size_t i) const { return entries_[static_cast<Eigen::Index>(i)]; }

  private:
    int n_qubits_ = 0;
    RowVector entries_;
};

/// Real 4^n x 4^n matrix, possibly trace decreasing.
class PtmMap {
  public:
    PtmMap() = default;
    PtmMap(int n_qubits, Matrix matrix);

    static PtmMap identity(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    const Matrix& matrix() const { return matrix_; }

    bool is_trace_preserving(double tol = kValidationTol) const;

  private:
    int n_qubits_ = 0;
    Matrix matrix_;
};

PtmState vectorize_state(const CMatrix& rho);
CMatrix density_matrix(const PtmState& s);
PtmState pure_state(const CVector& psi);
PtmObservable covectorize_observable(const CMatrix& q);

PtmMap ptm_of_unitary(const CMatrix& u);
PtmMap ptm_of_kraus(std::span<const CMatrix> ops);

/// Choi matrix sum_{kl} |k><l| (x) E(|k><l|), input factor first.
CMatrix choi_of_ptm(const PtmMap& m);

/// a after b.
PtmMap compose(const PtmMap& a, const PtmMap& b);
PtmMap tensor(const PtmMap& a, const PtmMap& b);
PtmState tensor(const PtmState& a, const PtmState& b);
PtmObservable tensor(const PtmObservable& a, const PtmObservable& b);

PtmState apply(const PtmMap& m, const PtmState& s);

/// <<obs| maps.back() ... maps.front() |state>>; maps are listed in the order applied.
double expectation(const PtmObservable& obs, std::span<const PtmMap> maps, const PtmState& state);
double expectation(const PtmObservable& obs, const PtmState& state);

/// Column-major flattening of the PTM, used to build decomposition systems.
Vector vectorize_map(const PtmMap& m);

/// Real Kronecker product with the first factor as the most significant index.
Matrix kron(const Matrix& a, const Matrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace uqem
