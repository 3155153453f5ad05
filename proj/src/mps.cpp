#include "fockscatter/mps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace fockscatter {

namespace {

struct Truncated {
    Matrix left;                   // isometry columns
    Eigen::VectorXd values;        // kept singular values
    Matrix right_adjoint;          // rows of V^dag
    double discarded_weight = 0.0;
};

// Keeps singular values above `tol` (absolute, or relative to the largest).
Truncated truncated_svd(const Matrix& m, std::size_t chi_max, double tol, bool relative = false) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (relative && s.size() > 0) tol *= s(0);
    std::size_t keep = 0;
    while (keep < static_cast<std::size_t>(s.size()) && keep < chi_max && s(keep) > tol) ++keep;
    keep = std::max<std::size_t>(keep, 1);

    Truncated out;
    const auto kept = static_cast<Eigen::Index>(keep);
    out.left = svd.matrixU().leftCols(kept);
    out.values = s.head(kept);
    out.right_adjoint = svd.matrixV().leftCols(kept).adjoint();
    out.discarded_weight = s.tail(s.size() - kept).squaredNorm();
    return out;
}

// X' = sum_{s',s} O(s',s) A[s']^dag X A[s]
Matrix transfer_left(const Matrix& x, const SiteTensor& a, const Matrix& op) {
    const auto d = static_cast<Eigen::Index>(a.size());
    Matrix out = Matrix::Zero(a.front().cols(), a.front().cols());
    for (Eigen::Index s = 0; s < d; ++s) {
        Matrix xa;
        bool have = false;
        for (Eigen::Index sp = 0; sp < d; ++sp) {
            const cplx o = op(sp, s);
            if (o == cplx(0.0)) continue;
            if (!have) {
                xa = x * a[s];
                have = true;
            }
            out.noalias() += o * (a[sp].adjoint() * xa);
        }
    }
    return out;
}

Matrix transfer_left_identity(const Matrix& x, const SiteTensor& a) {
    Matrix out = Matrix::Zero(a.front().cols(), a.front().cols());
    for (const auto& as : a) out.noalias() += as.adjoint() * (x * as);
    return out;
}

// R' = sum_s A[s] R A[s]^dag
Matrix transfer_right_identity(const Matrix& r, const SiteTensor& a) {
    Matrix out = Matrix::Zero(a.front().rows(), a.front().rows());
    for (const auto& as : a) out.noalias() += as * (r * as.adjoint());
    return out;
}

cplx trace_product(const Matrix& x, const Matrix& r) { return (x.transpose().cwiseProduct(r)).sum(); }

// Environments right of each bond up to the centre: env[pos] contracts sites
// pos..end and lives on the left bond of site pos.
std::vector<Matrix> right_environments(const TimeBinState& state) {
    const std::size_t n = state.sites.size();
    std::vector<Matrix> env(n + 1);
    env[n] = Matrix::Identity(1, 1);
    for (std::size_t pos = n; pos-- > 0;) {
        if (pos > state.center) {
            const auto dim = state.sites[pos].front().rows();
            env[pos] = Matrix::Identity(dim, dim);
        } else {
            env[pos] = transfer_right_identity(env[pos + 1], state.sites[pos]);
        }
    }
    return env;
}

void check_operator(const SiteTensor& site, const Matrix& op) {
    const auto d = static_cast<Eigen::Index>(site.size());
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("operator dimension " + std::to_string(op.rows()) +
                                    " does not match physical dimension " + std::to_string(d));
}

void right_canonicalize(TimeBinState& state, double svd_tol, std::size_t chi_max) {
    // A left-to-right pass first drops bond states unreachable from the left,
    // so the closing sweep leaves minimal bonds.
    for (std::size_t pos = 0; pos + 1 < state.sites.size(); ++pos) {
        SiteTensor& site = state.sites[pos];
        const auto d = static_cast<Eigen::Index>(site.size());
        const Eigen::Index rows = site.front().rows();
        const Eigen::Index cols = site.front().cols();
        Matrix m(d * rows, cols);
        for (Eigen::Index s = 0; s < d; ++s) m.middleRows(s * rows, rows) = site[s];
        // Only exact zeros go here; the tensors are not yet normalised.
        Truncated svd = truncated_svd(m, chi_max, 1e-14, true);
        for (Eigen::Index s = 0; s < d; ++s) site[s] = svd.left.middleRows(s * rows, rows);
        const Matrix carry = svd.values.asDiagonal() * svd.right_adjoint;
        for (auto& next : state.sites[pos + 1]) next = carry * next;
    }
    // Sweep from the last site to site 1 and leave the norm on site 0.
    for (std::size_t pos = state.sites.size() - 1; pos > 0; --pos) {
        SiteTensor& site = state.sites[pos];
        const auto d = static_cast<Eigen::Index>(site.size());
        const Eigen::Index rows = site.front().rows();
        const Eigen::Index cols = site.front().cols();
        Matrix m(rows, d * cols);
        for (Eigen::Index s = 0; s < d; ++s) m.middleCols(s * cols, cols) = site[s];
        Truncated svd = truncated_svd(m, chi_max, svd_tol);
        state.truncation_error += svd.discarded_weight;
        const Eigen::Index chi = svd.values.size();
        for (Eigen::Index s = 0; s < d; ++s) site[s] = svd.right_adjoint.middleCols(s * cols, cols);
        const Matrix carry = svd.left * svd.values.asDiagonal();
        for (auto& prev : state.sites[pos - 1]) prev = prev * carry;
        (void)chi;
    }
    state.center = 0;
}

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

}  // namespace

void CollisionConfig::validate(int photon_number) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (n_bins == 0) throw std::invalid_argument("n_bins must be positive");
    if (chi_max < 2) throw std::invalid_argument("chi_max must be at least 2");
    if (!(svd_tol >= 0.0)) throw std::invalid_argument("svd_tol must be non-negative");
    if (bin_cutoff < 1) throw std::invalid_argument("bin_cutoff must be at least 1");
    if (bin_cutoff < photon_number)
        throw std::invalid_argument("bin_cutoff " + std::to_string(bin_cutoff) + " is below the photon number " +
                                    std::to_string(photon_number));
}

std::vector<std::size_t> TimeBinState::bond_dimensions() const {
    std::vector<std::size_t> dims;
    dims.reserve(sites.size() + 1);
    for (const auto& site : sites) dims.push_back(static_cast<std::size_t>(site.front().rows()));
    if (!sites.empty()) dims.push_back(static_cast<std::size_t>(sites.back().front().cols()));
    return dims;
}

std::size_t TimeBinState::max_bond_dimension() const {
    const auto dims = bond_dimensions();
    return dims.empty() ? 0 : *std::max_element(dims.begin(), dims.end());
}

double TimeBinState::norm_squared() const {
    double n = 0.0;
    for (const auto& m : sites[center]) n += m.squaredNorm();
    return n;
}

Matrix annihilation_operator(int cutoff) {
    Matrix b = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int m = 1; m <= cutoff; ++m) b(m - 1, m) = std::sqrt(static_cast<double>(m));
    return b;
}

Matrix number_operator(int cutoff) {
    Matrix n = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int m = 0; m <= cutoff; ++m) n(m, m) = static_cast<double>(m);
    return n;
}

Matrix sigma_minus() {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

Matrix sigma_plus_sigma_minus() {
    Matrix s = Matrix::Zero(2, 2);
    s(1, 1) = 1.0;
    return s;
}

TimeBinState build_input_mps(std::span<const cplx> f_k, int photon_number, const CollisionConfig& cfg) {
    if (photon_number < 0) throw std::invalid_argument("photon number must be non-negative");
    cfg.validate(photon_number);
    if (f_k.size() != cfg.n_bins)
        throw std::invalid_argument("coefficient count " + std::to_string(f_k.size()) + " does not match n_bins " +
                                    std::to_string(cfg.n_bins));
    if (photon_number > 0) {
        double norm2 = 0.0;
        for (const cplx& f : f_k) norm2 += std::norm(f);
        if (std::abs(norm2 - 1.0) > 1e-10)
            throw std::invalid_argument("pulse coefficients are not normalised (sum |f_k|^2 = " +
                                        std::to_string(norm2) + ")");
    }

    const int n = photon_number;
    const int d = cfg.bin_cutoff + 1;
    TimeBinState state;
    state.bin_dim = d;
    state.dt = cfg.dt;
    state.sites.reserve(cfg.n_bins + 1);

    SiteTensor emitter(2, Matrix::Zero(1, 1));
    emitter[0](0, 0) = 1.0;
    state.sites.push_back(std::move(emitter));

    // Bond index counts the photons already placed to the left.
    for (std::size_t k = 0; k < cfg.n_bins; ++k) {
        const Eigen::Index rows = k == 0 ? 1 : n + 1;
        const Eigen::Index cols = k + 1 == cfg.n_bins ? 1 : n + 1;
        SiteTensor site(d, Matrix::Zero(rows, cols));
        for (Eigen::Index c = 0; c < rows; ++c) {
            for (int m = 0; m < d && c + m <= n; ++m) {
                const Eigen::Index target = c + m;
                if (cols == 1 && target != n) continue;
                const Eigen::Index col = cols == 1 ? 0 : target;
                site[m](c, col) = std::pow(f_k[k], m) / std::sqrt(factorial(m));
            }
        }
        if (k == 0) {
            for (auto& m : site) m *= std::sqrt(factorial(n));
        }
        state.sites.push_back(std::move(site));
    }
    right_canonicalize(state, cfg.svd_tol, cfg.chi_max);
    state.emitter_position = 0;
    return state;
}

Matrix collision_unitary(const SystemParams& p, double dt, int bin_cutoff) {
    if (!(p.gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
    const int d = bin_cutoff + 1;
    const Matrix b = annihilation_operator(bin_cutoff);
    const Matrix id_bin = Matrix::Identity(d, d);
    const Matrix sm = sigma_minus();
    const Matrix sp = sm.adjoint();

    auto kron = [](const Matrix& a, const Matrix& c) {
        Matrix out(a.rows() * c.rows(), a.cols() * c.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * c.rows(), j * c.cols(), c.rows(), c.cols()) = a(i, j) * c;
        return out;
    };

    // U = exp(-i K) with K Hermitian.
    const Matrix coupling = std::sqrt(p.gamma * dt) * (kron(sp, b) - kron(sm, b.adjoint()));
    const Matrix k = p.delta * dt * kron(sp * sm, id_bin) + cplx(0.0, 1.0) * coupling;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (k + k.adjoint()));
    const Eigen::VectorXcd phases =
        eig.eigenvalues().unaryExpr([](double lambda) { return std::polar(1.0, -lambda); });
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

bool collision_step_is_coarse(const SystemParams& p, double dt) { return p.gamma * dt > 0.05; }

StepRecord step(TimeBinState& state, std::size_t k, const Matrix& unitary, const CollisionConfig& cfg) {
    const std::size_t pos = state.emitter_position;
    if (k != pos) throw std::invalid_argument("bin " + std::to_string(k) + " is not the next bin to scatter");
    if (pos + 1 >= state.sites.size()) throw std::invalid_argument("no unscattered bins left");
    if (state.center != pos) throw std::logic_error("orthogonality centre is not on the emitter");

    const SiteTensor& emitter = state.sites[pos];
    const SiteTensor& bin = state.sites[pos + 1];
    const int d = state.bin_dim;
    const auto joint = static_cast<Eigen::Index>(2 * d);
    if (unitary.rows() != joint || unitary.cols() != joint)
        throw std::invalid_argument("collision unitary does not match emitter (x) bin dimension");

    std::vector<Matrix> theta(joint);
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m < d; ++m) theta[a * d + m] = emitter[a] * bin[m];

    const Eigen::Index chi_l = theta.front().rows();
    const Eigen::Index chi_r = theta.front().cols();
    std::vector<Matrix> evolved(joint, Matrix::Zero(chi_l, chi_r));
    for (Eigen::Index i = 0; i < joint; ++i)
        for (Eigen::Index j = 0; j < joint; ++j)
            if (unitary(i, j) != cplx(0.0)) evolved[i].noalias() += unitary(i, j) * theta[j];

    StepRecord rec;
    rec.time = state.dt * static_cast<double>(k + 1);
    rec.emitter_population = 0.0;
    rec.bin_occupation = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int m = 0; m < d; ++m) {
            const double w = evolved[a * d + m].squaredNorm();
            if (a == 1) rec.emitter_population += w;
            rec.bin_occupation += m * w;
        }
    }

    // Swap while splitting: the bin goes left (scattered), the emitter right.
    Matrix merged(d * chi_l, 2 * chi_r);
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m < d; ++m) merged.block(m * chi_l, a * chi_r, chi_l, chi_r) = evolved[a * d + m];

    Truncated svd = truncated_svd(merged, cfg.chi_max, cfg.svd_tol);
    state.truncation_error += svd.discarded_weight;
    const Eigen::Index chi = svd.values.size();

    SiteTensor new_bin(d);
    for (int m = 0; m < d; ++m) new_bin[m] = svd.left.middleRows(m * chi_l, chi_l);
    SiteTensor new_emitter(2);
    const Matrix sv = svd.values.asDiagonal() * svd.right_adjoint;
    for (int a = 0; a < 2; ++a) new_emitter[a] = sv.middleCols(a * chi_r, chi_r);

    state.sites[pos] = std::move(new_bin);
    state.sites[pos + 1] = std::move(new_emitter);
    state.emitter_position = pos + 1;
    state.center = pos + 1;

    rec.norm_squared = svd.values.squaredNorm();
    rec.bond_dimension = static_cast<std::size_t>(chi);
    return rec;
}

EvolutionResult evolve(TimeBinState state, const SystemParams& p, const CollisionConfig& cfg,
                       double carrier_detuning) {
    if (state.emitter_position != 0) throw std::invalid_argument("state has already been evolved");
    if (state.n_bins() != cfg.n_bins) throw std::invalid_argument("state and config disagree on n_bins");

    SystemParams effective = p;
    effective.delta = p.delta - carrier_detuning;
    if (!cfg.coupling) effective.gamma = 0.0;

    EvolutionResult result;
    if (collision_step_is_coarse(effective, cfg.dt))
        result.warnings.push_back("gamma dt = " + std::to_string(effective.gamma * cfg.dt) +
                                  " exceeds 0.05; collision error is first order in dt");

    result.initial_norm_squared = state.norm_squared();
    result.input_occupations = bin_occupations(state);
    double unscattered = 0.0;
    for (double n : result.input_occupations) unscattered += n;
    double scattered = 0.0;

    const Matrix unitary = collision_unitary(effective, cfg.dt, cfg.bin_cutoff);
    result.steps.reserve(cfg.n_bins);
    result.max_bond_dimension = state.max_bond_dimension();
    for (std::size_t k = 0; k < cfg.n_bins; ++k) {
        StepRecord rec = step(state, k, unitary, cfg);
        unscattered -= result.input_occupations[k];
        scattered += rec.bin_occupation;
        rec.excitation_number = rec.emitter_population + scattered + unscattered;
        result.max_bond_dimension = std::max(result.max_bond_dimension, rec.bond_dimension);
        result.steps.push_back(rec);
    }
    result.budget_exceeded = state.truncation_error > cfg.truncation_budget;
    if (result.budget_exceeded)
        result.warnings.push_back("accumulated truncation error " + std::to_string(state.truncation_error) +
                                  " exceeds budget " + std::to_string(cfg.truncation_budget));
    result.state = std::move(state);
    return result;
}

cplx expectation_local(const TimeBinState& state, std::size_t position, const Matrix& op) {
    if (position >= state.sites.size()) throw std::out_of_range("site index out of range");
    const SiteTensor& site = state.sites[position];
    check_operator(site, op);
    const std::size_t c = state.center;

    if (position <= c) {
        Matrix r = Matrix::Identity(site.front().cols(), site.front().cols());
        if (position < c) {
            r = Matrix::Identity(state.sites[c].front().cols(), state.sites[c].front().cols());
            for (std::size_t pos = c; pos > position; --pos) r = transfer_right_identity(r, state.sites[pos]);
        }
        const Matrix x = transfer_left(Matrix::Identity(site.front().rows(), site.front().rows()), site, op);
        return trace_product(x, r);
    }
    Matrix l = Matrix::Identity(state.sites[c].front().rows(), state.sites[c].front().rows());
    for (std::size_t pos = c; pos < position; ++pos) l = transfer_left_identity(l, state.sites[pos]);
    const Matrix x = transfer_left(l, site, op);
    return x.trace();
}

std::vector<double> bin_occupations(const TimeBinState& state) {
    const std::size_t n = state.sites.size();
    const Matrix number = number_operator(state.bin_dim - 1);
    const auto env = right_environments(state);
    std::vector<double> occ;
    occ.reserve(state.n_bins());

    Matrix l = Matrix::Identity(1, 1);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const SiteTensor& site = state.sites[pos];
        // Left-isometric sites below the centre contract to the identity.
        if (pos <= state.center) l = Matrix::Identity(site.front().rows(), site.front().rows());
        if (pos != state.emitter_position) occ.push_back(trace_product(transfer_left(l, site, number), env[pos + 1]).real());
        l = transfer_left_identity(l, site);
    }
    return occ;
}

cplx two_point_correlation(const TimeBinState& state, std::size_t j, std::size_t k) {
    const std::size_t scattered = state.scattered_bins();
    if (j >= scattered || k >= scattered)
        throw std::invalid_argument("correlations are only defined between scattered bins (" +
                                    std::to_string(scattered) + " scattered)");
    if (j > k) return std::conj(two_point_correlation(state, k, j));

    const Matrix b = annihilation_operator(state.bin_dim - 1);
    const Matrix bdag = b.adjoint();
    const Matrix number = number_operator(state.bin_dim - 1);

    // Sites from the centre down to k + 1.
    Matrix r = Matrix::Identity(state.sites[state.center].front().cols(), state.sites[state.center].front().cols());
    for (std::size_t pos = state.center; pos > k; --pos) r = transfer_right_identity(r, state.sites[pos]);

    const SiteTensor& sj = state.sites[j];
    const Matrix id = Matrix::Identity(sj.front().rows(), sj.front().rows());
    if (j == k) return trace_product(transfer_left(id, sj, number), r) / state.dt;

    Matrix x = transfer_left(id, sj, bdag);
    for (std::size_t pos = j + 1; pos < k; ++pos) x = transfer_left_identity(x, state.sites[pos]);
    x = transfer_left(x, state.sites[k], b);
    return trace_product(x, r) / state.dt;
}

Matrix output_correlations(const TimeBinState& state) {
    const std::size_t n = state.scattered_bins();
    const auto env = right_environments(state);
    const Matrix b = annihilation_operator(state.bin_dim - 1);
    const Matrix bdag = b.adjoint();
    const Matrix number = number_operator(state.bin_dim - 1);

    Matrix g = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const SiteTensor& sj = state.sites[j];
        const Matrix id = Matrix::Identity(sj.front().rows(), sj.front().rows());
        const auto jj = static_cast<Eigen::Index>(j);
        g(jj, jj) = trace_product(transfer_left(id, sj, number), env[j + 1]).real() / state.dt;
        Matrix x = transfer_left(id, sj, bdag);
        for (std::size_t k = j + 1; k < n; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const cplx value = trace_product(transfer_left(x, state.sites[k], b), env[k + 1]) / state.dt;
            g(jj, kk) = value;
            g(kk, jj) = std::conj(value);
            x = transfer_left_identity(x, state.sites[k]);
        }
    }
    return g;
}

namespace {

constexpr char kMagic[8] = {'F', 'S', 'M', 'P', 'S', '\0', '\0', '\0'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(bytes, 8);
}

void put_u32(std::ostream& os, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(bytes, 4);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
    unsigned char bytes[8];
    if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char bytes[4];
    if (!is.read(reinterpret_cast<char*>(bytes), 4)) throw std::runtime_error("truncated checkpoint");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

// Layout (little-endian): magic[8], u32 version, u32 bin_dim, u64 n_sites,
// u64 emitter_position, u64 center, f64 dt, f64 truncation_error, then per
// site u64 left, u64 phys, u64 right followed by left*phys*right (re, im)
// pairs in row-major [left][phys][right] order.
void save_checkpoint(const TimeBinState& state, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put_u32(os, kCheckpointVersion);
    put_u32(os, static_cast<std::uint32_t>(state.bin_dim));
    put_u64(os, state.sites.size());
    put_u64(os, state.emitter_position);
    put_u64(os, state.center);
    put_f64(os, state.dt);
    put_f64(os, state.truncation_error);
    for (const auto& site : state.sites) {
        const auto rows = site.front().rows();
        const auto cols = site.front().cols();
        put_u64(os, static_cast<std::uint64_t>(rows));
        put_u64(os, site.size());
        put_u64(os, static_cast<std::uint64_t>(cols));
        for (Eigen::Index l = 0; l < rows; ++l)
            for (const auto& m : site)
                for (Eigen::Index r = 0; r < cols; ++r) {
                    put_f64(os, m(l, r).real());
                    put_f64(os, m(l, r).imag());
                }
    }
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

TimeBinState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kMagic))
        throw std::runtime_error(path.string() + " is not an MPS checkpoint");
    const std::uint32_t version = get_u32(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));

    TimeBinState state;
    state.bin_dim = static_cast<int>(get_u32(is));
    const std::uint64_t n_sites = get_u64(is);
    state.emitter_position = get_u64(is);
    state.center = get_u64(is);
    state.dt = get_f64(is);
    state.truncation_error = get_f64(is);
    if (n_sites == 0 || state.emitter_position >= n_sites || state.center >= n_sites)
        throw std::runtime_error("corrupt checkpoint header");
    state.sites.resize(n_sites);
    for (auto& site : state.sites) {
        const auto rows = static_cast<Eigen::Index>(get_u64(is));
        const auto phys = get_u64(is);
        const auto cols = static_cast<Eigen::Index>(get_u64(is));
        if (phys == 0 || phys > 64 || rows <= 0 || cols <= 0) throw std::runtime_error("corrupt site header");
        site.assign(phys, Matrix::Zero(rows, cols));
        for (Eigen::Index l = 0; l < rows; ++l)
            for (auto& m : site)
                for (Eigen::Index r = 0; r < cols; ++r) {
                    const double re = get_f64(is);
                    const double im = get_f64(is);
                    m(l, r) = cplx(re, im);
                }
    }
    return state;
}

}  // namespace fockscatter
