#include "msamp/isde.hpp"

#include <cmath>
#include <numbers>

#include "msamp/rng.hpp"

namespace msamp {

double derive_step(double s_hat, double fac) {
    if (!(fac > 1.0)) {
        throw DataError("oversampling factor must exceed 1");
    }
    if (!(s_hat > 0.0)) {
        throw DataError("bandwidth must be positive");
    }
    return 2.0 * std::numbers::pi * s_hat / fac;
}

Index min_m0(double f0, double fac, double s_hat) {
    if (!(f0 > 0.0 && fac > 0.0 && s_hat > 0.0)) {
        throw DataError("min_m0 needs positive f0, fac and s_hat");
    }
    const double bound = 2.0 * std::log(100.0) * fac / (std::numbers::pi * f0 * s_hat);
    return static_cast<Index>(std::floor(bound)) + 1;
}

IsdeRunConfig IsdeRunConfig::derived(double s_hat, double f0, double fac, Index m0, Index n_mc,
                                     std::uint64_t seed) {
    IsdeRunConfig config;
    config.f0 = f0;
    config.fac = fac;
    config.delta_r = derive_step(s_hat, fac);
    config.m0 = m0;
    config.n_mc = n_mc;
    config.seed = seed;
    return config;
}

void IsdeRunConfig::validate() const {
    if (!(f0 > 0.0)) {
        throw DataError("f0 must be positive");
    }
    if (!(delta_r > 0.0) || !std::isfinite(delta_r)) {
        throw DataError("delta_r must be positive");
    }
    if (m0 < 1) {
        throw DataError("m0 must be at least 1");
    }
    if (n_mc < 0) {
        throw DataError("n_mc must be non-negative");
    }
}

DriftField kde_drift(const KdeModel& kde) {
    return [&kde](const Matrix& u, Matrix& out) { kde.potential_gradient(u, out); };
}

namespace {

struct Projection {
    const DiffusionBasis* basis = nullptr; // null: identity

    Index reduced_size(Index count) const { return basis ? basis->size() : count; }

    void lift(const Matrix& z, Matrix& u) const {
        if (basis) {
            u.noalias() = z * basis->g().transpose();
        } else {
            u = z;
        }
    }

    void reduce(const Matrix& full, Matrix& out) const {
        if (basis) {
            out.noalias() = full * basis->a();
        } else {
            out = full;
        }
    }
};

Projection make_projection(const BasisRef& ref) {
    if (const auto* b = std::get_if<std::reference_wrapper<const DiffusionBasis>>(&ref)) {
        return {&b->get()};
    }
    return {};
}

// Workspace-reusing step shared by verlet_step and run.
class Stepper {
public:
    Stepper(const DriftField& drift, Projection projection, const IsdeRunConfig& config)
        : drift_(drift), projection_(projection), dr_(config.delta_r),
          b_(config.f0 * config.delta_r / 4.0), sqrt_f0_(std::sqrt(config.f0)) {
        if (!(dr_ > 0.0) || !(config.f0 >= 0.0)) {
            throw DataError("verlet step needs delta_r > 0 and f0 >= 0");
        }
    }

    void step(Matrix& z, Matrix& y, Index step_index, const Matrix& noise) {
        z += (0.5 * dr_) * y;
        projection_.lift(z, lifted_);
        drift_(lifted_, gradient_);
        projection_.reduce(gradient_, force_);
        projection_.reduce(noise, reduced_noise_);
        y = ((1.0 - b_) / (1.0 + b_)) * y + (dr_ / (1.0 + b_)) * force_ +
            (sqrt_f0_ / (1.0 + b_)) * reduced_noise_;
        z += (0.5 * dr_) * y;
        if (!z.allFinite() || !y.allFinite()) {
            throw NumericError("integrator diverged at step " + std::to_string(step_index + 1) +
                               "; reduce delta_r (increase fac)");
        }
    }

private:
    const DriftField& drift_;
    Projection projection_;
    double dr_;
    double b_;
    double sqrt_f0_;
    Matrix lifted_, gradient_, force_, reduced_noise_;
};

void check_shapes(const IsdeState& state, const Projection& projection, Index nu, Index count,
                  const Matrix& noise) {
    const Index m = projection.reduced_size(count);
    if (state.z.rows() != nu || state.z.cols() != m || state.y.rows() != nu ||
        state.y.cols() != m) {
        throw DataError("isde state has shape inconsistent with the basis");
    }
    if (noise.rows() != nu || noise.cols() != count) {
        throw DataError("noise increment must be nu x N");
    }
}

} // namespace

IsdeState verlet_step(const IsdeState& state, const DriftField& drift, const BasisRef& basis,
                      const IsdeRunConfig& config, const Matrix& noise) {
    const Projection projection = make_projection(basis);
    const Index count = projection.basis ? projection.basis->samples() : state.z.cols();
    check_shapes(state, projection, state.z.rows(), count, noise);
    Stepper stepper(drift, projection, config);
    IsdeState next = state;
    stepper.step(next.z, next.y, state.step_index, noise);
    ++next.step_index;
    return next;
}

IsdeState verlet_step(const IsdeState& state, const KdeModel& kde, const BasisRef& basis,
                      const IsdeRunConfig& config, const Matrix& noise) {
    return verlet_step(state, kde_drift(kde), basis, config, noise);
}

Matrix wiener_increment(const IsdeRunConfig& config, Index nu, Index count, Index step) {
    const CounterStream stream(config.seed, StreamPurpose::Wiener, config.chain);
    Matrix noise(nu, count);
    stream.fill_normal(static_cast<std::uint64_t>(step), noise);
    noise *= std::sqrt(config.delta_r);
    return noise;
}

std::vector<Matrix> run(const NormalizedData& eta, const DriftField& drift, const BasisRef& basis,
                        const IsdeRunConfig& config) {
    config.validate();
    const Projection projection = make_projection(basis);
    const Index nu = eta.dim();
    const Index count = eta.samples();
    if (projection.basis && projection.basis->samples() != count) {
        throw DataError("basis has " + std::to_string(projection.basis->samples()) +
                        " rows but data has " + std::to_string(count) + " samples");
    }

    const CounterStream velocity_stream(config.seed, StreamPurpose::InitialVelocity, config.chain);
    const CounterStream wiener_stream(config.seed, StreamPurpose::Wiener, config.chain);

    Matrix initial_velocity(nu, count);
    velocity_stream.fill_normal(0, initial_velocity);
    Matrix z, y;
    projection.reduce(eta.eta, z);
    projection.reduce(initial_velocity, y);

    std::vector<Matrix> retained;
    retained.reserve(static_cast<std::size_t>(config.n_mc));
    Stepper stepper(drift, projection, config);
    Matrix noise(nu, count);
    const double noise_scale = std::sqrt(config.delta_r);
    const Index total = config.total_steps();
    for (Index step = 0; step < total; ++step) {
        wiener_stream.fill_normal(static_cast<std::uint64_t>(step), noise);
        noise *= noise_scale;
        stepper.step(z, y, step, noise);
        if ((step + 1) % config.m0 == 0) {
            Matrix sample;
            projection.lift(z, sample);
            retained.push_back(std::move(sample));
        }
    }
    return retained;
}

std::vector<Matrix> run(const NormalizedData& eta, const KdeModel& kde, const BasisRef& basis,
                        const IsdeRunConfig& config) {
    if (kde.dim() != eta.dim() || kde.samples() != eta.samples()) {
        throw DataError("kde model does not match the data dimensions");
    }
    return run(eta, kde_drift(kde), basis, config);
}

} // namespace msamp
