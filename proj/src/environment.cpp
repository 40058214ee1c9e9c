#include "dynsam/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dynsam/grouprl.hpp"

namespace dynsam {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

struct InitComponent {
    double weight = 1.0;
    enum class Kind { Uniform, Beta, Const } kind = Kind::Uniform;
    double a = 0.0, b = 1.0;   // uniform bounds / beta shapes
    double lo = 0.0, hi = 1.0; // beta range scaling
};

std::vector<double> parse_args(const std::string& inner, const std::string& spec) {
    std::vector<double> args;
    std::size_t pos = 0;
    while (pos < inner.size()) {
        std::size_t comma = inner.find(',', pos);
        if (comma == std::string::npos)
            comma = inner.size();
        try {
            args.push_back(std::stod(inner.substr(pos, comma - pos)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number in init_dist: " + spec);
        }
        pos = comma + 1;
    }
    return args;
}

InitComponent parse_component(std::string comp, const std::string& spec) {
    InitComponent out;
    if (const std::size_t star = comp.find('*'); star != std::string::npos) {
        try {
            out.weight = std::stod(comp.substr(0, star));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad component weight in init_dist: " + spec);
        }
        if (!(out.weight > 0.0))
            throw std::invalid_argument("init_dist component weight must be > 0: " + spec);
        comp = comp.substr(star + 1);
    }
    const std::size_t open = comp.find('(');
    if (open == std::string::npos || comp.back() != ')')
        throw std::invalid_argument("malformed init_dist component: " + spec);
    const std::string name = comp.substr(0, open);
    const std::vector<double> args = parse_args(comp.substr(open + 1, comp.size() - open - 2), spec);

    if (name == "uniform") {
        if (args.size() != 2 || !(args[0] <= args[1]))
            throw std::invalid_argument("uniform(lo,hi) needs lo <= hi: " + spec);
        out.kind = InitComponent::Kind::Uniform;
        out.a = args[0];
        out.b = args[1];
    } else if (name == "beta") {
        if ((args.size() != 2 && args.size() != 4) || !(args[0] > 0.0) || !(args[1] > 0.0))
            throw std::invalid_argument("beta(a,b[,lo,hi]) needs positive shapes: " + spec);
        out.kind = InitComponent::Kind::Beta;
        out.a = args[0];
        out.b = args[1];
        if (args.size() == 4) {
            if (!(args[2] <= args[3]))
                throw std::invalid_argument("beta range needs lo <= hi: " + spec);
            out.lo = args[2];
            out.hi = args[3];
        }
    } else if (name == "const") {
        if (args.size() != 1)
            throw std::invalid_argument("const(x) takes one argument: " + spec);
        out.kind = InitComponent::Kind::Const;
        out.a = args[0];
    } else {
        throw std::invalid_argument("unknown init_dist component '" + name + "' in: " + spec);
    }
    return out;
}

}  // namespace

std::vector<double> sample_init_dist(const std::string& spec, std::int64_t n, Rng& rng) {
    if (n < 1)
        throw std::invalid_argument("init dist needs n >= 1");
    std::string body = spec;
    if (body.rfind("mix:", 0) == 0)
        body = body.substr(4);

    std::vector<InitComponent> comps;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t semi = body.find(';', pos);
        if (semi == std::string::npos)
            semi = body.size();
        std::string piece = body.substr(pos, semi - pos);
        piece.erase(std::remove_if(piece.begin(), piece.end(),
                                   [](unsigned char c) { return std::isspace(c); }),
                    piece.end());
        if (!piece.empty())
            comps.push_back(parse_component(piece, spec));
        pos = semi + 1;
    }
    if (comps.empty())
        throw std::invalid_argument("empty init_dist spec: " + spec);

    double total_weight = 0.0;
    for (const InitComponent& c : comps)
        total_weight += c.weight;

    // Deterministic component sizes (largest remainder), then shuffled
    // assignment so component membership is independent of sample id.
    std::vector<std::int64_t> counts(comps.size(), 0);
    std::int64_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> remainders;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const double exact = static_cast<double>(n) * comps[i].weight / total_weight;
        counts[i] = static_cast<std::int64_t>(std::floor(exact));
        assigned += counts[i];
        remainders.push_back({exact - std::floor(exact), i});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned)
        counts[remainders[k % remainders.size()].second] += 1;

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const InitComponent& c = comps[i];
        for (std::int64_t k = 0; k < counts[i]; ++k) {
            double v = 0.0;
            switch (c.kind) {
                case InitComponent::Kind::Uniform:
                    v = std::uniform_real_distribution<double>(c.a, c.b)(rng);
                    break;
                case InitComponent::Kind::Beta:
                    v = c.lo + (c.hi - c.lo) * draw_beta(rng, c.a, c.b);
                    break;
                case InitComponent::Kind::Const:
                    v = c.a;
                    break;
            }
            values.push_back(clamp01(v));
        }
    }
    std::shuffle(values.begin(), values.end(), rng);
    return values;
}

EnvironmentState::EnvironmentState(const EnvironmentConfig& config)
    : eta1_(config.eta1), eta2_(config.eta2), noise_(config.noise), rng_(mix64(config.seed)) {
    if (config.n_samples < 1)
        throw std::invalid_argument("environment needs n_samples >= 1");
    if (eta1_ < 0.0 || eta2_ < 0.0 || noise_ < 0.0)
        throw std::invalid_argument("environment rates must be non-negative");
    true_p_ = sample_init_dist(config.init_dist, config.n_samples, rng_);
}

EnvironmentState::EnvironmentState(std::vector<double> true_p, double eta1, double eta2,
                                   double noise, std::uint64_t seed)
    : true_p_(std::move(true_p)), eta1_(eta1), eta2_(eta2), noise_(noise), rng_(mix64(seed)) {
    if (true_p_.empty())
        throw std::invalid_argument("environment needs at least one sample");
    if (eta1_ < 0.0 || eta2_ < 0.0 || noise_ < 0.0)
        throw std::invalid_argument("environment rates must be non-negative");
    for (double p : true_p_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("true_p values must lie in [0,1]");
    }
}

double EnvironmentState::true_p(SampleId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= true_p_.size()) {
        throw std::out_of_range("sample id " + std::to_string(id) +
                                " outside environment of size " + std::to_string(true_p_.size()));
    }
    return true_p_[static_cast<std::size_t>(id)];
}

double EnvironmentState::mean_true_p() const {
    return std::accumulate(true_p_.begin(), true_p_.end(), 0.0) /
           static_cast<double>(true_p_.size());
}

RolloutOutcome EnvironmentState::rollout(SampleId id, int group_size) {
    if (group_size < 1)
        throw std::invalid_argument("rollout needs group_size >= 1");
    const double p = true_p(id);
    int correct = 0;
    if (p >= 1.0) {
        correct = group_size;
    } else if (p > 0.0) {
        correct = std::binomial_distribution<int>(group_size, p)(rng_);
    }
    return {id, group_size, correct};
}

void EnvironmentState::apply_training_update(const BatchSelection& batch,
                                             std::span<const RolloutOutcome> outcomes) {
    if (outcomes.size() != batch.entries.size()) {
        throw std::invalid_argument("batch has " + std::to_string(batch.entries.size()) +
                                    " entries but " + std::to_string(outcomes.size()) +
                                    " outcomes");
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].id != batch.entries[i].id)
            throw std::invalid_argument("outcome ids do not match batch entries");
    }

    const double f = outcomes.empty() ? 0.0 : effective_ratio(outcomes);

    std::vector<char> trained(true_p_.size(), 0);
    for (const RolloutOutcome& o : outcomes) {
        trained[static_cast<std::size_t>(o.id)] = 1;
        if (o.correct > 0 && o.correct < o.group_size) {
            double& p = true_p_[static_cast<std::size_t>(o.id)];
            p = clamp01(p + eta1_ * (1.0 - p));
        }
        // degenerate outcome: zero advantages, no movement
    }
    for (std::size_t i = 0; i < true_p_.size(); ++i) {
        if (trained[i])
            continue;
        double delta = eta2_ * f * (1.0 - true_p_[i]);
        if (noise_ > 0.0)
            delta += std::normal_distribution<double>(0.0, noise_)(rng_);
        true_p_[i] = clamp01(true_p_[i] + delta);
    }
}

double validation_proxy(const EnvironmentState& env, std::span<const SampleId> heldout) {
    if (heldout.empty())
        throw std::invalid_argument("validation proxy needs a non-empty held-out set");
    double sum = 0.0;
    for (SampleId id : heldout)
        sum += env.true_p(id);
    return sum / static_cast<double>(heldout.size());
}

}  // namespace dynsam
