#include "epi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

#include "epi/error.hpp"

namespace epi {

std::vector<RegressorSlot> default_grid(const GridOptions& options) {
    std::vector<RegressorSlot> slots;

    auto mlp = [&](Activation act, MlpOptimizer opt, int iters) {
        MlpConfig c;
        c.hidden_layers = options.mlp_hidden_layers;
        c.neurons_per_layer = options.mlp_neurons;
        c.activation = act;
        c.optimizer = opt;
        c.max_iterations = iters;
        c.seed = options.mlp_seed;
        return c;
    };
    const MlpConfig mlp_slots[] = {
        mlp(Activation::Tanh, MlpOptimizer::Lbfgs, 1000), mlp(Activation::Tanh, MlpOptimizer::Lbfgs, 5000),
        mlp(Activation::Tanh, MlpOptimizer::Lbfgs, 10000), mlp(Activation::Relu, MlpOptimizer::Lbfgs, 1000),
        mlp(Activation::Tanh, MlpOptimizer::Sgd, 1000)};
    for (int s = 0; s < 5; ++s) slots.push_back({s + 1, mlp_slots[s]});

    auto svr = [&](KernelKind kind, int degree) {
        SvrConfig c;
        c.kernel.kind = kind;
        c.kernel.degree = degree;
        c.c = options.svr_c;
        c.epsilon = options.svr_epsilon;
        return c;
    };
    const SvrConfig svr_slots[] = {svr(KernelKind::Rbf, 3), svr(KernelKind::Poly, 5), svr(KernelKind::Linear, 1),
                                   svr(KernelKind::Poly, 2), svr(KernelKind::Poly, 7)};
    for (int s = 0; s < 5; ++s) slots.push_back({s + 1, svr_slots[s]});

    const LinRegConfig lin_slots[] = {{0.5, 2500}, {0.1, 3000}, {0.01, 3500}, {0.001, 5000}, {0.0001, 10000}};
    for (int s = 0; s < 5; ++s) slots.push_back({s + 1, lin_slots[s]});
    return slots;
}

namespace {

std::string fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

DatasetFingerprint fingerprint(const CaseSeries& series) {
    DatasetFingerprint fp;
    fp.rows = series.size();
    if (!series.empty()) {
        fp.first_date = series.first_date().iso();
        fp.last_date = series.last_date().iso();
    }
    std::string dates;
    for (const auto& r : series.records) dates += r.date.iso() + ';';
    fp.column_hashes["date"] = fnv1a(dates);
    for (Column c : kAllColumns) {
        std::string cells;
        char buf[40];
        for (const auto& r : series.records) {
            if (r.value(c)) {
                std::snprintf(buf, sizeof buf, "%.17g", *r.value(c));
                cells += buf;
            }
            cells += ';';
        }
        fp.column_hashes[std::string(to_string(c))] = fnv1a(cells);
    }
    return fp;
}

const GridCell* ScoreTable::find(ModelFamily family, int slot, Column target) const {
    for (const auto& c : cells)
        if (c.family == family && c.slot == slot && c.target == target) return &c;
    return nullptr;
}

ScoreTable run_grid(const CaseSeries& series, const SplitSpec& split, const std::vector<RegressorSlot>& slots,
                    const GridRunOptions& options) {
    ScoreTable table;
    table.split = split;
    table.impute = options.impute;
    table.features = options.features;
    table.dataset = fingerprint(series);

    for (const auto& s : slots) {
        for (Column target : options.targets) {
            GridCell cell;
            cell.slot = s.slot;
            cell.family = s.family();
            cell.target = target;
            cell.config = s.config;
            table.cells.push_back(std::move(cell));
        }
    }

    auto run_cell = [&](GridCell& cell) {
        try {
            TrainRequest req;
            req.config = cell.config;
            req.target = cell.target;
            req.features = options.features;
            req.split = split;
            req.impute = options.impute;
            const PipelineResult r = run_pipeline(series, req);
            cell.scaled = r.scaled;
            cell.original = r.original;
            cell.status = r.model.info.status;
            cell.iterations = r.model.info.iterations;
            cell.flag = r.model.info.flag;
        } catch (const Error& e) {
            cell.flag = std::string(to_string(e.code()));
            cell.message = e.what();
            cell.status = "failed";
        } catch (const std::exception& e) {
            cell.flag = "Exception";
            cell.message = e.what();
            cell.status = "failed";
        }
    };

    const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(table.cells.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < table.cells.size(); i = next++) run_cell(table.cells[i]);
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return table;
}

RegressorSlot select_best(const ScoreTable& table, ModelFamily family) {
    std::map<int, std::pair<double, int>> sums;  // slot -> (sum r2, count)
    std::map<int, bool> invalid;
    std::map<int, ModelConfig> configs;
    for (const auto& c : table.cells) {
        if (c.family != family) continue;
        configs.emplace(c.slot, c.config);
        if (c.flagged() || !c.scaled) {
            invalid[c.slot] = true;
            continue;
        }
        sums[c.slot].first += c.scaled->r2;
        sums[c.slot].second += 1;
    }
    std::optional<int> best;
    double best_score = 0.0;
    for (const auto& [slot, acc] : sums) {  // ascending slot order keeps the lower slot on ties
        if (invalid[slot]) continue;
        const double score = acc.first / acc.second;
        if (!best || score > best_score) {
            best = slot;
            best_score = score;
        }
    }
    if (!best) throw Error(ErrorCode::NoValidCell, "no unflagged " + std::string(to_string(family)) + " cell");
    return {*best, configs.at(*best)};
}

ComparisonReport compare_models(const CaseSeries& series, const SplitSpec& split,
                                const std::vector<RegressorSlot>& best_slots, Column target, int horizon,
                                ImputePolicy impute) {
    if (horizon < 0) throw Error(ErrorCode::InvalidConfig, "horizon must be >= 0");
    ComparisonReport report;
    report.target = target;

    std::map<ModelFamily, TrainedModel> models;
    SplitIndices indices;
    for (const auto& slot : best_slots) {
        TrainRequest req;
        req.config = slot.config;
        req.target = target;
        req.split = split;
        req.impute = impute;
        PipelineResult r = run_pipeline(series, req);
        indices = r.data.indices;
        report.test_scores[slot.family()] = r.scaled;
        report.slots[slot.family()] = slot.slot;
        models.emplace(slot.family(), std::move(r.model));
    }
    if (models.empty()) return report;

    const std::size_t first = indices.test.front(), last = indices.test.back();
    const std::size_t total = last - first + 1 + (horizon > 0 ? series.size() - 1 - last + horizon : 0);
    std::vector<bool> in_test(series.size(), false);
    for (auto i : indices.test) in_test[i] = true;

    Matrix x(static_cast<Eigen::Index>(total), 1);
    for (std::size_t k = 0; k < total; ++k) {
        ComparisonRow row;
        const std::size_t idx = first + k;
        if (idx < series.size()) {
            const auto& rec = series.records[idx];
            row.date = rec.date;
            row.day_index = rec.day_index;
            row.observed = rec.value(target);
            row.in_test = in_test[idx];
        } else {
            const long ahead = static_cast<long>(idx - (series.size() - 1));
            row.date = series.last_date().plus_days(ahead);
            row.day_index = series.records.back().day_index + ahead;
        }
        x(static_cast<Eigen::Index>(k), 0) = static_cast<double>(row.day_index);
        report.rows.push_back(std::move(row));
    }
    for (const auto& [family, model] : models) {
        const Vector pred = model.predict_original(x);
        for (std::size_t k = 0; k < total; ++k) report.rows[k].predicted[family] = pred(static_cast<Eigen::Index>(k));
    }
    return report;
}

std::vector<ReferenceScore> reference_best_scores() {
    return {{ModelFamily::Mlp, 3, 0.9182, 0.9341},
            {ModelFamily::Svr, 2, 0.8413, 0.8633},
            {ModelFamily::Svr, 3, 0.8373, 0.8701},
            {ModelFamily::LinReg, 1, 0.7996, 0.8090}};
}

}  // namespace epi
