#include "loadcast/report.hpp"

#include <json.hpp>

#include "loadcast/error.hpp"

namespace loadcast {

using nlohmann::json;

namespace {

json doubles(const std::vector<double>& v) { return json(v); }

std::vector<double> read_doubles(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array()) {
        throw ValidationError(std::string("report: missing array '") + field + "'");
    }
    return j.at(field).get<std::vector<double>>();
}

}  // namespace

std::string report_to_json(const pipeline::ForecastReport& report, int indent) {
    json j;
    j["model"] = report.model;
    j["seed"] = report.seed;
    json months = json::array();
    for (const auto& m : report.months) months.push_back(m.str());
    j["months"] = months;
    j["actual"] = doubles(report.actual);
    j["predicted"] = doubles(report.predicted);
    if (report.components) {
        j["components"] = {{"trend", doubles(report.components->trend)},
                           {"seasonal", doubles(report.components->seasonal)},
                           {"irregular", doubles(report.components->irregular)}};
    } else {
        j["components"] = nullptr;
    }
    json metrics = json::object();
    if (report.mape) metrics["mape"] = *report.mape;
    if (report.mae) metrics["mae"] = *report.mae;
    j["metrics"] = metrics;
    j["config"] = report.config;
    j["diagnostics"] = report.diagnostics;
    return j.dump(indent) + "\n";
}

pipeline::ForecastReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report: invalid JSON: ") + e.what());
    }
    pipeline::ForecastReport r;
    try {
        r.model = j.at("model").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& m : j.at("months")) r.months.push_back(MonthKey::parse(m.get<std::string>()));
        r.actual = read_doubles(j, "actual");
        r.predicted = read_doubles(j, "predicted");
        if (j.contains("components") && !j.at("components").is_null()) {
            const auto& c = j.at("components");
            r.components = pipeline::ComponentForecast{read_doubles(c, "trend"), read_doubles(c, "seasonal"),
                                                       read_doubles(c, "irregular")};
        }
        if (j.contains("metrics")) {
            const auto& m = j.at("metrics");
            if (m.contains("mape")) r.mape = m.at("mape").get<double>();
            if (m.contains("mae")) r.mae = m.at("mae").get<double>();
        }
        if (j.contains("config")) r.config = j.at("config").get<std::map<std::string, std::string>>();
        if (j.contains("diagnostics")) r.diagnostics = j.at("diagnostics").get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report: malformed field: ") + e.what());
    }
    r.check_consistency();
    return r;
}

std::string report_plot_csv(const pipeline::ForecastReport& report) {
    std::string out = "month,series,value\n";
    const auto emit = [&](const char* name, const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size() && i < report.months.size(); ++i) {
            out += report.months[i].str() + "," + name + "," + format_double(values[i]) + "\n";
        }
    };
    emit("actual", report.actual);
    emit("predicted", report.predicted);
    if (report.components) {
        emit("trend", report.components->trend);
        emit("seasonal", report.components->seasonal);
        emit("irregular", report.components->irregular);
    }
    return out;
}

std::string stat_report_to_json(const evalstat::StatReport& report, int indent) {
    json j;
    j["reference"] = report.reference;
    j["models"] = report.models;
    json wl = json::array();
    for (std::size_t i = 0; i < report.win_loss.size(); ++i) {
        const auto& w = report.win_loss[i];
        json row{{"model", w.model}, {"wins", w.wins}, {"losses", w.losses}};
        if (i < report.wilcoxon.size() && report.wilcoxon[i]) {
            const auto& t = *report.wilcoxon[i];
            row["wilcoxon"] = {{"statistic", t.statistic}, {"n", t.n}, {"p_value", t.p_value}, {"exact", t.exact}};
        } else {
            row["wilcoxon"] = nullptr;
        }
        wl.push_back(row);
    }
    j["comparisons"] = wl;
    if (report.friedman) {
        json ranks = json::object();
        for (std::size_t m = 0; m < report.models.size(); ++m) ranks[report.models[m]] = report.friedman->average_ranks[m];
        j["friedman"] = {{"average_ranks", ranks},
                         {"chi_square", report.friedman->chi_square},
                         {"p_value", report.friedman->p_value},
                         {"degrees_of_freedom", report.friedman->degrees_of_freedom}};
    } else {
        j["friedman"] = nullptr;
    }
    if (!report.friedman_note.empty()) j["friedman_note"] = report.friedman_note;
    return j.dump(indent) + "\n";
}

}  // namespace loadcast
