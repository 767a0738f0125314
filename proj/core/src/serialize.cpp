#include "lucky/serialize.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace lucky {

namespace {

using nlohmann::ordered_json;

constexpr int endpoint_digits = 40;

ordered_json constant_json(const ConstantEntry& e, const std::string& round) {
    ordered_json j;
    j["name"] = e.name;
    if (e.integer) {
        const std::string s = e.integer->get_str();
        j["lo"] = s;
        j["hi"] = s;
        j["decimal_display_with_question_mark"] = s;
    } else {
        j["lo"] = e.real->lo_string(endpoint_digits);
        j["hi"] = e.real->hi_string(endpoint_digits);
        j["decimal_display_with_question_mark"] = e.real->to_question_string();
    }
    j["lemma"] = e.lemma;
    j["round"] = round;
    return j;
}

ordered_json statement_json(const BoundStatement& s) {
    ordered_json j;
    j["id"] = s.id();
    j["form"] = std::string(form_name(s.form));
    j["round"] = s.round;
    j["valid_from"] = s.valid_from.get_str();
    j["valid_to"] = s.valid_to ? ordered_json(s.valid_to->get_str()) : ordered_json(nullptr);
    ordered_json c = ordered_json::object();
    for (const auto& [name, value] : s.constants) {
        c[name] = {{"lo", value.lo_string(endpoint_digits)}, {"hi", value.hi_string(endpoint_digits)}};
    }
    j["constants"] = c;
    return j;
}

std::string display(const ConstantEntry& e) {
    return e.integer ? e.integer->get_str() : e.real->to_question_string();
}

}  // namespace

std::string constants_json(const PipelineResult& result, const std::string& generated_at) {
    ordered_json doc;
    doc["generated_at"] = generated_at;
    ordered_json constants = ordered_json::array();
    ordered_json stages = ordered_json::array();
    for (const auto& stage : result.stages) {
        ordered_json st;
        st["stage"] = stage.stage;
        st["round"] = stage.constants.round();
        ordered_json names = ordered_json::array();
        for (const auto& e : stage.constants.entries()) {
            ordered_json c = constant_json(e, stage.constants.round());
            c["stage"] = stage.stage;
            constants.push_back(c);
            names.push_back(e.name);
        }
        st["constants"] = names;
        ordered_json statements = ordered_json::array();
        for (const auto& s : stage.statements) statements.push_back(statement_json(s));
        st["statements"] = statements;
        stages.push_back(st);
    }
    doc["constants"] = constants;
    doc["stages"] = stages;
    ordered_json coverage = ordered_json::array();
    for (const auto& [from, to] : result.coverage) {
        coverage.push_back({{"from", from.get_str()}, {"to", to ? ordered_json(to->get_str()) : ordered_json(nullptr)}});
    }
    doc["coverage"] = coverage;
    return doc.dump(2) + "\n";
}

std::string report_json_line(const VerificationReport& r) {
    ordered_json j;
    j["statement_id"] = r.statement_id;
    j["range"] = {r.lo, r.hi};
    j["outcome"] = std::string(outcome_name(r.outcome));
    if (r.first_violation) {
        const Violation& v = *r.first_violation;
        j["first_violation"] = {{"n", v.n},
                                {"quantity", v.quantity},
                                {"bound_lo", v.bound_lo},
                                {"bound_hi", v.bound_hi},
                                {"reason", v.reason}};
    } else {
        j["first_violation"] = nullptr;
    }
    j["indeterminate_count"] = r.indeterminate_count;
    j["first_indeterminate"] = r.first_indeterminate ? ordered_json(*r.first_indeterminate) : ordered_json(nullptr);
    j["checked"] = r.checked;
    j["precision"] = r.precision;
    j["wall_time"] = r.wall_time;
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump();
}

std::string constants_summary(const PipelineResult& result) {
    std::ostringstream out;
    for (const auto& stage : result.stages) {
        out << stage.stage << " (round " << stage.constants.round() << ")\n";
        std::size_t width = 4;
        for (const auto& e : stage.constants.entries()) width = std::max(width, e.name.size());
        for (const auto& e : stage.constants.entries()) {
            out << "  " << std::left << std::setw(static_cast<int>(width)) << e.name << "  " << display(e) << "\n";
        }
        for (const auto& s : stage.statements) {
            out << "  statement " << s.id() << " for n >= " << s.valid_from.get_str();
            if (s.valid_to) out << " up to " << s.valid_to->get_str();
            out << "\n";
        }
    }
    return out.str();
}

std::string reports_summary(const std::vector<VerificationReport>& reports) {
    std::ostringstream out;
    std::size_t width = 9;
    for (const auto& r : reports) width = std::max(width, r.statement_id.size());
    out << std::left << std::setw(static_cast<int>(width)) << "statement" << "  " << std::setw(13) << "outcome"
        << "  range\n";
    for (const auto& r : reports) {
        out << std::left << std::setw(static_cast<int>(width)) << r.statement_id << "  " << std::setw(13)
            << outcome_name(r.outcome) << "  [" << r.lo << ", " << r.hi << "]";
        if (r.first_violation) out << "  first violation at n = " << r.first_violation->n;
        if (r.indeterminate_count > 0) out << "  indeterminate: " << r.indeterminate_count;
        if (!r.note.empty()) out << "  " << r.note;
        out << "\n";
    }
    return out.str();
}

}  // namespace lucky
