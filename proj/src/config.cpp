#include "xpay/config.hpp"

#include "xpay/byzantine.hpp"
#include "xpay/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace xpay {
namespace {

using nlohmann::json;

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) throw ConfigError("unknown field '" + key + "' in " + where);
}

Time time_of(const json& v, const std::string& where) {
    try {
        if (v.is_string()) return parse_time(v.get<std::string>());
        if (v.is_number_integer()) return Time(v.get<std::int64_t>());
        if (v.is_number()) return parse_time(v.dump());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + " must be a number or a rational string");
}

std::optional<Time> patience_entry(const json& v, const std::string& where) {
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) return std::nullopt;
    return time_of(v, where);
}

template <class T>
T integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < 0) throw ConfigError(where + " must be non-negative");
    return static_cast<T>(x);
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    return v.get<std::string>();
}

ParticipantId participant(const json& v, const std::string& where) {
    try {
        return parse_participant(text(v, where));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::vector<Time> grid_of(const json& v, Time delta, const std::string& where) {
    if (v.is_number_integer()) return uniform_grid(delta, integer<std::uint32_t>(v, where));
    if (!v.is_array()) throw ConfigError(where + " must be a point count or a list of delays");
    std::vector<Time> out;
    for (const auto& x : v) out.push_back(time_of(x, where));
    return out;
}

std::vector<DelayRule> rules_of(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be a list");
    std::vector<DelayRule> out;
    for (const auto& r : v) {
        only_keys(r, {"from", "to", "msg", "delay"}, where);
        DelayRule rule;
        if (r.contains("from")) rule.from = participant(r["from"], where + ".from");
        if (r.contains("to")) rule.to = participant(r["to"], where + ".to");
        if (r.contains("msg")) {
            try {
                rule.kind = parse_payload_kind(text(r["msg"], where + ".msg"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(where + ".msg: " + e.what());
            }
        }
        if (!r.contains("delay")) throw ConfigError(where + " rule needs a delay");
        rule.delay = time_of(r["delay"], where + ".delay");
        out.push_back(rule);
    }
    return out;
}

DelayModel delay_of(const json& v) {
    if (!v.is_object() || !v.contains("model")) throw ConfigError("delay needs a model");
    const auto model = text(v["model"], "delay.model");
    if (model == "synchronous") {
        only_keys(v, {"model", "delta", "grid"}, "delay");
        SynchronousDelay d;
        if (v.contains("delta")) d.delta = time_of(v["delta"], "delay.delta");
        if (v.contains("grid")) d.grid = grid_of(v["grid"], d.delta, "delay.grid");
        return d;
    }
    if (model == "partial_sync") {
        only_keys(v, {"model", "gst", "delta", "grid", "pre_gst"}, "delay");
        PartialSyncDelay d;
        if (!v.contains("gst")) throw ConfigError("partial_sync needs gst");
        d.gst = time_of(v["gst"], "delay.gst");
        if (v.contains("delta")) d.delta = time_of(v["delta"], "delay.delta");
        if (v.contains("grid")) d.grid = grid_of(v["grid"], d.delta, "delay.grid");
        if (v.contains("pre_gst")) d.pre_gst = rules_of(v["pre_gst"], "delay.pre_gst");
        return d;
    }
    if (model == "scripted") {
        only_keys(v, {"model", "delta", "default", "rules"}, "delay");
        ScriptedDelay d;
        if (v.contains("delta")) d.delta = time_of(v["delta"], "delay.delta");
        if (v.contains("default")) d.fallback = time_of(v["default"], "delay.default");
        else if (d.delta) d.fallback = *d.delta;
        if (v.contains("rules")) d.rules = rules_of(v["rules"], "delay.rules");
        return d;
    }
    throw ConfigError("unknown delay model '" + model + "'");
}

std::vector<Time> times_of(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be a list");
    std::vector<Time> out;
    for (const auto& x : v) out.push_back(time_of(x, where));
    return out;
}

Patience patience_of(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be a list");
    Patience out;
    for (const auto& x : v) out.push_back(patience_entry(x, where));
    return out;
}

TieBreak tie_of(const json& v, const std::string& where) {
    const auto s = text(v, where);
    if (s == "receive_first") return TieBreak::ReceiveFirst;
    if (s == "timeout_first") return TieBreak::TimeoutFirst;
    throw ConfigError(where + ": unknown tie-break '" + s + "'");
}

ExploreSpec explore_of(const json& v, const Scenario& s) {
    only_keys(v, {"grid", "candidates", "max_faulty", "strategies", "tie_breaks", "patience_options", "budget"},
              "explore");
    ExploreSpec e;
    if (v.contains("grid")) {
        const auto delta = delay_bound(s.delay);
        if (v["grid"].is_number_integer() && !delta) throw ConfigError("explore.grid as a count needs a delay bound");
        e.grid = grid_of(v["grid"], delta.value_or(Time{1}), "explore.grid");
    }
    if (v.contains("candidates")) {
        const auto& c = v["candidates"];
        if (c.is_string() && c.get<std::string>() == "all") {
            e.candidates = roster(s.n, false);
        } else if (c.is_array()) {
            for (const auto& x : c) e.candidates.push_back(participant(x, "explore.candidates"));
        } else {
            throw ConfigError("explore.candidates must be \"all\" or a list");
        }
    }
    e.max_faulty = v.contains("max_faulty") ? integer<std::uint32_t>(v["max_faulty"], "explore.max_faulty")
                                            : static_cast<std::uint32_t>(e.candidates.size());
    if (v.contains("strategies")) {
        const auto& st = v["strategies"];
        if (st.is_string() && st.get<std::string>() == "battery") {
            e.strategies.clear();
        } else if (st.is_array()) {
            for (const auto& x : st) e.strategies.push_back(text(x, "explore.strategies"));
        } else {
            throw ConfigError("explore.strategies must be \"battery\" or a list");
        }
    }
    if (v.contains("tie_breaks")) {
        e.tie_breaks.clear();
        if (!v["tie_breaks"].is_array()) throw ConfigError("explore.tie_breaks must be a list");
        for (const auto& x : v["tie_breaks"]) e.tie_breaks.push_back(tie_of(x, "explore.tie_breaks"));
    }
    if (v.contains("patience_options")) {
        if (!v["patience_options"].is_array()) throw ConfigError("explore.patience_options must be a list");
        for (const auto& p : v["patience_options"]) e.patience_options.push_back(patience_of(p, "explore.patience_options"));
    }
    if (v.contains("budget")) e.budget = integer<std::uint64_t>(v["budget"], "explore.budget");
    return e;
}

json time_json(const Time& t) { return format_time(t); }

json rules_json(const std::vector<DelayRule>& rules) {
    json out = json::array();
    for (const auto& r : rules) {
        json j;
        if (r.from) j["from"] = to_string(*r.from);
        if (r.to) j["to"] = to_string(*r.to);
        if (r.kind) j["msg"] = to_string(*r.kind);
        j["delay"] = time_json(r.delay);
        out.push_back(j);
    }
    return out;
}

json times_json(const std::vector<Time>& ts) {
    json out = json::array();
    for (const auto& t : ts) out.push_back(time_json(t));
    return out;
}

json verdict_json(const Verdict& v) {
    return {{"property", v.property}, {"status", to_string(v.status)}, {"detail", v.detail}, {"witness", v.witness}};
}

json tallies_json(const Tallies& tallies) {
    json out = json::object();
    for (const auto& [name, t] : tallies)
        out[name] = {{"holds", t.holds}, {"violated", t.violated}, {"vacuous", t.vacuous}, {"inapplicable", t.inapplicable}};
    return out;
}

}  // namespace

LoadedConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    only_keys(root,
              {"variant", "n", "amount", "instance", "delay", "rho", "pi", "epsilon", "timing", "byzantine",
               "patience", "patience_sufficient", "seed", "horizon", "clock_mode", "tie_break", "explore"},
              "config");
    LoadedConfig out;
    auto& s = out.scenario;
    if (!root.contains("n")) throw ConfigError("missing required field 'n'");
    s.n = integer<std::uint32_t>(root["n"], "n");
    if (root.contains("variant")) {
        const auto v = text(root["variant"], "variant");
        if (v == "strong") s.variant = Variant::Strong;
        else if (v == "weak") s.variant = Variant::Weak;
        else throw ConfigError("unknown variant '" + v + "'");
    }
    if (root.contains("amount")) s.amount = integer<std::int64_t>(root["amount"], "amount");
    if (root.contains("instance")) s.instance = integer<std::uint64_t>(root["instance"], "instance");
    if (root.contains("delay")) s.delay = delay_of(root["delay"]);
    if (root.contains("rho")) s.rho = time_of(root["rho"], "rho");
    if (root.contains("pi")) s.pi = time_of(root["pi"], "pi");
    if (root.contains("epsilon")) s.epsilon = time_of(root["epsilon"], "epsilon");
    if (root.contains("timing")) {
        const auto& t = root["timing"];
        if (t.is_object() && t.contains("auto")) {
            only_keys(t, {"auto"}, "timing");
            only_keys(t["auto"], {"margin"}, "timing.auto");
            AutoTiming a;
            if (t["auto"].contains("margin")) a.margin = time_of(t["auto"]["margin"], "timing.auto.margin");
            s.timing = a;
        } else {
            only_keys(t, {"a", "d"}, "timing");
            if (!t.contains("a") || !t.contains("d")) throw ConfigError("explicit timing needs both a and d");
            TimingParams p;
            p.n = s.n;
            p.a = times_of(t["a"], "timing.a");
            p.d = times_of(t["d"], "timing.d");
            p.pi = s.pi;
            p.rho = s.rho;
            const auto delta = delay_bound(s.delay);
            p.delta = delta.value_or(Time{1});
            p.epsilon = s.epsilon.value_or((1 + s.rho) * s.pi);
            s.timing = p;
        }
    }
    if (root.contains("byzantine")) {
        const auto& b = root["byzantine"];
        if (!b.is_object()) throw ConfigError("byzantine must map participants to strategies");
        for (const auto& [key, val] : b.items()) {
            only_keys(val, {"strategy", "delay"}, "byzantine." + key);
            StrategySpec spec;
            if (!val.contains("strategy")) throw ConfigError("byzantine." + key + " needs a strategy");
            spec.name = text(val["strategy"], "byzantine." + key + ".strategy");
            if (val.contains("delay")) spec.delay = time_of(val["delay"], "byzantine." + key + ".delay");
            s.byzantine[participant(json(key), "byzantine")] = spec;
        }
    }
    if (root.contains("patience")) s.patience = patience_of(root["patience"], "patience");
    if (root.contains("patience_sufficient")) {
        if (!root["patience_sufficient"].is_boolean()) throw ConfigError("patience_sufficient must be a boolean");
        s.patience_sufficient = root["patience_sufficient"].get<bool>();
    }
    if (root.contains("seed")) {
        s.seed = integer<std::uint64_t>(root["seed"], "seed");
        out.seed_given = true;
    }
    if (root.contains("horizon")) s.horizon = time_of(root["horizon"], "horizon");
    if (root.contains("clock_mode")) {
        const auto m = text(root["clock_mode"], "clock_mode");
        if (m == "identity") s.clock_mode = ClockMode::Identity;
        else if (m == "seeded") s.clock_mode = ClockMode::Seeded;
        else if (m == "fast_escrows") s.clock_mode = ClockMode::FastEscrows;
        else if (m == "slow_escrows") s.clock_mode = ClockMode::SlowEscrows;
        else throw ConfigError("unknown clock_mode '" + m + "'");
    }
    if (root.contains("tie_break")) s.tie_break = tie_of(root["tie_break"], "tie_break");

    s.validate();
    for (const auto& [who, spec] : s.byzantine) {
        // Rejects unknown or misplaced strategy names up front.
        (void)make_strategy(spec, who, s.variant, Time{1});
    }
    if (root.contains("explore")) out.explore = explore_of(root["explore"], s);
    return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["variant"] = to_string(s.variant);
    j["n"] = s.n;
    j["amount"] = s.amount;
    j["instance"] = s.instance;
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            json d;
            if constexpr (std::is_same_v<M, SynchronousDelay>) {
                d = {{"model", "synchronous"}, {"delta", time_json(m.delta)}};
                if (!m.grid.empty()) d["grid"] = times_json(m.grid);
            } else if constexpr (std::is_same_v<M, PartialSyncDelay>) {
                d = {{"model", "partial_sync"}, {"gst", time_json(m.gst)}, {"delta", time_json(m.delta)},
                     {"pre_gst", rules_json(m.pre_gst)}};
                if (!m.grid.empty()) d["grid"] = times_json(m.grid);
            } else {
                d = {{"model", "scripted"}, {"default", time_json(m.fallback)}, {"rules", rules_json(m.rules)}};
                if (m.delta) d["delta"] = time_json(*m.delta);
            }
            j["delay"] = d;
        },
        s.delay);
    j["rho"] = time_json(s.rho);
    j["pi"] = time_json(s.pi);
    if (s.epsilon) j["epsilon"] = time_json(*s.epsilon);
    if (const auto* a = std::get_if<AutoTiming>(&s.timing)) {
        j["timing"] = {{"auto", {{"margin", time_json(a->margin)}}}};
    } else {
        const auto& p = std::get<TimingParams>(s.timing);
        j["timing"] = {{"a", times_json(p.a)}, {"d", times_json(p.d)}};
    }
    json b = json::object();
    for (const auto& [who, spec] : s.byzantine) {
        json e{{"strategy", spec.name}};
        if (spec.delay) e["delay"] = time_json(*spec.delay);
        b[to_string(who)] = e;
    }
    j["byzantine"] = b;
    if (!s.patience.empty()) {
        json p = json::array();
        for (const auto& x : s.patience) p.push_back(x ? time_json(*x) : json("inf"));
        j["patience"] = p;
    }
    j["patience_sufficient"] = s.patience_sufficient;
    j["seed"] = s.seed;
    if (s.horizon) j["horizon"] = time_json(*s.horizon);
    j["clock_mode"] = to_string(s.clock_mode);
    j["tie_break"] = to_string(s.tie_break);
    return j.dump(2);
}

std::string run_report_json(const SimulationResult& result, const std::vector<Verdict>& verdicts) {
    json j;
    j["scenario"] = result.trace.header.digest;
    j["status"] = result.trace.status == RunStatus::Completed ? "completed" : "horizon";
    j["verdicts"] = json::array();
    for (const auto& v : verdicts) j["verdicts"].push_back(verdict_json(v));
    json finals = json::object();
    for (const auto& [who, f] : result.finals)
        finals[to_string(who)] = {
            {"state", f.state}, {"terminal", f.terminal}, {"balance", f.balance}, {"compliant", f.compliant}};
    j["finals"] = finals;
    return j.dump(2);
}

std::string sweep_report_json(const SweepReport& r) {
    json j;
    j["runs"] = r.runs;
    j["passing_runs"] = r.passing_runs;
    j["tallies"] = tallies_json(r.tallies);
    j["failures"] = json::array();
    for (const auto& f : r.failures) j["failures"].push_back({{"seed", f.seed}, {"verdict", verdict_json(f.verdict)}});
    return j.dump(2);
}

std::string explore_report_json(const ExploreReport& r) {
    json j;
    j["configurations"] = r.configurations;
    j["branches"] = r.branches;
    j["budget_exceeded"] = r.budget_exceeded;
    j["safety_violations"] = r.safety_violations;
    j["compliant_branches"] = r.compliant_branches;
    j["compliant_paid"] = r.compliant_paid;
    j["tallies"] = tallies_json(r.tallies);
    j["counterexamples"] = json::array();
    for (const auto& c : r.counterexamples)
        j["counterexamples"].push_back({{"property", c.property},
                                        {"detail", c.detail},
                                        {"delays", times_json(c.delays)},
                                        {"scenario", json::parse(scenario_to_json(c.scenario))}});
    return j.dump(2);
}

}  // namespace xpay
