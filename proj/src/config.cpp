#include "thybal/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace thybal {

namespace {

using nlohmann::json;

class Block {
public:
    Block(const json& doc, std::string path, std::set<std::string> allowed) : doc_(doc), path_(std::move(path))
    {
        if (!doc_.is_object())
            throw ConfigError(path_ + " must be an object");
        for (const auto& [key, value] : doc_.items()) {
            if (!allowed.count(key))
                throw ConfigError("unknown key " + path_ + "." + key);
        }
    }

    double number(const std::string& key) const
    {
        if (!doc_.contains(key))
            throw ConfigError("missing key " + path_ + "." + key);
        return as_number(doc_.at(key), key);
    }

    double number_or(const std::string& key, double fallback) const
    {
        return doc_.contains(key) ? as_number(doc_.at(key), key) : fallback;
    }

    int integer(const std::string& key) const
    {
        const double v = number(key);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw ConfigError(path_ + "." + key + " must be an integer");
        return static_cast<int>(v);
    }

    std::optional<std::vector<double>> list(const std::string& key) const
    {
        if (!doc_.contains(key))
            return std::nullopt;
        const json& arr = doc_.at(key);
        if (!arr.is_array())
            throw ConfigError(path_ + "." + key + " must be an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.push_back(as_number(arr[i], key + "[" + std::to_string(i) + "]"));
        return out;
    }

    std::optional<std::string> text(const std::string& key) const
    {
        if (!doc_.contains(key))
            return std::nullopt;
        if (!doc_.at(key).is_string())
            throw ConfigError(path_ + "." + key + " must be a string");
        return doc_.at(key).get<std::string>();
    }

private:
    double as_number(const json& v, const std::string& key) const
    {
        if (!v.is_number())
            throw ConfigError(path_ + "." + key + " must be a plain number (SI units)");
        return v.get<double>();
    }

    const json& doc_;
    std::string path_;
};

const json& require_block(const json& root, const std::string& name)
{
    if (!root.contains(name))
        throw ConfigError("missing block '" + name + "'");
    return root.at(name);
}

}  // namespace

ConfigFile parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    [[maybe_unused]] Block top(root, "config", {"circuit", "device", "tolerances", "design", "constraints", "sweep"});

    ConfigFile cfg;
    {
        Block b(require_block(root, "circuit"), "circuit", {"V_s", "N", "L"});
        cfg.circuit.source_voltage = b.number("V_s");
        cfg.circuit.device_count = b.integer("N");
        cfg.circuit.inductance = b.number("L");
    }
    {
        Block b(require_block(root, "device"), "device",
                {"t_dmax", "t_dmin", "t_on", "I_Dmax", "I_Dmin", "V_Ddc", "I_Trms", "I_TSM", "Q_max", "Q_min"});
        cfg.device.max_delay = b.number("t_dmax");
        cfg.device.min_delay = b.number("t_dmin");
        cfg.device.fall_time = b.number("t_on");
        cfg.device.max_leakage = b.number("I_Dmax");
        cfg.device.min_leakage = b.number("I_Dmin");
        cfg.device.rated_dc_voltage = b.number_or("V_Ddc", 0.0);
        cfg.device.rms_current = b.number_or("I_Trms", 0.0);
        cfg.device.surge_current = b.number_or("I_TSM", 0.0);
        cfg.device.max_recovery_charge = b.number("Q_max");
        cfg.device.min_recovery_charge = b.number("Q_min");
    }
    {
        Block b(require_block(root, "tolerances"), "tolerances", {"a_c", "a_R"});
        cfg.tolerances.capacitor = b.number("a_c");
        cfg.tolerances.resistor = b.number("a_R");
    }
    if (root.contains("design")) {
        Block b(root.at("design"), "design", {"R_s", "R_d", "C_d"});
        BalancingDesign d;
        d.static_resistance = b.number("R_s");
        d.damping_resistance = b.number("R_d");
        d.capacitance = b.number("C_d");
        d.tolerances = cfg.tolerances;
        cfg.design = d;
    }
    if (root.contains("constraints")) {
        Block b(root.at("constraints"), "constraints",
                {"max_overvoltage_pct", "max_charge_current", "max_discharge_current", "max_steady_voltage", "snap",
                 "min_damping_resistance"});
        DesignConstraints c;
        c.max_overvoltage_pct = b.number("max_overvoltage_pct");
        c.max_charge_current = b.number("max_charge_current");
        c.max_discharge_current = b.number("max_discharge_current");
        c.max_steady_voltage = b.number("max_steady_voltage");
        c.min_damping_resistance = b.number_or("min_damping_resistance", c.min_damping_resistance);
        if (auto snap = b.text("snap")) {
            auto parsed = parse_snap(*snap);
            if (!parsed)
                throw ConfigError("constraints.snap must be one of none, e12, e24");
            c.snap = *parsed;
        }
        cfg.constraints = c;
    }
    if (root.contains("sweep")) {
        Block b(root.at("sweep"), "sweep", {"cd_axis", "rd_values", "tdtol_values", "ton_values", "l_values"});
        SweepAxes axes;
        axes.cd_axis = b.list("cd_axis");
        axes.rd_values = b.list("rd_values");
        axes.tdtol_values = b.list("tdtol_values");
        axes.ton_values = b.list("ton_values");
        axes.l_values = b.list("l_values");
        cfg.sweep = axes;
    }
    return cfg;
}

ConfigFile load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SweepGrid make_grid(const ConfigFile& config)
{
    if (!config.sweep)
        throw ConfigError("missing block 'sweep'");
    const SweepAxes& axes = *config.sweep;
    const double base_damping = config.design ? config.design->damping_resistance : 0.0;
    SweepGrid grid = SweepGrid::around(config.base(), base_damping);
    if (axes.cd_axis)
        grid.capacitances = *axes.cd_axis;
    if (axes.rd_values)
        grid.damping_values = *axes.rd_values;
    if (axes.tdtol_values)
        grid.spread_values = *axes.tdtol_values;
    if (axes.ton_values)
        grid.fall_times = *axes.ton_values;
    if (axes.l_values)
        grid.inductances = *axes.l_values;
    return grid;
}

}  // namespace thybal
