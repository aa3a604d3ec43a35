#pragma once

// Serialisation: full-precision decimal output (17 significant digits) so
// downstream comparisons are bit-stable, JSON round-trip for potentials and
// reports, CSV emitters for the file formats the CLI produces.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mckv/bifurcation.hpp"
#include "mckv/dynamics.hpp"
#include "mckv/particles.hpp"
#include "mckv/transitions.hpp"

namespace mckv {

inline std::string full_precision(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// json stores doubles natively; nlohmann's serializer already round-trips
// them bit-exactly (shortest round-trip representation)
using json = nlohmann::json;

inline json to_json(const Potential& W)
{
    json j;
    j["name"] = W.name;
    j["L"] = W.L;
    j["d"] = W.d;
    j["kmax"] = W.kmax;
    json params = json::object();
    for (auto& [k, v] : W.params) params[k] = v;
    j["params"] = params;
    json coeffs = json::array();
    W.for_each_mode([&](FourierIndex k) {
        const double c = W.coeff(k);
        if (c == 0.0) return;
        json entry = json::array();
        json idx = json::array();
        idx.push_back(k.k1);
        if (W.d == 2) idx.push_back(k.k2);
        entry.push_back(idx);
        entry.push_back(c);
        coeffs.push_back(entry);
    });
    j["coeffs"] = coeffs;
    return j;
}

inline Potential potential_from_json(const json& j)
{
    Potential W;
    W.name = j.at("name").get<std::string>();
    W.L = j.at("L").get<double>();
    W.d = j.at("d").get<int>();
    W.kmax = j.at("kmax").get<int>();
    for (auto& [k, v] : j.at("params").items()) W.params[k] = v.get<double>();
    W.coeffs.assign(W.d == 1 ? W.kmax + 1 : (W.kmax + 1) * (W.kmax + 1), 0.0);
    for (const auto& entry : j.at("coeffs")) {
        FourierIndex k;
        k.k1 = entry[0][0].get<int>();
        if (W.d == 2) k.k2 = entry[0][1].get<int>();
        W.coeffs[W.idx(k)] = entry[1].get<double>();
    }
    return W;
}

// rebuild a catalog potential (reattaching closed forms) from name + params
inline Potential potential_from_catalog(const std::string& name,
                                        const std::map<std::string, double>& params,
                                        double L, int d, int kmax)
{
    if (name == "kuramoto")
        return kuramoto(static_cast<int>(params.at("kmode")), L, kmax);
    if (name == "hegselmann_krause" || name == "hegselmann_krause_rescaled")
        return hegselmann_krause(params.at("R"), L, params.count("rescaled") && params.at("rescaled") != 0.0, kmax);
    if (name == "onsager")
        return onsager(static_cast<int>(params.at("ell")), L, kmax);
    if (name == "bdz")
        return bdz(params.at("ell"), params.at("R"), L, kmax);
    if (name == "keller_segel")
        return keller_segel(params.at("s"), L, d, kmax);
    throw std::invalid_argument("unknown potential: " + name);
}

inline json to_json(const FunctionalReport& r)
{
    return json{{"S", r.S},        {"E", r.E}, {"F", r.F},
                {"H", r.H},        {"J", r.J}, {"EL_residual", r.EL_residual},
                {"finite", r.finite}};
}

inline json to_json(const StationaryState& st, int n_modes = 16)
{
    json j;
    j["kappa"] = st.kappa;
    j["beta"] = st.beta;
    j["residual"] = st.residual;
    j["converged"] = st.converged;
    j["iterations"] = st.iterations;
    j["free_energy"] = st.report.F;
    j["report"] = to_json(st.report);
    json modes = json::array();
    const int b = st.mode_profile.grid.band();
    for (int k = 0; k <= std::min(n_modes - 1, b); ++k) {
        json m;
        m["k"] = k;
        m["cos"] = st.mode_profile.at({k, 0});
        if (k > 0) m["sin"] = st.mode_profile.at({-k, 0});
        modes.push_back(m);
    }
    j["modes"] = modes;
    return j;
}

inline json to_json(const std::vector<BifurcationPoint>& pts)
{
    json arr = json::array();
    for (const auto& p : pts) {
        json j;
        json idx = json::array();
        idx.push_back(p.k.k1);
        if (p.k.k2 != 0) idx.push_back(p.k.k2);
        j["k"] = idx;
        j["kappa"] = p.kappa;
        j["multiplicity"] = p.multiplicity;
        j["simple"] = p.simple;
        j["odd_multiplicity"] = p.odd_multiplicity;
        arr.push_back(j);
    }
    return arr;
}

inline json to_json(const TransitionReport& r)
{
    json j;
    j["has_transition"] = r.has_transition;
    j["kappa_c"] = r.kappa_c;
    j["bracket"] = json::array({r.bracket_lo, r.bracket_hi});
    j["kappa_sharp"] = r.kappa_sharp;
    j["l1_jump"] = r.l1_jump;
    j["classification"] = to_string(r.classification);
    j["evidence"] = json{{"delta_star", r.delta_star},
                         {"delta_star_found", r.delta_star_found},
                         {"free_energy_crossing", r.free_energy_crossing},
                         {"discontinuous_predictor", to_string(r.discontinuous_predictor)},
                         {"continuous_predictor", to_string(r.continuous_predictor)}};
    return j;
}

// --- CSV emitters ----------------------------------------------------------

inline void write_csv_row(std::ostream& os, const std::vector<double>& row)
{
    for (size_t i = 0; i < row.size(); ++i)
        os << (i ? "," : "") << full_precision(row[i]);
    os << "\n";
}

inline void write_profile_csv(std::ostream& os, const DensityField& rho)
{
    os << "x,rho\n";
    const TorusGrid& g = rho.grid;
    for (int i = 0; i < g.M; ++i)
        write_csv_row(os, {g.node(i), rho[i]});
}

inline void write_branch_csv(std::ostream& os, const Branch& br)
{
    os << "s,kappa,l1_distance,free_energy,residual,leading_mode_amplitude\n";
    for (const auto& p : br.points)
        write_csv_row(os, {p.s, p.kappa, p.l1_distance, p.state.report.F,
                           p.state.residual, p.state.mode_profile.at(br.origin.k)});
}

inline void write_scan_csv(std::ostream& os, const TransitionReport& r)
{
    os << "kappa,min_free_energy,l1_distance,n_states_found\n";
    for (const auto& s : r.trace)
        write_csv_row(os, {s.kappa, s.min_free_energy, s.l1_distance,
                           static_cast<double>(s.n_states_found)});
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr)
{
    os << "t,mass,min_value,F,H,J,l2_distance\n";
    for (const auto& s : tr.diagnostics)
        write_csv_row(os, {s.t, s.mass, s.min_value, s.F, s.H, s.J, s.l2_distance});
}

inline void write_particles_csv(std::ostream& os, const ParticleEnsemble& e)
{
    os << "# N=" << e.N << " L=" << full_precision(e.L)
       << " seed=" << e.seed << " kappa=" << full_precision(e.kappa)
       << " beta=" << full_precision(e.beta) << " t=" << full_precision(e.t) << "\n";
    os << "x\n";
    for (double x : e.positions) os << full_precision(x) << "\n";
}

inline void write_order_parameter_csv(std::ostream& os,
                                      const std::vector<std::array<double, 3>>& rows)
{
    os << "kappa,a,l1_distance_of_closed_form_state\n";
    for (const auto& r : rows) write_csv_row(os, {r[0], r[1], r[2]});
}

inline void save_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

} // namespace mckv
