// SPDX-License-Identifier: Apache-2.0
//
// rismcrb - localization bounds under RIS amplitude-model mismatch
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISMCRB_EXPERIMENTS_CONFIG_HPP
#define RISMCRB_EXPERIMENTS_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../estimator.hpp"

namespace rismcrb::experiments
{
    // Defaults reproduce the reference setup: 50x50 half-wavelength RIS at
    // 28 GHz in the z = 0 plane, BS at 5.77 (-1, 1, 1) m, UE at d (1, 1, 1)/sqrt(3).
    struct SceneSection
    {
        double carrier_hz = 28e9;
        int ris_rows = 50;
        int ris_cols = 50;
        double spacing_m = 0.0; // 0 selects lambda / 2
        Vec3 p_ris = Vec3::Zero();
        Vec3 p_bs = 5.77 * Vec3(-1.0, 1.0, 1.0);
        Vec3 ue_direction = Vec3(1.0, 1.0, 1.0);
        std::vector<double> ue_distance{5.0};
        std::vector<int> ris_sides{30, 40, 50, 60, 70, 80, 90, 100}; // sweep-size, square lattices
    };

    struct ModelSection
    {
        std::vector<double> beta_min{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
        double phi = 0.0;
        double kappa = 2.0;
    };

    struct SignalSection
    {
        int transmissions = 50;
        double pilot_energy = 1.0;
        std::vector<double> snr_db{20.0, 30.0, 40.0};
        cplx alpha{1.0, 0.0};
    };

    struct RunSection
    {
        int n_profiles = 20;
        int n_trials = 100;
        std::uint64_t master_seed = 1;
        int threads = 1;
        int snr_profile = 0; // profile index used by sweep-snr
        int full_scale_profiles = 200;
        int full_scale_trials = 100;
        OptimizerSettings optimizer{};
        EstimatorSettings estimator{};
    };

    struct OutputSection
    {
        std::string directory = "results";
        std::vector<std::string> formats{"csv"}; // csv, gnuplot
        bool trial_log = false;
    };

    struct ExperimentConfig
    {
        SceneSection scene;
        ModelSection model;
        SignalSection signal;
        RunSection run;
        OutputSection output;
        std::string source = "<defaults>";

        SceneConfig scene_at(double distance, int rows, int cols) const
        {
            const Vec3 u = scene.ue_direction.normalized();
            return SceneConfig::make(scene.carrier_hz, rows, cols, scene.spacing_m, scene.p_ris, scene.p_bs,
                                     scene.p_ris + distance * u);
        }

        SceneConfig scene_at(double distance) const { return scene_at(distance, scene.ris_rows, scene.ris_cols); }

        ParameterVector eta_true(const SceneConfig &sc) const { return {signal.alpha, sc.p_ue_true()}; }

        AmplitudeModel model_for(double beta_min) const { return {beta_min, model.phi, model.kappa}; }

        void set_seed(std::uint64_t seed)
        {
            run.master_seed = seed;
            run.optimizer.start_seed = seed;
            run.estimator.optimizer.start_seed = seed;
        }

        bool wants_format(const std::string &f) const
        {
            for (const auto &x : output.formats)
                if (x == f)
                    return true;
            return false;
        }
    };

    namespace detail
    {
        inline std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline std::vector<std::string> split_list(const std::string &v, int line)
        {
            std::vector<std::string> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (item.empty())
                    throw ConfigError("empty list element", line);
                out.push_back(item);
            }
            if (out.empty())
                throw ConfigError("list must not be empty", line);
            return out;
        }

        inline double parse_double(const std::string &s, int line)
        {
            double v = 0.0;
            const auto *end = s.data() + s.size();
            const auto r = std::from_chars(s.data(), end, v);
            if (r.ec != std::errc{} || r.ptr != end || !std::isfinite(v))
                throw ConfigError("expected a finite number, got '" + s + "'", line);
            return v;
        }

        inline long long parse_int(const std::string &s, int line)
        {
            long long v = 0;
            const auto *end = s.data() + s.size();
            const auto r = std::from_chars(s.data(), end, v);
            if (r.ec != std::errc{} || r.ptr != end)
                throw ConfigError("expected an integer, got '" + s + "'", line);
            return v;
        }

        inline std::uint64_t parse_u64(const std::string &s, int line)
        {
            std::uint64_t v = 0;
            const auto *end = s.data() + s.size();
            const auto r = std::from_chars(s.data(), end, v);
            if (r.ec != std::errc{} || r.ptr != end)
                throw ConfigError("expected an unsigned 64-bit integer, got '" + s + "'", line);
            return v;
        }

        inline bool parse_bool(const std::string &s, int line)
        {
            if (s == "true" || s == "1" || s == "yes")
                return true;
            if (s == "false" || s == "0" || s == "no")
                return false;
            throw ConfigError("expected true/false, got '" + s + "'", line);
        }

        inline int parse_count(const std::string &s, int line, int lo, const char *what)
        {
            const long long v = parse_int(s, line);
            if (v < lo || v > 1000000000LL)
                throw ConfigError(std::string(what) + " must be >= " + std::to_string(lo), line);
            return static_cast<int>(v);
        }

        inline double parse_positive(const std::string &s, int line, const char *what)
        {
            const double v = parse_double(s, line);
            if (!(v > 0.0))
                throw ConfigError(std::string(what) + " must be positive", line);
            return v;
        }

        inline Vec3 parse_vec3(const std::string &s, int line)
        {
            const auto items = split_list(s, line);
            if (items.size() != 3)
                throw ConfigError("expected three comma-separated numbers", line);
            return {parse_double(items[0], line), parse_double(items[1], line), parse_double(items[2], line)};
        }

        inline std::vector<double> parse_doubles(const std::string &s, int line)
        {
            std::vector<double> out;
            for (const auto &item : split_list(s, line))
                out.push_back(parse_double(item, line));
            return out;
        }

        using Setter = std::function<void(ExperimentConfig &, const std::string &, int)>;

        inline const std::map<std::string, std::map<std::string, Setter>> &schema()
        {
            static const std::map<std::string, std::map<std::string, Setter>> table{
                {"scene",
                 {
                     {"carrier_hz", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.scene.carrier_hz = parse_positive(v, l, "carrier_hz"); }},
                     {"wavelength_m", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.scene.carrier_hz = speed_of_light / parse_positive(v, l, "wavelength_m"); }},
                     {"ris_rows", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.scene.ris_rows = parse_count(v, l, 1, "ris_rows"); }},
                     {"ris_cols", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.scene.ris_cols = parse_count(v, l, 1, "ris_cols"); }},
                     {"spacing_m", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.scene.spacing_m = parse_double(v, l);
                          if (c.scene.spacing_m < 0.0)
                              throw ConfigError("spacing_m must be >= 0 (0 selects half wavelength)", l);
                      }},
                     {"p_ris", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.scene.p_ris = parse_vec3(v, l); }},
                     {"p_bs", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.scene.p_bs = parse_vec3(v, l); }},
                     {"ue_direction", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.scene.ue_direction = parse_vec3(v, l);
                          if (!(c.scene.ue_direction.norm() > 0.0))
                              throw ConfigError("ue_direction must be nonzero", l);
                      }},
                     {"ue_distance", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.scene.ue_distance = parse_doubles(v, l);
                          for (double d : c.scene.ue_distance)
                              if (!(d > 0.0))
                                  throw ConfigError("ue_distance entries must be positive", l);
                      }},
                     {"ris_sides", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.scene.ris_sides.clear();
                          for (const auto &item : split_list(v, l))
                              c.scene.ris_sides.push_back(parse_count(item, l, 1, "ris_sides"));
                      }},
                 }},
                {"model",
                 {
                     {"beta_min", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.model.beta_min = parse_doubles(v, l);
                          for (double b : c.model.beta_min)
                              if (b < 0.0 || b > 1.0)
                                  throw ConfigError("beta_min entries must lie in [0, 1]", l);
                      }},
                     {"phi", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.model.phi = parse_double(v, l); }},
                     {"kappa", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.model.kappa = parse_double(v, l);
                          if (c.model.kappa < 0.0)
                              throw ConfigError("kappa must be >= 0", l);
                      }},
                 }},
                {"signal",
                 {
                     {"transmissions", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.signal.transmissions = parse_count(v, l, 1, "transmissions"); }},
                     {"pilot_energy", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.signal.pilot_energy = parse_positive(v, l, "pilot_energy"); }},
                     {"snr_db", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.signal.snr_db = parse_doubles(v, l); }},
                     {"alpha", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          const auto d = parse_doubles(v, l);
                          if (d.size() != 2)
                              throw ConfigError("alpha takes two numbers: real, imag", l);
                          c.signal.alpha = {d[0], d[1]};
                          if (!(std::abs(c.signal.alpha) > 0.0))
                              throw ConfigError("alpha must be nonzero", l);
                      }},
                 }},
                {"run",
                 {
                     {"n_profiles", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.n_profiles = parse_count(v, l, 1, "n_profiles"); }},
                     {"n_trials", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.n_trials = parse_count(v, l, 1, "n_trials"); }},
                     {"master_seed", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.master_seed = parse_u64(v, l); }},
                     {"threads", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.threads = parse_count(v, l, 1, "threads"); }},
                     {"snr_profile", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.snr_profile = parse_count(v, l, 0, "snr_profile"); }},
                     {"full_scale_profiles", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.full_scale_profiles = parse_count(v, l, 1, "full_scale_profiles"); }},
                     {"full_scale_trials", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.full_scale_trials = parse_count(v, l, 1, "full_scale_trials"); }},
                     {"n_starts", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.run.optimizer.n_starts = parse_count(v, l, 1, "n_starts");
                          c.run.estimator.optimizer.n_starts = c.run.optimizer.n_starts;
                      }},
                     {"max_iters", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.run.optimizer.max_iters = parse_count(v, l, 1, "max_iters");
                          c.run.estimator.optimizer.max_iters = c.run.optimizer.max_iters;
                      }},
                     {"x_tol", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.run.optimizer.x_tol = parse_positive(v, l, "x_tol");
                          c.run.estimator.optimizer.x_tol = c.run.optimizer.x_tol;
                      }},
                     {"f_tol", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.run.optimizer.f_tol = parse_positive(v, l, "f_tol");
                          c.run.estimator.optimizer.f_tol = c.run.optimizer.f_tol;
                      }},
                     {"jacobi_order", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          const int n = parse_count(v, l, 0, "jacobi_order");
                          if (n > max_bessel_order)
                              throw ConfigError("jacobi_order must be <= 64", l);
                          c.run.estimator.angles.jacobi_order = n;
                      }},
                     {"max_start_distance", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.estimator.max_start_distance = parse_positive(v, l, "max_start_distance"); }},
                     {"max_range", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.run.estimator.max_range = parse_double(v, l); }},
                 }},
                {"output",
                 {
                     {"directory", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          if (v.empty())
                              throw ConfigError("directory must not be empty", l);
                          c.output.directory = v;
                      }},
                     {"formats", [](ExperimentConfig &c, const std::string &v, int l)
                      {
                          c.output.formats = split_list(v, l);
                          for (const auto &f : c.output.formats)
                              if (f != "csv" && f != "gnuplot")
                                  throw ConfigError("unknown output format '" + f + "' (csv, gnuplot)", l);
                      }},
                     {"trial_log", [](ExperimentConfig &c, const std::string &v, int l)
                      { c.output.trial_log = parse_bool(v, l); }},
                 }},
            };
            return table;
        }
    }

    // Sectioned key = value text. '#' starts a comment, lists are comma
    // separated. Unknown sections or keys and repeated keys are errors.
    inline ExperimentConfig parse_config(std::istream &is, const std::string &source = "<stream>")
    {
        ExperimentConfig cfg;
        cfg.source = source;
        const auto &table = detail::schema();
        std::string raw;
        std::string section;
        std::map<std::string, int> seen;
        int line = 0;
        while (std::getline(is, raw))
        {
            ++line;
            const auto hash = raw.find('#');
            const std::string text = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (text.empty())
                continue;
            if (text.front() == '[')
            {
                if (text.back() != ']')
                    throw ConfigError("malformed section header", line);
                section = detail::trim(text.substr(1, text.size() - 2));
                if (!table.count(section))
                    throw ConfigError("unknown section [" + section + "]", line);
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected 'key = value'", line);
            const std::string key = detail::trim(text.substr(0, eq));
            const std::string value = detail::trim(text.substr(eq + 1));
            if (section.empty())
                throw ConfigError("key '" + key + "' outside of any section", line);
            const auto &keys = table.at(section);
            const auto it = keys.find(key);
            if (it == keys.end())
                throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
            if (!seen.emplace(section + "." + key, line).second)
                throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line);
            if (value.empty())
                throw ConfigError("missing value for '" + key + "'", line);
            it->second(cfg, value, line);
        }
        if (seen.count("scene.carrier_hz") && seen.count("scene.wavelength_m"))
            throw ConfigError("give carrier_hz or wavelength_m, not both",
                              std::max(seen["scene.carrier_hz"], seen["scene.wavelength_m"]));
        cfg.set_seed(cfg.run.master_seed);
        return cfg;
    }

    inline ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'", 0);
        return parse_config(in, path);
    }

    inline ExperimentConfig parse_config_string(const std::string &text)
    {
        std::istringstream in(text);
        return parse_config(in, "<string>");
    }
}

#endif
