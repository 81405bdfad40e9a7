// Copyright 2026 the robust-miso authors
// SPDX-License-Identifier: Apache-2.0

#include "rmiso/model.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rmiso/rng.hpp"

namespace rmiso {

using nlohmann::json;

void Ellipsoid::validate(const std::string& where) const {
    if (shape.rows() < 1 || shape.rows() != shape.cols()) {
        throw Error(where + ".shape: must be square and nonempty");
    }
    if (!all_finite(shape)) {
        throw Error(where + ".shape: non-finite entries");
    }
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw Error(where + ".radius: must be finite and nonnegative");
    }
    Eigen::JacobiSVD<CMatrix> svd(shape);
    const auto& sigma = svd.singularValues();
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (smax > 1.0 + tolerances().shape_sigma_slack) {
        throw Error(where + ".shape: largest singular value " + std::to_string(smax) +
                    " exceeds 1");
    }
    if (smax <= 0.0 || smin <= tolerances().projector_rank_rel * smax) {
        throw Error(where + ".shape: rank-deficient");
    }
}

Ellipsoid spherical_uncertainty(Eigen::Index n, double radius) {
    if (n < 1) throw Error("spherical_uncertainty: dimension must be positive");
    if (!(radius >= 0.0)) throw Error("spherical_uncertainty: radius must be nonnegative");
    return Ellipsoid{CMatrix::Identity(n, n), radius};
}

void Scenario::validate() const {
    const Eigen::Index K = user_count();
    if (K < 1) throw Error("scenario.links: need at least one link");
    if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
        throw Error("scenario.noise_power: must be finite and positive");
    }
    for (Eigen::Index k = 0; k < K; ++k) {
        const Link& link = links[k];
        const std::string base = "links[" + std::to_string(k) + "]";
        if (link.antennas < 1) throw Error(base + ".antennas: must be positive");
        if (!(link.power_budget > 0.0) || !std::isfinite(link.power_budget)) {
            throw Error(base + ".power_budget: must be finite and positive");
        }
        if (static_cast<Eigen::Index>(link.estimates.size()) != K) {
            throw Error(base + ".estimates: expected " + std::to_string(K) + " vectors");
        }
        if (static_cast<Eigen::Index>(link.uncertainty.size()) != K) {
            throw Error(base + ".ellipsoids: expected " + std::to_string(K) + " entries");
        }
        for (Eigen::Index l = 0; l < K; ++l) {
            const std::string est = base + ".estimates[" + std::to_string(l) + "]";
            if (link.estimates[l].size() != link.antennas) {
                throw Error(est + ": dimension must equal antennas");
            }
            if (!all_finite(link.estimates[l])) throw Error(est + ": non-finite entries");
            const std::string ell = base + ".ellipsoids[" + std::to_string(l) + "]";
            if (link.uncertainty[l].shape.rows() != link.antennas) {
                throw Error(ell + ".shape: dimension must equal antennas");
            }
            link.uncertainty[l].validate(ell);
        }
    }
}

bool operator==(const Ellipsoid& a, const Ellipsoid& b) {
    return a.radius == b.radius && a.shape.rows() == b.shape.rows() &&
           a.shape.cols() == b.shape.cols() && a.shape == b.shape;
}

bool operator==(const Link& a, const Link& b) {
    return a.antennas == b.antennas && a.power_budget == b.power_budget &&
           a.estimates == b.estimates && a.uncertainty == b.uncertainty;
}

bool operator==(const Scenario& a, const Scenario& b) {
    return a.noise_power == b.noise_power && a.links == b.links;
}

void validate_beamformers(const Scenario& s, const BeamformerSet& b) {
    if (b.w.size() != s.links.size()) {
        throw Error("beamformers: expected one vector per transmitter");
    }
    for (std::size_t k = 0; k < b.w.size(); ++k) {
        if (b.w[k].size() != s.links[k].antennas) {
            throw Error("beamformers[" + std::to_string(k) + "]: dimension mismatch");
        }
        if (!all_finite(b.w[k])) {
            throw Error("beamformers[" + std::to_string(k) + "]: non-finite entries");
        }
        if (b.w[k].squaredNorm() > s.links[k].power_budget + tolerances().power_slack) {
            throw Error("beamformers[" + std::to_string(k) + "]: power budget exceeded");
        }
    }
}

Scenario generate_scenario(Eigen::Index K, const std::vector<Eigen::Index>& antennas,
                           const RMatrix& epsilons, const std::vector<double>& powers,
                           double noise_power, std::uint64_t seed) {
    if (K < 1) throw Error("generate_scenario: K must be positive");
    if (static_cast<Eigen::Index>(antennas.size()) != K) {
        throw Error("generate_scenario: antennas list must have K entries");
    }
    if (static_cast<Eigen::Index>(powers.size()) != K) {
        throw Error("generate_scenario: powers list must have K entries");
    }
    if (epsilons.rows() != K || epsilons.cols() != K) {
        throw Error("generate_scenario: epsilons must be K x K");
    }
    if (!epsilons.allFinite() || (epsilons.array() < 0.0).any()) {
        throw Error("generate_scenario: epsilons must be finite and nonnegative");
    }

    GaussianStream rng(seed);
    Scenario s;
    s.noise_power = noise_power;
    s.links.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        Link& link = s.links[k];
        link.antennas = antennas[k];
        link.power_budget = powers[k];
        link.estimates.reserve(K);
        for (Eigen::Index l = 0; l < K; ++l) {
            link.estimates.push_back(rng.complex_normal_vector(link.antennas));
        }
        link.uncertainty.reserve(K);
        for (Eigen::Index l = 0; l < K; ++l) {
            CMatrix shape(link.antennas, link.antennas);
            for (Eigen::Index c = 0; c < link.antennas; ++c) {
                shape.col(c) = rng.complex_normal_vector(link.antennas);
            }
            if (epsilons(k, l) == 0.0) {
                // Canonical perfect-knowledge encoding: identity shape. The
                // draws above still happen so the stream position does not
                // depend on the radii.
                link.uncertainty.push_back(spherical_uncertainty(link.antennas, 0.0));
            } else {
                shape /= largest_singular_value(shape);
                link.uncertainty.push_back(Ellipsoid{std::move(shape), epsilons(k, l)});
            }
        }
    }
    s.validate();
    return s;
}

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json cvector_to_json(const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
    return a;
}

json cmatrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw Error("scenario file: " + path + ": expected a number");
    return j.get<double>();
}

Eigen::Index integer_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw Error("scenario file: " + path + ": expected an integer");
    return j.get<Eigen::Index>();
}

const json& member(const json& j, const char* name, const std::string& path) {
    if (!j.is_object() || !j.contains(name)) {
        throw Error("scenario file: missing field " + path + "." + name);
    }
    return j.at(name);
}

Complex complex_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
        throw Error("scenario file: " + path + ": expected [re, im]");
    }
    return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
}

CVector cvector_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw Error("scenario file: " + path + ": expected an array");
    CVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_at(j[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
}

CMatrix cmatrix_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw Error("scenario file: " + path + ": expected an array");
    const std::size_t rows = j.size();
    CMatrix m;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        const CVector row = cvector_at(j[r], rp);
        if (r == 0) {
            m.resize(rows, row.size());
        } else if (row.size() != m.cols()) {
            throw Error("scenario file: " + rp + ": ragged matrix rows");
        }
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
    json root;
    root["K"] = s.user_count();
    root["noise_power"] = s.noise_power;
    json links = json::array();
    for (const Link& link : s.links) {
        json jl;
        jl["antennas"] = link.antennas;
        jl["power_budget"] = link.power_budget;
        json est = json::array();
        for (const CVector& e : link.estimates) est.push_back(cvector_to_json(e));
        jl["estimates"] = std::move(est);
        json ell = json::array();
        for (const Ellipsoid& u : link.uncertainty) {
            ell.push_back(json{{"shape", cmatrix_to_json(u.shape)}, {"radius", u.radius}});
        }
        jl["ellipsoids"] = std::move(ell);
        links.push_back(std::move(jl));
    }
    root["links"] = std::move(links);
    return root.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("scenario file: not valid JSON: ") + e.what());
    }
    const Eigen::Index K = integer_at(member(root, "K", ""), ".K");
    Scenario s;
    s.noise_power = number_at(member(root, "noise_power", ""), ".noise_power");
    const json& links = member(root, "links", "");
    if (!links.is_array() || static_cast<Eigen::Index>(links.size()) != K) {
        throw Error("scenario file: .links must be an array of K entries");
    }
    for (std::size_t k = 0; k < links.size(); ++k) {
        const std::string base = ".links[" + std::to_string(k) + "]";
        const json& jl = links[k];
        Link link;
        link.antennas = integer_at(member(jl, "antennas", base), base + ".antennas");
        link.power_budget = number_at(member(jl, "power_budget", base), base + ".power_budget");
        const json& est = member(jl, "estimates", base);
        if (!est.is_array()) throw Error("scenario file: " + base + ".estimates: expected array");
        for (std::size_t l = 0; l < est.size(); ++l) {
            link.estimates.push_back(
                cvector_at(est[l], base + ".estimates[" + std::to_string(l) + "]"));
        }
        const json& ell = member(jl, "ellipsoids", base);
        if (!ell.is_array()) throw Error("scenario file: " + base + ".ellipsoids: expected array");
        for (std::size_t l = 0; l < ell.size(); ++l) {
            const std::string ep = base + ".ellipsoids[" + std::to_string(l) + "]";
            Ellipsoid u;
            u.shape = cmatrix_at(member(ell[l], "shape", ep), ep + ".shape");
            u.radius = number_at(member(ell[l], "radius", ep), ep + ".radius");
            link.uncertainty.push_back(std::move(u));
        }
        s.links.push_back(std::move(link));
    }
    s.validate();
    return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    s.validate();
    std::ofstream out(path);
    if (!out) throw Error("save_scenario: cannot open " + path.string());
    out << scenario_to_json(s) << '\n';
    if (!out) throw Error("save_scenario: write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_scenario: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

std::string scenario_digest(const Scenario& s) {
    const std::string text = scenario_to_json(s);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace rmiso
