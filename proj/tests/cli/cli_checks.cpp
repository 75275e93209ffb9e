// End-to-end checks of the command-line surface: every file the CLI writes is
// read back and compared, and identical run configurations must produce
// byte-identical output.
//
// Usage: rkha_cli_checks <path-to-rkha-cli>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "rkha/rkha.hpp"

using namespace rkha;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++g_failures;
        std::printf("FAIL: %s\n", what.c_str());
    }
}

int run(const std::string& cmd) { return std::system(cmd.c_str()); }

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: rkha_cli_checks <rkha-cli>\n");
        return 2;
    }
    const std::string cli = std::string("\"") + argv[1] + "\"";
    const auto tmp = std::filesystem::temp_directory_path() / "rkha_cli_checks";
    std::filesystem::create_directories(tmp);
    auto tf = [&](const char* name) { return (tmp / name).string(); };

    const std::string zspec = R"('{"group":"Zd","d":1,"R":64,"family":{"name":"subexp","tau":1.0,"p":0.5}}')";
    const std::string rspec =
        R"('{"group":"Rd","d":1,"h":0.0625,"R":64,"family":{"name":"subexp","tau":1.0,"p":0.5}}')";

    // weight-report: determinism across identical configs, json and csv
    check(run(cli + " weight-report --weight " + zspec + " --out " + tf("wr1.json")) == 0,
          "weight-report run 1");
    check(run(cli + " weight-report --weight " + zspec + " --out " + tf("wr2.json")) == 0,
          "weight-report run 2");
    check(io::read_text(tf("wr1.json")) == io::read_text(tf("wr2.json")),
          "weight-report output not byte-identical");
    check(run(cli + " weight-report --weight " + zspec + " --format csv --out " + tf("wr.csv")) == 0,
          "weight-report csv");
    check(io::read_text(tf("wr.csv")).rfind("section,probe,n,value\n", 0) == 0,
          "weight-report csv header");

    // kernel: two equal points give a zero distance entry
    check(run(cli + " kernel --weight " + zspec + " 0.25 0.25 --out " + tf("kern.json")) == 0,
          "kernel command");
    {
        auto j = nlohmann::json::parse(io::read_text(tf("kern.json")));
        check(j.at("dist")[0][1].get<double>() == 0.0, "equal points should be at distance 0");
        check(j.at("kappa_residual").get<double>() < 1e-10, "kappa residual");
    }

    // kernel table on eight torus points cross-checked against inner products
    {
        std::vector<std::vector<double>> xs;
        std::string args;
        for (int i = 0; i < 8; ++i) {
            xs.push_back({double(i) / 8.0});
            args += " " + fmt17(double(i) / 8.0);
        }
        check(run(cli + " kernel --weight " + zspec + args + " --out " + tf("kern8.json")) == 0,
              "kernel command on 8 points");
        auto j = nlohmann::json::parse(io::read_text(tf("kern8.json")));
        auto lat = make_integer_lattice(1, 64);
        auto w = weight::subexp(lat, 1.0, 0.5);
        double worst = 0.0;
        for (int i = 0; i < 8; ++i) {
            auto ki = kernel_section(w, lat, xs[std::size_t(i)]);
            for (int jj = 0; jj < 8; ++jj) {
                auto kj = kernel_section(w, lat, xs[std::size_t(jj)]);
                const cplx expect = inner(ki, kj);
                const auto& cell = j.at("gram")[std::size_t(i)][std::size_t(jj)];
                const cplx got(cell[0].get<double>(), cell[1].get<double>());
                worst = std::max(worst, std::abs(got - expect));
            }
        }
        check(worst == 0.0, "kernel table deviates from library inner products");
    }

    // multiply: serialized delta functions convolve to a shifted delta
    {
        auto lat = make_integer_lattice(1, 8);
        auto w = weight::subexp(lat, 1.0, 0.5);
        spectral_fn f{w, lattice_array(lat)}, g{w, lattice_array(lat)};
        f.coeffs.at({2}) = cplx(1, 0);
        g.coeffs.at({-1}) = cplx(1, 0);
        io::write_spectral_fn(tf("f.sf"), f);
        io::write_spectral_fn(tf("g.sf"), g);
        check(run(cli + " multiply " + tf("f.sf") + " " + tf("g.sf") + " --out " + tf("fg.sf")) == 0,
              "multiply command");
        auto fg = io::read_spectral_fn(tf("fg.sf"));
        check(fg.lattice().radius == 4, "multiply default output radius");
        bool ok = true;
        for (int k = -4; k <= 4; ++k)
            ok = ok && fg.coeffs.at({k}) == (k == 1 ? cplx(1, 0) : cplx(0, 0));
        check(ok, "multiply of deltas is the shifted delta");
    }

    // construct: pullback along the identity map reproduces the gram bytes
    {
        rng r(5);
        auto k = verify::random_gram(3, r, "x", 0.2);
        io::write_kernel(tf("k.kernel"), k);
        io::write_text(tf("ident.json"), R"({"x0":"x0","x1":"x1","x2":"x2"})");
        check(run(cli + " construct pullback " + tf("k.kernel") + " --map " + tf("ident.json") +
                  " --out " + tf("kp.kernel")) == 0,
              "construct pullback");
        auto k2 = io::read_kernel(tf("kp.kernel"));
        bool ok = k2.points == k.points;
        for (std::size_t i = 0; ok && i < k.gram.data().size(); ++i)
            ok = k2.gram.data()[i] == k.gram.data()[i];
        check(ok, "pullback along the identity is not byte-faithful");

        check(run(cli + " construct tensor " + tf("k.kernel") + " " + tf("k.kernel") + " --out " +
                  tf("kt.kernel")) == 0,
              "construct tensor");
        check(io::read_kernel(tf("kt.kernel")).size() == 9, "tensor point count");
    }

    // approx-unit: rows for every n, coarse grids surfaced per row, not fatal
    check(run(cli + " approx-unit --weight " + rspec + " --n 1,2,64 --trials 5 --out " +
              tf("au.json")) == 0,
          "approx-unit command");
    {
        auto j = nlohmann::json::parse(io::read_text(tf("au.json")));
        check(j.at("rows").size() == 3, "approx-unit row count");
        check(j.at("rows")[2].contains("error"), "n=64 on h=1/16... grid should report an error");
        check(j.at("rows")[0].at("max_ratio").get<double>() <=
                  j.at("rows")[0].at("bound").get<double>() * (1 + 1e-3),
              "approx-unit bound row");
    }

    // certify with an impossible tolerance exits nonzero; empty suite exits 0
    check(run(cli + " certify --tol 0 --out " + tf("bad.json")) != 0,
          "certify --tol 0 should fail");
    check(nlohmann::json::parse(io::read_text(tf("bad.json"))).at("non_standard").get<bool>(),
          "tol override marks the run non-standard");
    check(run(cli + " certify --properties '' --out " + tf("empty.json")) == 0,
          "empty certify selection exits 0");
    check(nlohmann::json::parse(io::read_text(tf("empty.json"))).at("count").get<int>() == 0,
          "empty certify selection runs nothing");

    if (g_failures == 0) std::printf("cli checks: all pass\n");
    return g_failures == 0 ? 0 : 1;
}
