#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "rkha/io.hpp"

using namespace rkha;

namespace {

struct temp_dir {
    std::filesystem::path path;
    temp_dir() {
        path = std::filesystem::temp_directory_path() /
               ("rkha_io_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~temp_dir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("json writer emits ordered keys and 17-digit doubles") {
    io::jwriter w;
    w.begin_obj();
    w.key("a").value(0.1);
    w.key("b").begin_arr();
    w.value(1);
    w.value(true);
    w.value("x\"y");
    w.end_arr();
    w.key("c").null();
    w.end_obj();
    CHECK(w.str() == "{\"a\":0.10000000000000001,\"b\":[1,true,\"x\\\"y\"],\"c\":null}");
    // round-trip exactness of the double
    auto j = nlohmann::json::parse(w.str());
    CHECK(j.at("a").get<double>() == 0.1);
}

TEST_CASE("lattice array round-trip is exact") {
    temp_dir td;
    rng r(42);
    auto lat = make_scaled_grid(2, 0.125, 3);
    lattice_array a(lat);
    for (auto& z : a.values) z = r.cnormal();
    const std::string path = td.file("arr.rkha");
    io::write_lattice_array(path, a);
    auto b = io::read_lattice_array(path);
    CHECK(b.lattice == lat);
    REQUIRE(b.values.size() == a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] == a.values[i]);
}

TEST_CASE("weight specs parse from inline json and round-trip") {
    auto w = io::load_weight_spec(
        R"({"group":"Zd","d":1,"R":64,"family":{"name":"subexp","tau":1.0,"p":0.5}})");
    CHECK(w.is_family());
    CHECK(w.lattice().radius == 64);
    CHECK(w.value({4}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));

    auto w2 = io::load_weight_spec(io::weight_spec_json(w));
    CHECK(w2.same_source(w));

    auto wg = io::load_weight_spec(
        R"({"group":"Rd","d":1,"h":0.015625,"R":512,"family":{"name":"subexp","tau":1.0,"p":0.5}})");
    CHECK(wg.lattice().kind == lattice_kind::scaled_grid);
    CHECK(wg.lattice().step == 0.015625);

    CHECK_THROWS_AS(io::load_weight_spec(R"({"group":"Qd","d":1,"R":4})"), error);
    CHECK_THROWS_AS(io::load_weight_spec(R"({"group":"Zd","d":1,"R":4})"), error);
}

TEST_CASE("table weight specs load from lattice-array files") {
    temp_dir td;
    auto lat = make_integer_lattice(1, 2);
    lattice_array tab(lat);
    for (std::size_t i = 0; i < tab.values.size(); ++i) tab.values[i] = cplx(1.0 + double(i), 0.0);
    const std::string tpath = td.file("table.rkha");
    io::write_lattice_array(tpath, tab);

    const std::string spec = std::string(R"({"group":"Zd","d":1,"R":2,"table":")") + tpath + "\"}";
    auto w = io::load_weight_spec(spec);
    CHECK(!w.is_family());
    CHECK(w.value({-2}) == 1.0);
    CHECK(w.value({2}) == 5.0);

    // inline tables round-trip through the canonical spec
    auto spec2 = io::weight_spec_json(w);
    auto w2 = io::load_weight_spec(spec2);
    CHECK(w2.same_source(w));
}

TEST_CASE("spectral function round-trip preserves weight and coefficients") {
    temp_dir td;
    auto lat = make_integer_lattice(1, 8);
    auto w = weight::subexp(lat, 1.5, 0.7);
    rng r(7);
    spectral_fn f{w, lattice_array(lat)};
    for (auto& z : f.coeffs.values) z = r.cnormal();
    const std::string path = td.file("fn.rkha");
    io::write_spectral_fn(path, f);
    auto g = io::read_spectral_fn(path);
    CHECK(g.w.same_source(w));
    for (std::size_t i = 0; i < f.coeffs.values.size(); ++i)
        CHECK(g.coeffs.values[i] == f.coeffs.values[i]);
}

TEST_CASE("kernel files round-trip including labels") {
    temp_dir td;
    cmatrix g(2, 2);
    g(0, 0) = cplx(2, 0);
    g(0, 1) = cplx(0.5, 0.25);
    g(1, 0) = std::conj(g(0, 1));
    g(1, 1) = cplx(3, 0);
    auto k = make_kernel({"alpha", "beta,comma"}, g);
    const std::string path = td.file("k.rkha");
    io::write_kernel(path, k);
    auto k2 = io::read_kernel(path);
    CHECK(k2.points == k.points);
    for (std::size_t i = 0; i < 4; ++i) CHECK(k2.gram.data()[i] == k.gram.data()[i]);
}

TEST_CASE("label maps preserve insertion order") {
    temp_dir td;
    const std::string path = td.file("phi.json");
    io::write_text(path, R"({"s1":"x0","s0":"x1","zz":"x0"})");
    auto phi = io::read_label_map(path);
    REQUIRE(phi.size() == 3);
    CHECK(phi[0].first == "s1");
    CHECK(phi[1].first == "s0");
    CHECK(phi[2].first == "zz");
}

TEST_CASE("weight report serialization carries every section") {
    auto w = weight::subexp(make_integer_lattice(1, 1), 2.0, 0.5);
    auto rep = analyze_weight(w, 64);
    auto js = io::weight_report_json(w, rep);
    auto j = nlohmann::json::parse(js);
    CHECK(j.at("subconvolutivity").at("C").get<double>() == doctest::Approx(rep.c_subconv));
    CHECK(j.at("grs").at("verdict").get<std::string>() == "holds");
    CHECK(j.at("bd").at("verdict").get<std::string>() == "holds");
    CHECK(j.at("subconvolutivity").at("convergence").size() == 3);

    auto csv = io::weight_report_csv(rep);
    CHECK(csv.find("section,probe,n,value\n") == 0);
    CHECK(csv.find("subconv_C") != std::string::npos);
    CHECK(csv.find("grs,1,1,") != std::string::npos);
    CHECK(csv.find("bd,1,1,") != std::string::npos);
}

TEST_CASE("bad files raise parse errors") {
    temp_dir td;
    const std::string path = td.file("garbage.rkha");
    io::write_text(path, "not json\n\x01\x02");
    CHECK_THROWS_AS(io::read_lattice_array(path), error);
    CHECK_THROWS_AS(io::read_lattice_array(td.file("missing.rkha")), error);
}
