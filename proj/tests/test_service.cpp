#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "support.hpp"
#include "visim/service.hpp"

using namespace visim;
namespace vt = visim::testing;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("visim_service_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

std::string png_of(const Frame& f) {
    const Bytes b = encode_png(f);
    return {b.begin(), b.end()};
}

Frame decode(const std::string& body) { return decode_image(Bytes(body.begin(), body.end())); }

Json request_with(const Profile& p, const Frame& f) {
    const Bytes png = encode_png(f);
    return {{"profile", profile_to_json(p)}, {"gaze", {0.3, 0.6}}, {"time", 1.5}, {"image", base64_encode(png)}};
}

Profile hyperopia_profile(double cpd) {
    Profile p;
    p.name = "h";
    p.stack.entries.push_back({Hyperopia{cpd}, true});
    return p;
}

int status_of(const std::function<void()>& call) {
    try {
        call();
    } catch (const HttpError& e) {
        return e.status();
    }
    return 200;
}

/// Service on an ephemeral port for the lifetime of the fixture.
class LiveServer : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fresh_dir("live");
        service_ = std::make_unique<RenderService>(ServiceConfig{dir_});
        service_->mount(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    void TearDown() override {
        server_.stop();
        thread_.join();
        fs::remove_all(dir_);
    }
    httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

    fs::path dir_;
    httplib::Server server_;
    std::unique_ptr<RenderService> service_;
    std::thread thread_;
    int port_ = 0;
};

template <class C>
void expect_listed(const Json& params, std::size_t& i, const NumberParam<C>& p) {
    EXPECT_EQ(params[i]["name"], p.name);
    EXPECT_EQ(params[i]["min"].get<double>(), p.min) << C::type;
    EXPECT_EQ(params[i]["max"].get<double>(), p.max) << C::type;
    ++i;
}
template <class P>
void expect_listed(const Json& params, std::size_t& i, const P& p) {
    EXPECT_EQ(params[i]["name"], p.name);
    ++i;
}

}  // namespace

// ---------------------------------------------------------------------------
// Direct calls

TEST(Service, SymptomListingCarriesExactRanges) {
    RenderService svc({fresh_dir("sym")});
    const Json doc = Json::parse(svc.symptoms().body);
    ASSERT_EQ(doc["symptoms"].size(), 18u);
    std::map<std::string, Json> by_type;
    for (const auto& s : doc["symptoms"]) by_type[s["type"]] = s;
    const Json& cpd = by_type.at("hyperopia")["params"][0];
    EXPECT_EQ(cpd["name"], "cpd");
    EXPECT_EQ(cpd["min"].get<double>(), 0.01);
    EXPECT_EQ(cpd["max"].get<double>(), 30.0);
    EXPECT_EQ(cpd["neutral"].get<double>(), 30.0);
    const Json& density = by_type.at("retinopathy")["params"][2];
    EXPECT_EQ(density["name"], "density");
    EXPECT_EQ(density["max"].get<double>(), 2500.0);
    EXPECT_TRUE(density["integer"].get<bool>());
    EXPECT_TRUE(by_type.at("central_vision_loss")["gaze_contingent"].get<bool>());
    EXPECT_FALSE(by_type.at("glare")["gaze_contingent"].get<bool>());
    // Every numeric range must equal the compiled catalog.
    for_each_symptom_type([&](const auto& def) {
        using C = std::decay_t<decltype(def)>;
        const Json& params = by_type.at(std::string(C::type))["params"];
        std::size_t i = 0;
        std::apply([&](const auto&... p) { (expect_listed(params, i, p), ...); }, C::params());
        EXPECT_EQ(params.size(), i);
    });
}

TEST(Service, EmptyProfileReturnsTheInputPixels) {
    RenderService svc({fresh_dir("empty")});
    const Frame f = decode(png_of(vt::random_frame(33, 21, 1)));  // already 8-bit quantized
    const auto r = svc.render_json(request_with(Profile{}, f).dump());
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.content_type, "image/png");
    EXPECT_EQ(decode(r.body), f);
}

TEST(Service, RenderMatchesTheLibrary) {
    RenderService svc({fresh_dir("lib")});
    const Frame f = vt::random_frame(64, 48, 2);
    const Profile p = hyperopia_profile(3.0);
    const auto r = svc.render_json(request_with(p, f).dump());
    RenderRequest req;
    req.profile = p;
    req.gaze = {0.3, 0.6};
    req.time = 1.5;
    EXPECT_EQ(r.body, png_of(render_request(decode(png_of(f)), req)));
}

TEST(Service, SessionsAreReproducible) {
    RenderService svc({fresh_dir("session")});
    const Frame f = vt::random_frame(64, 48, 3);
    Profile p;
    p.stack.entries.push_back({Cataract{0.4, 0.9}, true});
    Json body = request_with(p, f);
    const std::string s1 = Json::parse(svc.create_session(R"({"seed": 5})").body)["id"];
    const std::string s2 = Json::parse(svc.create_session(R"({"seed": 5})").body)["id"];
    const std::string s3 = Json::parse(svc.create_session(R"({"seed": 6})").body)["id"];
    EXPECT_NE(s1, s2);
    body["session"] = s1;
    const auto a = svc.render_json(body.dump()).body;
    body["session"] = s2;
    EXPECT_EQ(svc.render_json(body.dump()).body, a);
    body["session"] = s3;
    EXPECT_NE(svc.render_json(body.dump()).body, a);
    body["session"] = "nope";
    EXPECT_EQ(status_of([&] { svc.render_json(body.dump()); }), 404);
}

TEST(Service, OutOfRangeProfilesAre400WithViolations) {
    RenderService svc({fresh_dir("bad")});
    const std::string body = request_with(hyperopia_profile(100.0), Frame(4, 4)).dump();
    try {
        svc.render_json(body);
        FAIL();
    } catch (const HttpError& e) {
        EXPECT_EQ(e.status(), 400);
        EXPECT_NE(std::string(e.what()).find("[0.01,30]"), std::string::npos);
        ASSERT_TRUE(e.extra().contains("violations"));
        EXPECT_EQ(e.extra()["violations"][0]["field"], "cpd");
        EXPECT_EQ(e.extra()["violations"][0]["max"].get<double>(), 30.0);
    }
}

TEST(Service, MalformedRequestsAre400) {
    RenderService svc({fresh_dir("malformed")});
    const Json ok = request_with(Profile{}, Frame(4, 4));
    EXPECT_EQ(status_of([&] { svc.render_json("{"); }), 400);
    EXPECT_EQ(status_of([&] { svc.render_json("[]"); }), 400);
    Json no_image = ok;
    no_image.erase("image");
    EXPECT_EQ(status_of([&] { svc.render_json(no_image.dump()); }), 400);
    Json garbage = ok;
    garbage["image"] = base64_encode(Bytes{'x', 'y', 'z'});
    EXPECT_EQ(status_of([&] { svc.render_json(garbage.dump()); }), 400);
    Json bad_gaze = ok;
    bad_gaze["gaze"] = "center";
    EXPECT_EQ(status_of([&] { svc.render_json(bad_gaze.dump()); }), 400);
    Json bad_time = ok;
    bad_time["time"] = -1;
    EXPECT_EQ(status_of([&] { svc.render_json(bad_time.dump()); }), 400);
    Json unknown = ok;
    unknown.erase("profile");
    unknown["profile_name"] = "missing";
    EXPECT_EQ(status_of([&] { svc.render_json(unknown.dump()); }), 404);
}

TEST(Service, OversizedImagesAre413BeforeDecoding) {
    RenderService svc({fresh_dir("big")});
    const std::string header = "P6\n8000 4001\n255\n";  // 32.008 MP, no raster
    Json doc = {{"image", base64_encode(Bytes(header.begin(), header.end()))}};
    EXPECT_EQ(status_of([&] { svc.render_json(doc.dump()); }), 413);
    const std::string fits = "P6\n8000 4000\n255\n";  // exactly at the limit: passes the size gate
    doc["image"] = base64_encode(Bytes(fits.begin(), fits.end()));
    EXPECT_EQ(status_of([&] { svc.render_json(doc.dump()); }), 400);  // then fails as truncated
}

TEST(Service, ProfilesAreStoredAndListed) {
    const auto dir = fresh_dir("store");
    RenderService svc({dir});
    const Profile p = hyperopia_profile(4.0);
    const auto put = svc.put_profile("mine", serialize_profile(p));
    EXPECT_EQ(put.status, 200);
    EXPECT_TRUE(fs::exists(dir / "mine.json"));
    Profile expected = p;
    expected.name = "mine";
    EXPECT_EQ(profile_from_json(Json::parse(svc.get_profile("mine").body)), expected);
    const Json list = Json::parse(svc.list_profiles().body)["profiles"];
    std::set<std::string> names;
    for (const auto& e : list) names.insert(e["name"]);
    EXPECT_TRUE(names.count("mine"));
    EXPECT_TRUE(names.count("P1"));
    EXPECT_EQ(status_of([&] { svc.get_profile("absent"); }), 404);
    EXPECT_EQ(status_of([&] { svc.put_profile("../escape", serialize_profile(p)); }), 400);
    EXPECT_EQ(status_of([&] { svc.put_profile("bad", serialize_profile(hyperopia_profile(0.001))); }), 400);
    fs::remove_all(dir);
}

TEST(Service, NamedProfilesRender) {
    RenderService svc({fresh_dir("named")});
    const Frame f = vt::random_frame(40, 30, 4);
    Json doc = {{"profile_name", "P6"}, {"image", base64_encode(encode_png(f))}};
    RenderRequest req;
    req.profile = *find_preset("P6");
    EXPECT_EQ(svc.render_json(doc.dump()).body, png_of(render_request(decode(png_of(f)), req)));
}

// ---------------------------------------------------------------------------
// Over HTTP

TEST_F(LiveServer, SymptomsEndpoint) {
    auto res = client().Get("/symptoms");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(Json::parse(res->body)["symptoms"].size(), 18u);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(LiveServer, JsonAndMultipartRenderAgree) {
    const Frame f = vt::random_frame(50, 40, 5);
    const Json doc = request_with(hyperopia_profile(2.0), f);
    auto json_res = client().Post("/render", doc.dump(), "application/json");
    ASSERT_TRUE(json_res);
    ASSERT_EQ(json_res->status, 200) << json_res->body;
    Json meta = doc;
    meta.erase("image");
    httplib::MultipartFormDataItems items = {{"request", meta.dump(), "", "application/json"},
                                             {"image", png_of(f), "in.png", "image/png"}};
    auto multi_res = client().Post("/render", items);
    ASSERT_TRUE(multi_res);
    ASSERT_EQ(multi_res->status, 200) << multi_res->body;
    EXPECT_EQ(multi_res->body, json_res->body);
    EXPECT_EQ(json_res->get_header_value("Content-Type"), "image/png");
}

TEST_F(LiveServer, ErrorsCarryStatusAndJson) {
    auto res = client().Post("/render", request_with(hyperopia_profile(100.0), Frame(4, 4)).dump(),
                             "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    const Json body = Json::parse(res->body);
    EXPECT_EQ(body["status"], 400);
    EXPECT_EQ(body["violations"].size(), 1u);
    auto missing = client().Get("/profiles/nothing");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
}

TEST_F(LiveServer, ProfileRoundTripOverHttp) {
    const Profile p = hyperopia_profile(7.5);
    auto put = client().Put("/profiles/over_http", serialize_profile(p), "application/json");
    ASSERT_TRUE(put);
    ASSERT_EQ(put->status, 200) << put->body;
    auto get = client().Get("/profiles/over_http");
    ASSERT_TRUE(get);
    EXPECT_EQ(std::get<Hyperopia>(profile_from_json(Json::parse(get->body)).stack.entries[0].config).cpd, 7.5);
    auto session = client().Post("/session", R"({"seed": 3})", "application/json");
    ASSERT_TRUE(session);
    EXPECT_EQ(Json::parse(session->body)["seed"], 3);
}
