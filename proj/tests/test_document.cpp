#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "earl/document.hpp"
#include "support/generators.hpp"

using namespace earl;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = EARL_DATA_DIR;

Errc parse_error_code(std::string_view xml,
                      const VocabularyProfile &p = VocabularyProfile::standard()) {
  try {
    parse_document(xml, p);
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << xml;
  return Errc::no_signal;
}

const EmotionAnnotation &simple(const AnnotationDocument &d, std::size_t i) {
  return std::get<EmotionAnnotation>(d.items.at(i));
}

} // namespace

TEST(Parse, InlineText) {
  auto r = parse_document(R"(<emotion category="pleasure">Hello!</emotion>)");
  ASSERT_EQ(r.document.items.size(), 1u);
  const auto &a = simple(r.document, 0);
  EXPECT_EQ(a.category, "pleasure");
  EXPECT_EQ(a.scope, Scope{InlineText{"Hello!"}});
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Parse, StandOffReference) {
  auto r = parse_document(R"(<emotion xlink:href="face12.jpg" category="pleasure"/>)");
  EXPECT_EQ(simple(r.document, 0).scope, Scope{Reference{"face12.jpg"}});
  // unprefixed href is accepted too
  auto bare = parse_document(R"(<emotion href="face12.jpg" category="pleasure"/>)");
  EXPECT_EQ(bare.document, r.document);
}

TEST(Parse, TimeSpan) {
  auto r = parse_document(R"(<emotion start="0.4" end="1.3" category="pleasure"/>)");
  EXPECT_EQ(simple(r.document, 0).scope, Scope{(TimeSpan{0.4, 1.3})});
  auto both = parse_document(
      R"(<emotion xlink:href="talk.wav" start="2" end="3.5" category="worry"/>)");
  EXPECT_EQ(simple(both.document, 0).scope,
            Scope{(ReferencedTimeSpan{"talk.wav", 2.0, 3.5})});
}

TEST(Parse, DimensionsAndAppraisals) {
  auto r = parse_document(read_file(data_dir / "snippets/dimensions_appraisals.xml"));
  ASSERT_EQ(r.document.items.size(), 2u);
  const auto &dims = simple(r.document, 0);
  EXPECT_EQ(dims.dimensions,
            (std::map<std::string, double>{{"arousal", -0.2}, {"valence", 0.5}, {"power", 0.2}}));
  EXPECT_TRUE(dims.appraisals.empty());
  const auto &appr = simple(r.document, 1);
  EXPECT_EQ(appr.appraisals,
            (std::map<std::string, double>{{"suddenness", -0.8},
                                           {"intrinsic_pleasantness", 0.7},
                                           {"goal_conduciveness", 0.3},
                                           {"relevance_self_concerns", 0.7}}));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Parse, MaskingComplexEmotion) {
  auto r = parse_document(read_file(data_dir / "snippets/masking.xml"));
  ASSERT_EQ(r.document.items.size(), 1u);
  const auto &c = std::get<ComplexEmotion>(r.document.items[0]);
  EXPECT_EQ(c.scope, Scope{Reference{"face12.jpg"}});
  ASSERT_EQ(c.constituents.size(), 2u);
  EXPECT_EQ(c.constituents[0].category, "pleasure");
  EXPECT_EQ(c.constituents[0].regulation,
            (std::map<Regulation, double>{{Regulation::simulate, 0.8}}));
  EXPECT_EQ(c.constituents[1].category, "annoyance");
  EXPECT_EQ(c.constituents[1].regulation,
            (std::map<Regulation, double>{{Regulation::suppress, 0.5}}));
  EXPECT_EQ(c.constituents[0].scope, Scope{Unscoped{}});
}

TEST(Parse, ContainerElementsAreTransparent) {
  auto r = parse_document(R"(<?xml version="1.0" encoding="UTF-8"?>
<!-- corpus -->
<earl xmlns:xlink="http://www.w3.org/1999/xlink" source="session4.xml">
  <turn id="t1"><emotion category="pleasure">Hi</emotion></turn>
  <emotion category="worry"/>
</earl>)");
  ASSERT_EQ(r.document.items.size(), 2u);
  EXPECT_EQ(r.document.source_uri, "session4.xml");
  EXPECT_EQ(simple(r.document, 1).category, "worry");
}

TEST(Parse, EntitiesAndCdata) {
  auto r = parse_document(
      "<emotion category=\"fear &amp; loathing\">a &lt;b&gt; &#233;&#x263A;<![CDATA[<raw>]]></emotion>");
  EXPECT_EQ(simple(r.document, 0).category, "fear & loathing");
  EXPECT_EQ(simple(r.document, 0).scope,
            Scope{InlineText{"a <b> \xC3\xA9\xE2\x98\xBA<raw>"}});
}

TEST(Parse, UnknownAttributesBecomeWarnings) {
  auto r = parse_document(R"(<emotion category="x" colour="red" novelty="0.3"/>)");
  const auto &a = simple(r.document, 0);
  // numeric attribute kept as appraisal; appraisal set is open, so silent
  EXPECT_EQ(a.appraisals.at("novelty"), 0.3);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, "UNKNOWN_ATTRIBUTE");
  EXPECT_NE(r.warnings[0].message.find("colour"), std::string::npos);

  VocabularyProfile closed = VocabularyProfile::standard();
  closed.appraisal_names = {"suddenness"};
  auto w = parse_document(R"(<emotion category="x" novelty="0.3"/>)", closed);
  EXPECT_EQ(simple(w.document, 0).appraisals.at("novelty"), 0.3);
  ASSERT_EQ(w.warnings.size(), 1u);
  EXPECT_NE(w.warnings[0].message.find("kept as appraisal"), std::string::npos);
}

TEST(Parse, EveryAttributeIsMappedOrReported) {
  // one attribute of each kind the parser knows, plus strays
  const char *xml =
      R"(<emotion category="c" arousal="0.1" suddenness="0.2" intensity="0.3")"
      R"( probability="0.4" simulate="0.5" amplify="0.6" attenuate="0.7")"
      R"( hide="0.8" modality="face" xlink:href="f.jpg" start="1" end="2")"
      R"( colour="red" data-x="y" xlink:type="simple"/>)";
  auto r = parse_document(xml);
  const auto &a = simple(r.document, 0);
  std::size_t mapped = 1 /*category*/ + a.dimensions.size() + a.appraisals.size() +
                       2 /*intensity, probability*/ + a.regulation.size() +
                       1 /*modality*/ + 3 /*scope*/;
  std::size_t unknown = 0;
  for (const auto &w : r.warnings)
    unknown += w.code == "UNKNOWN_ATTRIBUTE";
  EXPECT_EQ(mapped + unknown, 16u);
  EXPECT_EQ(a.regulation.at(Regulation::suppress), 0.8);
}

TEST(Parse, HideWithSuppressKeepsSuppress) {
  auto r = parse_document(R"(<emotion category="c" hide="0.2" suppress="0.9"/>)");
  EXPECT_EQ(simple(r.document, 0).regulation.at(Regulation::suppress), 0.9);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, "REGULATION_ALIAS");
}

TEST(Parse, Errors) {
  EXPECT_EQ(parse_error_code("<emotion category=\"x\">"), Errc::malformed_xml);
  EXPECT_EQ(parse_error_code("<a><emotion category=\"x\"></a></emotion>"),
            Errc::malformed_xml);
  EXPECT_EQ(parse_error_code("<emotion category=x/>"), Errc::malformed_xml);
  EXPECT_EQ(parse_error_code("<emotion category=\"a\" category=\"b\"/>"),
            Errc::malformed_xml);
  EXPECT_EQ(parse_error_code("<emotion category=\"&nbsp;\"/>"), Errc::malformed_xml);
  EXPECT_EQ(parse_error_code("just text"), Errc::malformed_xml);
  EXPECT_EQ(parse_error_code("<emotion category=\"x\" intensity=\"high\"/>"),
            Errc::unparseable_number);
  EXPECT_EQ(parse_error_code("<emotion category=\"x\" arousal=\"0.1.2\"/>"),
            Errc::unparseable_number);
  EXPECT_EQ(parse_error_code("<emotion category=\"x\" intensity=\"nan\"/>"),
            Errc::unparseable_number);
  EXPECT_EQ(parse_error_code("<emotion start=\"1.3\" end=\"0.4\" category=\"x\"/>"),
            Errc::start_after_end);
  EXPECT_EQ(parse_error_code("<emotion start=\"1\" end=\"1\" category=\"x\"/>"),
            Errc::start_after_end);
  EXPECT_EQ(parse_error_code("<emotion start=\"1\" category=\"x\"/>"),
            Errc::incomplete_time_span);
  EXPECT_EQ(parse_error_code("<complex-emotion><complex-emotion/></complex-emotion>"),
            Errc::nested_complex);
}

TEST(Parse, ErrorMessagesCarryLineNumbers) {
  try {
    parse_document("<earl>\n\n<emotion category=\"x\" intensity=\"?\"/>\n</earl>");
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Serialize, EmptyDocument) {
  EXPECT_EQ(serialize_document({}),
            "<earl xmlns:xlink=\"http://www.w3.org/1999/xlink\"/>\n");
  EXPECT_TRUE(parse_document(serialize_document({})).document.items.empty());
}

TEST(Serialize, CanonicalAttributeOrder) {
  EmotionAnnotation a;
  a.category = "pleasure";
  a.dimensions = {{"valence", 0.5}, {"arousal", -0.2}};
  a.appraisals = {{"novelty", 0.25}};
  a.intensity = 0.50;
  a.probability = 1.0;
  a.regulation = {{Regulation::suppress, 0.5}, {Regulation::amplify, 0.1}};
  a.modality = "face";
  a.scope = ReferencedTimeSpan{"clip.wav", 0.4, 1.3};
  AnnotationDocument d;
  d.items.push_back(a);
  EXPECT_EQ(serialize_document(d),
            "<earl xmlns:xlink=\"http://www.w3.org/1999/xlink\">\n"
            "  <emotion category=\"pleasure\" arousal=\"-0.2\" novelty=\"0.25\" "
            "valence=\"0.5\" intensity=\"0.5\" probability=\"1\" amplify=\"0.1\" "
            "suppress=\"0.5\" modality=\"face\" xlink:href=\"clip.wav\" start=\"0.4\" "
            "end=\"1.3\"/>\n"
            "</earl>\n");
}

TEST(Serialize, ComplexLayout) {
  auto r = parse_document(read_file(data_dir / "snippets/major_minor.xml"));
  EXPECT_EQ(serialize_document(r.document),
            "<earl xmlns:xlink=\"http://www.w3.org/1999/xlink\">\n"
            "  <complex-emotion xlink:href=\"face12.jpg\">\n"
            "    <emotion category=\"pleasure\" intensity=\"0.7\"/>\n"
            "    <emotion category=\"worry\" intensity=\"0.5\"/>\n"
            "  </complex-emotion>\n"
            "</earl>\n");
}

TEST(Serialize, MinimalNumbers) {
  EXPECT_EQ(detail::format_number(0.50), "0.5");
  EXPECT_EQ(detail::format_number(1.0), "1");
  EXPECT_EQ(detail::format_number(-0.2), "-0.2");
  EXPECT_EQ(detail::format_number(0.1 + 0.2), "0.30000000000000004");
  prop::Gen gen(5);
  for (int i = 0; i < 1000; ++i) {
    double v = gen.uniform(-1.0, 1.0);
    EXPECT_EQ(*detail::parse_number(detail::format_number(v)), v);
  }
}

TEST(RoundTrip, BundledSnippets) {
  for (const auto &entry : fs::directory_iterator(data_dir / "snippets")) {
    if (entry.path().extension() != ".xml")
      continue;
    SCOPED_TRACE(entry.path().filename().string());
    auto first = parse_document(read_file(entry.path()));
    EXPECT_TRUE(first.warnings.empty());
    auto text = serialize_document(first.document);
    auto second = parse_document(text);
    EXPECT_EQ(second.document, first.document);
    EXPECT_EQ(serialize_document(second.document), text);
  }
}

TEST(RoundTrip, RandomDocuments) {
  prop::Gen gen(2024);
  for (int n = 0; n < 500; ++n) {
    auto doc = gen.document();
    ASSERT_TRUE(validate_document(doc, VocabularyProfile::standard()).ok);
    const auto text = serialize_document(doc);
    auto back = parse_document(text);
    ASSERT_EQ(back.document, doc) << text;
    EXPECT_TRUE(back.warnings.empty()) << text;
  }
}

TEST(Profile, ParseLabels) {
  auto p = parse_profile(read_file(data_dir / "profiles/basic.xml"));
  EXPECT_TRUE(p.categories.contains("pleasure"));
  EXPECT_EQ(p.dimension_names, (std::set<std::string>{"arousal", "valence", "power"}));
  EXPECT_EQ(p.appraisal_names.size(), 4u);
  EXPECT_FALSE(p.strict);
  auto strict = parse_profile(R"(<vocabulary strict="true"><category name="joy"/></vocabulary>)");
  EXPECT_TRUE(strict.strict);
  EXPECT_EQ(strict.categories, std::set<std::string>{"joy"});
}

TEST(Profile, Rejects) {
  auto code = [](std::string_view xml) {
    try {
      parse_profile(xml);
    } catch (const Error &e) {
      return e.code();
    }
    return Errc::no_signal;
  };
  EXPECT_EQ(code("<p><category>a</category><category>a</category></p>"),
            Errc::malformed_profile);
  EXPECT_EQ(code("<p><colour>red</colour></p>"), Errc::malformed_profile);
  EXPECT_EQ(code("<p><dimension>intensity</dimension></p>"), Errc::malformed_profile);
  EXPECT_EQ(code("<p><dimension>x</dimension><appraisal>x</appraisal></p>"),
            Errc::malformed_profile);
  EXPECT_EQ(code("<p/><q/>"), Errc::malformed_profile);
  EXPECT_EQ(code("<p><category> </category></p>"), Errc::malformed_profile);
}

TEST(Profile, DrivesDimensionVersusAppraisal) {
  VocabularyProfile p;
  p.dimension_names = {"suddenness"};
  auto r = parse_document(R"(<emotion suddenness="0.1" arousal="0.2"/>)", p);
  const auto &a = simple(r.document, 0);
  EXPECT_EQ(a.dimensions.count("suddenness"), 1u);
  EXPECT_EQ(a.appraisals.count("arousal"), 1u);
}

class ResolveScope : public ::testing::Test {
protected:
  fs::path root;
  void SetUp() override {
    root = fs::temp_directory_path() /
           ("earl_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(root / "clips");
    std::ofstream(root / "face12.jpg") << "jpg";
    std::ofstream(root / "clips/talk.wav") << "wav";
  }
  void TearDown() override { fs::remove_all(root); }
};

TEST_F(ResolveScope, ExistingMediaObject) {
  auto t = resolve_scope(Scope{Reference{"face12.jpg"}}, root);
  EXPECT_EQ(t, ScopeTarget{(MediaObject{"face12.jpg", true})});
  auto missing = resolve_scope(Scope{Reference{"face99.jpg"}}, root);
  EXPECT_EQ(missing, ScopeTarget{(MediaObject{"face99.jpg", false})});
}

TEST_F(ResolveScope, TextAndClips) {
  EXPECT_EQ(resolve_scope(Scope{InlineText{"Hello!"}}, root),
            ScopeTarget{TextSegment{"Hello!"}});
  EXPECT_EQ(resolve_scope(Scope{TimeSpan{0.4, 1.3}}, root),
            ScopeTarget{(ClipSegment{"", 0.4, 1.3, false})});
  EXPECT_EQ(resolve_scope(Scope{ReferencedTimeSpan{"clips/talk.wav", 1, 2}}, root),
            ScopeTarget{(ClipSegment{"clips/talk.wav", 1, 2, true})});
}

TEST_F(ResolveScope, ComplexEmotionUsesItsScope) {
  auto r = parse_document(read_file(data_dir / "snippets/masking.xml"));
  EXPECT_EQ(resolve_scope(r.document.items[0], root),
            ScopeTarget{(MediaObject{"face12.jpg", true})});
}

TEST_F(ResolveScope, Errors) {
  auto code = [&](Scope s) {
    try {
      resolve_scope(s, root);
    } catch (const Error &e) {
      return e.code();
    }
    return Errc::no_signal;
  };
  EXPECT_EQ(code(Unscoped{}), Errc::unscoped);
  EXPECT_EQ(code(Reference{"../secret"}), Errc::path_escape);
  EXPECT_EQ(code(Reference{"clips/../../secret"}), Errc::path_escape);
  EXPECT_EQ(code(Reference{"/etc/passwd"}), Errc::path_escape);
  EXPECT_EQ(code(ReferencedTimeSpan{"../x.wav", 0, 1}), Errc::path_escape);
  // staying inside is fine even with dot-dot segments
  EXPECT_EQ(code(Reference{"clips/../face12.jpg"}), Errc::no_signal);
}

TEST_F(ResolveScope, SymlinkOutOfCorpusEscapes) {
  std::error_code ec;
  fs::create_directory_symlink(fs::temp_directory_path(), root / "tmp", ec);
  if (ec)
    GTEST_SKIP() << "symlinks unavailable";
  EXPECT_THROW(resolve_scope(Scope{Reference{"tmp/x"}}, root), Error);
}
