#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support/oracles.hpp"

using namespace litaug;

TEST(Corpus, WellFormedLines) {
    std::istringstream in(R"({"doc_id":"1","title":"a","text":"One."}
{"doc_id":"2","text":"Two."}
{"doc_id":"3","title":"c","text":"Three."}
)");
    const auto r = parse_corpus(in);
    EXPECT_EQ(r.abstracts.size(), 3u);
    EXPECT_EQ(r.skipped, 0u);
    EXPECT_EQ(r.abstracts[1].title, "");
}

TEST(Corpus, MalformedLineIsSkippedAndCounted) {
    std::istringstream in("{\"doc_id\":\"1\",\"text\":\"One.\"}\n{not json\n{\"doc_id\":\"2\",\"text\":\"Two.\"}\n");
    const auto r = parse_corpus(in);
    EXPECT_EQ(r.abstracts.size(), 2u);
    EXPECT_EQ(r.skipped, 1u);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Corpus, MissingFieldsCountAsMalformed) {
    std::istringstream in("{\"doc_id\":\"1\"}\n{\"text\":\"x\"}\n{\"doc_id\":7,\"text\":\"x\"}\n{\"doc_id\":\"2\",\"text\":\"  \"}\n");
    EXPECT_EQ(parse_corpus(in).skipped, 4u);
}

TEST(Corpus, EmptyFileWarns) {
    std::istringstream in("");
    const auto r = parse_corpus(in);
    EXPECT_TRUE(r.abstracts.empty());
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Corpus, DuplicateDocIdIsFatal) {
    std::istringstream in("{\"doc_id\":\"1\",\"text\":\"a\"}\n{\"doc_id\":\"1\",\"text\":\"b\"}\n");
    EXPECT_THROW(parse_corpus(in), ValidationError);
}

TEST(Corpus, MissingFileIsIoError) { EXPECT_THROW(load_corpus("/nonexistent/corpus.jsonl"), IoError); }

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& s) {
    std::vector<std::string> out;
    for (const auto& x : s) out.push_back(x.text);
    return out;
}

}  // namespace

TEST(Splitter, EachPeriodEndsASentence) {
    EXPECT_EQ(texts(SentenceSplitter{}.split("A. B. C.")), (std::vector<std::string>{"A.", "B.", "C."}));
}

TEST(Splitter, AbbreviationsSuppressSplits) {
    EXPECT_EQ(SentenceSplitter{}.split("Fig. 4G shows X vs. Y.").size(), 1u);
    EXPECT_EQ(SentenceSplitter{}.split("As shown by Chou et al. The drug was active.").size(), 1u);
}

TEST(Splitter, EmptyText) { EXPECT_TRUE(SentenceSplitter{}.split("").empty()); }

TEST(Splitter, LowercaseContinuationAndDecimals) {
    EXPECT_EQ(SentenceSplitter{}.split("IC50 was 0.5 uM. values were low.").size(), 1u);
    EXPECT_EQ(texts(SentenceSplitter{}.split("Is it? Yes! Done")), (std::vector<std::string>{"Is it?", "Yes!", "Done"}));
}

TEST(Splitter, IndicesAreSequential) {
    const auto s = SentenceSplitter{}.split("One here. Two there. Three.");
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i].index, i);
}

TEST(Splitter, ShippedAbbreviationFileMatchesBuiltInList) {
    const auto file = load_abbreviations(std::string(LITAUG_SOURCE_DIR) + "/data/abbreviations.txt");
    EXPECT_EQ(SentenceSplitter(file).abbreviations(), SentenceSplitter{}.abbreviations());
}

TEST(Csv, QuotedFields) {
    EXPECT_EQ(csv::parse_line(R"(a,"b,c","d""e",)"), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
    EXPECT_EQ(csv::escape("x,y"), "\"x,y\"");
    EXPECT_EQ(csv::parse_line(csv::escape("q\"t")), std::vector<std::string>{"q\"t"});
}

TEST(Dataset, CanonicalOrderAndDuplicates) {
    std::istringstream in("drug_a,drug_b,cell_line,label\nTaxol,Cisplatin,MCF7,1\ncisplatin,taxol,mcf7,1\nA,B,C,0\n");
    const auto r = parse_dataset(in);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_EQ(r.duplicates_dropped, 1u);
    EXPECT_EQ(r.rows[0].triplet, (Triplet{"cisplatin", "taxol", "mcf7"}));
}

TEST(Dataset, Violations) {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_dataset(in);
    };
    EXPECT_THROW(parse("drug_a,drug_b,cell_line,label\na,a,c,1\n"), ValidationError);
    EXPECT_THROW(parse("drug_a,drug_b,cell_line,label\na,b,c,2\n"), ValidationError);
    EXPECT_THROW(parse("drug_a,drug_b,cell_line,label\na,b,c,1\nb,a,c,0\n"), ValidationError);
    EXPECT_THROW(parse("x,y\n"), ValidationError);
}

TEST(Vocabulary, FirstInsertionWinsAndTypesAreSeparate) {
    EntityVocabulary v;
    EXPECT_TRUE(v.add("Cisplatin", EntityType::Drug, Source::LINCS));
    EXPECT_FALSE(v.add("CISPLATIN", EntityType::Drug, Source::Synthesized));
    EXPECT_TRUE(v.add("cisplatin", EntityType::CellLine, Source::CCLE));
    EXPECT_EQ(v.find("cisplatin", EntityType::Drug)->source, Source::LINCS);
    EXPECT_EQ(v.size(), 2u);
}

TEST(Vocabulary, FileRoundTrip) {
    EntityVocabulary v;
    v.add("MCF-7", EntityType::CellLine, Source::NCI60);
    v.add("taxol", EntityType::Drug, Source::Synthesized);
    std::ostringstream out;
    write_vocabulary(out, v);
    std::istringstream in(out.str());
    const auto back = parse_vocabulary(in);
    EXPECT_EQ(back.size(), 2u);
    EXPECT_EQ(back.find("mcf-7", EntityType::CellLine)->surface, "MCF-7");
    EXPECT_EQ(back.find("taxol", EntityType::Drug)->source, Source::Synthesized);
    EXPECT_EQ(back.valid_keys(EntityType::Drug).size(), 0u);
}

TEST(Matcher, CaseFolding) {
    EntityVocabulary v;
    v.add("cisplatin", EntityType::Drug, Source::SeedDataset);
    const auto m = Matcher(v).find("Cisplatin and CISPLATIN");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].surface, "Cisplatin");
    EXPECT_EQ(m[1].begin, 14u);
}

TEST(Matcher, LongestMatchWins) {
    EntityVocabulary v;
    v.add("mek", EntityType::Drug, Source::SeedDataset);
    v.add("mek162", EntityType::Drug, Source::SeedDataset);
    const auto m = Matcher(v).find("mek162");
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].key, "mek162");
}

TEST(Matcher, WordBoundariesAndTypeTie) {
    EntityVocabulary v;
    v.add("ht", EntityType::CellLine, Source::SeedDataset);
    v.add("ht", EntityType::Drug, Source::SeedDataset);
    const auto m = Matcher(v).find("HT-29 vs HT, not 5ht or hts");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].type, EntityType::Drug);
    EXPECT_EQ(m[1].begin, 9u);
}

TEST(Matcher, EmptyVocabularyIsRejected) { EXPECT_THROW(Matcher(EntityVocabulary{}), ValidationError); }

TEST(Matcher, RandomVocabularyMatchesNaiveScan) {
    std::mt19937_64 rng(31);
    const std::string alphabet = "abcde-1 ";
    for (int trial = 0; trial < 30; ++trial) {
        EntityVocabulary v;
        while (v.size() < 50) {
            std::string name;
            const auto len = 1 + rng() % 5;
            for (std::size_t i = 0; i < len; ++i) name += alphabet[rng() % 7];
            if (name.back() == '-' || name.front() == '-') continue;
            v.add(name, rng() % 3 ? EntityType::Drug : EntityType::CellLine, Source::SeedDataset);
        }
        const Matcher m(v);
        for (int t = 0; t < 20; ++t) {
            std::string text;
            const auto len = rng() % 200;
            for (std::size_t i = 0; i < len; ++i) text += (rng() % 4 == 0) ? static_cast<char>('A' + rng() % 5) : alphabet[rng() % alphabet.size()];
            auto expect = oracle::naive_candidates(v, text);
            auto got = m.candidates(text);
            auto order = [](const EntityMention& a, const EntityMention& b) {
                return std::tie(a.begin, a.end, a.type, a.key) < std::tie(b.begin, b.end, b.type, b.key);
            };
            std::sort(expect.begin(), expect.end(), order);
            std::sort(got.begin(), got.end(), order);
            ASSERT_EQ(got, expect) << text;
            ASSERT_EQ(m.find(text), oracle::naive_find(v, text)) << text;
        }
    }
}

namespace {

EntityVocabulary small_vocab() {
    EntityVocabulary v;
    v.add("cisplatin", EntityType::Drug, Source::SeedDataset);
    v.add("camptothecin", EntityType::Drug, Source::SeedDataset);
    v.add("BT-483", EntityType::CellLine, Source::SeedDataset);
    return v;
}

std::vector<MinedSentence> mine_text(const std::string& text) {
    return mine_candidates({{"d", "", text}}, Matcher(small_vocab()));
}

}  // namespace

TEST(Mining, CanonicalPositive) {
    const auto m = mine_text("Cisplatin and camptothecin were synergistic in BT-483 cells.");
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m[0].mentions.size(), 3u);
    EXPECT_EQ(m[0].keyword_hits, std::vector<std::string>{"synergistic"});
}

TEST(Mining, OneDrugNoKeyword) { EXPECT_TRUE(mine_text("Cisplatin inhibited BT-483 growth.").empty()); }

TEST(Mining, KeywordIsMandatory) { EXPECT_TRUE(mine_text("Cisplatin and camptothecin were effective in BT-483.").empty()); }

TEST(Mining, SameDrugTwiceIsNotAPair) {
    EXPECT_TRUE(mine_text("Cisplatin and cisplatin were synergistic in BT-483 cells.").empty());
}

TEST(Mining, KeywordNeedsWholeWord) {
    EXPECT_TRUE(mine_text("Cisplatin and camptothecin were nonsynergistic in BT-483 cells.").empty());
}

TEST(Mining, EmptyKeywordListIsRejected) {
    EXPECT_THROW(mine_candidates({}, Matcher(small_vocab()), MiningOptions{{}, 1}), ValidationError);
}

TEST(Mining, ToyCorpusMatchesNestedLoops) {
    const auto w = oracle::toy_world(41, 200);
    const SentenceSplitter splitter;
    const auto expect = oracle::naive_mine(w.corpus, w.vocab, default_keywords(), splitter);
    EXPECT_FALSE(expect.empty());
    for (unsigned jobs : {1u, 4u}) EXPECT_EQ(mine_candidates(w.corpus, Matcher(w.vocab), {default_keywords(), jobs}, splitter), expect);
}

TEST(Leakage, NeverCooccurringTripletLandsInFirstBucket) {
    std::vector<Abstract> corpus = {{"1", "", "Cisplatin works. Camptothecin in BT-483 cells."}, {"2", "", "Nothing here."}};
    std::vector<LabeledTriplet> d = {{make_triplet("cisplatin", "camptothecin", "nci-h460"), 1}};
    const auto r = audit_leakage(corpus, Matcher(small_vocab()), d);
    EXPECT_EQ(r.triplets.begin()->second, (CooccurrenceCount{0, 0}));
    EXPECT_EQ(r.pairs.begin()->second, (CooccurrenceCount{0, 1}));
    const auto cdf = r.cdf(ItemKind::Triplet, Granularity::Abstract);
    EXPECT_EQ(cdf[0].k, 1);
    EXPECT_DOUBLE_EQ(cdf[0].fraction, 1.0);
}

TEST(Leakage, SentenceAndAbstractCounts) {
    std::vector<Abstract> corpus = {{"1", "", "Cisplatin with camptothecin in BT-483 cells. Then nothing."}};
    std::vector<LabeledTriplet> d = {{make_triplet("cisplatin", "camptothecin", "bt-483"), 1}};
    const auto r = audit_leakage(corpus, Matcher(small_vocab()), d);
    EXPECT_EQ(r.sentences, 2u);
    EXPECT_EQ(r.triplets.begin()->second, (CooccurrenceCount{1, 1}));
    EXPECT_GE(r.pairs.begin()->second.sentences, 1u);
}

TEST(Leakage, ToyCorpusMatchesNestedLoops) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto w = oracle::toy_world(seed, 50);
        const auto expect = oracle::naive_leakage(w.corpus, w.vocab, w.dataset, SentenceSplitter{});
        const auto got = audit_leakage(w.corpus, Matcher(w.vocab), w.dataset, {{1, 2, 5}, 3});
        EXPECT_EQ(got.drugs, expect.drugs);
        EXPECT_EQ(got.cells, expect.cells);
        EXPECT_EQ(got.pairs, expect.pairs);
        EXPECT_EQ(got.triplets, expect.triplets);
        EXPECT_EQ(got.sentences, expect.sentences);
        for (const auto& [t, c] : got.triplets) {
            EXPECT_LE(c.sentences, got.pairs.at({t.drug_a, t.drug_b}).sentences);
            EXPECT_TRUE(c.abstracts > 0 || c.sentences == 0);
            EXPECT_LE(c.abstracts, got.cells.at(t.cell).abstracts);
        }
    }
}

TEST(Leakage, CdfIsMonotoneInK) {
    const auto w = oracle::toy_world(5, 60);
    const auto r = audit_leakage(w.corpus, Matcher(w.vocab), w.dataset);
    for (auto kind : {ItemKind::Drug, ItemKind::Cell, ItemKind::DrugPair, ItemKind::Triplet}) {
        const auto cdf = r.cdf(kind, Granularity::Sentence);
        for (std::size_t i = 1; i < cdf.size(); ++i) EXPECT_LE(cdf[i - 1].fraction, cdf[i].fraction);
    }
}
