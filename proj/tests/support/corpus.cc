// Copyright 2026 The qgforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "support/corpus.h"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "common/error.h"
#include "sparql/ast.h"

namespace qgforge {
namespace testing {

namespace {

// Modulo draws keep the corpus identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int Below(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }
  int Between(int lo, int hi) { return lo + Below(hi - lo + 1); }
  bool Chance(int percent) { return Below(100) < percent; }
  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[Below(static_cast<int>(v.size()))];
  }
  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (int i = static_cast<int>(v->size()) - 1; i > 0; --i) std::swap((*v)[i], (*v)[Below(i + 1)]);
  }

 private:
  std::mt19937_64 gen_;
};

const std::vector<std::string> kPeople = {"alice", "bruno", "carla", "dmitri", "elena", "farid",
                                          "greta", "hiro",  "ines",  "jonas",  "kemal", "lucia"};
const std::vector<std::string> kFilms = {"starfall", "moonrise", "driftwood", "ironvale",
                                         "nightjar", "saltmarsh", "copperline", "windward",
                                         "emberfield", "glasshouse", "riverbend", "frostgate",
                                         "sunhollow", "blackwater", "tidecaller", "stonebridge"};
const std::vector<std::string> kCountries = {"norland", "estavia", "corvania", "pellago"};
const std::vector<std::string> kGenres = {"drama", "comedy", "thriller", "western"};

std::string PersonId(int i) { return "m.p" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1); }
std::string FilmId(int i) { return "m.f" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1); }
std::string CountryId(int i) { return "m.c" + std::to_string(i + 1); }
std::string GenreId(int i) { return "m.g" + std::to_string(i + 1); }

std::string Date(int y, int m, int d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

// Everything the templates need to know about the generated graph.
struct World {
  std::vector<int> director;                 // per film
  std::vector<std::vector<int>> cast;        // per film
  std::vector<int> release_year;             // per film
  std::vector<int> film_country;             // per film
  std::vector<int> film_genre;               // per film
  std::vector<int> nationality;              // per person
  std::vector<int> birth_year;               // per person
};

World MakeWorld(std::uint64_t seed) {
  Rng rng(seed);
  World w;
  const int nf = static_cast<int>(kFilms.size());
  const int np = static_cast<int>(kPeople.size());
  for (int f = 0; f < nf; ++f) {
    w.director.push_back(rng.Below(6));
    std::vector<int> actors = {4, 5, 6, 7, 8, 9, 10, 11};
    rng.Shuffle(&actors);
    int n = rng.Between(2, 3);
    std::vector<int> picked(actors.begin(), actors.begin() + n);
    std::sort(picked.begin(), picked.end());
    w.cast.push_back(picked);
    w.release_year.push_back(rng.Between(1980, 2015));
    w.film_country.push_back(f % 4 == 0 ? rng.Below(4) : (f + rng.Below(2)) % 4);
    w.film_genre.push_back(rng.Below(4));
  }
  for (int p = 0; p < np; ++p) {
    w.nationality.push_back(rng.Below(4));
    w.birth_year.push_back(rng.Between(1940, 1985));
  }
  return w;
}

std::string Lit(const std::string& lexical, const std::string& kind) {
  return "\"" + lexical + "\"^^" + kind;
}

}  // namespace

std::string ToyKgText(std::uint64_t seed) {
  World w = MakeWorld(seed);
  Rng rng(seed * 31 + 5);
  std::ostringstream os;
  os << "# Toy film knowledge graph.\n";
  const int nf = static_cast<int>(kFilms.size());
  const int np = static_cast<int>(kPeople.size());
  std::vector<int> runtimes;
  for (int i = 0; i < nf; ++i) runtimes.push_back(84 + 7 * i);
  rng.Shuffle(&runtimes);
  for (int c = 0; c < 4; ++c) {
    os << CountryId(c) << " rdf:type location.country .\n";
    os << CountryId(c) << " type.object.name \"" << kCountries[c] << "\" .\n";
  }
  for (int g = 0; g < 4; ++g) {
    os << GenreId(g) << " rdf:type film.film_genre .\n";
    os << GenreId(g) << " type.object.name \"" << kGenres[g] << "\" .\n";
  }
  for (int p = 0; p < np; ++p) {
    std::string id = PersonId(p);
    os << id << " rdf:type people.person .\n";
    os << id << " type.object.name \"" << kPeople[p] << "\" .\n";
    os << id << " people.person.nationality " << CountryId(w.nationality[p]) << " .\n";
    os << id << " people.person.birth_date "
       << Lit(Date(w.birth_year[p], rng.Between(1, 12), rng.Between(1, 28)), "date") << " .\n";
    os << id << " people.person.height " << Lit("1." + std::to_string(55 + 3 * p), "dec") << " .\n";
    int from = rng.Between(1975, 1995);
    int to = from + rng.Between(8, 25);
    os << id << " people.person.employment.from " << Lit(Date(from, 1, 1), "date") << " .\n";
    os << id << " people.person.employment.to " << Lit(Date(to, 12, 31), "date") << " .\n";
  }
  os << PersonId(0) << " people.person.spouse " << PersonId(6) << " .\n";
  os << PersonId(2) << " people.person.spouse " << PersonId(9) << " .\n";
  os << PersonId(4) << " people.person.spouse " << PersonId(11) << " .\n";
  for (int f = 0; f < nf; ++f) {
    std::string id = FilmId(f);
    os << id << " rdf:type film.film .\n";
    os << id << " type.object.name \"" << kFilms[f] << "\" .\n";
    os << id << " film.film.directed_by " << PersonId(w.director[f]) << " .\n";
    for (int a : w.cast[f]) os << id << " film.film.starring " << PersonId(a) << " .\n";
    int y = w.release_year[f];
    os << id << " film.film.release_date "
       << Lit(Date(y, rng.Between(1, 12), rng.Between(1, 28)), "date") << " .\n";
    os << id << " film.film.runtime " << Lit(std::to_string(runtimes[f]), "int") << " .\n";
    os << id << " film.film.country " << CountryId(w.film_country[f]) << " .\n";
    os << id << " film.film.genre " << GenreId(w.film_genre[f]) << " .\n";
    os << id << " film.film.production.from "
       << Lit(Date(y - rng.Between(1, 3), rng.Between(1, 12), 1), "date") << " .\n";
    os << id << " film.film.production.to " << Lit(Date(y, 1, 15), "date") << " .\n";
  }
  return os.str();
}

namespace {

struct Draft {
  std::string question;
  std::string sparql;
};

std::string P(const std::string& local) { return "ns:" + local; }

std::string Program(const std::string& body) { return std::string(kPrefix) + body; }

// One question template: builds a draft from random choices.
using Template = std::function<Draft(Rng&, const World&)>;

std::vector<Template> QaTemplates() {
  const int nf = static_cast<int>(kFilms.size());
  std::vector<Template> t;
  // Who directed a film.
  t.push_back([nf](Rng& r, const World&) {
    int f = r.Below(nf);
    return Draft{"who directed " + kFilms[f] + "?",
                 Program("SELECT DISTINCT ?x WHERE { " + P(FilmId(f)) +
                         " ns:film.film.directed_by ?x . }")};
  });
  // Films directed by a person.
  t.push_back([](Rng& r, const World&) {
    int p = r.Below(6);
    return Draft{"which films were directed by " + kPeople[p] + "?",
                 Program("SELECT DISTINCT ?x WHERE { ?x ns:film.film.directed_by " +
                         P(PersonId(p)) + " . }")};
  });
  // Actors of a film, typed.
  t.push_back([nf](Rng& r, const World&) {
    int f = r.Below(nf);
    return Draft{"which people starred in " + kFilms[f] + "?",
                 Program("SELECT DISTINCT ?x WHERE { " + P(FilmId(f)) +
                         " ns:film.film.starring ?x . ?x rdf:type ns:people.person . }")};
  });
  // Count of films by an actor.
  t.push_back([](Rng& r, const World&) {
    int p = r.Between(4, 11);
    return Draft{"how many films did " + kPeople[p] + " star in?",
                 Program("SELECT (COUNT(DISTINCT ?f) AS ?x) WHERE { ?f ns:film.film.starring " +
                         P(PersonId(p)) + " . }")};
  });
  // Longest film of a genre.
  t.push_back([](Rng& r, const World&) {
    int g = r.Below(4);
    return Draft{"which " + kGenres[g] + " film has the longest runtime?",
                 Program("SELECT DISTINCT ?x WHERE { ?x ns:film.film.genre " + P(GenreId(g)) +
                         " . ?x ns:film.film.runtime ?r . } ORDER BY DESC(?r) LIMIT 1")};
  });
  // Films from a country released after a year.
  t.push_back([](Rng& r, const World&) {
    int c = r.Below(4);
    int y = 1985 + 5 * r.Below(5);
    return Draft{"which films from " + kCountries[c] + " were released after " +
                     std::to_string(y) + "?",
                 Program("SELECT DISTINCT ?x WHERE { ?x ns:film.film.country " + P(CountryId(c)) +
                         " . ?x ns:film.film.release_date ?d . FILTER (?d > \"" +
                         std::to_string(y) + "\"^^xsd:date) }")};
  });
  // Nationality of a film's director.
  t.push_back([nf](Rng& r, const World&) {
    int f = r.Below(nf);
    return Draft{"what is the nationality of the director of " + kFilms[f] + "?",
                 Program("SELECT DISTINCT ?x WHERE { " + P(FilmId(f)) +
                         " ns:film.film.directed_by ?p . ?p ns:people.person.nationality ?x . }")};
  });
  // ASK whether a film's director comes from a country.
  t.push_back([nf](Rng& r, const World&) {
    int f = r.Below(nf);
    int c = r.Below(4);
    return Draft{"was " + kFilms[f] + " directed by someone from " + kCountries[c] + "?",
                 Program("ASK WHERE { " + P(FilmId(f)) + " ns:film.film.directed_by ?x . ?x "
                         "ns:people.person.nationality " + P(CountryId(c)) + " . }")};
  });
  // Tallest actor of a film via an aggregate subquery.
  t.push_back([nf](Rng& r, const World&) {
    int f = r.Below(nf);
    return Draft{"who is the tallest actor in " + kFilms[f] + "?",
                 Program("SELECT DISTINCT ?x WHERE { " + P(FilmId(f)) +
                         " ns:film.film.starring ?x . ?x ns:people.person.height ?h . "
                         "{ SELECT (MAX(?h2) AS ?m) WHERE { " + P(FilmId(f)) +
                         " ns:film.film.starring ?y . ?y ns:people.person.height ?h2 . } } "
                         "FILTER (?h = ?m) }")};
  });
  // Films of a genre directed by a person.
  t.push_back([](Rng& r, const World&) {
    int g = r.Below(4);
    int p = r.Below(6);
    return Draft{"which " + kGenres[g] + " films did " + kPeople[p] + " direct?",
                 Program("SELECT DISTINCT ?x WHERE { ?x ns:film.film.genre " + P(GenreId(g)) +
                         " . ?x ns:film.film.directed_by " + P(PersonId(p)) + " . }")};
  });
  return t;
}

}  // namespace

std::vector<Example> ToyQaCorpus(const TripleStore& kg, int count, std::uint64_t seed,
                                 const std::string& id_prefix,
                                 const std::vector<Example>& exclude) {
  World w = MakeWorld(7);
  Rng rng(seed);
  std::vector<Template> templates = QaTemplates();
  std::set<std::string> seen;
  for (const Example& e : exclude) seen.insert(e.question);
  std::vector<Example> out;
  int attempts = 0;
  std::size_t next = 0;
  while (static_cast<int>(out.size()) < count) {
    QG_CHECK(++attempts < 100000, ErrorCode::kData, "toy QA corpus cannot reach the requested size");
    Draft d = templates[next % templates.size()](rng, w);
    if (seen.count(d.question)) {
      ++next;
      continue;
    }
    std::set<std::string> answers = Answers(kg, sparql::Parse(d.sparql));
    // A false ASK answer cannot survive execution guidance, so such
    // questions are left out along with empty answers.
    if (answers.empty() || answers == std::set<std::string>{"false"}) {
      ++next;
      continue;
    }
    seen.insert(d.question);
    char id[32];
    std::snprintf(id, sizeof(id), "%s%03d", id_prefix.c_str(), static_cast<int>(out.size()));
    out.push_back(Example{id, d.question, d.sparql});
    ++next;
  }
  return out;
}

namespace {

// Program templates by category, parameterized by one random draw.
std::vector<std::pair<std::string, std::function<std::string(Rng&)>>> ProgramTemplates() {
  const int nf = static_cast<int>(kFilms.size());
  auto film = [nf](Rng& r) { return P(FilmId(r.Below(nf))); };
  auto person = [](Rng& r) { return P(PersonId(r.Below(12))); };
  auto director = [](Rng& r) { return P(PersonId(r.Below(6))); };
  auto country = [](Rng& r) { return P(CountryId(r.Below(4))); };
  auto genre = [](Rng& r) { return P(GenreId(r.Below(4))); };
  auto year = [](Rng& r) { return std::to_string(1982 + r.Below(30)); };
  std::vector<std::pair<std::string, std::function<std::string(Rng&)>>> t;
  t.push_back({"plain", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.directed_by " + director(r) +
                        " . }";
               }});
  t.push_back({"plain", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { " + film(r) +
                        " ns:film.film.starring ?a . ?a ns:people.person.nationality ?x . }";
               }});
  t.push_back({"plain", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.starring " + person(r) +
                        " . ?x ns:film.film.country " + country(r) + " . }";
               }});
  t.push_back({"type", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?f ns:film.film.genre " + genre(r) +
                        " . ?f ns:film.film.starring ?x . ?x rdf:type ns:people.person . }";
               }});
  t.push_back({"type", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.country " + country(r) +
                        " . ?x rdf:type ns:film.film . }";
               }});
  t.push_back({"aggregate", [=](Rng& r) {
                 return "SELECT (COUNT(DISTINCT ?f) AS ?x) WHERE { ?f ns:film.film.directed_by " +
                        director(r) + " . }";
               }});
  t.push_back({"aggregate", [=](Rng& r) {
                 return "SELECT (MAX(?r) AS ?x) WHERE { ?f ns:film.film.genre " + genre(r) +
                        " . ?f ns:film.film.runtime ?r . }";
               }});
  t.push_back({"aggregate", [=](Rng& r) {
                 return "SELECT (MIN(?d) AS ?x) WHERE { ?f ns:film.film.country " + country(r) +
                        " . ?f ns:film.film.release_date ?d . }";
               }});
  t.push_back({"order", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.country " + country(r) +
                        " . ?x ns:film.film.runtime ?r . } ORDER BY " +
                        (r.Chance(50) ? "ASC" : "DESC") + "(?r) LIMIT " +
                        std::to_string(r.Between(1, 3));
               }});
  t.push_back({"order", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { " + film(r) +
                        " ns:film.film.starring ?x . ?x ns:people.person.birth_date ?b . } "
                        "ORDER BY ASC(?b) LIMIT 1";
               }});
  t.push_back({"subquery", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.genre " + genre(r) +
                        " . ?x ns:film.film.runtime ?r . { SELECT (MAX(?r2) AS ?m) WHERE { ?y "
                        "ns:film.film.runtime ?r2 . } } FILTER (?r = ?m) }";
               }});
  t.push_back({"subquery", [=](Rng& r) {
                 std::string c = country(r);
                 return "SELECT DISTINCT ?x WHERE { ?x ns:people.person.nationality " + c +
                        " . ?x ns:people.person.height ?h . { SELECT (MIN(?h2) AS ?m) WHERE { ?y "
                        "ns:people.person.nationality " + c +
                        " . ?y ns:people.person.height ?h2 . } } FILTER (?h = ?m) }";
               }});
  t.push_back({"comparison", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.genre " + genre(r) +
                        " . ?x ns:film.film.release_date ?d . FILTER (?d " +
                        (r.Chance(50) ? ">" : "<") + " \"" + year(r) + "\"^^xsd:date) }";
               }});
  t.push_back({"comparison", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.directed_by " + director(r) +
                        " . ?x ns:film.film.runtime ?r . FILTER (?r >= \"" +
                        std::to_string(100 + 10 * r.Below(8)) + "\"^^xsd:integer) }";
               }});
  t.push_back({"comparison", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { " + film(r) +
                        " ns:film.film.starring ?x . ?x ns:people.person.height ?h . FILTER (?h "
                        "<= \"1." + std::to_string(60 + r.Below(30)) + "\"^^xsd:decimal) }";
               }});
  t.push_back({"during", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.directed_by " + director(r) +
                        " . ?x ns:film.film.production.from ?fs . ?x ns:film.film.production.to "
                        "?fe . " + person(r) +
                        " ns:people.person.employment.from ?ps . " + person(r) +
                        " ns:people.person.employment.to ?pe . FILTER (?ps <= ?fs && ?fe <= ?pe) }";
               }});
  t.push_back({"overlap", [=](Rng& r) {
                 std::string p = person(r);
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.genre " + genre(r) +
                        " . ?x ns:film.film.production.from ?fs . ?x ns:film.film.production.to "
                        "?fe . " + p + " ns:people.person.employment.from ?ps . " + p +
                        " ns:people.person.employment.to ?pe . FILTER (?fs <= ?pe && ?ps <= ?fe) }";
               }});
  t.push_back({"x-intention", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { { SELECT ?x WHERE { ?x "
                        "ns:film.film.directed_by " + director(r) +
                        " . } } ?x ns:film.film.genre " + genre(r) + " . }";
               }});
  t.push_back({"x-intention", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:people.person.nationality " +
                        country(r) + " . { SELECT ?x WHERE { ?f ns:film.film.starring ?x . ?f "
                        "ns:film.film.genre " + genre(r) + " . } } }";
               }});
  t.push_back({"exists", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.country " + country(r) +
                        " . FILTER (EXISTS { ?x ns:film.film.release_date ?d . FILTER (?d > \"" +
                        year(r) + "\"^^xsd:date) } || NOT EXISTS { ?x ns:film.film.release_date "
                        "?d2 . }) }";
               }});
  t.push_back({"exists", [=](Rng& r) {
                 return "SELECT DISTINCT ?x WHERE { ?x ns:film.film.directed_by " + director(r) +
                        " . FILTER (EXISTS { ?x ns:film.film.runtime ?r . FILTER (?r < \"" +
                        std::to_string(100 + 10 * r.Below(8)) +
                        "\"^^xsd:integer) } || NOT EXISTS { ?x ns:film.film.runtime ?r . }) }";
               }});
  t.push_back({"ask", [=](Rng& r) {
                 return "ASK WHERE { " + film(r) + " ns:film.film.directed_by ?x . ?x "
                        "ns:people.person.nationality " + country(r) + " . }";
               }});
  t.push_back({"ask", [=](Rng& r) {
                 return "ASK WHERE { ?x ns:film.film.starring " + person(r) +
                        " . ?x ns:film.film.genre " + genre(r) + " . }";
               }});
  return t;
}

}  // namespace

std::vector<ProgramCase> ToyPrograms(const TripleStore& kg, int count, std::uint64_t seed) {
  (void)kg;
  Rng rng(seed);
  auto templates = ProgramTemplates();
  std::set<std::string> seen;
  std::vector<ProgramCase> out;
  int attempts = 0;
  for (std::size_t i = 0; static_cast<int>(out.size()) < count; ++i) {
    QG_CHECK(++attempts < 100000, ErrorCode::kData, "toy program corpus cannot reach the requested size");
    const auto& [category, make] = templates[i % templates.size()];
    std::string text = Program(make(rng));
    if (!seen.insert(text).second) continue;
    out.push_back(ProgramCase{category, text});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random query graphs.

namespace {

const std::vector<std::string> kRandEntities = {"m.e1", "m.e2", "m.e3", "m.e4", "m.e5", "m.e6"};
const std::vector<std::string> kRandRelations = {"r.knows", "r.made", "r.located_in",
                                                 "r.part_of", "r.size", "r.when"};
const std::vector<std::string> kRandTypes = {"t.person", "t.place", "t.thing"};
const std::vector<std::string> kRandValues = {"\"3\"^^int", "\"2.5\"^^dec", "\"1999-01-01\"^^date",
                                              "\"abc\"^^str", "\"42\"^^int"};

class GraphMaker {
 public:
  explicit GraphMaker(Rng* rng) : rng_(*rng) {}

  QueryGraph Make() {
    g_ = Graph();
    int ans = g_.AddVertex(VertexClass::kAns, 0);
    int budget = rng_.Between(2, 12);
    bool aggregated = rng_.Chance(25);
    if (aggregated) {
      // Ans is the aggregate result of a Var carrying the pattern.
      int v = g_.AddVertex(VertexClass::kVar, 0);
      static const std::vector<std::string> kAggs = {"COUNT", "MAX", "MIN", "ASK"};
      g_.AddEdge(v, ans, EdgeClass::kAgg, rng_.Pick(kAggs));
      AttachRel(v, 0);
      Grow(0, budget, /*allow_ans=*/false);
    } else {
      AttachRel(ans, 0);
      Grow(0, budget, /*allow_ans=*/true);
    }
    int segments = rng_.Chance(40) ? rng_.Between(1, 2) : 0;
    for (int s = 1; s <= segments && g_.num_vertices() < kMaxVertices - 3; ++s) AddSegment(s);
    g_.copies = CopiesFromInstances(g_);
    return g_;
  }

 private:
  std::vector<int> Vars(int segment, bool allow_ans) const {
    std::vector<int> out;
    for (const Vertex& v : g_.vertices) {
      if (v.segment != segment) continue;
      if (IsAggTail(v.id)) continue;
      if (v.cls == VertexClass::kVar || (allow_ans && v.cls == VertexClass::kAns)) out.push_back(v.id);
    }
    return out;
  }

  bool IsAggTail(int v) const {
    for (const Edge& e : g_.edges) {
      if (e.cls == EdgeClass::kAgg && e.tail == v) return true;
    }
    return false;
  }

  bool HasModifier(int segment) const {
    for (const Edge& e : g_.edges) {
      if ((e.cls == EdgeClass::kOrd || e.cls == EdgeClass::kAgg) &&
          g_.vertices[e.tail].segment == segment) {
        return true;
      }
    }
    return false;
  }

  // Joins `v` to a fresh Var or Ent through a Rel edge of random direction.
  void AttachRel(int v, int segment) {
    bool var = rng_.Chance(50);
    int w = var ? g_.AddVertex(VertexClass::kVar, segment)
                : g_.AddVertex(VertexClass::kEnt, segment, rng_.Pick(kRandEntities));
    if (rng_.Chance(50)) {
      g_.AddEdge(v, w, EdgeClass::kRel, rng_.Pick(kRandRelations));
    } else {
      g_.AddEdge(w, v, EdgeClass::kRel, rng_.Pick(kRandRelations));
    }
  }

  void Grow(int segment, int budget, bool allow_ans) {
    while (budget-- > 0 && g_.num_vertices() < kMaxVertices - 1) {
      std::vector<int> anchors = Vars(segment, allow_ans);
      if (anchors.empty()) return;
      int a = rng_.Pick(anchors);
      bool anchor_is_var = g_.vertices[a].cls == VertexClass::kVar;
      switch (rng_.Below(6)) {
        case 0:
        case 1:
          AttachRel(a, segment);
          break;
        case 2:
          g_.AddEdge(a, g_.AddVertex(VertexClass::kType, segment, rng_.Pick(kRandTypes)),
                     EdgeClass::kRel, "rdf:type");
          break;
        case 3:
          if (anchor_is_var) {
            int val = g_.AddVertex(VertexClass::kVal, segment, rng_.Pick(kRandValues));
            const std::string& op = rng_.Pick(CmpInstances());
            if (rng_.Chance(50)) {
              g_.AddEdge(a, val, EdgeClass::kCmp, op);
            } else {
              g_.AddEdge(val, a, EdgeClass::kCmp, op);
            }
          }
          break;
        case 4:
          if (!HasModifier(segment)) {
            int val = g_.AddVertex(VertexClass::kVal, segment,
                                   "\"" + std::to_string(rng_.Between(1, 5)) + "\"^^int");
            g_.AddEdge(a, val, EdgeClass::kOrd, rng_.Pick(OrdInstances()));
          }
          break;
        default: {
          // A Var two hops away, so longer paths occur.
          int v = g_.AddVertex(VertexClass::kVar, segment);
          if (rng_.Chance(50)) {
            g_.AddEdge(a, v, EdgeClass::kRel, rng_.Pick(kRandRelations));
          } else {
            g_.AddEdge(v, a, EdgeClass::kRel, rng_.Pick(kRandRelations));
          }
          break;
        }
      }
    }
  }

  void AddSegment(int s) {
    std::vector<int> lower;
    for (int t = 0; t < s; ++t) {
      for (int v : Vars(t, false)) lower.push_back(v);
    }
    if (lower.empty()) return;
    int partner = rng_.Pick(lower);
    int link = g_.AddVertex(VertexClass::kVar, s);
    static const std::vector<std::string> kLinkOps = {"=", "<", ">", "!="};
    const std::string& op = rng_.Pick(kLinkOps);
    if (rng_.Chance(50)) {
      g_.AddEdge(partner, link, EdgeClass::kCmp, op);
    } else {
      g_.AddEdge(link, partner, EdgeClass::kCmp, op);
    }
    if (rng_.Chance(60)) {
      // Aggregate subquery: the link Var is the aggregate of a pattern Var.
      int v = g_.AddVertex(VertexClass::kVar, s);
      static const std::vector<std::string> kAggs = {"COUNT", "MAX", "MIN"};
      g_.AddEdge(v, link, EdgeClass::kAgg, rng_.Pick(kAggs));
      AttachRel(v, s);
    } else {
      AttachRel(link, s);
    }
    Grow(s, rng_.Between(0, 3), false);
  }

  Rng& rng_;
  Graph g_;
};

}  // namespace

std::vector<QueryGraph> RandomGraphs(int count, std::uint64_t seed) {
  Rng rng(seed);
  GraphMaker maker(&rng);
  std::vector<QueryGraph> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    QG_CHECK(++attempts < 1000000, ErrorCode::kData, "random graph generator rejects everything");
    QueryGraph g = maker.Make();
    if (g.num_vertices() > kMaxVertices || !Validate(g).ok()) continue;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace testing
}  // namespace qgforge
