from fractions import Fraction

from owlminer.index import build_index, predicate_support, prune_index
from owlminer.model import Weighting
from owlminer.terms import RDF_TYPE, Iri, Triple

DBO = "http://dbpedia.org/ontology/"
DBP = "http://dbpedia.org/property/"
DCT = "http://purl.org/dc/terms/"
RES = "http://dbpedia.org/resource/"

ILLUSTRATOR = Iri(DBO + "illustrator")
LANGUAGE = Iri(DBP + "language")
SUBJECT = Iri(DCT + "subject")

BOOKS = [
    Iri(RES + n)
    for n in (
        "The_Fellowship_of_the_Ring",
        "The_Hobbit",
        "The_Return_of_the_King",
        "The_Silmarillion",
        "The_Two_Towers",
    )
]


def u1_triples(books_graph):
    keep = set(BOOKS)
    return [t for t in books_graph.triples if t.subject in keep]


def test_build_and_lookup(books_graph):
    idx = build_index(u1_triples(books_graph))
    assert len(idx.predicates()) == 4
    assert SUBJECT in idx
    assert idx.triple_count() == 27
    hobbit = Iri(RES + "The_Hobbit")
    assert idx.subjects(SUBJECT, Iri(RES + "Category:1937_novels")) == {hobbit}
    assert idx.subject_union(ILLUSTRATOR) == {hobbit, Iri(RES + "The_Silmarillion")}


def test_object_counts_by_subject(books_graph):
    idx = build_index(u1_triples(books_graph))
    counts = idx.object_counts_by_subject(SUBJECT)
    assert counts == {
        Iri(RES + "The_Hobbit"): 1,
        Iri(RES + "The_Fellowship_of_the_Ring"): 3,
        Iri(RES + "The_Two_Towers"): 2,
        Iri(RES + "The_Return_of_the_King"): 2,
        Iri(RES + "The_Silmarillion"): 2,
    }


def test_duplicate_add_is_idempotent():
    s, p, o = Iri("http://x.org/s"), Iri("http://x.org/p"), Iri("http://x.org/o")
    idx = build_index([Triple(s, p, o), Triple(s, p, o)])
    assert idx.triple_count() == 1


def test_predicate_support(books_graph):
    idx = build_index(u1_triples(books_graph))
    w = Weighting.uniform(BOOKS)
    assert predicate_support(idx, ILLUSTRATOR, w) == Fraction(2, 5)
    assert predicate_support(idx, LANGUAGE, w) == Fraction(1)
    assert predicate_support(idx, SUBJECT, w) == Fraction(1)
    assert predicate_support(idx, RDF_TYPE, w) == Fraction(1)


def test_prune_drops_sparse_predicate(books_graph):
    idx = build_index(u1_triples(books_graph))
    w = Weighting.uniform(BOOKS)
    pruned = prune_index(idx, w, Fraction(4, 5))
    assert ILLUSTRATOR not in pruned
    assert {p.value for p in pruned.predicates()} == {
        LANGUAGE.value,
        SUBJECT.value,
        RDF_TYPE.value,
    }
    # at a threshold of 2/5 the predicate survives
    assert ILLUSTRATOR in prune_index(idx, w, Fraction(2, 5))


def test_prune_is_idempotent(books_graph):
    idx = build_index(u1_triples(books_graph))
    w = Weighting.uniform(BOOKS)
    once = prune_index(idx, w, Fraction(4, 5))
    twice = prune_index(once, w, Fraction(4, 5))
    assert {p.value for p in once.predicates()} == {p.value for p in twice.predicates()}
    assert once.triple_count() == twice.triple_count()
